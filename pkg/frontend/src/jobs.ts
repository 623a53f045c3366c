/**
 * Async job polling. The explorer and editor stay interactive while a
 * build or modifier runs; callers just await the returned promise.
 */

import type { JobJson } from "./api.js";

export interface JobApi {
  getJob(id: string): Promise<JobJson>;
}

export class JobFailedError extends Error {
  constructor(public job: JobJson) {
    super(job.reason ?? "job failed");
    this.name = "JobFailedError";
  }
}

export interface PollOptions {
  intervalMs?: number;
  onProgress?: (job: JobJson) => void;
}

function delay(ms: number): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, ms));
}

/** Resolve when the job is done; reject with JobFailedError when it fails. */
export async function pollJob(api: JobApi, jobId: string, options: PollOptions = {}): Promise<JobJson> {
  const interval = options.intervalMs ?? 300;
  for (;;) {
    const job = await api.getJob(jobId);
    options.onProgress?.(job);
    if (job.state === "done") return job;
    if (job.state === "failed") throw new JobFailedError(job);
    await delay(interval);
  }
}
