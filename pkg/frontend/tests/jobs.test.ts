import { describe, expect, it } from "vitest";

import type { JobJson, JobState } from "../src/api.js";
import { JobFailedError, pollJob } from "../src/jobs.js";

function job(state: JobState, progress: number, reason: string | null = null): JobJson {
  return {
    id: "j1",
    kind: "modifier",
    project_id: "p1",
    comment_id: "c1",
    state,
    reason,
    progress,
    result_id: state === "done" ? "r1" : null,
    submitted_at: "2026-01-01T00:00:00Z",
    started_at: null,
    finished_at: null,
  };
}

/** Serves a fixed sequence of job snapshots, then repeats the last one. */
function scripted(states: JobJson[]) {
  let calls = 0;
  return {
    get calls() {
      return calls;
    },
    getJob: async () => states[Math.min(calls++, states.length - 1)]!,
  };
}

describe("job polling", () => {
  it("polls until done and reports every snapshot", async () => {
    const api = scripted([job("queued", 0), job("running", 0.4), job("running", 0.9), job("done", 1)]);
    const seen: string[] = [];
    const finished = await pollJob(api, "j1", {
      intervalMs: 1,
      onProgress: (j) => seen.push(`${j.state}:${j.progress}`),
    });
    expect(finished.state).toBe("done");
    expect(finished.result_id).toBe("r1");
    expect(seen).toEqual(["queued:0", "running:0.4", "running:0.9", "done:1"]);
    expect(api.calls).toBe(4);
  });

  it("rejects with the stage-carrying reason on failure", async () => {
    const api = scripted([job("running", 0.2), job("failed", 0.2, "stage 'edges': operator returned NaN")]);
    const error = await pollJob(api, "j1", { intervalMs: 1 }).catch((e: unknown) => e);
    expect(error).toBeInstanceOf(JobFailedError);
    const failure = error as JobFailedError;
    expect(failure.message).toContain("stage 'edges'");
    expect(failure.job.state).toBe("failed");
  });

  it("falls back to a generic message when the job has no reason", async () => {
    const api = scripted([job("failed", 0)]);
    const error = await pollJob(api, "j1", { intervalMs: 1 }).catch((e: unknown) => e);
    expect((error as Error).message).toBe("job failed");
  });

  it("resolves immediately when the job is already done", async () => {
    const api = scripted([job("done", 1)]);
    await pollJob(api, "j1", { intervalMs: 1 });
    expect(api.calls).toBe(1);
  });
});
