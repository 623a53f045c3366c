"""Background job queue: two workers, one job per slot at a time.

A slot names the resource a job would contend on, e.g. ("project", id) for
index builds or ("comment", id) for modifier runs. Submitting while the slot
is taken raises JobConflictError instead of queueing a duplicate; callers
surface that as HTTP 409.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Hashable

from ..errors import JobConflictError
from .store import JOB_DONE, JOB_FAILED, JOB_RUNNING, Store

Slot = tuple[str, Hashable]


class JobQueue:
    def __init__(self, store: Store, workers: int = 2):
        self._store = store
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._lock = threading.Lock()
        self._slots: dict[Slot, str] = {}  # slot -> job id

    def submit(self, kind: str, slot: Slot, work: Callable[[str], None], *,
               project_id: str, comment_id: str | None = None) -> str:
        """Queue `work(job_id)`; returns the job id.

        The slot is claimed before the job record exists so two racing
        submissions cannot both pass the check.
        """
        with self._lock:
            if slot in self._slots:
                raise JobConflictError(
                    f"{kind} already in flight for {slot[0]} {slot[1]} "
                    f"(job {self._slots[slot]})"
                )
            job = self._store.create_job(kind, project_id, comment_id)
            self._slots[slot] = job.id
        self._pool.submit(self._run, job.id, slot, work)
        return job.id

    def _run(self, job_id: str, slot: Slot, work: Callable[[str], None]) -> None:
        try:
            self._store.update_job(job_id, state=JOB_RUNNING)
            work(job_id)
            self._store.update_job(job_id, state=JOB_DONE, progress=1.0)
        except Exception as exc:  # noqa: BLE001 - failures become job state
            try:
                self._store.update_job(job_id, state=JOB_FAILED, reason=str(exc))
            except Exception:
                pass
        finally:
            with self._lock:
                if self._slots.get(slot) == job_id:
                    del self._slots[slot]

    def shutdown(self, wait: bool = True) -> None:
        self._pool.shutdown(wait=wait)
