"""Directory-tree persistence for projects, comments, and job records.

Layout under the data dir:

  jobs.json
  projects/<project-id>/
    project.json
    scene<ext>            original upload, bytes untouched
    index.bin             viewpoint index, when built
    comments.json
    results/<result-id>/  reference.png syn.png seg.png provenance.json

Everything is plain JSON and PNG so a review can be inspected with a file
browser. Writes go through a temp file + rename, and one lock guards all
mutation; readers get snapshots (copies), never live references.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

INDEX_ABSENT = "absent"
INDEX_BUILDING = "building"
INDEX_READY = "ready"

JOB_QUEUED = "queued"
JOB_RUNNING = "running"
JOB_DONE = "done"
JOB_FAILED = "failed"

_TRANSITIONS = {
    JOB_QUEUED: {JOB_RUNNING, JOB_FAILED},
    JOB_RUNNING: {JOB_DONE, JOB_FAILED},
    JOB_DONE: set(),
    JOB_FAILED: set(),
}


def new_id() -> str:
    return uuid.uuid4().hex[:12]


def _write_json(path: Path, payload) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    os.replace(tmp, path)


@dataclass
class Project:
    id: str
    scene_filename: str
    created_at: float
    index_status: str = INDEX_ABSENT
    index_progress: float = 0.0
    index_fingerprint: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "scene_filename": self.scene_filename,
            "created_at": self.created_at,
            "index": {
                "status": self.index_status,
                "progress": self.index_progress,
                "fingerprint": self.index_fingerprint,
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Project":
        index = data.get("index", {})
        return cls(
            id=data["id"],
            scene_filename=data["scene_filename"],
            created_at=data["created_at"],
            index_status=index.get("status", INDEX_ABSENT),
            index_progress=index.get("progress", 0.0),
            index_fingerprint=index.get("fingerprint", ""),
        )


@dataclass
class Comment:
    id: str
    project_id: str
    body: str
    anchor: Optional[dict] = None
    attachments: list[str] = field(default_factory=list)
    revision: int = 1
    created_at: float = 0.0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "project_id": self.project_id,
            "body": self.body,
            "anchor": self.anchor,
            "attachments": list(self.attachments),
            "revision": self.revision,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Comment":
        return cls(
            id=data["id"],
            project_id=data["project_id"],
            body=data["body"],
            anchor=data.get("anchor"),
            attachments=list(data.get("attachments", [])),
            revision=data.get("revision", 1),
            created_at=data.get("created_at", 0.0),
        )


@dataclass
class JobRecord:
    id: str
    kind: str  # "index-build" | "modifier"
    project_id: str
    comment_id: Optional[str] = None
    state: str = JOB_QUEUED
    reason: str = ""
    progress: float = 0.0
    result_id: Optional[str] = None
    submitted_at: float = 0.0
    started_at: Optional[float] = None
    finished_at: Optional[float] = None

    def transition(self, state: str, reason: str = "") -> None:
        if state not in _TRANSITIONS[self.state]:
            raise ValueError(f"illegal job transition {self.state} -> {state}")
        self.state = state
        self.reason = reason
        now = time.time()
        if state == JOB_RUNNING:
            self.started_at = now
        else:
            self.finished_at = now

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "project_id": self.project_id,
            "comment_id": self.comment_id,
            "state": self.state,
            "reason": self.reason,
            "progress": self.progress,
            "result_id": self.result_id,
            "submitted_at": self.submitted_at,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "JobRecord":
        return cls(**data)


class Store:
    """All on-disk state, guarded by one lock. Methods return copies."""

    def __init__(self, data_dir):
        self.root = Path(data_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "projects").mkdir(exist_ok=True)
        self._lock = threading.RLock()
        self._projects: dict[str, Project] = {}
        self._comments: dict[str, Comment] = {}
        self._jobs: dict[str, JobRecord] = {}
        self._load()

    # -- loading and recovery ------------------------------------------------

    def _load(self) -> None:
        jobs_file = self.root / "jobs.json"
        if jobs_file.exists():
            for payload in json.loads(jobs_file.read_text()).values():
                job = JobRecord.from_dict(payload)
                self._jobs[job.id] = job
        for pdir in sorted((self.root / "projects").iterdir()):
            meta = pdir / "project.json"
            if not meta.is_file():
                continue
            project = Project.from_dict(json.loads(meta.read_text()))
            self._projects[project.id] = project
            comments_file = pdir / "comments.json"
            if comments_file.exists():
                for payload in json.loads(comments_file.read_text()):
                    comment = Comment.from_dict(payload)
                    self._comments[comment.id] = comment

    def recover(self) -> list[str]:
        """Mark jobs that were alive at shutdown as failed("interrupted")."""
        interrupted = []
        with self._lock:
            for job in self._jobs.values():
                if job.state in (JOB_QUEUED, JOB_RUNNING):
                    job.transition(JOB_FAILED, "interrupted")
                    interrupted.append(job.id)
            for project in self._projects.values():
                if project.index_status == INDEX_BUILDING:
                    project.index_status = INDEX_ABSENT
                    project.index_progress = 0.0
                    self._flush_project(project)
            if interrupted:
                self._flush_jobs()
        return interrupted

    # -- path helpers ----------------------------------------------------------

    def project_dir(self, project_id: str) -> Path:
        return self.root / "projects" / project_id

    def scene_path(self, project_id: str) -> Path:
        project = self.get_project(project_id)
        return self.project_dir(project_id) / project.scene_filename

    def index_path(self, project_id: str) -> Path:
        return self.project_dir(project_id) / "index.bin"

    def result_dir(self, project_id: str, result_id: str) -> Path:
        return self.project_dir(project_id) / "results" / result_id

    # -- flushing ---------------------------------------------------------------

    def _flush_project(self, project: Project) -> None:
        _write_json(self.project_dir(project.id) / "project.json", project.to_dict())

    def _flush_comments(self, project_id: str) -> None:
        rows = [
            c.to_dict()
            for c in sorted(self._comments.values(), key=lambda c: (c.created_at, c.id))
            if c.project_id == project_id
        ]
        _write_json(self.project_dir(project_id) / "comments.json", rows)

    def _flush_jobs(self) -> None:
        _write_json(self.root / "jobs.json", {j.id: j.to_dict() for j in self._jobs.values()})

    # -- projects ---------------------------------------------------------------

    def create_project(self, scene_filename: str, scene_bytes: bytes) -> Project:
        with self._lock:
            project = Project(
                id=new_id(), scene_filename=scene_filename, created_at=time.time()
            )
            pdir = self.project_dir(project.id)
            (pdir / "results").mkdir(parents=True)
            (pdir / scene_filename).write_bytes(scene_bytes)
            self._projects[project.id] = project
            self._flush_project(project)
            self._flush_comments(project.id)
            return Project.from_dict(project.to_dict())

    def get_project(self, project_id: str) -> Project:
        with self._lock:
            if project_id not in self._projects:
                raise KeyError(f"unknown project {project_id}")
            return Project.from_dict(self._projects[project_id].to_dict())

    def list_projects(self) -> list[Project]:
        with self._lock:
            rows = sorted(self._projects.values(), key=lambda p: (p.created_at, p.id))
            return [Project.from_dict(p.to_dict()) for p in rows]

    def set_index_state(
        self,
        project_id: str,
        status: str,
        progress: float = 0.0,
        fingerprint: str = "",
    ) -> None:
        with self._lock:
            project = self._projects[project_id]
            project.index_status = status
            project.index_progress = progress
            project.index_fingerprint = fingerprint
            self._flush_project(project)

    # -- comments ---------------------------------------------------------------

    def create_comment(self, project_id: str, body: str) -> Comment:
        with self._lock:
            self.get_project(project_id)
            comment = Comment(
                id=new_id(), project_id=project_id, body=body, created_at=time.time()
            )
            self._comments[comment.id] = comment
            self._flush_comments(project_id)
            return Comment.from_dict(comment.to_dict())

    def get_comment(self, comment_id: str) -> Comment:
        with self._lock:
            if comment_id not in self._comments:
                raise KeyError(f"unknown comment {comment_id}")
            return Comment.from_dict(self._comments[comment_id].to_dict())

    def list_comments(self, project_id: str) -> list[Comment]:
        with self._lock:
            rows = [c for c in self._comments.values() if c.project_id == project_id]
            rows.sort(key=lambda c: (c.created_at, c.id))
            return [Comment.from_dict(c.to_dict()) for c in rows]

    def set_anchor(self, comment_id: str, anchor: dict) -> Comment:
        with self._lock:
            comment = self._comments[comment_id]
            comment.anchor = dict(anchor)
            comment.revision += 1
            self._flush_comments(comment.project_id)
            return Comment.from_dict(comment.to_dict())

    def attach_result(self, comment_id: str, result_id: str) -> Comment:
        with self._lock:
            comment = self._comments[comment_id]
            comment.attachments.append(result_id)
            comment.revision += 1
            self._flush_comments(comment.project_id)
            return Comment.from_dict(comment.to_dict())

    # -- jobs --------------------------------------------------------------------

    def create_job(self, kind: str, project_id: str, comment_id: Optional[str] = None) -> JobRecord:
        with self._lock:
            job = JobRecord(
                id=new_id(),
                kind=kind,
                project_id=project_id,
                comment_id=comment_id,
                submitted_at=time.time(),
            )
            self._jobs[job.id] = job
            self._flush_jobs()
            return JobRecord.from_dict(job.to_dict())

    def get_job(self, job_id: str) -> JobRecord:
        with self._lock:
            if job_id not in self._jobs:
                raise KeyError(f"unknown job {job_id}")
            return JobRecord.from_dict(self._jobs[job_id].to_dict())

    def update_job(self, job_id: str, **changes) -> JobRecord:
        """Apply a state transition and/or field updates, then persist."""
        with self._lock:
            job = self._jobs[job_id]
            state = changes.pop("state", None)
            if state is not None:
                job.transition(state, changes.pop("reason", ""))
            for key, value in changes.items():
                setattr(job, key, value)
            self._flush_jobs()
            return JobRecord.from_dict(job.to_dict())

    def active_jobs(self) -> list[JobRecord]:
        with self._lock:
            return [
                JobRecord.from_dict(j.to_dict())
                for j in self._jobs.values()
                if j.state in (JOB_QUEUED, JOB_RUNNING)
            ]
