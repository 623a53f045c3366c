"""HTTP review service: projects, anchored comments, suggestions, modifier jobs.

ReviewService holds the domain logic; create_app wraps it in a FastAPI app
under /api/v1. Nothing here blocks a request on model inference: index builds
and modifier runs go through the job queue, and suggestion queries only touch
the text encoder (milliseconds under mocks, and bounded remotely).
"""

from __future__ import annotations

import base64
import io
import json
import threading
import zipfile
from contextlib import contextmanager
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, File, HTTPException, Response, UploadFile
from pydantic import BaseModel, ConfigDict

from .. import __version__
from ..adapters import AdapterSet, build_adapters, resolve_endpoints
from ..compositor import RESULT_FILES, ModifierSession, load_result, save_result
from ..errors import IndexNotReadyError, JobConflictError, NoObjectError, SceneLoadError
from ..raster import rgb_to_png
from ..scene import RendererConfig, SceneModel, Viewpoint, load_scene, orbit_to_pose, render_rgb
from ..viewpoints import (
    SamplingConfig,
    ViewpointIndex,
    build_index,
    load_index,
    save_index,
    suggest_views,
)
from .config import ServiceConfig
from .jobs import JobQueue
from .modify import MODIFIER_KINDS, execute_plan, plan_modifier
from .store import (
    INDEX_ABSENT,
    INDEX_BUILDING,
    INDEX_READY,
    Comment,
    JobRecord,
    Store,
    new_id,
)

_RESULT_MEDIA = {
    "reference.png": "image/png",
    "syn.png": "image/png",
    "seg.png": "image/png",
    "provenance.json": "application/json",
}


class ReviewService:
    """Domain operations behind the HTTP API; also used directly by the CLI."""

    def __init__(
        self,
        config: Optional[ServiceConfig] = None,
        *,
        adapters: Optional[AdapterSet] = None,
        transport=None,
    ):
        self.config = config or ServiceConfig()
        self.store = Store(self.config.data_dir)
        self.interrupted_jobs = self.store.recover()
        if adapters is None:
            adapters = build_adapters(
                resolve_endpoints(self.config.endpoints), transport=transport
            )
        self.adapters = adapters
        self.queue = JobQueue(self.store)
        self._lock = threading.Lock()
        self._scenes: dict[str, SceneModel] = {}
        self._indexes: dict[str, ViewpointIndex] = {}
        self._suggest_seq: dict[str, int] = {}

    def close(self) -> None:
        self.queue.shutdown(wait=True)

    # -- caches -----------------------------------------------------------------

    def _scene(self, project_id: str) -> SceneModel:
        with self._lock:
            cached = self._scenes.get(project_id)
            if cached is not None:
                return cached
            scene = load_scene(self.store.scene_path(project_id))
            self._scenes[project_id] = scene
            return scene

    def _ready_index(self, project_id: str) -> ViewpointIndex:
        project = self.store.get_project(project_id)
        if project.index_status != INDEX_READY:
            raise IndexNotReadyError(
                f"viewpoint index for project {project_id} is {project.index_status}"
            )
        scene = self._scene(project_id)
        with self._lock:
            index = self._indexes.get(project_id)
            if index is None or index.fingerprint != scene.fingerprint:
                index = load_index(self.store.index_path(project_id))
                self._indexes[project_id] = index
        if index.fingerprint != scene.fingerprint:
            raise IndexNotReadyError(
                f"index for project {project_id} was built for a different scene"
            )
        return index

    # -- projects ---------------------------------------------------------------

    def create_project(self, filename: str, scene_bytes: bytes):
        name = Path(filename or "scene.glb").name or "scene.glb"
        with self._lock:
            staged = self.store.root / f".upload-{new_id()}{Path(name).suffix}"
        staged.write_bytes(scene_bytes)
        try:
            scene = load_scene(staged)  # SceneLoadError -> 422 before anything persists
        finally:
            staged.unlink(missing_ok=True)
        project = self.store.create_project(name, scene_bytes)
        with self._lock:
            self._scenes[project.id] = scene
        return project

    def start_index_build(self, project_id: str, sampling: SamplingConfig) -> JobRecord:
        self.store.get_project(project_id)

        def work(job_id: str) -> None:
            self.store.set_index_state(project_id, INDEX_BUILDING, 0.0)
            last = [-1.0]

            def progress(done: int, total: int) -> None:
                ratio = done / total
                if ratio - last[0] >= 0.01 or done == total:
                    last[0] = ratio
                    self.store.update_job(job_id, progress=ratio)
                    self.store.set_index_state(project_id, INDEX_BUILDING, ratio)

            try:
                scene = self._scene(project_id)
                index = build_index(
                    scene,
                    self.adapters,
                    sampling,
                    render_config=self.config.renderer_config(),
                    progress=progress,
                )
                save_index(index, self.store.index_path(project_id))
            except Exception:
                self.store.set_index_state(project_id, INDEX_ABSENT, 0.0)
                raise
            with self._lock:
                self._indexes[project_id] = index
            self.store.set_index_state(project_id, INDEX_READY, 1.0, index.fingerprint)

        job_id = self.queue.submit(
            "index-build", ("project", project_id), work, project_id=project_id
        )
        return self.store.get_job(job_id)

    # -- suggestions --------------------------------------------------------------

    def suggest_for_comment(self, comment_id: str, text: str, k: Optional[int] = None):
        """Top-k viewpoint suggestions for a draft.

        Returns (suggestions, superseded). superseded flips to True when a
        newer request for the same comment arrived while this one computed;
        clients drop such responses so only the newest draft's answer lands.
        """
        comment = self.store.get_comment(comment_id)
        if not text or not text.strip():
            raise ValueError("draft text is empty")
        if k is not None and k < 1:
            raise ValueError("k must be at least 1")
        with self._lock:
            seq = self._suggest_seq.get(comment_id, 0) + 1
            self._suggest_seq[comment_id] = seq
        index = self._ready_index(comment.project_id)
        scene = self._scene(comment.project_id)
        suggestions = suggest_views(
            index, text, self.adapters, k=k or self.config.k, scene=scene
        )
        with self._lock:
            superseded = self._suggest_seq.get(comment_id, 0) != seq
        return suggestions, superseded

    # -- modifiers ----------------------------------------------------------------

    def submit_modifier(self, comment_id: str, payload: dict) -> JobRecord:
        """Validate a modifier request eagerly, then queue the pipeline run.

        Payload shape by kind (all viewport coordinates):
          text-scribble: strokes?, prompt?, seed?, steps?, strengths?
          grab-n-go:     box, intent (keep|remove), staging?, prior
          text-paint:    strokes, prompt?, prior?, seed?, steps?, strengths?
        """
        comment = self.store.get_comment(comment_id)
        if comment.anchor is None:
            raise ValueError("comment has no anchored viewpoint; anchor it first")
        viewpoint = Viewpoint.from_dict(comment.anchor)
        project_id = comment.project_id
        plan = plan_modifier(
            payload,
            width=self.config.viewport["width"],
            height=self.config.viewport["height"],
            default_prompt=comment.body,
            steps=self.config.steps,
            strengths=self.config.strengths,
        )
        if plan.prior is not None and plan.prior not in comment.attachments:
            raise ValueError(
                f"result {plan.prior} is not attached to comment {comment.id}"
            )

        def work(job_id: str) -> None:
            scene = self._scene(project_id)
            session = ModifierSession(
                scene,
                viewpoint,
                self.adapters,
                self.config.renderer_config(),
                r_th=self.config.r_th,
                sample_stride=self.config.stride,
            )
            prior = (
                load_result(self.store.result_dir(project_id, plan.prior))
                if plan.prior
                else None
            )
            result = execute_plan(session, plan, prior)
            save_result(result, self.store.result_dir(project_id, job_id))
            self.store.update_job(job_id, result_id=job_id)
            self.store.attach_result(comment_id, job_id)

        job_id = self.queue.submit(
            "modifier",
            ("comment", comment_id),
            work,
            project_id=project_id,
            comment_id=comment_id,
        )
        return self.store.get_job(job_id)

    # -- rendering ----------------------------------------------------------------

    def render_view(
        self,
        project_id: str,
        viewpoint: Viewpoint,
        width: Optional[int] = None,
        height: Optional[int] = None,
    ) -> bytes:
        scene = self._scene(project_id)
        base = self.config.renderer_config()
        config = RendererConfig(
            width=width or base.width,
            height=height or base.height,
            fov_degrees=base.fov_degrees,
        )
        pose = orbit_to_pose(viewpoint, scene, config)
        return rgb_to_png(render_rgb(scene, pose))

    # -- memo export / import --------------------------------------------------------

    def export_memo(self, comment_id: str) -> bytes:
        """Deterministic archive: same comment state -> identical bytes.

        Attachment paths are index-based, so a re-import (which assigns fresh
        result ids) re-exports to the same bytes.
        """
        comment = self.store.get_comment(comment_id)
        entries = [("comment.html", comment.body.encode("utf-8"))]
        if comment.anchor is not None:
            anchor = json.dumps(comment.anchor, indent=2, sort_keys=True) + "\n"
            entries.append(("anchor.json", anchor.encode("utf-8")))
        for i, result_id in enumerate(comment.attachments):
            result_dir = self.store.result_dir(comment.project_id, result_id)
            for name in RESULT_FILES:
                entries.append((f"attachments/{i:04d}/{name}", (result_dir / name).read_bytes()))
        entries.sort(key=lambda entry: entry[0])

        buffer = io.BytesIO()
        with zipfile.ZipFile(buffer, "w", zipfile.ZIP_STORED) as archive:
            for name, payload in entries:
                info = zipfile.ZipInfo(name, date_time=(1980, 1, 1, 0, 0, 0))
                archive.writestr(info, payload)
        return buffer.getvalue()

    def import_memo(self, project_id: str, data: bytes) -> Comment:
        self.store.get_project(project_id)
        try:
            archive = zipfile.ZipFile(io.BytesIO(data))
        except zipfile.BadZipFile as exc:
            raise ValueError(f"not a memo archive: {exc}") from None
        names = set(archive.namelist())
        if "comment.html" not in names:
            raise ValueError("memo archive has no comment.html")

        groups: dict[str, set[str]] = {}
        for name in names:
            parts = name.split("/")
            if len(parts) == 3 and parts[0] == "attachments":
                groups.setdefault(parts[1], set()).add(parts[2])
        for key, files in groups.items():
            missing = set(RESULT_FILES) - files
            if missing:
                raise ValueError(
                    f"attachment {key} is missing {sorted(missing)[0]}"
                )

        body = archive.read("comment.html").decode("utf-8")
        anchor = None
        if "anchor.json" in names:
            anchor = Viewpoint.from_dict(json.loads(archive.read("anchor.json")))

        comment = self.store.create_comment(project_id, body)
        if anchor is not None:
            self.store.set_anchor(comment.id, anchor.to_dict())
        for key in sorted(groups):
            result_id = new_id()
            result_dir = self.store.result_dir(project_id, result_id)
            result_dir.mkdir(parents=True)
            for name in RESULT_FILES:
                (result_dir / name).write_bytes(archive.read(f"attachments/{key}/{name}"))
            self.store.attach_result(comment.id, result_id)
        return self.store.get_comment(comment.id)


# -- HTTP layer ---------------------------------------------------------------------


def _suggestion_payload(suggestion) -> dict:
    payload = suggestion.to_dict()
    thumbnail = suggestion.thumbnail
    payload["thumbnail"] = (
        base64.b64encode(rgb_to_png(thumbnail)).decode("ascii")
        if thumbnail is not None
        else None
    )
    return payload


@contextmanager
def _api_errors():
    """Translate domain errors into stable HTTP error shapes."""
    try:
        yield
    except JobConflictError as exc:
        raise HTTPException(409, {"error": "conflict", "message": str(exc)}) from None
    except IndexNotReadyError as exc:
        raise HTTPException(409, {"error": "index_not_ready", "message": str(exc)}) from None
    except SceneLoadError as exc:
        raise HTTPException(422, {"error": "invalid_scene", "message": str(exc)}) from None
    except NoObjectError as exc:
        raise HTTPException(422, {"error": "no_object", "message": str(exc)}) from None
    except KeyError as exc:
        message = exc.args[0] if exc.args else str(exc)
        raise HTTPException(404, {"error": "not_found", "message": str(message)}) from None
    except ValueError as exc:
        raise HTTPException(422, {"error": "invalid", "message": str(exc)}) from None


class _Body(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IndexRequest(_Body):
    bins: int = 5
    step: float = 30.0
    radii: list[float] = [0.5, 1.0, 1.5]


class CommentRequest(_Body):
    body: str


class AnchorRequest(_Body):
    alpha: float
    beta: float
    r: float
    target: list[float]


class SuggestRequest(_Body):
    text: str
    k: Optional[int] = None


class ModifierRequest(_Body):
    kind: str
    prompt: Optional[str] = None
    strokes: Optional[dict] = None
    box: Optional[list[float]] = None
    intent: str = "keep"
    staging: bool = False
    prior: Optional[str] = None
    seed: Optional[int] = None
    steps: Optional[int] = None
    strengths: Optional[dict[str, float]] = None


class RenderRequest(_Body):
    viewpoint: AnchorRequest
    width: Optional[int] = None
    height: Optional[int] = None


def _to_viewpoint(anchor: AnchorRequest) -> Viewpoint:
    return Viewpoint(anchor.alpha, anchor.beta, anchor.r, tuple(anchor.target))


def create_app(
    config: Optional[ServiceConfig] = None,
    *,
    service: Optional[ReviewService] = None,
    ui_dir=None,
) -> FastAPI:
    svc = service or ReviewService(config)

    app = FastAPI(title="memovis", version=__version__)
    app.state.service = svc

    @app.get("/api/v1/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/api/v1/projects", status_code=201)
    async def create_project(scene: UploadFile = File(...)):
        data = await scene.read()
        with _api_errors():
            project = svc.create_project(scene.filename or "scene.glb", data)
        return project.to_dict()

    @app.get("/api/v1/projects")
    def list_projects():
        return [p.to_dict() for p in svc.store.list_projects()]

    @app.get("/api/v1/projects/{project_id}")
    def get_project(project_id: str):
        with _api_errors():
            return svc.store.get_project(project_id).to_dict()

    @app.post("/api/v1/projects/{project_id}/index", status_code=202)
    def start_index(project_id: str, body: IndexRequest = IndexRequest()):
        with _api_errors():
            sampling = SamplingConfig(body.bins, body.step, tuple(body.radii))
            job = svc.start_index_build(project_id, sampling)
        return job.to_dict()

    @app.get("/api/v1/jobs/{job_id}")
    def get_job(job_id: str):
        with _api_errors():
            return svc.store.get_job(job_id).to_dict()

    @app.post("/api/v1/projects/{project_id}/comments", status_code=201)
    def create_comment(project_id: str, body: CommentRequest):
        with _api_errors():
            return svc.store.create_comment(project_id, body.body).to_dict()

    @app.get("/api/v1/projects/{project_id}/comments")
    def list_comments(project_id: str):
        with _api_errors():
            svc.store.get_project(project_id)
            return [c.to_dict() for c in svc.store.list_comments(project_id)]

    @app.get("/api/v1/comments/{comment_id}")
    def get_comment(comment_id: str):
        with _api_errors():
            return svc.store.get_comment(comment_id).to_dict()

    @app.put("/api/v1/comments/{comment_id}/anchor")
    def set_anchor(comment_id: str, body: AnchorRequest):
        with _api_errors():
            svc.store.get_comment(comment_id)
            viewpoint = _to_viewpoint(body)
            return svc.store.set_anchor(comment_id, viewpoint.to_dict()).to_dict()

    @app.post("/api/v1/comments/{comment_id}/suggest")
    def suggest(comment_id: str, body: SuggestRequest):
        with _api_errors():
            suggestions, superseded = svc.suggest_for_comment(comment_id, body.text, body.k)
        return {
            "superseded": superseded,
            "suggestions": [_suggestion_payload(s) for s in suggestions],
        }

    @app.post("/api/v1/comments/{comment_id}/modifiers", status_code=202)
    def submit_modifier(comment_id: str, body: ModifierRequest):
        payload = body.model_dump(exclude_none=True)
        with _api_errors():
            return svc.submit_modifier(comment_id, payload).to_dict()

    @app.get("/api/v1/comments/{comment_id}/export")
    def export_memo(comment_id: str):
        with _api_errors():
            data = svc.export_memo(comment_id)
        comment_tag = comment_id
        return Response(
            data,
            media_type="application/zip",
            headers={
                "Content-Disposition": f'attachment; filename="memo-{comment_tag}.zip"'
            },
        )

    @app.post("/api/v1/projects/{project_id}/import", status_code=201)
    async def import_memo(project_id: str, memo: UploadFile = File(...)):
        data = await memo.read()
        with _api_errors():
            return svc.import_memo(project_id, data).to_dict()

    @app.get("/api/v1/comments/{comment_id}/results/{result_id}/{name}")
    def get_result_file(comment_id: str, result_id: str, name: str):
        with _api_errors():
            comment = svc.store.get_comment(comment_id)
            if result_id not in comment.attachments:
                raise KeyError(f"result {result_id} is not attached to comment {comment_id}")
            if name not in RESULT_FILES:
                raise KeyError(f"unknown result file {name}")
            path = svc.store.result_dir(comment.project_id, result_id) / name
            data = path.read_bytes()
        return Response(data, media_type=_RESULT_MEDIA[name])

    @app.post("/api/v1/projects/{project_id}/render")
    def render_view(project_id: str, body: RenderRequest):
        with _api_errors():
            viewpoint = _to_viewpoint(body.viewpoint)
            png = svc.render_view(project_id, viewpoint, body.width, body.height)
        return Response(png, media_type="image/png")

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
