"""Command-line driver: index building, suggestions, modifier runs, serving.

Every command speaks JSON lines on stdout so output pipes cleanly into jq or
a test harness. Errors are a single `error: ...` line on stderr with exit
code 1 for bad input and 2 for runtime failures; 0 means success.

Each command rides the same code path as the HTTP service: build_index /
suggest_views / plan_modifier + execute_plan, so CLI results and service
results cannot drift apart.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .adapters import build_adapters, resolve_endpoints
from .compositor import RESULT_FILES, ModifierSession, load_result, save_result
from .errors import MemovisError, SceneLoadError
from .scene import RendererConfig, Viewpoint, load_scene
from .service import ServiceConfig
from .service.modify import MODIFIER_KINDS, execute_plan, plan_modifier
from .viewpoints import SamplingConfig, build_index, load_index, save_index, suggest_views

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2


class CliUsageError(Exception):
    """Bad flags or flag values; exits with the validation code."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage problems by default; route through our codes
    def error(self, message):
        raise CliUsageError(message)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _adapters(mock: bool):
    # --mock ignores MEMOVIS_ENDPOINT_* overrides; default honors them
    return build_adapters(resolve_endpoints(env={} if mock else None))


def _load_viewpoint(raw: str | None) -> Viewpoint:
    if raw is None:
        raise CliUsageError("modifier runs need an anchor viewpoint (--viewpoint JSON)")
    try:
        return Viewpoint.from_dict(json.loads(raw))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CliUsageError(f"--viewpoint is not a viewpoint JSON object: {exc}") from None


def _load_index_file(path):
    try:
        return load_index(path)
    except MemovisError as exc:  # a bad file is bad input, not a runtime fault
        raise CliUsageError(str(exc)) from None


def cmd_index(args) -> int:
    sampling = SamplingConfig(args.bins, args.step, tuple(args.radii))
    scene = load_scene(args.scene)
    adapters = _adapters(args.mock)
    render_config = RendererConfig(width=args.size, height=args.size)
    started = time.perf_counter()
    index = build_index(scene, adapters, sampling, render_config=render_config)
    save_index(index, args.out)
    _emit(
        {
            "rows": index.rows,
            "dim": index.dim,
            "seconds": round(time.perf_counter() - started, 3),
            "out": str(args.out),
        }
    )
    return EXIT_OK


def cmd_suggest(args) -> int:
    if not args.text.strip():
        raise CliUsageError("--text must be non-empty")
    if args.k < 1:
        raise CliUsageError("--k must be at least 1")
    index = _load_index_file(args.index)
    adapters = _adapters(args.mock)
    for suggestion in suggest_views(index, args.text, adapters, k=args.k):
        _emit(suggestion.to_dict())
    return EXIT_OK


def cmd_modify(args) -> int:
    viewpoint = _load_viewpoint(args.viewpoint)
    payload: dict = {"kind": args.kind, "prompt": args.comment_text, "seed": args.seed}
    if args.strokes is not None:
        try:
            payload["strokes"] = json.loads(Path(args.strokes).read_text())
        except OSError as exc:
            raise CliUsageError(f"cannot read strokes file: {exc}") from None
        except json.JSONDecodeError as exc:
            raise CliUsageError(f"strokes file is not valid JSON: {exc}") from None
    if args.box is not None:
        payload["box"] = args.box
        payload["intent"] = args.intent
        payload["staging"] = args.staging
    if args.prior is not None:
        payload["prior"] = str(args.prior)

    defaults = ServiceConfig()
    plan = plan_modifier(
        payload,
        width=args.width,
        height=args.height,
        default_prompt=args.comment_text or "",
        steps=defaults.steps,
        strengths=defaults.strengths,
    )
    scene = load_scene(args.scene)
    if args.index is not None:
        index = _load_index_file(args.index)
        if index.fingerprint != scene.fingerprint:
            raise CliUsageError(
                f"index {args.index} was built for a different scene"
            )
    session = ModifierSession(
        scene,
        viewpoint,
        _adapters(args.mock),
        RendererConfig(width=args.width, height=args.height),
    )
    prior = load_result(plan.prior) if plan.prior else None
    result = execute_plan(session, plan, prior)
    save_result(result, args.out)
    _emit(
        {
            "out": str(args.out),
            "files": list(RESULT_FILES),
            "modifier": result.provenance["modifier"],
            "seed": result.provenance["seed"],
            "removed_meshes": sorted(result.removed_meshes),
        }
    )
    return EXIT_OK


def cmd_serve(args) -> int:
    config = ServiceConfig.from_file(args.config) if args.config else ServiceConfig()
    if args.host is not None:
        config.host = args.host
    if args.port is not None:
        config.port = args.port

    import uvicorn

    from .service import ReviewService, create_app

    service = ReviewService(config)
    app = create_app(service=service, ui_dir=args.ui_dir)
    try:
        uvicorn.run(app, host=config.host, port=config.port, log_level="warning")
    finally:
        service.close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="memovis-cli", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    index = sub.add_parser("index", help="render the viewpoint grid and write an index file")
    index.add_argument("scene", help="glTF binary scene file")
    index.add_argument("out", help="index file to write")
    index.add_argument("--bins", type=int, default=5, help="target bins per axis (default 5)")
    index.add_argument("--step", type=float, default=30.0, help="angle step in degrees (default 30)")
    index.add_argument(
        "--radii", type=float, nargs="+", default=[0.5, 1.0, 1.5],
        help="orbit radii as multiples of the bounding-sphere radius",
    )
    index.add_argument("--size", type=int, default=512, help="render resolution (default 512)")
    index.add_argument("--mock", action="store_true", help="force mock model backends")
    index.set_defaults(func=cmd_index)

    suggest = sub.add_parser("suggest", help="query an index for matching viewpoints")
    suggest.add_argument("index", help="index file")
    suggest.add_argument("--text", required=True, help="draft comment text")
    suggest.add_argument("--k", type=int, default=4, help="number of suggestions (default 4)")
    suggest.add_argument("--mock", action="store_true", help="force mock model backends")
    suggest.set_defaults(func=cmd_suggest)

    modify = sub.add_parser("modify", help="run one modifier pipeline headlessly")
    modify.add_argument("scene", help="glTF binary scene file")
    modify.add_argument("--index", default=None, help="optional index file to cross-check against the scene")
    modify.add_argument("--comment-text", default=None, help="comment text used as the generation prompt")
    modify.add_argument("--viewpoint", default=None, help='anchor as JSON, e.g. \'{"alpha":1.57,"beta":0,"r":3,"target":[0,0,0]}\'')
    modify.add_argument("--kind", required=True, choices=MODIFIER_KINDS)
    modify.add_argument("--strokes", default=None, help="JSON file with add_strokes/remove_strokes")
    modify.add_argument("--box", type=float, nargs=4, default=None, metavar=("L", "T", "R", "B"))
    modify.add_argument("--intent", choices=("keep", "remove"), default="keep")
    modify.add_argument("--staging", action="store_true", help="stage a scene object atop the generated image")
    modify.add_argument("--prior", default=None, help="directory holding a prior result to refine")
    modify.add_argument("--seed", type=int, default=None)
    modify.add_argument("--width", type=int, default=512)
    modify.add_argument("--height", type=int, default=512)
    modify.add_argument("--out", default="result", help="output directory (default ./result)")
    modify.add_argument("--mock", action="store_true", help="force mock model backends")
    modify.set_defaults(func=cmd_modify)

    serve = sub.add_parser("serve", help="start the review service (default port 8000)")
    serve.add_argument("--config", default=None, help="JSON config file")
    serve.add_argument("--host", default=None, help="bind host (overrides config)")
    serve.add_argument("--port", type=int, default=None, help="bind port (overrides config)")
    serve.add_argument("--ui-dir", default=None, help="directory with the built web UI")
    serve.set_defaults(func=cmd_serve)

    return parser


def _fail(code: int, message: str) -> int:
    line = " ".join(str(message).split())  # errors stay on one line
    print(f"error: {line}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CliUsageError as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    try:
        return args.func(args)
    except (CliUsageError, ValueError, SceneLoadError) as exc:
        return _fail(EXIT_VALIDATION, str(exc))
    except (MemovisError, OSError) as exc:
        return _fail(EXIT_RUNTIME, str(exc))


if __name__ == "__main__":
    sys.exit(main())
