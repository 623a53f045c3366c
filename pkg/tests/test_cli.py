"""CLI tests: flags, JSON-lines output, exit codes, and the serve command."""

import json
import socket
import subprocess
import sys
import time

import httpx
import numpy as np
import pytest

import memovis
from memovis.adapters import MockEmbedder
from memovis.cli import EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, build_parser, main
from memovis.raster import png_to_rgb
from memovis.viewpoints import SamplingConfig, l2_normalize, load_index

from glbkit import build_glb, cube_geometry

VIEWPOINT = '{"alpha":1.5707963267948966,"beta":0.0,"r":3.0,"target":[0.0,0.0,0.0]}'


@pytest.fixture()
def workspace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    (tmp_path / "scene.glb").write_bytes(
        build_glb([cube_geometry(size=1.0) + ((200, 40, 40),)])
    )
    strokes = {
        "add_strokes": [{"points": [[24.0, 24.0], [40.0, 40.0]], "radius": 3.0}],
        "remove_strokes": [],
    }
    (tmp_path / "strokes.json").write_text(json.dumps(strokes))
    return tmp_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def json_lines(out):
    return [json.loads(line) for line in out.strip().splitlines() if line]


def build_tiny(capsys, out="index.bin"):
    code, stdout, stderr = run_cli(
        capsys, "index", "scene.glb", out,
        "--bins", "1", "--step", "90", "--radii", "1.0", "--size", "32", "--mock",
    )
    assert code == EXIT_OK, stderr
    return json_lines(stdout)[0]


class TestIndexCommand:
    def test_default_flags_describe_the_full_grid(self):
        args = build_parser().parse_args(["index", "s.glb", "o.bin"])
        sampling = SamplingConfig(args.bins, args.step, tuple(args.radii))
        assert sampling.total_viewpoints == 27000

    def test_tiny_grid_reports_rows_and_timing(self, workspace, capsys):
        report = build_tiny(capsys)
        assert report["rows"] == 8
        assert report["dim"] == 512
        assert report["seconds"] >= 0
        assert load_index(workspace / "index.bin").rows == 8

    def test_rerun_writes_identical_bytes(self, workspace, capsys):
        build_tiny(capsys, "a.bin")
        build_tiny(capsys, "b.bin")
        assert (workspace / "a.bin").read_bytes() == (workspace / "b.bin").read_bytes()

    def test_missing_scene_is_validation_error(self, workspace, capsys):
        code, _, stderr = run_cli(capsys, "index", "ghost.glb", "o.bin", "--mock")
        assert code == EXIT_VALIDATION
        assert stderr.startswith("error: ")
        assert "\n" not in stderr.strip()

    def test_bad_step_is_validation_error(self, workspace, capsys):
        code, _, stderr = run_cli(
            capsys, "index", "scene.glb", "o.bin", "--step", "50", "--mock"
        )
        assert code == EXIT_VALIDATION
        assert "step" in stderr


class TestSuggestCommand:
    def test_outputs_k_json_lines_descending(self, workspace, capsys):
        build_tiny(capsys)
        code, stdout, _ = run_cli(
            capsys, "suggest", "index.bin", "--text", "show the sofa", "--mock"
        )
        assert code == EXIT_OK
        rows = json_lines(stdout)
        assert len(rows) == 4  # default k
        scores = [r["score"] for r in rows]
        assert scores == sorted(scores, reverse=True)
        assert all({"row", "score", "viewpoint"} <= set(r) for r in rows)

    def test_matches_brute_force_oracle(self, workspace, capsys):
        build_tiny(capsys)
        code, stdout, _ = run_cli(
            capsys, "suggest", "index.bin", "--text", "a corner desk", "--k", "8", "--mock"
        )
        assert code == EXIT_OK
        got = [(r["row"], r["score"]) for r in json_lines(stdout)]

        index = load_index(workspace / "index.bin")
        query = l2_normalize(MockEmbedder().embed_text("a corner desk"))
        scores = [float(np.dot(row.astype(np.float64), query)) for row in index.embeddings]
        expect = sorted(range(8), key=lambda i: (-scores[i], i))
        assert [row for row, _ in got] == expect
        for row, score in got:
            assert score == pytest.approx(scores[row], abs=1e-6)

    def test_empty_text_is_usage_error(self, workspace, capsys):
        build_tiny(capsys)
        code, _, stderr = run_cli(capsys, "suggest", "index.bin", "--text", "", "--mock")
        assert code == EXIT_VALIDATION
        assert stderr.startswith("error: ")

    def test_foreign_index_file_is_validation_error(self, workspace, capsys):
        (workspace / "junk.bin").write_bytes(b"\x00" * 64)
        code, _, stderr = run_cli(capsys, "suggest", "junk.bin", "--text", "x", "--mock")
        assert code == EXIT_VALIDATION
        assert "index" in stderr


class TestModifyCommand:
    def modify(self, capsys, *extra, out="r1"):
        return run_cli(
            capsys, "modify", "scene.glb",
            "--comment-text", "a bright red fabric sofa",
            "--viewpoint", VIEWPOINT,
            "--width", "64", "--height", "64",
            "--seed", "7", "--out", out, "--mock",
            *extra,
        )

    def test_writes_result_files(self, workspace, capsys):
        code, stdout, stderr = self.modify(
            capsys, "--kind", "text-scribble", "--strokes", "strokes.json"
        )
        assert code == EXIT_OK, stderr
        report = json_lines(stdout)[0]
        assert report["modifier"] == "text_scribble"
        assert report["seed"] == 7
        for name in report["files"]:
            assert (workspace / "r1" / name).exists()
        image = png_to_rgb((workspace / "r1" / "reference.png").read_bytes())
        assert image.shape == (64, 64, 3)

    def test_mock_runs_are_deterministic(self, workspace, capsys):
        a = self.modify(capsys, "--kind", "text-scribble", "--strokes", "strokes.json")
        b = self.modify(
            capsys, "--kind", "text-scribble", "--strokes", "strokes.json", out="r2"
        )
        assert a[0] == b[0] == EXIT_OK
        for name in ("reference.png", "syn.png", "seg.png"):
            assert (workspace / "r1" / name).read_bytes() == (
                workspace / "r2" / name
            ).read_bytes()

    def test_prior_chain_grab_n_go(self, workspace, capsys):
        code, _, _ = self.modify(capsys, "--kind", "text-scribble", "--strokes", "strokes.json")
        assert code == EXIT_OK
        code, stdout, stderr = self.modify(
            capsys, "--kind", "grab-n-go", "--box", "10", "10", "40", "40",
            "--prior", "r1", out="r2",
        )
        assert code == EXIT_OK, stderr
        assert json_lines(stdout)[0]["modifier"] == "grab_n_go"

    def test_missing_viewpoint_demands_anchor(self, workspace, capsys):
        code, _, stderr = run_cli(
            capsys, "modify", "scene.glb", "--kind", "text-scribble", "--mock"
        )
        assert code == EXIT_VALIDATION
        assert "anchor" in stderr

    def test_text_paint_without_strokes_is_validation_error(self, workspace, capsys):
        code, _, stderr = self.modify(capsys, "--kind", "text-paint")
        assert code == EXIT_VALIDATION
        assert "strokes" in stderr

    def test_index_scene_mismatch_is_validation_error(self, workspace, capsys):
        build_tiny(capsys)
        (workspace / "other.glb").write_bytes(
            build_glb([cube_geometry(size=2.0) + ((40, 40, 200),)])
        )
        code, _, stderr = run_cli(
            capsys, "modify", "other.glb",
            "--comment-text", "x", "--viewpoint", VIEWPOINT,
            "--kind", "text-scribble", "--index", "index.bin",
            "--width", "64", "--height", "64", "--mock",
        )
        assert code == EXIT_VALIDATION
        assert "different scene" in stderr

    def test_unreachable_backend_is_runtime_error(self, workspace, capsys, monkeypatch):
        monkeypatch.setenv("MEMOVIS_ENDPOINT_GENERATE", "http://127.0.0.1:9/generate")
        code, _, stderr = run_cli(
            capsys, "modify", "scene.glb",
            "--comment-text", "x", "--viewpoint", VIEWPOINT,
            "--kind", "text-scribble", "--strokes", "strokes.json",
            "--width", "64", "--height", "64",
        )
        assert code == EXIT_RUNTIME
        assert "generate" in stderr


class TestServeCommand:
    def test_bad_config_key_is_named_validation_error(self, workspace, capsys):
        (workspace / "cfg.json").write_text(json.dumps({"frobnicate": 1}))
        code, _, stderr = run_cli(capsys, "serve", "--config", "cfg.json")
        assert code == EXIT_VALIDATION
        assert "unknown config key: frobnicate" in stderr

    def test_health_endpoint_reports_version(self, workspace):
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        config = {
            "data_dir": str(workspace / "data"),
            "viewport": {"width": 64, "height": 64},
            "port": port,
        }
        (workspace / "cfg.json").write_text(json.dumps(config))
        process = subprocess.Popen(
            [sys.executable, "-m", "memovis.cli", "serve", "--config", "cfg.json"],
            cwd=workspace,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
        )
        try:
            deadline = time.monotonic() + 20.0
            payload = None
            while time.monotonic() < deadline:
                if process.poll() is not None:
                    raise AssertionError(
                        f"server exited early: {process.stderr.read().decode()}"
                    )
                try:
                    reply = httpx.get(
                        f"http://127.0.0.1:{port}/api/v1/health", timeout=1.0
                    )
                    if reply.status_code == 200:
                        payload = reply.json()
                        break
                except httpx.TransportError:
                    time.sleep(0.1)
            assert payload == {"status": "ok", "version": memovis.__version__}
        finally:
            process.terminate()
            try:
                process.wait(timeout=10)
            except subprocess.TimeoutExpired:
                process.kill()
                process.wait(timeout=10)
