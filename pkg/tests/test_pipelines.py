"""Tests for the configuration-driven pipelines, the HTML report and the CLI exit codes."""
import json

import pytest

from tembed import main as cli
from tembed.core.config import ExperimentConfig
from tembed.core.errors import PipelineError
from tembed.core.models import DiagnosticsReport
from tembed.pipelines.report import MANIFEST, REPORT, THUMBNAIL, render_report
from tembed.pipelines.runner import PipelineResult, config_hash, run_pipeline, sha256_of


def make_config(out, pipeline="validate", **kwargs) -> ExperimentConfig:
    data = {"name": f"test_{pipeline}", "pipeline": pipeline, "out": str(out),
            "lattice": {"kind": "square", "size": 4}}
    data.update(kwargs)
    return ExperimentConfig.model_validate(data)


@pytest.fixture
def validated(tmp_path):
    config = make_config(tmp_path / "validate")
    return config, run_pipeline(config)


def test_validate_pipeline(validated):
    config, result = validated
    assert result.ok
    assert result.status == "ok"
    paths = {a.path for a in result.artifacts}
    assert paths == {"tembedding.json", "validation.json", "angle_residuals.csv", "tembedding.svg"}
    summary = json.loads((result.out_dir / "validation.json").read_text())
    assert set(summary) == {"lattice", "tembedding", "kasteleyn", "phi_increments", "assumptions"}


def test_manifest_lists_every_artifact(validated):
    config, result = validated
    manifest = json.loads((result.out_dir / MANIFEST).read_text())
    assert manifest["pipeline"] == "validate"
    assert manifest["status"] == "ok"
    assert manifest["seed"] == config.seed
    assert manifest["config_sha256"] == config_hash(config)
    for entry in manifest["artifacts"]:
        assert entry["sha256"] == sha256_of(result.out_dir / entry["path"])
    by_path = {a["path"]: a for a in manifest["artifacts"]}
    assert by_path["validation.json"]["inputs"] == ["tembedding.json"]


def test_repeated_runs_are_byte_identical(tmp_path, validated):
    _, first = validated
    second = run_pipeline(make_config(tmp_path / "again"))
    for a, b in zip(first.artifacts, second.artifacts):
        assert a.path == b.path
        assert (first.out_dir / a.path).read_bytes() == (second.out_dir / b.path).read_bytes()


def test_report_pipeline(tmp_path, validated):
    config, result = validated
    report = run_pipeline(make_config(result.out_dir, pipeline="report"))
    assert [a.path for a in report.artifacts] == [REPORT]
    html = (result.out_dir / REPORT).read_text()
    assert "tembedding.svg" in html
    assert (result.out_dir / THUMBNAIL).read_bytes().startswith(b"\x89PNG")


def test_report_needs_artifacts(tmp_path, validated):
    with pytest.raises(PipelineError) as exc:
        render_report(tmp_path / "empty")
    assert exc.value.error_type == "missing_artifacts"
    _, result = validated
    (result.out_dir / "angle_residuals.csv").unlink()
    with pytest.raises(PipelineError) as exc:
        render_report(result.out_dir)
    assert exc.value.error_type == "missing_artifacts"
    assert exc.value.location == "angle_residuals.csv"


def test_file_lattice_round_trip(tmp_path, validated):
    _, result = validated
    config = make_config(tmp_path / "file", lattice={"kind": "file",
                                                    "path": str(result.out_dir / "tembedding.json")})
    again = run_pipeline(config)
    assert again.ok
    original = json.loads((result.out_dir / "tembedding.json").read_text())
    loaded = json.loads((again.out_dir / "tembedding.json").read_text())
    assert loaded["name"] == "tembedding"
    assert {k: v for k, v in loaded.items() if k != "name"} == {k: v for k, v in original.items() if k != "name"}


def test_file_lattice_needs_a_path(tmp_path):
    with pytest.raises(PipelineError) as exc:
        run_pipeline(make_config(tmp_path, lattice={"kind": "file"}))
    assert exc.value.error_type == "missing_path"


def test_couple_pipeline(tmp_path):
    result = run_pipeline(make_config(tmp_path, pipeline="couple"))
    assert result.ok
    coupling = json.loads((tmp_path / "coupling.json").read_text())
    assert coupling["inverse"]["residual"] < 1e-10
    assert coupling["tholomorphic"]["metrics"]["monodromy_error"] < 1e-9


def test_couple_rejects_unknown_anchor(tmp_path):
    with pytest.raises(PipelineError) as exc:
        run_pipeline(make_config(tmp_path, pipeline="couple", coupling={"anchor": "w99_99"}))
    assert exc.value.error_type == "unknown_anchor"


def test_walk_pipeline_is_seeded(tmp_path):
    kwargs = {"seed": 7, "lattice": {"kind": "honeycomb", "size": 4},
              "walk": {"flavor": "black-flat", "horizon": 2.0, "n_walks": 3}}
    a = run_pipeline(make_config(tmp_path / "a", pipeline="walk", **kwargs))
    b = run_pipeline(make_config(tmp_path / "b", pipeline="walk", **kwargs))
    assert (tmp_path / "a" / "trajectories.csv").read_text() == (tmp_path / "b" / "trajectories.csv").read_text()
    walk = json.loads((tmp_path / "a" / "walk.json").read_text())
    assert len(walk["walkers"]) == 3
    assert {x.path for x in a.artifacts} == {x.path for x in b.artifacts}


def test_appendix_pipeline_on_square(tmp_path):
    result = run_pipeline(make_config(tmp_path, pipeline="appendix", seed=6))
    assert result.ok
    rows = (tmp_path / "appendix.csv").read_text().splitlines()
    assert rows[0] == "check,value,tolerance,ok"
    checks = {row.split(",")[0] for row in rows[1:]}
    assert {"validation_errors", "kasteleyn_signs", "s-hol_residual", "ferrand_residual"} <= checks


def test_cli_exit_codes(tmp_path):
    assert cli.main(["validate", "--out", str(tmp_path / "cli")]) == cli.EXIT_OK
    assert (tmp_path / "cli" / MANIFEST).exists()
    assert cli.main(["validate", "--config", str(tmp_path / "absent.json")]) == cli.EXIT_ERROR
    assert cli.main(["report", "--out", str(tmp_path / "nothing")]) == cli.EXIT_ERROR


def test_cli_reports_violations(tmp_path, monkeypatch):
    def failing(config):
        report = DiagnosticsReport(subject="stub")
        report.add("overlap", "f0", "faces overlap")
        return PipelineResult(config.pipeline, tmp_path, reports=[report])

    monkeypatch.setattr(cli, "run_pipeline", failing)
    assert cli.main(["validate", "--out", str(tmp_path)]) == cli.EXIT_VIOLATIONS


def test_cli_log_file(tmp_path):
    log = tmp_path / "logs" / "run.log"
    assert cli.main(["validate", "--out", str(tmp_path / "out"), "--log-level", "debug", "--log-file", str(log)]) == 0
    text = log.read_text()
    assert "tembed v" in text
    assert "Pipeline validate finished with status ok" in text
