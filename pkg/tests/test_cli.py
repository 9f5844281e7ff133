import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from mias.cli import main

CONFIG_TOML = """
[pipeline]
first_year = 2000
last_year = 2003
num_topics = 3
lda_iterations = 20
seed = 5
folds = 4
model = "logistic"

[synthetic]
n_movies = 150
first_year = 2000
last_year = 2003
warmup_years = 2
warmup_movies_per_year = 30
n_actors = 80
n_directors = 10
seed = 5

[evaluate]
models = ["logistic"]
boundaries = ["binary_top30"]
feature_sets = ["full", "benchmark1"]
"""


def _invoke(args):
    return CliRunner().invoke(main, args, catch_exceptions=False)


def _run_pipeline(out: Path, cfg: Path) -> None:
    base = ["--config", str(cfg), "--out", str(out)]
    for step in (["make-synthetic"], ["ingest", str(out / "corpus.jsonl")],
                 ["features"], ["evaluate"], ["train"]):
        result = _invoke(base + step)
        assert result.exit_code == 0, f"{step}: {result.output}"


@pytest.fixture(scope="module")
def pipeline_run(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = root / "config.toml"
    cfg.write_text(CONFIG_TOML, "utf-8")
    out = root / "artifacts"
    _run_pipeline(out, cfg)
    return out, cfg


def test_pipeline_writes_expected_artifacts(pipeline_run):
    out, _ = pipeline_run
    for name in ("corpus.jsonl", "load_report.json", "features.csv", "schema.json",
                 "topic_model.json", "run.json", "evaluation.json", "evaluation.txt",
                 "model.json", "synthetic_manifest.json"):
        assert (out / name).exists(), name


def test_evaluation_grid_covers_requested_cells(pipeline_run):
    out, _ = pipeline_run
    results = json.loads((out / "evaluation.json").read_text("utf-8"))
    assert set(results) == {
        "binary_top30/logistic/full",
        "binary_top30/logistic/benchmark1",
    }
    for cell in results.values():
        assert 0.0 <= cell["metrics"]["auc"] <= 1.0
        assert len(cell["per_fold"]) + len(cell["skipped_folds"]) == 4
    table = (out / "evaluation.txt").read_text("utf-8")
    assert "binary_top30/logistic/full" in table


def test_features_and_evaluation_are_byte_identical_across_runs(pipeline_run, tmp_path):
    out, cfg = pipeline_run
    rerun = tmp_path / "artifacts2"
    _run_pipeline(rerun, cfg)
    for name in ("corpus.jsonl", "features.csv", "schema.json", "topic_model.json",
                 "evaluation.json", "model.json"):
        assert (out / name).read_bytes() == (rerun / name).read_bytes(), name
    # run.json is the one deliberately non-reproducible artifact
    a = json.loads((out / "run.json").read_text("utf-8"))
    b = json.loads((rerun / "run.json").read_text("utf-8"))
    assert a["config"] == b["config"]


def test_seed_override_changes_outputs(pipeline_run, tmp_path):
    out, cfg = pipeline_run
    other = tmp_path / "seeded"
    base = ["--config", str(cfg), "--seed", "99", "--out", str(other)]
    assert _invoke(base + ["make-synthetic"]).exit_code == 0
    assert _invoke(base + ["ingest", str(other / "corpus.jsonl")]).exit_code == 0
    assert _invoke(base + ["features"]).exit_code == 0
    assert (out / "corpus.jsonl").read_bytes() != (other / "corpus.jsonl").read_bytes()


def test_ingest_missing_source_exits_2(tmp_path):
    result = _invoke(["--out", str(tmp_path), "ingest", str(tmp_path / "nope.jsonl")])
    assert result.exit_code == 2


def test_ingest_invalid_lines_exit_2(tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "m1"}\nnot json\n', "utf-8")
    result = _invoke(["--out", str(tmp_path / "a"), "ingest", str(bad)])
    assert result.exit_code == 2


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "broken.toml"
    cfg.write_text("[pipeline\n", "utf-8")
    result = _invoke(["--config", str(cfg), "--out", str(tmp_path), "features"])
    assert result.exit_code == 2
    result = _invoke(["--config", str(tmp_path / "missing.toml"), "--out",
                      str(tmp_path), "features"])
    assert result.exit_code == 2


def test_unknown_pipeline_key_exits_2(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("[pipeline]\nwarp_factor = 9\n", "utf-8")
    result = _invoke(["--config", str(cfg), "--out", str(tmp_path), "features"])
    assert result.exit_code == 2


def test_features_without_corpus_exits_3(tmp_path):
    result = _invoke(["--out", str(tmp_path), "features"])
    assert result.exit_code == 3


def test_evaluate_without_features_exits_4(tmp_path):
    result = _invoke(["--out", str(tmp_path), "evaluate"])
    assert result.exit_code == 4


def test_serve_without_model_exits_5(tmp_path):
    result = _invoke(["--out", str(tmp_path), "serve"])
    assert result.exit_code == 5


def test_make_synthetic_rejects_unknown_keys(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("[synthetic]\nflux = 1\n", "utf-8")
    result = _invoke(["--config", str(cfg), "--out", str(tmp_path), "make-synthetic"])
    assert result.exit_code == 2


def test_parallel_evaluate_matches_serial(pipeline_run, tmp_path):
    out, cfg = pipeline_run
    parallel = tmp_path / "par"
    parallel.mkdir()
    for name in ("corpus.jsonl", "features.csv", "schema.json"):
        (parallel / name).write_bytes((out / name).read_bytes())
    result = _invoke(["--config", str(cfg), "--out", str(parallel), "--jobs", "2",
                      "evaluate"])
    assert result.exit_code == 0
    assert (parallel / "evaluation.json").read_bytes() == (out / "evaluation.json").read_bytes()
