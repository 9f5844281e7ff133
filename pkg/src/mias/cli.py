"""Command-line entry point orchestrating the pipeline end to end.

Exit codes are stable: 2 ingest/validation failure, 3 feature-stage failure,
4 evaluation failure, 5 model-artifact problem, 6 service port in use.
Data goes to files/stdout; diagnostics go to stderr. Outputs are byte-identical
across reruns with the same config and seed; wall-clock metadata lives only in
the `run.json` sidecar.
"""

from __future__ import annotations

import json
import sys
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import click

from . import pipeline as pl
from .corpus import CorpusError, load_corpus, save_corpus
from .evaluation import run_experiment
from .labeling import default_cost_matrix, label, resolve_boundaries
from .learners import ModelIOError, TrainedModel, fit_lasso, train_classifier
from .synthetic import SyntheticConfig, write_corpus

EXIT_INGEST = 2
EXIT_FEATURES = 3
EXIT_EVALUATE = 4
EXIT_MODEL = 5
EXIT_PORT = 6

DEFAULT_MODELS = ("random_forest",)
DEFAULT_BOUNDARIES = ("binary_top30",)
DEFAULT_FEATURE_SETS = ("full", "without_new", "benchmark1", "benchmark2")


def _fail(code: int, message: str) -> None:
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        _fail(EXIT_INGEST, f"config file not found: {p}")
    try:
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        _fail(EXIT_INGEST, f"config parse error: {exc}")
    raise AssertionError("unreachable")


def _pipeline_config(cfg: dict, seed: int | None) -> pl.PipelineConfig:
    section = dict(cfg.get("pipeline", {}))
    section.pop("corpus", None)
    if seed is not None:
        section["seed"] = seed
    try:
        return pl.PipelineConfig.from_dict(section)
    except (pl.PipelineError, TypeError) as exc:
        _fail(EXIT_INGEST, str(exc))
    raise AssertionError("unreachable")


def _corpus_path(cfg: dict, out: Path) -> Path:
    configured = cfg.get("pipeline", {}).get("corpus")
    return Path(configured) if configured else out / "corpus.jsonl"


@click.group()
@click.option("--config", "config_path", type=str, default=None, help="TOML config file.")
@click.option("--seed", type=int, default=None, help="Override the configured seed.")
@click.option("--jobs", type=int, default=1, show_default=True, help="Worker cap.")
@click.option("--out", "out_dir", type=str, default="artifacts", show_default=True,
              help="Artifact directory.")
@click.pass_context
def main(ctx: click.Context, config_path: str | None, seed: int | None, jobs: int,
         out_dir: str) -> None:
    """Movie profitability pipeline: ingest, features, evaluate, train, serve."""
    ctx.ensure_object(dict)
    cfg = _load_config(config_path)
    ctx.obj["cfg"] = cfg
    ctx.obj["seed"] = seed
    ctx.obj["jobs"] = max(1, jobs)
    ctx.obj["out"] = Path(out_dir)


@main.command()
@click.argument("source", type=str)
@click.pass_context
def ingest(ctx: click.Context, source: str) -> None:
    """Validate SOURCE (JSONL) and write the canonical corpus + load report."""
    out: Path = ctx.obj["out"]
    out.mkdir(parents=True, exist_ok=True)
    try:
        corpus, report = load_corpus(source)
    except CorpusError as exc:
        _fail(EXIT_INGEST, str(exc))
    if report.invalid_lines:
        for line, err in report.invalid_lines[:20]:
            click.echo(f"invalid line {line}: {err}", err=True)
        _fail(EXIT_INGEST, f"{len(report.invalid_lines)} invalid lines in {source}")
    save_corpus(corpus, _corpus_path(ctx.obj["cfg"], out))
    report_path = out / "load_report.json"
    report_path.write_text(json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n",
                           "utf-8")
    click.echo(f"ingested {len(corpus)} movies -> {_corpus_path(ctx.obj['cfg'], out)}")


def _build(ctx: click.Context) -> tuple[pl.PipelineArtifacts, pl.PipelineConfig]:
    cfg = ctx.obj["cfg"]
    config = _pipeline_config(cfg, ctx.obj["seed"])
    corpus_path = _corpus_path(cfg, ctx.obj["out"])
    if not corpus_path.exists():
        _fail(EXIT_FEATURES, f"corpus not found: {corpus_path} (run `mias ingest` first)")
    try:
        artifacts = pl.load_and_build(corpus_path, config)
    except (pl.PipelineError, CorpusError, ValueError) as exc:
        _fail(EXIT_FEATURES, str(exc))
    return artifacts, config


@main.command()
@click.pass_context
def features(ctx: click.Context) -> None:
    """Build snapshots, fit the topic model, and write the feature matrix."""
    out: Path = ctx.obj["out"]
    started = time.time()
    artifacts, config = _build(ctx)
    written: list[Path] = []
    try:
        written = pl.write_features(artifacts, out)
        topic_path = out / "topic_model.json"
        artifacts.topic_model.save(topic_path)
        written.append(topic_path)
    except Exception as exc:  # partial outputs must not survive
        for p in written:
            p.unlink(missing_ok=True)
        _fail(EXIT_FEATURES, str(exc))
    pl.write_sidecar(out, config, time.time() - started)
    for p in written:
        click.echo(str(p))


def _read_features(out: Path) -> tuple[list[str], list[list[float]], dict]:
    matrix_path, schema_path = out / "features.csv", out / "schema.json"
    if not matrix_path.exists() or not schema_path.exists():
        _fail(EXIT_EVALUATE, f"features missing in {out} (run `mias features` first)")
    schema_json = json.loads(schema_path.read_text("utf-8"))
    ids, rows = [], []
    with open(matrix_path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            parts = line.rstrip("\n").split(",")
            ids.append(parts[0])
            rows.append([float(v) for v in parts[1:]])
    return ids, rows, schema_json


def _grid_cell(args: tuple) -> tuple[str, dict]:
    import numpy as np

    from .features import Column, FeatureSchema

    matrix, rois, schema_json, boundary, model, model_config, fs, k, seed, tm = args
    schema = FeatureSchema(
        columns=[Column(**c) for c in schema_json["columns"]],
        config=schema_json["config"],
    )
    report = run_experiment(
        np.asarray(matrix), rois, schema, boundary, model,
        model_config=model_config, feature_set=fs, k=k, seed=seed,
        cost_matrix=default_cost_matrix() if boundary.startswith("multi") else None,
        threshold_mode=tm,
    )
    return f"{boundary}/{model}/{fs}", report.to_json()


@main.command()
@click.pass_context
def evaluate(ctx: click.Context) -> None:
    """Run the model x feature-set x boundary grid and write the report bundle."""
    cfg = ctx.obj["cfg"]
    out: Path = ctx.obj["out"]
    config = _pipeline_config(cfg, ctx.obj["seed"])
    section = cfg.get("evaluate", {})
    models = list(section.get("models", [config.model] if config.model else DEFAULT_MODELS))
    boundaries = list(section.get("boundaries", [config.boundary] or DEFAULT_BOUNDARIES))
    feature_sets = list(section.get("feature_sets", DEFAULT_FEATURE_SETS))
    if not models or not boundaries or not feature_sets:
        _fail(EXIT_EVALUATE, "empty evaluation grid")
    ids, rows, schema_json = _read_features(out)
    corpus_path = _corpus_path(cfg, out)
    if not corpus_path.exists():
        _fail(EXIT_EVALUATE, f"corpus not found: {corpus_path}")
    corpus, _ = load_corpus(corpus_path)
    rois = []
    for mid in ids:
        m = corpus.movie(mid)
        rois.append((m.revenue_usd - m.budget_usd) / m.budget_usd)

    cells = [
        (rows, rois, schema_json, b, mdl, config.model_config, fs,
         config.folds, config.seed, config.threshold_mode)
        for b in boundaries for mdl in models for fs in feature_sets
    ]
    try:
        if ctx.obj["jobs"] > 1:
            with ProcessPoolExecutor(max_workers=ctx.obj["jobs"]) as pool:
                results = dict(pool.map(_grid_cell, cells))
        else:
            results = dict(_grid_cell(c) for c in cells)
    except Exception as exc:
        _fail(EXIT_EVALUATE, str(exc))
    report_path = out / "evaluation.json"
    report_path.write_text(json.dumps(results, sort_keys=True, indent=2) + "\n", "utf-8")
    table_path = out / "evaluation.txt"
    table_path.write_text(_render_table(results), "utf-8")
    click.echo(str(report_path))
    click.echo(str(table_path))


def _render_table(results: dict[str, dict]) -> str:
    header = f"{'cell':<48} {'auc':>7} {'acc':>7} {'cost':>8}"
    lines = [header, "-" * len(header)]
    for key in sorted(results):
        m = results[key]["metrics"]
        cost = m.get("total_cost")
        lines.append(
            f"{key:<48} {m['auc']:>7.4f} {m['accuracy']:>7.4f} "
            f"{cost if cost is not None else '-':>8}"
        )
    return "\n".join(lines) + "\n"


@main.command()
@click.pass_context
def train(ctx: click.Context) -> None:
    """Train the configured classifier and regressor on all rows; write the artifact."""
    cfg = ctx.obj["cfg"]
    out: Path = ctx.obj["out"]
    config = _pipeline_config(cfg, ctx.obj["seed"])
    section = cfg.get("train", {})
    lam = float(section.get("lasso_lambda", 0.01))
    ids, rows, schema_json = _read_features(out)
    corpus_path = _corpus_path(cfg, out)
    if not corpus_path.exists():
        _fail(EXIT_MODEL, f"corpus not found: {corpus_path}")
    corpus, _ = load_corpus(corpus_path)

    import numpy as np

    from .features import Column, FeatureSchema
    from .labeling import log_roi1

    schema = FeatureSchema(
        columns=[Column(**c) for c in schema_json["columns"]],
        config=schema_json["config"],
    )
    if schema.fingerprint() != schema_json["fingerprint"]:
        _fail(EXIT_MODEL, "schema fingerprint mismatch between schema.json and its columns")
    X = np.asarray(rows)
    rois = np.array([
        (corpus.movie(mid).revenue_usd - corpus.movie(mid).budget_usd)
        / corpus.movie(mid).budget_usd
        for mid in ids
    ])
    try:
        spec = resolve_boundaries(rois, config.boundary)
        y = label(rois, spec)
        clf = train_classifier(config.model, X, y, config.model_config,
                               seed=config.seed, classes=spec.classes)
        reg = fit_lasso(X, np.array([log_roi1(r) for r in rois]), lam,
                        names=schema.names)
        artifact = TrainedModel(
            kind=config.model,
            schema_fingerprint=schema.fingerprint(),
            train_config=config.to_json(),
            classifier=clf,
            regressor=reg,
            label_spec=spec.to_json(),
        )
        model_path = out / "model.json"
        artifact.save(model_path)
    except (ModelIOError, ValueError) as exc:
        _fail(EXIT_MODEL, str(exc))
    click.echo(str(model_path))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8337, show_default=True, type=int)
@click.pass_context
def serve(ctx: click.Context, host: str, port: int) -> None:
    """Serve predictions over HTTP from the trained artifact."""
    cfg = ctx.obj["cfg"]
    out: Path = ctx.obj["out"]
    config = _pipeline_config(cfg, ctx.obj["seed"])
    serve_cfg = cfg.get("serve", {})
    host = serve_cfg.get("host", host)
    port = int(serve_cfg.get("port", port))
    model_path = out / "model.json"
    corpus_path = _corpus_path(cfg, out)
    topic_path = out / "topic_model.json"
    for p, what in ((model_path, "model artifact"), (corpus_path, "corpus"),
                    (topic_path, "topic model")):
        if not p.exists():
            _fail(EXIT_MODEL, f"{what} not found: {p}")

    import uvicorn

    from .service import build_app

    try:
        app = build_app(
            corpus_path=corpus_path,
            topic_model_path=topic_path,
            model_path=model_path,
            config=config,
        )
    except (ModelIOError, pl.PipelineError, CorpusError) as exc:
        _fail(EXIT_MODEL, str(exc))
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit as exc:  # uvicorn exits 1 when the socket bind fails
        if exc.code:
            _fail(EXIT_PORT, f"could not bind {host}:{port}")


@main.command("make-synthetic")
@click.option("--movies", default=2000, show_default=True, type=int)
@click.option("--first-year", default=2000, show_default=True, type=int)
@click.option("--last-year", default=2010, show_default=True, type=int)
@click.pass_context
def make_synthetic(ctx: click.Context, movies: int, first_year: int, last_year: int) -> None:
    """Write the planted-signal synthetic corpus used by the acceptance experiments."""
    out: Path = ctx.obj["out"]
    out.mkdir(parents=True, exist_ok=True)
    section = dict(ctx.obj["cfg"].get("synthetic", {}))
    section.setdefault("n_movies", movies)
    section.setdefault("first_year", first_year)
    section.setdefault("last_year", last_year)
    if ctx.obj["seed"] is not None:
        section["seed"] = ctx.obj["seed"]
    unknown = set(section) - set(SyntheticConfig.__dataclass_fields__)
    if unknown:
        _fail(EXIT_INGEST, f"unknown synthetic config keys: {sorted(unknown)}")
    manifest = write_corpus(out / "corpus.jsonl", SyntheticConfig(**section))
    manifest_path = out / "synthetic_manifest.json"
    manifest_path.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n", "utf-8")
    click.echo(manifest["path"])


if __name__ == "__main__":
    main()
