"""End-to-end experiment pipeline: corpus -> features -> evaluation artifacts.

Every stage is deterministic given its seed; outputs are written with sorted
keys and repr-exact floats so byte-identical reruns are possible. Timestamps
and host details live only in the run sidecar, never in data artifacts.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .collab import build_snapshots
from .corpus import Corpus, ExperimentFilter, experiment_preset, load_corpus
from .evaluation import EvalReport, run_experiment
from .features import DEFAULT_TEAM_SIZE, FeatureEngine, FeatureSchema, export_matrix_csv
from .labeling import default_cost_matrix
from .text import preprocess_synopsis
from .topics import TopicModel
from . import topics

DEFAULT_TOPICS = 8
DEFAULT_LDA_ITERATIONS = 400


class PipelineError(Exception):
    pass


@dataclass
class PipelineConfig:
    first_year: int = 2000
    last_year: int = 2010
    num_topics: int = DEFAULT_TOPICS
    lda_iterations: int = DEFAULT_LDA_ITERATIONS
    team_size: int = DEFAULT_TEAM_SIZE
    seed: int = 7
    boundary: str = "binary_top30"
    model: str = "random_forest"
    model_config: dict = field(default_factory=dict)
    folds: int = 10
    threshold_mode: str = "full"

    @classmethod
    def from_dict(cls, data: dict) -> "PipelineConfig":
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise PipelineError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass
class PipelineArtifacts:
    corpus: Corpus
    preset: ExperimentFilter
    snapshots: dict
    topic_model: TopicModel
    engine: FeatureEngine
    schema: FeatureSchema
    movie_ids: list[str]
    matrix: np.ndarray

    def rois(self) -> np.ndarray:
        out = []
        for mid in self.movie_ids:
            m = self.corpus.movie(mid)
            out.append((m.revenue_usd - m.budget_usd) / m.budget_usd)
        return np.array(out)


def build_artifacts(corpus: Corpus, config: PipelineConfig) -> PipelineArtifacts:
    """Run the deterministic feature pipeline over an already-loaded corpus."""
    preset = experiment_preset(config.first_year, config.last_year)
    # features look at the pre-release network, so snapshots start one year early
    snapshots = build_snapshots(
        corpus, config.first_year - 1, config.last_year, team_size=config.team_size
    )
    docs = []
    for movie in corpus:
        if preset.matches(movie) and movie.synopsis:
            tokens = preprocess_synopsis(movie.synopsis)
            if tokens:
                docs.append(tokens)
    if not docs:
        raise PipelineError("no usable synopses in the experiment window")
    topic_model, _ = topics.fit(
        docs,
        num_topics=config.num_topics,
        iterations=config.lda_iterations,
        seed=config.seed,
    )
    engine = FeatureEngine(
        corpus,
        snapshots,
        topic_model,
        team_size=config.team_size,
        seed=config.seed,
    )
    schema, movie_ids, matrix = engine.assemble(preset)
    if not movie_ids:
        raise PipelineError("experiment filter matched no movies")
    return PipelineArtifacts(
        corpus=corpus,
        preset=preset,
        snapshots=snapshots,
        topic_model=topic_model,
        engine=engine,
        schema=schema,
        movie_ids=movie_ids,
        matrix=matrix,
    )


def load_and_build(corpus_path: str | Path, config: PipelineConfig) -> PipelineArtifacts:
    corpus, report = load_corpus(corpus_path)
    if report.invalid_lines:
        line, err = report.invalid_lines[0]
        raise PipelineError(
            f"{len(report.invalid_lines)} invalid corpus lines; first at line {line}: {err}"
        )
    return build_artifacts(corpus, config)


def evaluate_feature_set(
    artifacts: PipelineArtifacts,
    feature_set: str,
    config: PipelineConfig,
) -> EvalReport:
    return run_experiment(
        artifacts.matrix,
        artifacts.rois(),
        artifacts.schema,
        config.boundary,
        config.model,
        model_config=config.model_config,
        feature_set=feature_set,
        k=config.folds,
        seed=config.seed,
        cost_matrix=default_cost_matrix() if config.boundary.startswith("multi") else None,
        threshold_mode=config.threshold_mode,
    )


def write_features(artifacts: PipelineArtifacts, out_dir: str | Path) -> list[Path]:
    """Write the feature matrix and schema; nothing time-dependent."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    matrix_path = out / "features.csv"
    matrix_path.write_text(
        export_matrix_csv(artifacts.schema, artifacts.movie_ids, artifacts.matrix),
        encoding="utf-8",
    )
    schema_path = out / "schema.json"
    schema_path.write_text(
        json.dumps(artifacts.schema.to_json(), sort_keys=True, indent=2) + "\n",
        encoding="utf-8",
    )
    return [matrix_path, schema_path]


def write_evaluation(reports: dict[str, EvalReport], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "evaluation.json"
    path.write_text(
        json.dumps({k: r.to_json() for k, r in reports.items()}, sort_keys=True, indent=2)
        + "\n",
        encoding="utf-8",
    )
    return path


def write_sidecar(out_dir: str | Path, config: PipelineConfig, elapsed: float) -> Path:
    path = Path(out_dir) / "run.json"
    path.write_text(
        json.dumps(
            {
                "config": config.to_json(),
                "elapsed_seconds": elapsed,
                "finished_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
            },
            sort_keys=True,
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    return path
