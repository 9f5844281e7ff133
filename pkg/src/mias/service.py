"""HTTP prediction and what-if API over a trained model.

The service loads an immutable snapshot (corpus, topic model, feature engine,
model artifact) at startup and answers every request purely against it, so
identical requests always yield identical responses. Scenario feature vectors
are produced by the same FeatureEngine code path as the batch pipeline.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .collab import build_snapshots
from .corpus import (
    ADAPTATION_KINDS,
    Corpus,
    MPAA_RATINGS,
    MovieRecord,
    clean_title,
    detect_adaptation,
    load_corpus,
)
from .features import FeatureEngine
from .labeling import LOG_ROI_EPSILON
from .learners import TrainedModel, cost_sensitive_predict
from .labeling import CostMatrix, default_cost_matrix
from .pipeline import PipelineConfig
from .topics import TopicModel

MAX_WHATIF_EDITS = 20

_PATCHABLE_FIELDS = frozenset(
    {
        "title", "movie_id", "cast", "director_id", "genres", "rating",
        "planned_release_date", "budget_usd", "synopsis", "adaptation",
    }
)


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.field = field


class Scenario(BaseModel):
    title: str | None = None
    movie_id: str | None = None
    cast: list[str] = Field(min_length=1)
    director_id: str | None = None
    genres: list[str] = Field(min_length=1)
    rating: str = "Unknown"
    planned_release_date: str | None = None
    budget_usd: int | None = None
    synopsis: str | None = None
    adaptation: list[str] = Field(default_factory=list)


class WhatIfRequest(BaseModel):
    base: Scenario
    edits: list[dict] = Field(default_factory=list)


@dataclass
class ServiceState:
    corpus: Corpus
    engine: FeatureEngine
    artifact: TrainedModel
    cost_matrix: CostMatrix
    corpus_fingerprint: str
    max_snapshot_year: int


def _resolve_person(state: ServiceState, token: str) -> tuple[str, bool]:
    """Resolve a person id or free name; unknowns become cold-start newcomers."""
    if state.corpus.person(token) is not None:
        return token, False
    lowered = token.strip().lower()
    for pid, rec in state.corpus.persons.items():
        if rec.name.lower() == lowered:
            return pid, False
    return token, True


def _scenario_record(state: ServiceState, s: Scenario) -> tuple[MovieRecord, dict]:
    if s.budget_usd is not None and s.budget_usd <= 0:
        raise ServiceError(400, "invalid_request", "budget_usd must be positive",
                           "budget_usd")
    if s.rating not in MPAA_RATINGS:
        raise ServiceError(404, "unknown_token", f"unknown rating {s.rating!r}", "rating")
    registry = set(state.engine.registry.names)
    for g in s.genres:
        if g not in registry:
            raise ServiceError(404, "unknown_token", f"unknown genre {g!r}", "genres")
    bad_kinds = set(s.adaptation) - set(ADAPTATION_KINDS)
    if bad_kinds:
        raise ServiceError(400, "invalid_request",
                           f"unknown adaptation kinds {sorted(bad_kinds)}", "adaptation")
    release_date = None
    if s.planned_release_date is not None:
        try:
            release_date = dt.date.fromisoformat(s.planned_release_date)
        except ValueError as exc:
            raise ServiceError(400, "invalid_request", f"bad date: {exc}",
                               "planned_release_date")
    if release_date is None:
        raise ServiceError(400, "invalid_request", "planned_release_date is required",
                           "planned_release_date")

    cast_ids: list[str] = []
    unknown_cast: list[str] = []
    for token in s.cast:
        pid, cold = _resolve_person(state, token)
        if pid in cast_ids:
            raise ServiceError(400, "invalid_request",
                               f"duplicate cast member {pid!r}", "cast")
        cast_ids.append(pid)
        if cold:
            unknown_cast.append(token)
    director_id, director_cold = (None, False)
    if s.director_id is not None:
        director_id, director_cold = _resolve_person(state, s.director_id)

    # features use the pre-release network; clamp years beyond corpus coverage
    planned_year = release_date.year
    effective_year = min(planned_year, state.max_snapshot_year + 1)
    record = MovieRecord(
        movie_id=s.movie_id or "scenario",
        title=clean_title(s.title or ""),
        year=effective_year,
        release_date=release_date,
        genres=frozenset(s.genres),
        mpaa_rating=s.rating,
        budget_usd=s.budget_usd,
        revenue_usd=None,
        cast=tuple(cast_ids),
        director_id=director_id,
        synopsis=s.synopsis or None,
        adaptation=detect_adaptation(s.synopsis or None, s.adaptation),
        franchise_flags=frozenset(),
    )
    flags = {
        "unknown_cast": unknown_cast,
        "unknown_director": director_cold,
        "extrapolated_year": effective_year != planned_year,
    }
    return record, flags


def _predict(state: ServiceState, s: Scenario) -> dict:
    record, flags = _scenario_record(state, s)
    row = state.engine.features_for(record)
    schema = state.engine.schema
    fingerprint = schema.fingerprint()
    out: dict = {
        "schema_fingerprint": fingerprint,
        "label_spec": state.artifact.label_spec,
        "cold_start": flags,
        "features": [
            {"name": c.name, "group": c.group, "value": float(v)}
            for c, v in zip(schema.columns, row)
        ],
    }
    X = row[None, :]
    clf = state.artifact.classifier
    if clf is not None:
        probas = state.artifact.predict_proba(X, fingerprint)[0]
        out["probabilities"] = {c: float(p) for c, p in zip(clf.classes, probas)}
        out["decision"] = clf.classes[int(np.argmax(probas))]
        if len(clf.classes) > 2:
            out["cost_sensitive_decision"] = cost_sensitive_predict(
                probas[None, :], clf.classes, state.cost_matrix
            )[0]
    if state.artifact.regressor is not None:
        log_value = float(state.artifact.predict_value(X, fingerprint)[0])
        out["log_roi1"] = log_value
        out["roi_estimate"] = math.exp(log_value) - 1.0 - LOG_ROI_EPSILON
    return out


def _explain(state: ServiceState, s: Scenario) -> dict:
    reg = state.artifact.regressor
    if reg is None:
        raise ServiceError(409, "no_linear_model",
                           "explanations require a linear model in the artifact")
    record, flags = _scenario_record(state, s)
    row = state.engine.features_for(record)
    st = reg.standardization
    names = reg.names
    kept = set(st.kept.tolist())
    contributions = []
    for j, name in enumerate(names):
        coef = reg.std_coefficients.get(name, 0.0)
        z = (row[j] - st.means[j]) / st.stds[j] if j in kept else 0.0
        contributions.append(
            {
                "name": name,
                "group": state.engine.schema.columns[j].group,
                "contribution": float(coef * z),
            }
        )
    total = sum(c["contribution"] for c in contributions)
    score = float(reg.predict(row[None, :])[0])
    contributions.sort(key=lambda c: (-abs(c["contribution"]), c["name"]))
    return {
        "schema_fingerprint": state.engine.schema.fingerprint(),
        "cold_start": flags,
        "contributions": contributions,
        "intercept": score - total,
        "score": score,
    }


def create_app(state: ServiceState | None) -> FastAPI:
    app = FastAPI(title="movie profitability service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    def _error(status: int, code: str, message: str, field: str | None = None):
        body = {"code": code, "message": message}
        if field is not None:
            body["field"] = field
        return JSONResponse(status_code=status, content=body)

    @app.exception_handler(ServiceError)
    async def _service_error(_req: Request, exc: ServiceError):
        return _error(exc.status, exc.code, exc.message, exc.field)

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_req: Request, exc: RequestValidationError):
        err = exc.errors()[0]
        field = ".".join(str(p) for p in err["loc"] if p != "body")
        return _error(400, "invalid_request", err["msg"], field or None)

    def _state() -> ServiceState:
        if state is None:
            raise ServiceError(503, "not_loaded", "model not loaded")
        return state

    @app.get("/healthz")
    async def healthz():
        return {"status": "ready" if state is not None else "loading"}

    @app.get("/v1/model")
    async def model_info():
        st = _state()
        return {
            "model_kind": st.artifact.kind,
            "label_spec": st.artifact.label_spec,
            "train_config": st.artifact.train_config,
            "schema_fingerprint": st.engine.schema.fingerprint(),
            "corpus_fingerprint": st.corpus_fingerprint,
            "columns": [
                {"name": c.name, "group": c.group, "is_new": c.is_new}
                for c in st.engine.schema.columns
            ],
        }

    @app.post("/v1/predict")
    async def predict(scenario: Scenario):
        return _predict(_state(), scenario)

    @app.post("/v1/whatif")
    async def whatif(req: WhatIfRequest):
        st = _state()
        if len(req.edits) > MAX_WHATIF_EDITS:
            raise ServiceError(400, "invalid_request",
                               f"at most {MAX_WHATIF_EDITS} edits per call", "edits")
        responses = [{"patch": None, **_predict(st, req.base)}]
        for i, patch in enumerate(req.edits):
            unknown = set(patch) - _PATCHABLE_FIELDS
            if unknown:
                raise ServiceError(
                    400, "invalid_request",
                    f"edits[{i}]: unknown field {sorted(unknown)[0]!r}", f"edits.{i}",
                )
            merged = req.base.model_copy(update=patch)
            responses.append({"patch": patch, **_predict(st, merged)})
        return {"responses": responses}

    @app.post("/v1/explain")
    async def explain(scenario: Scenario):
        return _explain(_state(), scenario)

    return app


def load_state(
    corpus_path: str | Path,
    topic_model_path: str | Path,
    model_path: str | Path,
    config: PipelineConfig,
) -> ServiceState:
    corpus_bytes = Path(corpus_path).read_bytes()
    corpus, _ = load_corpus(corpus_path)
    topic_model = TopicModel.load(topic_model_path)
    artifact = TrainedModel.load(model_path)
    snapshots = build_snapshots(
        corpus, config.first_year - 1, config.last_year, team_size=config.team_size
    )
    engine = FeatureEngine(
        corpus,
        snapshots,
        topic_model,
        team_size=config.team_size,
        seed=config.seed,
    )
    artifact._check(engine.schema.fingerprint())
    return ServiceState(
        corpus=corpus,
        engine=engine,
        artifact=artifact,
        cost_matrix=default_cost_matrix(),
        corpus_fingerprint=hashlib.sha256(corpus_bytes).hexdigest(),
        max_snapshot_year=max(snapshots),
    )


def build_app(
    corpus_path: str | Path,
    topic_model_path: str | Path,
    model_path: str | Path,
    config: PipelineConfig,
) -> FastAPI:
    return create_app(load_state(corpus_path, topic_model_path, model_path, config))
