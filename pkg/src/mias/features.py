"""Per-movie feature assembly: star-power, network, content, timing, hybrid columns.

All history-dependent quantities use strictly-prior movies only (year < focal
year); collaboration metrics run on the year-1 network snapshot. Missing inputs
never get imputed: each optional family carries an explicit indicator column.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from . import collab, text, topics
from .corpus import Corpus, DEFAULT_TEAM_SIZE, ExperimentFilter, MovieRecord, MPAA_RATINGS
from .labeling import roi as roi_of

GROUPS = ("WhoStar", "WhoNet", "What", "When", "HybridWhatWho", "HybridWhatWhen")

HOLIDAY_WINDOW_DAYS = 7
COMPETITION_WINDOW_DAYS = 30

SEASONS = ("spring", "summer", "fall", "winter")
_SEASON_BY_MONTH = {
    3: "spring", 4: "spring", 5: "spring",
    6: "summer", 7: "summer", 8: "summer",
    9: "fall", 10: "fall", 11: "fall",
    12: "winter", 1: "winter", 2: "winter",
}


class FeatureError(Exception):
    pass


@dataclass(frozen=True)
class Column:
    name: str
    group: str
    is_new: bool = False
    is_benchmark1: bool = False
    is_benchmark2: bool = False

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "group": self.group,
            "is_new": self.is_new,
            "is_benchmark1": self.is_benchmark1,
            "is_benchmark2": self.is_benchmark2,
        }


@dataclass(frozen=True)
class FeatureSchema:
    columns: tuple[Column, ...]
    config: dict

    def __post_init__(self) -> None:
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise FeatureError("duplicate column names in schema")

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def fingerprint(self) -> str:
        payload = json.dumps(
            {"columns": [c.to_json() for c in self.columns], "config": self.config},
            sort_keys=True,
        )
        return hashlib.sha256(payload.encode()).hexdigest()

    def select(
        self,
        feature_set: str = "full",
    ) -> list[int]:
        """Column indices for a named feature set used in ablations/benchmarks."""
        if feature_set == "full":
            return list(range(len(self.columns)))
        if feature_set == "without_new":
            return [i for i, c in enumerate(self.columns) if not c.is_new]
        if feature_set == "benchmark1":
            return [i for i, c in enumerate(self.columns) if c.is_benchmark1]
        if feature_set == "benchmark2":
            return [i for i, c in enumerate(self.columns) if c.is_benchmark2]
        raise FeatureError(f"unknown feature set {feature_set!r}")

    def to_json(self) -> dict:
        return {
            "columns": [c.to_json() for c in self.columns],
            "config": self.config,
            "fingerprint": self.fingerprint(),
        }


@lru_cache(maxsize=1)
def _holiday_spec() -> dict:
    return json.loads(resources.files("mias.data").joinpath("holidays.json").read_text("utf-8"))


def _nth_weekday(year: int, month: int, weekday: int, occurrence: int) -> dt.date:
    if occurrence > 0:
        d = dt.date(year, month, 1)
        offset = (weekday - d.weekday()) % 7
        return d + dt.timedelta(days=offset + 7 * (occurrence - 1))
    # from the end of the month
    next_month = dt.date(year + month // 12, month % 12 + 1, 1)
    d = next_month - dt.timedelta(days=1)
    offset = (d.weekday() - weekday) % 7
    return d - dt.timedelta(days=offset + 7 * (-occurrence - 1))


def holidays_for_year(year: int) -> list[dt.date]:
    spec = _holiday_spec()
    days = [dt.date(year, h["month"], h["day"]) for h in spec["fixed"]]
    days += [
        _nth_weekday(year, h["month"], h["weekday"], h["occurrence"])
        for h in spec["floating"]
    ]
    return sorted(days)


def is_holiday_release(date: dt.date, window: int = HOLIDAY_WINDOW_DAYS) -> bool:
    for y in (date.year - 1, date.year, date.year + 1):
        for h in holidays_for_year(y):
            if abs((date - h).days) <= window:
                return True
    return False


def _genre_cosine(a: frozenset[str], b: frozenset[str]) -> float:
    if not a or not b:
        return 0.0
    inter = len(a & b)
    return inter / math.sqrt(len(a) * len(b))


def _profit(m: MovieRecord) -> float | None:
    if m.revenue_usd is None or not m.budget_usd:
        return None
    return float(m.revenue_usd - m.budget_usd)


class FeatureEngine:
    """Computes the full feature row for any movie (corpus or scenario)."""

    def __init__(
        self,
        corpus: Corpus,
        snapshots: dict[int, collab.CollabSnapshot],
        topic_model: topics.TopicModel,
        team_size: int = DEFAULT_TEAM_SIZE,
        infer_iterations: int = topics.DEFAULT_INFER_ITERATIONS,
        seed: int = 0,
    ):
        self.corpus = corpus
        self.snapshots = snapshots
        self.topic_model = topic_model
        self.team_size = team_size
        self.infer_iterations = infer_iterations
        self.seed = seed
        self.registry = corpus.genre_registry
        self._schema = self._build_schema()
        self._by_year: dict[int, list[MovieRecord]] = {}
        for m in corpus:
            self._by_year.setdefault(m.year, []).append(m)
        self._dated = [m for m in corpus if m.release_date is not None]
        self._metrics_cache: dict[int, collab.SnapshotMetrics] = {}
        self._gross_cache: dict[tuple[str, int], float] = {}

    def _snapshot_metrics(self, year: int) -> collab.SnapshotMetrics:
        if year not in self._metrics_cache:
            snap = self.snapshots.get(year)
            if snap is None:
                raise FeatureError(f"no collaboration snapshot for year {year}")
            self._metrics_cache[year] = collab.SnapshotMetrics(snap)
        return self._metrics_cache[year]

    @property
    def schema(self) -> FeatureSchema:
        return self._schema

    def _build_schema(self) -> FeatureSchema:
        cols: list[Column] = []

        def add(name, group, new=False, b1=False, b2=False):
            cols.append(Column(name, group, new, b1, b2))

        # star power (benchmark star-power definition reused for both baselines)
        star = dict(b1=True, b2=True)
        add("tenure_total", "WhoStar", **star)
        add("tenure_avg", "WhoStar", **star)
        add("actor_gross_total", "WhoStar", **star)
        add("actor_gross_avg", "WhoStar", **star)
        add("actor_gross_avg_per_movie", "WhoStar", **star)
        add("actor_history_missing", "WhoStar", **star)
        add("director_gross_total", "WhoStar", **star)
        add("director_gross_avg", "WhoStar", **star)
        add("director_history_missing", "WhoStar", **star)
        add("actor_profit_total", "WhoStar", new=True, **star)
        add("actor_profit_avg", "WhoStar", new=True, **star)
        add("actor_profit_top", "WhoStar", new=True, **star)
        add("actor_profit_missing", "WhoStar", new=True, **star)
        add("director_profit_total", "WhoStar", new=True, **star)
        add("director_profit_avg", "WhoStar", new=True, **star)
        add("director_profit_top", "WhoStar", new=True, **star)
        add("director_profit_missing", "WhoStar", new=True, **star)

        # network
        add("net_heterogeneity", "WhoNet")
        add("net_avg_degree", "WhoNet")
        add("net_betweenness_total", "WhoNet")
        add("net_betweenness_avg", "WhoNet")
        add("net_team_singleton", "WhoNet")
        add("ad_collab_frequency", "WhoNet", new=True)
        add("ad_collab_profit", "WhoNet", new=True)
        add("ad_collab_missing", "WhoNet", new=True)
        add("net_delta_clustering", "WhoNet", new=True)
        add("net_delta_avg_path", "WhoNet", new=True)

        # what
        for g in self.registry.names:
            add(f"genre_{g}", "What", b1=True, b2=True)
        for r in MPAA_RATINGS:
            add(f"rating_{r}", "What", b1=True, b2=True)
        for k in range(self.topic_model.num_topics):
            add(f"topic_{k}", "What", new=True)
        add("synopsis_missing", "What", new=True)
        add("adapt_comic", "What")
        add("adapt_true_story", "What")
        add("adapt_book", "What")
        add("budget_usd", "What", b2=True)

        # when
        add("annual_avg_profit", "When", new=True)
        add("annual_profit_missing", "When", new=True)
        add("holiday_release", "When")
        for s in SEASONS:
            add(f"season_{s}", "When")
        add("release_date_missing", "When")
        add("year_of_release", "When", b1=True)

        # hybrid
        add("hybrid_age", "HybridWhatWho", new=True)
        add("hybrid_wage", "HybridWhatWho", new=True)
        add("hybrid_cast_novelty", "HybridWhatWho", new=True)
        add("annual_profit_pct_by_genre", "HybridWhatWhen", new=True)
        add("awpg", "HybridWhatWhen", new=True)
        add("competition", "HybridWhatWhen", new=True)
        add("market_missing", "HybridWhatWhen", new=True)
        add("competition_missing", "HybridWhatWhen", new=True)

        config = {
            "team_size": self.team_size,
            "num_topics": self.topic_model.num_topics,
            "genres": list(self.registry.names),
            "infer_iterations": self.infer_iterations,
            "seed": self.seed,
        }
        return FeatureSchema(tuple(cols), config)

    # --- history helpers -------------------------------------------------

    def _prior_movies(self, person_id: str, year: int, acting: bool = True) -> list[MovieRecord]:
        p = self.corpus.person(person_id)
        if p is None:
            return []
        credits = p.filmography if acting else p.directed
        movies = [self.corpus.movie(c[0]) for c in credits]
        return [m for m in movies if m.year < year]

    def _gross(self, ms: list[MovieRecord]) -> list[float]:
        return [float(m.revenue_usd) for m in ms if m.revenue_usd is not None]

    def _profits(self, ms: list[MovieRecord]) -> list[float]:
        return [p for m in ms if (p := _profit(m)) is not None]

    def actor_prior_gross(self, person_id: str, year: int) -> float:
        key = (person_id, year)
        if key not in self._gross_cache:
            self._gross_cache[key] = sum(self._gross(self._prior_movies(person_id, year)))
        return self._gross_cache[key]

    # --- feature families -------------------------------------------------

    def star_power_features(self, movie: MovieRecord) -> dict[str, float]:
        team = movie.team(self.team_size)
        year = movie.year
        out: dict[str, float] = {}

        tenures, gross_totals, gross_avgs = [], [], []
        profit_totals, profit_avgs, profit_tops = [], [], []
        any_history = any_profit = False
        for pid in team:
            prior = self._prior_movies(pid, year)
            if prior:
                any_history = True
                years = [m.year for m in prior]
                tenures.append(max(years) - min(years))
            else:
                tenures.append(0)
            gross = self._gross(prior)
            gross_totals.append(sum(gross))
            gross_avgs.append(sum(gross) / len(gross) if gross else 0.0)
            profits = self._profits(prior)
            if profits:
                any_profit = True
                profit_totals.append(sum(profits))
                profit_avgs.append(sum(profits) / len(profits))
                profit_tops.append(max(profits))
            else:
                profit_totals.append(0.0)
                profit_avgs.append(0.0)
                profit_tops.append(0.0)

        n = max(len(team), 1)
        out["tenure_total"] = float(sum(tenures))
        out["tenure_avg"] = sum(tenures) / n
        out["actor_gross_total"] = float(sum(gross_totals))
        out["actor_gross_avg"] = sum(gross_totals) / n
        out["actor_gross_avg_per_movie"] = sum(gross_avgs) / n
        out["actor_history_missing"] = 0.0 if any_history else 1.0
        out["actor_profit_total"] = float(sum(profit_totals))
        out["actor_profit_avg"] = sum(profit_avgs) / n
        out["actor_profit_top"] = max(profit_tops) if profit_tops else 0.0
        out["actor_profit_missing"] = 0.0 if any_profit else 1.0

        d_prior = (
            self._prior_movies(movie.director_id, year, acting=False)
            if movie.director_id else []
        )
        d_gross = self._gross(d_prior)
        d_profits = self._profits(d_prior)
        out["director_gross_total"] = sum(d_gross)
        out["director_gross_avg"] = sum(d_gross) / len(d_gross) if d_gross else 0.0
        out["director_history_missing"] = 0.0 if d_prior else 1.0
        out["director_profit_total"] = sum(d_profits)
        out["director_profit_avg"] = sum(d_profits) / len(d_profits) if d_profits else 0.0
        out["director_profit_top"] = max(d_profits) if d_profits else 0.0
        out["director_profit_missing"] = 0.0 if d_profits else 1.0
        return out

    def network_features(self, movie: MovieRecord) -> dict[str, float]:
        snap = self.snapshots.get(movie.year - 1)
        if snap is None:
            raise FeatureError(f"no collaboration snapshot for year {movie.year - 1}")
        metrics = self._snapshot_metrics(movie.year - 1)
        team = collab.team_of(movie, self.team_size)
        out: dict[str, float] = {}
        singleton = len(team.members) < 2
        out["net_team_singleton"] = 1.0 if singleton else 0.0
        out["net_heterogeneity"] = 0.0 if singleton else collab.heterogeneity(snap, team)
        out["net_avg_degree"] = collab.degree_stats(snap, team)["average_degree"]
        bvals = [metrics.betweenness_of(p) for p in team.members]
        out["net_betweenness_total"] = sum(bvals)
        out["net_betweenness_avg"] = sum(bvals) / len(bvals)
        ad = collab.actor_director_collab(self.corpus, movie.year - 1, team, self.team_size)
        out["ad_collab_frequency"] = ad["avg_frequency"]
        out["ad_collab_profit"] = ad["avg_profit"]
        out["ad_collab_missing"] = ad["cold_start"]
        out["net_delta_clustering"] = 0.0 if singleton else metrics.delta_clustering(team)
        out["net_delta_avg_path"] = 0.0 if singleton else metrics.delta_avg_shortest_path(team)
        return out

    def _theta(self, movie: MovieRecord) -> tuple[np.ndarray, bool]:
        if not movie.synopsis:
            k = self.topic_model.num_topics
            return np.full(k, 1.0 / k), True
        tokens = text.preprocess_synopsis(movie.synopsis)
        theta = topics.infer(
            self.topic_model,
            tokens,
            iterations=self.infer_iterations,
            seed=topics.doc_seed(self.seed, tokens),
        )
        return theta, False

    def what_features(self, movie: MovieRecord) -> dict[str, float]:
        out: dict[str, float] = {}
        for g in self.registry.names:
            out[f"genre_{g}"] = 1.0 if g in movie.genres else 0.0
        for r in MPAA_RATINGS:
            out[f"rating_{r}"] = 1.0 if movie.mpaa_rating == r else 0.0
        theta, missing = self._theta(movie)
        for k, v in enumerate(theta):
            out[f"topic_{k}"] = float(v)
        out["synopsis_missing"] = 1.0 if missing else 0.0
        for kind in ("comic", "true_story", "book"):
            out[f"adapt_{kind}"] = 1.0 if kind in movie.adaptation else 0.0
        out["budget_usd"] = float(movie.budget_usd or 0)
        return out

    def when_features(self, movie: MovieRecord) -> dict[str, float]:
        out: dict[str, float] = {}
        prior = [
            p for m in self._by_year.get(movie.year - 1, ())
            if (p := _profit(m)) is not None
        ]
        out["annual_avg_profit"] = sum(prior) / len(prior) if prior else 0.0
        out["annual_profit_missing"] = 0.0 if prior else 1.0
        date = movie.release_date
        out["release_date_missing"] = 0.0 if date else 1.0
        out["holiday_release"] = 1.0 if date and is_holiday_release(date) else 0.0
        for s in SEASONS:
            out[f"season_{s}"] = 1.0 if date and _SEASON_BY_MONTH[date.month] == s else 0.0
        out["year_of_release"] = float(movie.year)
        return out

    def genre_experience(self, person_id: str, year: int) -> dict[str, float]:
        """Per-genre appearance proportion from strictly-prior acting credits."""
        prior = self._prior_movies(person_id, year)
        if not prior:
            return {}
        counts: dict[str, int] = {}
        for m in prior:
            for g in m.genres:
                counts[g] = counts.get(g, 0) + 1
        return {g: c / len(prior) for g, c in counts.items()}

    def genre_expertise(self, movie: MovieRecord) -> dict[str, float]:
        team = movie.team(self.team_size)
        genres = movie.genres
        n = max(len(team), 1)
        age = wage = cn = 0.0
        for pid in team:
            a = self.genre_experience(pid, movie.year)
            dot = sum(a.get(g, 0.0) for g in genres)
            log_gross = math.log10(self.actor_prior_gross(pid, movie.year) + 1.0)
            age += dot
            wage += log_gross * dot
            cn = max(cn, log_gross / (dot + 1.0))
        return {
            "hybrid_age": age / n,
            "hybrid_wage": wage / n,
            "hybrid_cast_novelty": cn,
        }

    def market_trend(self, movie: MovieRecord) -> dict[str, float]:
        out: dict[str, float] = {}
        prior_year = [
            (m, roi_of(m.revenue_usd, m.budget_usd))
            for m in self._by_year.get(movie.year - 1, ())
            if m.revenue_usd is not None and m.budget_usd
        ]
        same_genre = [(m, r) for m, r in prior_year if m.genres & movie.genres]
        out["market_missing"] = 0.0 if same_genre else 1.0
        out["annual_profit_pct_by_genre"] = (
            sum(1 for _, r in same_genre if r > 0) / len(same_genre) if same_genre else 0.0
        )
        out["awpg"] = sum(
            _genre_cosine(movie.genres, m.genres) * r for m, r in prior_year
        )
        competitors = [
            m for m in self._dated
            if m.movie_id != movie.movie_id
            and movie.release_date is not None
            and abs((m.release_date - movie.release_date).days) <= COMPETITION_WINDOW_DAYS
        ]
        if competitors:
            powers = [
                sum(self.actor_prior_gross(pid, m.year) for pid in m.team(self.team_size))
                for m in competitors
            ]
            out["competition"] = sum(powers) / len(powers)
            out["competition_missing"] = 0.0
        else:
            out["competition"] = 0.0
            out["competition_missing"] = 1.0
        return out

    # --- assembly ---------------------------------------------------------

    def features_for(self, movie: MovieRecord) -> np.ndarray:
        values: dict[str, float] = {}
        values.update(self.star_power_features(movie))
        values.update(self.network_features(movie))
        values.update(self.what_features(movie))
        values.update(self.when_features(movie))
        values.update(self.genre_expertise(movie))
        values.update(self.market_trend(movie))
        row = np.array([values[c.name] for c in self._schema.columns], dtype=np.float64)
        if not np.isfinite(row).all():
            bad = [c.name for c, v in zip(self._schema.columns, row) if not math.isfinite(v)]
            raise FeatureError(f"non-finite feature values for {movie.movie_id}: {bad}")
        return row

    def assemble(self, experiment_filter: ExperimentFilter) -> tuple[FeatureSchema, list[str], np.ndarray]:
        """Feature matrix for every filtered movie, rows sorted by movie_id."""
        selected = [m for m in self.corpus if experiment_filter.matches(m)]
        ids = [m.movie_id for m in selected]
        if not selected:
            return self._schema, [], np.zeros((0, len(self._schema.columns)))
        matrix = np.stack([self.features_for(m) for m in selected])
        return self._schema, ids, matrix


def export_matrix_csv(schema: FeatureSchema, ids: list[str], matrix: np.ndarray) -> str:
    """CSV text with movie_id first; pair with the JSON schema sidecar."""
    lines = ["movie_id," + ",".join(schema.names)]
    for mid, row in zip(ids, matrix):
        lines.append(mid + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"
