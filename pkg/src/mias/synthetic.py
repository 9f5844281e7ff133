"""Synthetic movie corpus generator with planted profitability signal.

The generator plants the ROI drivers in quantities that surface through the
novel feature families (actor/director profit histories, plot themes, per-genre
market trend), while budgets and revenues stay decoupled enough that raw gross
is a weak predictor. Used by the acceptance experiments; no real data needed.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

GENRES = (
    "Action", "Adventure", "Comedy", "Crime", "Drama", "Family",
    "Fantasy", "Horror", "Romance", "SciFi", "Thriller", "War",
)
RATINGS = ("G", "PG", "PG13", "R")

THEME_EFFECTS = (1.0, -1.0, 0.6, -0.6, 0.0, 0.0)
THEME_WORD_COUNT = 30
COMMON_WORDS = 60


@dataclass
class SyntheticConfig:
    n_movies: int = 2000
    first_year: int = 2000
    last_year: int = 2010
    warmup_years: int = 6
    warmup_movies_per_year: int = 120
    n_actors: int = 400
    n_directors: int = 40
    seed: int = 7
    team_min: int = 4
    team_max: int = 7
    budget_min: float = 200_000.0
    budget_max: float = 500_000_000.0
    # ROI driver weights
    actor_weight: float = 0.8
    director_weight: float = 0.2
    theme_weight: float = 0.9
    trend_weight: float = 0.8
    noise: float = 0.2
    trend_persistence: float = 0.9
    trend_step: float = 0.45
    synopsis_len: int = 60
    missing_synopsis_rate: float = 0.01

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _theme_vocab() -> list[list[str]]:
    return [
        [f"theme{t}word{w}" for w in range(THEME_WORD_COUNT)]
        for t in range(len(THEME_EFFECTS))
    ]


def _common_vocab() -> list[str]:
    return [f"common{w}" for w in range(COMMON_WORDS)]


class SyntheticGenerator:
    def __init__(self, config: SyntheticConfig | None = None):
        self.config = config or SyntheticConfig()
        self.rng = np.random.default_rng(self.config.seed)
        c = self.config
        self.actor_quality = self.rng.normal(0.0, 1.0, c.n_actors)
        self.director_quality = self.rng.normal(0.0, 1.0, c.n_directors)
        # actors favor one of three communities so the network has texture
        self.actor_community = self.rng.integers(0, 3, c.n_actors)
        self.trend = self._build_trend()
        self.theme_vocab = _theme_vocab()
        self.common_vocab = _common_vocab()

    def _build_trend(self) -> dict[int, np.ndarray]:
        c = self.config
        start = c.first_year - c.warmup_years
        trend: dict[int, np.ndarray] = {}
        cur = self.rng.normal(0.0, c.trend_step, len(GENRES))
        for year in range(start, c.last_year + 1):
            cur = c.trend_persistence * cur + self.rng.normal(
                0.0, c.trend_step * math.sqrt(1 - c.trend_persistence**2), len(GENRES)
            )
            trend[year] = cur.copy()
        return trend

    def _pick_team(self) -> np.ndarray:
        c = self.config
        size = int(self.rng.integers(c.team_min, c.team_max + 1))
        community = int(self.rng.integers(0, 3))
        pool = np.flatnonzero(self.actor_community == community)
        if self.rng.random() < 0.2:  # cross-community teams span holes
            pool = np.arange(c.n_actors)
        return self.rng.choice(pool, size=min(size, len(pool)), replace=False)

    def _synopsis(self, theme: int) -> str:
        c = self.config
        words = []
        for _ in range(c.synopsis_len):
            if self.rng.random() < 0.55:
                words.append(self.theme_vocab[theme][int(self.rng.integers(0, THEME_WORD_COUNT))])
            else:
                words.append(self.common_vocab[int(self.rng.integers(0, COMMON_WORDS))])
        return " ".join(words)

    def _movie(self, idx: int, year: int, warmup: bool) -> dict:
        c = self.config
        team = self._pick_team()
        director = int(self.rng.integers(0, c.n_directors))
        n_genres = 1 if self.rng.random() < 0.5 else 2
        genres = sorted(self.rng.choice(len(GENRES), size=n_genres, replace=False).tolist())
        theme = int(self.rng.integers(0, len(THEME_EFFECTS)))
        log_budget = self.rng.uniform(math.log(c.budget_min), math.log(c.budget_max))
        budget = int(round(math.exp(log_budget)))

        eta = (
            c.actor_weight * float(self.actor_quality[team].mean())
            + c.director_weight * float(self.director_quality[director])
            + c.theme_weight * THEME_EFFECTS[theme]
            + c.trend_weight * float(np.mean([self.trend[year][g] for g in genres]))
            + c.noise * float(self.rng.normal())
        )
        roi = math.expm1(eta)
        revenue = max(0, int(round(budget * (1.0 + roi))))

        day = int(self.rng.integers(0, 365))
        date = dt.date(year, 1, 1) + dt.timedelta(days=day)
        synopsis = None if self.rng.random() < c.missing_synopsis_rate else self._synopsis(theme)
        return {
            "id": f"m{year}_{idx:05d}",
            "title": f"Movie {year} {idx}",
            "year": year,
            "release_date": date.isoformat(),
            "genres": [GENRES[g] for g in genres],
            "rating": RATINGS[int(self.rng.integers(0, len(RATINGS)))],
            "budget": budget,
            "revenue": revenue,
            "cast": [
                {"id": f"a{int(a):04d}", "name": f"Actor {int(a)}", "billing": i}
                for i, a in enumerate(team)
            ],
            "director": {"id": f"d{director:03d}", "name": f"Director {director}"},
            "synopsis": synopsis,
            "adaptation_hints": [],
            "franchise_flags": [],
        }

    def generate(self) -> list[dict]:
        c = self.config
        movies: list[dict] = []
        idx = 0
        for year in range(c.first_year - c.warmup_years, c.first_year):
            for _ in range(c.warmup_movies_per_year):
                movies.append(self._movie(idx, year, warmup=True))
                idx += 1
        n_exp_years = c.last_year - c.first_year + 1
        per_year = [c.n_movies // n_exp_years] * n_exp_years
        for i in range(c.n_movies - sum(per_year)):
            per_year[i] += 1
        for offset, count in enumerate(per_year):
            year = c.first_year + offset
            for _ in range(count):
                movies.append(self._movie(idx, year, warmup=False))
                idx += 1
        return movies


def write_corpus(path: str | Path, config: SyntheticConfig | None = None) -> dict:
    """Generate and write a JSONL corpus; returns a small manifest."""
    config = config or SyntheticConfig()
    movies = SyntheticGenerator(config).generate()
    path = Path(path)
    with open(path, "w", encoding="utf-8") as fh:
        for m in movies:
            fh.write(json.dumps(m, sort_keys=True) + "\n")
    return {
        "path": str(path),
        "movies": len(movies),
        "config": config.to_json(),
    }
