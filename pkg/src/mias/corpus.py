"""Movie corpus: record types, JSONL loading/saving, filtering, adaptation tagging."""

from __future__ import annotations

import datetime as dt
import json
import re
from dataclasses import dataclass, field, replace
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator

MPAA_RATINGS = ("G", "PG", "PG13", "R", "NC17", "Unknown")
ADAPTATION_KINDS = ("comic", "true_story", "book")
FRANCHISE_FLAGS = ("sequel", "remake", "franchise")

# Cutoff for the first-billed team used by all network and hybrid features.
DEFAULT_TEAM_SIZE = 8


class CorpusError(Exception):
    """Raised for malformed corpus files or invariant violations."""


@dataclass(frozen=True)
class MovieRecord:
    movie_id: str
    title: str
    year: int
    release_date: dt.date | None = None
    genres: frozenset[str] = frozenset()
    mpaa_rating: str = "Unknown"
    budget_usd: int | None = None
    revenue_usd: int | None = None
    cast: tuple[str, ...] = ()
    director_id: str | None = None
    synopsis: str | None = None
    adaptation: frozenset[str] = frozenset()
    franchise_flags: frozenset[str] = frozenset()

    def team(self, size: int = DEFAULT_TEAM_SIZE) -> tuple[str, ...]:
        """First-billed cast members used as the movie's team."""
        return self.cast[:size]

    def populated_count(self) -> int:
        return sum(
            v is not None and v != () and v != frozenset()
            for v in (self.release_date, self.budget_usd, self.revenue_usd,
                      self.cast, self.director_id, self.synopsis,
                      self.genres, self.adaptation)
        )


@dataclass(frozen=True)
class PersonRecord:
    person_id: str
    name: str
    # acting credits: (movie_id, year, billing_position), sorted by year
    filmography: tuple[tuple[str, int, int], ...] = ()
    # directing credits: (movie_id, year), sorted by year
    directed: tuple[tuple[str, int], ...] = ()


@dataclass(frozen=True)
class GenreRegistry:
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.names)) != len(self.names):
            raise CorpusError("duplicate genre names in registry")

    @property
    def index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.names)}

    def __len__(self) -> int:
        return len(self.names)


@dataclass(frozen=True)
class ExperimentFilter:
    year_range: tuple[int, int] | None = None
    require_budget: bool = False
    require_revenue: bool = False
    exclude_ratings: frozenset[str] = frozenset()
    exclude_genres: frozenset[str] = frozenset()
    exclude_franchise: bool = False

    def __post_init__(self) -> None:
        if self.year_range and self.year_range[0] > self.year_range[1]:
            raise CorpusError("filter min_year > max_year")

    def matches(self, m: MovieRecord) -> bool:
        if self.year_range and not (self.year_range[0] <= m.year <= self.year_range[1]):
            return False
        if self.require_budget and not m.budget_usd:
            return False
        if self.require_revenue and m.revenue_usd is None:
            return False
        if m.mpaa_rating in self.exclude_ratings:
            return False
        if self.exclude_genres & m.genres:
            return False
        if "Unknown" in self.exclude_genres and not m.genres:
            return False
        if self.exclude_franchise and m.franchise_flags:
            return False
        return True


def experiment_preset(min_year: int = 2000, max_year: int = 2010) -> ExperimentFilter:
    """Filter configuration matching the shipped experiment protocol."""
    return ExperimentFilter(
        year_range=(min_year, max_year),
        require_budget=True,
        require_revenue=True,
        exclude_ratings=frozenset({"Unknown"}),
        exclude_genres=frozenset({"Unknown", "Documentary"}),
        exclude_franchise=True,
    )


@dataclass(frozen=True)
class LoadReport:
    records_read: int = 0
    duplicates_merged: int = 0
    invalid_lines: tuple[tuple[int, str], ...] = ()
    dangling_refs: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "records_read": self.records_read,
            "duplicates_merged": self.duplicates_merged,
            "invalid_lines": [{"line": n, "error": e} for n, e in self.invalid_lines],
            "dangling_refs": list(self.dangling_refs),
        }


class Corpus:
    """Immutable movie corpus with resolved person cross-references."""

    def __init__(self, movies: Iterable[MovieRecord], names: dict[str, str] | None = None):
        self._movies: dict[str, MovieRecord] = {m.movie_id: m for m in movies}
        self._names = dict(names or {})
        self._persons = self._build_persons()
        self.genre_registry = GenreRegistry(
            tuple(sorted({g for m in self._movies.values() for g in m.genres}))
        )

    def _build_persons(self) -> dict[str, PersonRecord]:
        filmos: dict[str, list[tuple[str, int, int]]] = {}
        directed: dict[str, list[tuple[str, int]]] = {}
        for m in self._movies.values():
            for pos, pid in enumerate(m.cast):
                filmos.setdefault(pid, []).append((m.movie_id, m.year, pos))
            if m.director_id:
                directed.setdefault(m.director_id, []).append((m.movie_id, m.year))
        return {
            pid: PersonRecord(
                pid,
                self._names.get(pid, pid),
                tuple(sorted(filmos.get(pid, ()), key=lambda e: (e[1], e[0]))),
                tuple(sorted(directed.get(pid, ()), key=lambda e: (e[1], e[0]))),
            )
            for pid in sorted(set(filmos) | set(directed))
        }

    def __len__(self) -> int:
        return len(self._movies)

    def __contains__(self, movie_id: str) -> bool:
        return movie_id in self._movies

    def __iter__(self) -> Iterator[MovieRecord]:
        return iter(sorted(self._movies.values(), key=lambda m: m.movie_id))

    def movie(self, movie_id: str) -> MovieRecord:
        return self._movies[movie_id]

    def person(self, person_id: str) -> PersonRecord | None:
        return self._persons.get(person_id)

    def person_name(self, person_id: str) -> str:
        return self._names.get(person_id, person_id)

    @property
    def persons(self) -> dict[str, PersonRecord]:
        return self._persons

    def filtered(self, f: ExperimentFilter) -> "Corpus":
        """View passing every filter criterion; person histories keep the full corpus."""
        view = Corpus((m for m in self._movies.values() if f.matches(m)), self._names)
        return view

    def years(self) -> tuple[int, int]:
        ys = [m.year for m in self._movies.values()]
        return (min(ys), max(ys)) if ys else (0, 0)


_WS_RE = re.compile(r"\s+")


def clean_title(raw: str) -> str:
    """Strip `*` and `-`, collapse whitespace, trim; case preserved."""
    return _WS_RE.sub(" ", raw.replace("*", "").replace("-", "")).strip()


@lru_cache(maxsize=1)
def _adaptation_keywords() -> dict[str, list[str]]:
    data = json.loads(
        resources.files("mias.data").joinpath("adaptation_keywords.json").read_text("utf-8")
    )
    return {k: data[k] for k in ADAPTATION_KINDS}


def detect_adaptation(synopsis: str | None, metadata_keywords: Iterable[str] = ()) -> frozenset[str]:
    """Match the shipped keyword list against synopsis text and metadata hints."""
    haystack = " ".join([synopsis or "", *metadata_keywords]).lower()
    kinds = {
        kind
        for kind, phrases in _adaptation_keywords().items()
        if any(p in haystack for p in phrases)
    }
    # explicit metadata hints naming a kind always count
    kinds.update(k for k in ADAPTATION_KINDS if k in {h.lower() for h in metadata_keywords})
    return frozenset(kinds)


def _parse_movie(obj: dict, names: dict[str, str]) -> MovieRecord:
    if not isinstance(obj, dict):
        raise CorpusError("movie object must be a JSON object")
    movie_id = obj["id"]
    year = int(obj["year"])
    if not 1900 <= year <= 2100:
        raise CorpusError(f"year {year} out of range [1900, 2100]")
    budget = obj.get("budget")
    if budget is not None:
        budget = int(budget)
        if budget <= 0:
            raise CorpusError(f"budget must be positive, got {budget}")
    revenue = obj.get("revenue")
    if revenue is not None:
        revenue = int(revenue)
        if revenue < 0:
            raise CorpusError(f"revenue must be nonnegative, got {revenue}")
    rating = obj.get("rating") or "Unknown"
    if rating not in MPAA_RATINGS:
        raise CorpusError(f"unknown rating {rating!r}")
    release = obj.get("release_date")
    release_date = dt.date.fromisoformat(release) if release else None

    cast_ids: list[str] = []
    entries = sorted(obj.get("cast") or [], key=lambda c: c.get("billing", 0))
    for entry in entries:
        pid = entry["id"]
        if pid in cast_ids:
            raise CorpusError(f"duplicate cast member {pid}")
        cast_ids.append(pid)
        if entry.get("name"):
            names[pid] = entry["name"]

    director = obj.get("director")
    director_id = None
    if director:
        director_id = director["id"]
        if director.get("name"):
            names[director_id] = director["name"]

    synopsis = obj.get("synopsis") or None
    hints = obj.get("adaptation_hints") or []
    flags = frozenset(obj.get("franchise_flags") or [])
    bad_flags = flags - set(FRANCHISE_FLAGS)
    if bad_flags:
        raise CorpusError(f"unknown franchise flags {sorted(bad_flags)}")

    return MovieRecord(
        movie_id=movie_id,
        title=clean_title(obj.get("title") or ""),
        year=year,
        release_date=release_date,
        genres=frozenset(obj.get("genres") or []),
        mpaa_rating=rating,
        budget_usd=budget,
        revenue_usd=revenue,
        cast=tuple(cast_ids),
        director_id=director_id,
        synopsis=synopsis,
        adaptation=detect_adaptation(synopsis, hints),
        franchise_flags=flags,
    )


def _merge(a: MovieRecord, b: MovieRecord) -> MovieRecord:
    """Keep the record with more populated fields; ties keep the first seen."""
    return b if b.populated_count() > a.populated_count() else a


def load_corpus(path: str | Path) -> tuple[Corpus, LoadReport]:
    """Load a UTF-8 JSONL corpus file. Invalid lines are reported, not fatal."""
    path = Path(path)
    if not path.exists():
        raise CorpusError(f"corpus file not found: {path}")

    movies: dict[str, MovieRecord] = {}
    names: dict[str, str] = {}
    read = merged = 0
    invalid: list[tuple[int, str]] = []
    for lineno, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        read += 1
        try:
            record = _parse_movie(json.loads(line), names)
        except (CorpusError, KeyError, ValueError, TypeError) as exc:
            invalid.append((lineno, f"line {lineno}: {exc}"))
            continue
        if record.movie_id in movies:
            movies[record.movie_id] = _merge(movies[record.movie_id], record)
            merged += 1
        else:
            movies[record.movie_id] = record

    corpus = Corpus(movies.values(), names)
    report = LoadReport(
        records_read=read,
        duplicates_merged=merged,
        invalid_lines=tuple(invalid),
        dangling_refs=(),
    )
    return corpus, report


def movie_to_json(m: MovieRecord, names: dict[str, str]) -> dict:
    return {
        "id": m.movie_id,
        "title": m.title,
        "year": m.year,
        "release_date": m.release_date.isoformat() if m.release_date else None,
        "genres": sorted(m.genres),
        "rating": m.mpaa_rating,
        "budget": m.budget_usd,
        "revenue": m.revenue_usd,
        "cast": [
            {"id": pid, "name": names.get(pid, pid), "billing": i}
            for i, pid in enumerate(m.cast)
        ],
        "director": (
            {"id": m.director_id, "name": names.get(m.director_id, m.director_id)}
            if m.director_id else None
        ),
        "synopsis": m.synopsis,
        "adaptation_hints": sorted(m.adaptation),
        "franchise_flags": sorted(m.franchise_flags),
    }


def save_corpus(corpus: Corpus, path: str | Path) -> None:
    """Write the canonical JSONL form; load(save(c)) round-trips field-identically."""
    names = {pid: p.name for pid, p in corpus.persons.items()}
    with open(path, "w", encoding="utf-8") as fh:
        for m in corpus:
            fh.write(json.dumps(movie_to_json(m, names), sort_keys=True) + "\n")
