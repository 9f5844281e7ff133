import json
from pathlib import Path

import pytest

from mias.corpus import load_corpus
from mias.synthetic import SyntheticConfig, write_corpus


def movie_json(
    movie_id,
    year,
    cast,
    director="d1",
    genres=("Drama",),
    rating="PG13",
    budget=1_000_000,
    revenue=2_000_000,
    release_date=None,
    synopsis=None,
    title=None,
    **extra,
):
    obj = {
        "id": movie_id,
        "title": title or f"Title {movie_id}",
        "year": year,
        "genres": list(genres),
        "rating": rating,
        "budget": budget,
        "revenue": revenue,
        "cast": [
            {"id": pid, "name": f"Name {pid}", "billing": i}
            for i, pid in enumerate(cast)
        ],
        "director": {"id": director, "name": f"Name {director}"} if director else None,
        "synopsis": synopsis,
        "release_date": release_date,
    }
    obj.update(extra)
    return obj


def write_jsonl(path: Path, objs) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for o in objs:
            fh.write(json.dumps(o) + "\n")
    return path


def corpus_from(objs, tmp_path: Path):
    path = write_jsonl(tmp_path / "corpus.jsonl", objs)
    corpus, report = load_corpus(path)
    return corpus, report


@pytest.fixture(scope="session")
def small_synthetic(tmp_path_factory):
    """A compact planted-signal corpus shared by the slower integration tests."""
    path = tmp_path_factory.mktemp("syn") / "corpus.jsonl"
    config = SyntheticConfig(
        n_movies=300,
        first_year=2000,
        last_year=2005,
        warmup_years=3,
        warmup_movies_per_year=40,
        n_actors=120,
        n_directors=15,
        seed=11,
    )
    manifest = write_corpus(path, config)
    return path, config, manifest


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance gate lines after capture is torn down."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance gate")
        for line in RESULTS:
            terminalreporter.write_line(line)
