"""Record service responses as JSON fixtures for the UI contract tests.

Runs the full pipeline on the small deterministic synthetic corpus, starts the
service in-process, replays the scripted scenario/edit requests, and writes
request/response pairs under tests/fixtures/. Rerunning with an unchanged
service produces byte-identical fixtures.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from click.testing import CliRunner
from fastapi.testclient import TestClient

from mias.cli import main
from mias.pipeline import PipelineConfig
from mias.service import build_app, load_state

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

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
"""


def build_artifacts(root: Path) -> Path:
    cfg = root / "config.toml"
    cfg.write_text(CONFIG_TOML, "utf-8")
    out = root / "artifacts"
    runner = CliRunner()
    for step in (["make-synthetic"], ["ingest", str(out / "corpus.jsonl")],
                 ["features"], ["train"]):
        result = runner.invoke(main, ["--config", str(cfg), "--out", str(out)] + step)
        if result.exit_code != 0:
            raise SystemExit(f"{step} failed: {result.output}")
    return out


def scenario_for(state, movie_id: str) -> dict:
    m = state.corpus.movie(movie_id)
    return {
        "movie_id": m.movie_id,
        "title": m.title,
        "cast": list(m.cast),
        "director_id": m.director_id,
        "genres": sorted(m.genres),
        "rating": m.mpaa_rating,
        "planned_release_date": m.release_date.isoformat(),
        "budget_usd": m.budget_usd,
        "synopsis": m.synopsis,
        "adaptation": sorted(m.adaptation),
    }


def write(name: str, payload: dict) -> None:
    path = FIXTURE_DIR / name
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", "utf-8")
    print(path)


def main_() -> None:
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        out = build_artifacts(Path(tmp))
        config = PipelineConfig(first_year=2000, last_year=2003, num_topics=3,
                                lda_iterations=20, seed=5, folds=4, model="logistic")
        state = load_state(out / "corpus.jsonl", out / "topic_model.json",
                           out / "model.json", config)
        client = TestClient(build_app(out / "corpus.jsonl", out / "topic_model.json",
                                      out / "model.json", config))

        movie_id = sorted(m.movie_id for m in state.corpus
                          if 2001 <= m.year <= 2003 and m.release_date)[0]
        base = scenario_for(state, movie_id)
        edits = [
            {"budget_usd": base["budget_usd"] * 2},
            {"genres": [g for g in state.engine.registry.names
                        if g not in base["genres"]][:1]},
        ]

        model = client.get("/v1/model")
        write("model.json", {"status": model.status_code, "body": model.json()})

        predict = client.post("/v1/predict", json=base)
        write("predict.json", {"request": base, "status": predict.status_code,
                               "body": predict.json()})

        whatif_req = {"base": base, "edits": edits}
        whatif = client.post("/v1/whatif", json=whatif_req)
        write("whatif.json", {"request": whatif_req, "status": whatif.status_code,
                              "body": whatif.json()})

        bad_patch = {"base": base, "edits": [{"popcorn_sales": 1}]}
        err = client.post("/v1/whatif", json=bad_patch)
        write("whatif_bad_edit.json", {"request": bad_patch, "status": err.status_code,
                                       "body": err.json()})

        bad_genre = dict(base, genres=["Kaiju"])
        err = client.post("/v1/predict", json=bad_genre)
        write("predict_unknown_genre.json", {"request": bad_genre,
                                             "status": err.status_code,
                                             "body": err.json()})

        persons = sorted(state.corpus.persons.items())[:40]
        write("person_index.json", {
            "persons": [{"id": pid, "name": rec.name} for pid, rec in persons],
        })


if __name__ == "__main__":
    sys.exit(main_())
