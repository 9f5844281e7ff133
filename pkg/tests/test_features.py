import datetime as dt
import math

import numpy as np
import pytest

import oracles
from conftest import corpus_from, movie_json

from mias import collab, topics
from mias.corpus import ExperimentFilter, experiment_preset
from mias.features import (
    FeatureEngine,
    FeatureError,
    export_matrix_csv,
    holidays_for_year,
    is_holiday_release,
)


def _fixture_movies():
    """Hand-built five-year corpus with overlapping casts and varied genres."""
    return [
        movie_json("m1", 1998, ["a1", "a2"], director="d1",
                   genres=("Action", "Drama"), budget=2_000_000, revenue=5_000_000),
        movie_json("m2", 1998, ["a2", "a3"], director="d2",
                   genres=("Comedy",), budget=1_000_000, revenue=500_000),
        movie_json("m3", 1999, ["a1", "a3", "a4"], director="d1",
                   genres=("Action",), budget=3_000_000, revenue=9_000_000),
        movie_json("m4", 1999, ["a5"], director="d3",
                   genres=("Drama", "Comedy"), budget=500_000, revenue=600_000),
        movie_json("m5", 2000, ["a1", "a2", "a5"], director="d2",
                   genres=("Action", "Comedy"), budget=4_000_000, revenue=3_000_000,
                   release_date="2000-07-04"),
        movie_json("m6", 2000, ["a4", "a6"], director="d1",
                   genres=("Drama",), budget=2_500_000, revenue=7_000_000,
                   release_date="2000-07-20"),
        movie_json("m7", 2001, ["a1", "a4"], director="d3",
                   genres=("Action", "Drama"), budget=6_000_000, revenue=4_000_000,
                   release_date="2001-03-14"),
        movie_json("m8", 2001, ["a2", "a6", "a7"], director="d2",
                   genres=("Comedy",), budget=1_500_000, revenue=2_500_000,
                   release_date="2001-12-24"),
    ]


def _plain(objs):
    """Reduce the JSONL dicts to the shapes the oracle functions expect."""
    out = []
    for o in objs:
        out.append(
            {
                "id": o["id"],
                "year": o["year"],
                "genres": set(o["genres"]),
                "cast": [c["id"] for c in o["cast"]],
                "budget": o["budget"],
                "revenue": o["revenue"],
            }
        )
    return out


@pytest.fixture(scope="module")
def engine(tmp_path_factory):
    corpus, report = corpus_from(_fixture_movies(), tmp_path_factory.mktemp("feat"))
    assert not report.invalid_lines
    model, _ = topics.fit([["alpha", "beta"], ["beta", "gamma"], ["alpha", "gamma"]],
                          num_topics=2, iterations=20, seed=0)
    snapshots = collab.build_snapshots(corpus, 1997, 2001)
    return FeatureEngine(corpus, snapshots, model, seed=0)


# --- genre expertise (AGE / WAGE / cast novelty) -----------------------------


def test_genre_experience_matches_oracle(engine):
    movies = _plain(_fixture_movies())
    for pid in ("a1", "a2", "a3", "a5"):
        for year in (1999, 2000, 2001):
            assert engine.genre_experience(pid, year) == pytest.approx(
                oracles.genre_experience(movies, pid, year)
            )


def test_prior_gross_matches_oracle(engine):
    movies = _plain(_fixture_movies())
    for pid in ("a1", "a2", "a4", "a6"):
        for year in (1999, 2000, 2001):
            assert engine.actor_prior_gross(pid, year) == pytest.approx(
                oracles.prior_gross(movies, pid, year), abs=1e-9
            )


def test_age_wage_novelty_match_oracles(engine):
    movies = _plain(_fixture_movies())
    for mid in ("m5", "m6", "m7", "m8"):
        movie = engine.corpus.movie(mid)
        team = movie.team(engine.team_size)
        got = engine.genre_expertise(movie)
        assert got["hybrid_age"] == pytest.approx(
            oracles.age(movies, team, movie.genres, movie.year), abs=1e-9
        )
        assert got["hybrid_wage"] == pytest.approx(
            oracles.wage(movies, team, movie.genres, movie.year), abs=1e-9
        )
        assert got["hybrid_cast_novelty"] == pytest.approx(
            oracles.cast_novelty(movies, team, movie.genres, movie.year), abs=1e-9
        )


def test_awpg_matches_oracle(engine):
    movies = _plain(_fixture_movies())
    for mid in ("m5", "m6", "m7", "m8"):
        movie = engine.corpus.movie(mid)
        got = engine.market_trend(movie)["awpg"]
        assert got == pytest.approx(
            oracles.awpg(movies, movie.genres, movie.year), abs=1e-9
        )


def test_network_heterogeneity_matches_oracle(engine):
    for mid in ("m5", "m7"):
        movie = engine.corpus.movie(mid)
        snap = engine.snapshots[movie.year - 1]
        adj = {n: dict(snap.neighbors(n)) for n in snap.nodes}
        team = movie.team(engine.team_size)
        got = engine.network_features(movie)["net_heterogeneity"]
        assert got == pytest.approx(oracles.heterogeneity(adj, team), abs=1e-9)


# --- star power --------------------------------------------------------------


def test_star_power_totals(engine):
    movie = engine.corpus.movie("m5")  # a1, a2, a5 in 2000
    out = engine.star_power_features(movie)
    # a1: m1 (5e6) + m3 (9e6); a2: m1 + m2 (0.5e6); a5: m4 (0.6e6)
    assert out["actor_gross_total"] == pytest.approx(5e6 + 9e6 + 5e6 + 0.5e6 + 0.6e6)
    # profits: a1 3e6 + 6e6; a2 3e6 - 0.5e6; a5 0.1e6
    assert out["actor_profit_total"] == pytest.approx(9e6 + 2.5e6 + 0.1e6)
    assert out["actor_profit_top"] == pytest.approx(6e6)
    # d2 directed m2 before 2000
    assert out["director_gross_total"] == pytest.approx(0.5e6)
    assert out["director_profit_total"] == pytest.approx(-0.5e6)
    assert out["actor_history_missing"] == 0.0


def test_star_power_cold_start(engine):
    movie = engine.corpus.movie("m1")  # 1998: nobody has history
    out = engine.star_power_features(movie)
    assert out["actor_gross_total"] == 0.0
    assert out["actor_history_missing"] == 1.0
    assert out["actor_profit_missing"] == 1.0
    assert out["director_history_missing"] == 1.0


# --- when features ------------------------------------------------------------


def test_holiday_calendar_contains_fixed_days():
    days = holidays_for_year(2001)
    assert days == sorted(days)
    assert dt.date(2001, 1, 1) in days
    assert dt.date(2001, 12, 25) in days
    # Thanksgiving 2001: fourth Thursday of November
    assert dt.date(2001, 11, 22) in days


def test_is_holiday_release_window():
    assert is_holiday_release(dt.date(2001, 12, 24))
    assert is_holiday_release(dt.date(2002, 1, 3))  # within 7 days of Jan 1
    assert not is_holiday_release(dt.date(2001, 3, 14))
    assert is_holiday_release(dt.date(2000, 7, 4))


def test_when_features_season_and_holiday(engine):
    m5 = engine.corpus.movie("m5")  # July 4th
    out = engine.when_features(m5)
    assert out["holiday_release"] == 1.0
    assert out["season_summer"] == 1.0
    assert sum(out[f"season_{s}"] for s in ("spring", "summer", "fall", "winter")) == 1.0
    assert out["year_of_release"] == 2000.0
    # prior-year profit: 1999 movies m3 (6e6) and m4 (0.1e6)
    assert out["annual_avg_profit"] == pytest.approx((6e6 + 0.1e6) / 2)

    m7 = engine.corpus.movie("m7")  # mid-March
    out7 = engine.when_features(m7)
    assert out7["holiday_release"] == 0.0
    assert out7["season_spring"] == 1.0

    m1 = engine.corpus.movie("m1")  # no release date
    out1 = engine.when_features(m1)
    assert out1["release_date_missing"] == 1.0
    assert out1["holiday_release"] == 0.0
    assert all(out1[f"season_{s}"] == 0.0 for s in ("spring", "summer", "fall", "winter"))


def test_competition_averages_star_power(engine):
    m5 = engine.corpus.movie("m5")  # 2000-07-04; m6 on 07-20 is within 30 days
    out = engine.market_trend(m5)
    assert out["competition_missing"] == 0.0
    m6 = engine.corpus.movie("m6")
    power = sum(engine.actor_prior_gross(p, 2000) for p in m6.team(engine.team_size))
    assert out["competition"] == pytest.approx(power)

    m8 = engine.corpus.movie("m8")  # December release, nothing nearby
    out8 = engine.market_trend(m8)
    assert out8["competition"] == 0.0
    assert out8["competition_missing"] == 1.0


# --- schema and assembly -------------------------------------------------------


def test_schema_fingerprint_stable_and_config_sensitive(engine):
    rebuilt = FeatureEngine(engine.corpus, engine.snapshots, engine.topic_model, seed=0)
    assert rebuilt.schema.fingerprint() == engine.schema.fingerprint()
    reseeded = FeatureEngine(engine.corpus, engine.snapshots, engine.topic_model, seed=1)
    assert reseeded.schema.fingerprint() != engine.schema.fingerprint()


def test_feature_set_tags(engine):
    schema = engine.schema
    full = schema.select("full")
    assert full == list(range(len(schema.columns)))
    without_new = set(schema.select("without_new"))
    for i, col in enumerate(schema.columns):
        assert (i in without_new) == (not col.is_new)
    b1_names = {schema.columns[i].name for i in schema.select("benchmark1")}
    assert "year_of_release" in b1_names
    assert "budget_usd" not in b1_names
    b2_names = {schema.columns[i].name for i in schema.select("benchmark2")}
    assert "budget_usd" in b2_names
    assert not any(n.startswith("topic_") for n in b1_names | b2_names)
    with pytest.raises(FeatureError):
        schema.select("kitchen_sink")


def test_assemble_sorted_and_finite(engine):
    schema, ids, matrix = engine.assemble(
        ExperimentFilter(year_range=(2000, 2001), require_budget=True, require_revenue=True)
    )
    assert ids == sorted(ids)
    assert set(ids) == {"m5", "m6", "m7", "m8"}
    assert matrix.shape == (4, len(schema.columns))
    assert np.isfinite(matrix).all()


def test_assemble_empty_filter(engine):
    schema, ids, matrix = engine.assemble(ExperimentFilter(year_range=(2050, 2051)))
    assert ids == []
    assert matrix.shape == (0, len(schema.columns))


def test_missing_snapshot_raises(engine):
    movie = engine.corpus.movie("m5")
    bare = FeatureEngine(engine.corpus, {2005: engine.snapshots[2000]},
                         engine.topic_model, seed=0)
    with pytest.raises(FeatureError):
        bare.network_features(movie)


# --- temporal hygiene -----------------------------------------------------------


def _mutated_engine(tmp_path, mutate):
    objs = _fixture_movies()
    for o in objs:
        mutate(o)
    corpus, _ = corpus_from(objs, tmp_path)
    model, _ = topics.fit([["alpha", "beta"], ["beta", "gamma"], ["alpha", "gamma"]],
                          num_topics=2, iterations=20, seed=0)
    snapshots = collab.build_snapshots(corpus, 1997, 2001)
    return FeatureEngine(corpus, snapshots, model, seed=0)


def test_future_outcomes_do_not_leak(engine, tmp_path):
    """Changing a later movie's financials must not move any earlier feature."""
    def mutate(o):
        if o["id"] == "m8":  # 2001; target is m5/m6 from 2000
            o["revenue"] = 999_000_000
            o["budget"] = 123_456
    mutated = _mutated_engine(tmp_path, mutate)
    for mid in ("m5", "m6"):
        before = engine.features_for(engine.corpus.movie(mid))
        after = mutated.features_for(mutated.corpus.movie(mid))
        assert np.array_equal(before, after)


def test_same_year_outcomes_do_not_leak(engine, tmp_path):
    """Outcomes of same-year peers are unavailable at release time."""
    def mutate(o):
        if o["id"] == "m6":
            o["revenue"] = 999_000_000
    mutated = _mutated_engine(tmp_path, mutate)
    before = engine.features_for(engine.corpus.movie("m5"))
    after = mutated.features_for(mutated.corpus.movie("m5"))
    assert np.array_equal(before, after)


def test_competition_sees_future_slate_but_not_outcomes(engine, tmp_path):
    """The release calendar is announced ahead of time, so nearby future titles
    count as competitors; their box-office results still must not leak."""
    def mutate(o):
        if o["id"] == "m6":
            o["release_date"] = "2002-07-20"
            o["year"] = 2002
    mutated = _mutated_engine(tmp_path, mutate)
    snapshots = collab.build_snapshots(mutated.corpus, 1997, 2002)
    mutated = FeatureEngine(mutated.corpus, snapshots, mutated.topic_model, seed=0)
    out = mutated.market_trend(mutated.corpus.movie("m5"))
    assert out["competition_missing"] == 1.0  # m6 moved out of the window


# --- csv export ------------------------------------------------------------------


def test_export_matrix_csv_round_trips(engine):
    schema, ids, matrix = engine.assemble(experiment_preset(2000, 2001))
    text = export_matrix_csv(schema, ids, matrix)
    lines = text.strip().split("\n")
    header = lines[0].split(",")
    assert header == ["movie_id"] + schema.names
    parsed = []
    for line in lines[1:]:
        parts = line.split(",")
        assert parts[0] in ids
        parsed.append([float(v) for v in parts[1:]])
    assert np.array_equal(np.array(parsed), matrix)
