import pytest
from fastapi.testclient import TestClient

from mias.pipeline import PipelineConfig
from mias.service import build_app, create_app, load_state

from test_cli import CONFIG_TOML, _run_pipeline


@pytest.fixture(scope="module")
def service(tmp_path_factory):
    root = tmp_path_factory.mktemp("svc")
    cfg = root / "config.toml"
    cfg.write_text(CONFIG_TOML, "utf-8")
    out = root / "artifacts"
    _run_pipeline(out, cfg)
    config = PipelineConfig(first_year=2000, last_year=2003, num_topics=3,
                            lda_iterations=20, seed=5, folds=4, model="logistic")
    state = load_state(out / "corpus.jsonl", out / "topic_model.json",
                       out / "model.json", config)
    return TestClient(build_app(out / "corpus.jsonl", out / "topic_model.json",
                                out / "model.json", config)), state, out


def _scenario_for(state, movie_id):
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


def test_healthz_ready(service):
    client, _, _ = service
    r = client.get("/healthz")
    assert r.status_code == 200
    assert r.json() == {"status": "ready"}


def test_healthz_loading_and_503_before_load():
    client = TestClient(create_app(None))
    assert client.get("/healthz").json() == {"status": "loading"}
    r = client.post("/v1/predict", json={"cast": ["x"], "genres": ["Drama"]})
    assert r.status_code == 503
    assert r.json()["code"] == "not_loaded"


def test_model_info(service):
    client, state, _ = service
    info = client.get("/v1/model").json()
    assert info["model_kind"] == "logistic"
    assert info["schema_fingerprint"] == state.engine.schema.fingerprint()
    assert len(info["columns"]) == len(state.engine.schema.columns)
    assert info["label_spec"]["classes"]


def test_predict_matches_batch_features_exactly(service):
    """Service feature vectors must be bit-identical to the batch export."""
    client, state, out = service
    header, *lines = (out / "features.csv").read_text("utf-8").strip().split("\n")
    names = header.split(",")[1:]
    rows = {ln.split(",")[0]: [float(v) for v in ln.split(",")[1:]] for ln in lines}
    checked = 0
    for movie_id in sorted(rows)[:25]:
        m = state.corpus.movie(movie_id)
        if m.release_date is None:
            continue
        resp = client.post("/v1/predict", json=_scenario_for(state, movie_id))
        assert resp.status_code == 200, resp.text
        body = resp.json()
        got = {f["name"]: f["value"] for f in body["features"]}
        for name, expected in zip(names, rows[movie_id]):
            assert got[name] == expected, (movie_id, name)
        checked += 1
    assert checked >= 20


def test_predict_shape_and_purity(service):
    client, state, _ = service
    scenario = _scenario_for(state, sorted(m.movie_id for m in state.corpus if 2001 <= m.year <= 2003)[0])
    a = client.post("/v1/predict", json=scenario)
    b = client.post("/v1/predict", json=scenario)
    assert a.status_code == 200
    assert a.json() == b.json()
    body = a.json()
    assert abs(sum(body["probabilities"].values()) - 1.0) < 1e-9
    assert body["decision"] in body["probabilities"]
    assert body["roi_estimate"] > -1.0 - 1e-9
    assert body["cold_start"] == {
        "unknown_cast": [], "unknown_director": False, "extrapolated_year": False,
    }


def test_predict_cold_start_and_extrapolation(service):
    client, _, _ = service
    r = client.post("/v1/predict", json={
        "cast": ["Totally New Face"],
        "genres": ["Drama"],
        "rating": "PG13",
        "planned_release_date": "2012-06-15",
        "budget_usd": 5_000_000,
    })
    assert r.status_code == 200
    flags = r.json()["cold_start"]
    assert flags["unknown_cast"] == ["Totally New Face"]
    assert flags["extrapolated_year"] is True


def test_predict_resolves_person_by_name(service):
    client, state, _ = service
    pid = state.corpus.movie(sorted(m.movie_id for m in state.corpus if 2001 <= m.year <= 2003)[0]).cast[0]
    name = state.corpus.person_name(pid)
    r = client.post("/v1/predict", json={
        "cast": [name.upper()],
        "genres": ["Drama"],
        "rating": "PG13",
        "planned_release_date": "2003-06-15",
    })
    assert r.status_code == 200
    assert r.json()["cold_start"]["unknown_cast"] == []


@pytest.mark.parametrize(
    "patch,status,code,field",
    [
        ({"budget_usd": 0}, 400, "invalid_request", "budget_usd"),
        ({"planned_release_date": "not-a-date"}, 400, "invalid_request",
         "planned_release_date"),
        ({"planned_release_date": None}, 400, "invalid_request",
         "planned_release_date"),
        ({"cast": ["a1", "a1"]}, 400, "invalid_request", "cast"),
        ({"adaptation": ["haiku"]}, 400, "invalid_request", "adaptation"),
        ({"rating": "NC99"}, 404, "unknown_token", "rating"),
        ({"genres": ["Kaiju"]}, 404, "unknown_token", "genres"),
    ],
)
def test_predict_error_contract(service, patch, status, code, field):
    client, _, _ = service
    base = {
        "cast": ["a1"],
        "genres": ["Drama"],
        "rating": "PG13",
        "planned_release_date": "2003-06-15",
        "budget_usd": 1_000_000,
    }
    base.update(patch)
    r = client.post("/v1/predict", json=base)
    assert r.status_code == status
    body = r.json()
    assert body["code"] == code
    assert body["field"] == field


def test_predict_validation_error_shape(service):
    client, _, _ = service
    r = client.post("/v1/predict", json={"genres": ["Drama"]})  # cast missing
    assert r.status_code == 400
    body = r.json()
    assert body["code"] == "invalid_request"
    assert "cast" in body["field"]
    r = client.post("/v1/predict", json={"cast": [], "genres": ["Drama"]})
    assert r.status_code == 400


def test_whatif_patches_and_limits(service):
    client, state, _ = service
    base = _scenario_for(state, sorted(m.movie_id for m in state.corpus if 2001 <= m.year <= 2003)[0])
    edits = [{"budget_usd": base["budget_usd"] * 10}, {"genres": base["genres"]}]
    r = client.post("/v1/whatif", json={"base": base, "edits": edits})
    assert r.status_code == 200
    responses = r.json()["responses"]
    assert len(responses) == 3
    assert responses[0]["patch"] is None
    assert responses[1]["patch"] == edits[0]
    base_budget = {f["name"]: f["value"] for f in responses[0]["features"]}["budget_usd"]
    new_budget = {f["name"]: f["value"] for f in responses[1]["features"]}["budget_usd"]
    assert new_budget == base_budget * 10
    # identity patch reproduces the base response
    assert responses[2]["features"] == responses[0]["features"]

    r = client.post("/v1/whatif", json={"base": base,
                                        "edits": [{"budget_usd": 1}] * 21})
    assert r.status_code == 400
    r = client.post("/v1/whatif", json={"base": base,
                                        "edits": [{"popcorn": 1}]})
    assert r.status_code == 400
    assert r.json()["field"] == "edits.0"


def test_explain_is_additive_and_matches_predict(service):
    client, _, state_out = service
    _, state, _ = service
    scenario = _scenario_for(state, sorted(m.movie_id for m in state.corpus if 2001 <= m.year <= 2003)[0])
    pred = client.post("/v1/predict", json=scenario).json()
    expl = client.post("/v1/explain", json=scenario).json()
    total = expl["intercept"] + sum(c["contribution"] for c in expl["contributions"])
    assert abs(total - expl["score"]) < 1e-9
    assert abs(expl["score"] - pred["log_roi1"]) < 1e-9
    mags = [abs(c["contribution"]) for c in expl["contributions"]]
    assert mags == sorted(mags, reverse=True)


def test_explain_409_without_linear_model(service):
    client, state, _ = service
    artifact = state.artifact
    original = artifact.regressor
    try:
        artifact.regressor = None
        bare = TestClient(create_app(state))
        r = bare.post("/v1/explain", json={
            "cast": ["a1"], "genres": ["Drama"], "rating": "PG13",
            "planned_release_date": "2003-06-15",
        })
        assert r.status_code == 409
        assert r.json()["code"] == "no_linear_model"
    finally:
        artifact.regressor = original
