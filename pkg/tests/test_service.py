import pytest
from fastapi.testclient import TestClient

from hbfsim import __version__
from hbfsim.harness import ExperimentConfig, SweepResult, run_experiment, to_csv
from hbfsim.service import create_app


@pytest.fixture
def client():
    return TestClient(create_app())


def tiny_config_dict(**overrides):
    base = dict(
        n_r=8,
        n_t=8,
        alpha_t=0.8,
        snr_grid_db=[0.0, 10.0],
        trials=3,
        master_seed=7,
        schemes=[
            {"label": "cap-full"},
            {"label": "cap-cs", "tx_rf": "column_spreader", "k_t": 2},
        ],
    )
    base.update(overrides)
    return base


def test_health(client):
    body = client.get("/health").json()
    assert body == {"status": "ok", "version": __version__}


def test_preset_listing(client):
    assert client.get("/presets").json() == {"presets": ["fig3", "fig4", "fig5", "fig6"]}


def test_preset_detail(client):
    body = client.get("/presets/fig3", params={"scale": 1.0}).json()
    cfg = ExperimentConfig.model_validate(body)
    assert (cfg.n_r, cfg.n_t) == (256, 60)


def test_unknown_preset_is_404(client):
    assert client.get("/presets/fig9").status_code == 404


def test_preset_scale_validated(client):
    assert client.get("/presets/fig3", params={"scale": 0.0}).status_code == 422


def test_run_matches_direct_call(client):
    cfg_dict = tiny_config_dict()
    resp = client.post("/experiments/run", json={"config": cfg_dict})
    assert resp.status_code == 200
    remote = SweepResult.model_validate(resp.json())
    local = run_experiment(ExperimentConfig.model_validate(cfg_dict))
    assert to_csv(remote) == to_csv(local)
    assert remote.rows == local.rows


def test_run_csv_endpoint(client):
    cfg_dict = tiny_config_dict()
    resp = client.post("/experiments/run.csv", json={"config": cfg_dict})
    assert resp.status_code == 200
    assert resp.headers["content-type"].startswith("text/csv")
    local = run_experiment(ExperimentConfig.model_validate(cfg_dict))
    assert resp.text == to_csv(local)


def test_run_returns_per_trial_when_asked(client):
    resp = client.post(
        "/experiments/run",
        json={"config": tiny_config_dict(trials=4), "include_per_trial": True},
    )
    rows = resp.json()["rows"]
    assert all(len(r["per_trial"]) == 4 for r in rows)


def test_schema_error_is_422(client):
    resp = client.post("/experiments/run", json={"config": tiny_config_dict(trials=0)})
    assert resp.status_code == 422


def test_semantic_config_error_is_400(client):
    cfg = tiny_config_dict(
        schemes=[{"label": "bad", "tx_rf": "column_spreader", "k_t": 3}]
    )
    resp = client.post("/experiments/run", json={"config": cfg})
    assert resp.status_code == 400
    assert "does not divide" in resp.json()["detail"]
