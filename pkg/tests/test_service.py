import json

import pytest
from fastapi.testclient import TestClient

from twinwatch.service import create_app
from twinwatch.station import default_layout, layout_to_json


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app(layout=default_layout()))


SIM_BODY = {"preset": "Base", "period": "Morning", "scenarios": [3],
            "mode": "stochastic", "seed": 42, "replications": 1,
            "replication_minutes": 10.0}


class TestHealthAndLayout:
    def test_health(self, client):
        r = client.get("/api/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"

    def test_get_layout(self, client):
        r = client.get("/api/layout")
        assert r.status_code == 200
        doc = r.json()
        assert doc["name"] == "synthetic-metro-station"
        assert len(doc["presets"]) == 4

    def test_put_layout_roundtrip(self, client):
        doc = client.get("/api/layout").json()
        doc["name"] = "renamed"
        r = client.put("/api/layout", json=doc)
        assert r.status_code == 200
        assert client.get("/api/layout").json()["name"] == "renamed"

    def test_put_invalid_layout_rejected(self, client):
        doc = client.get("/api/layout").json()
        doc["nav_edges"].append({"a": "n_c1", "b": "n99", "length": 1.0})
        r = client.put("/api/layout", json=doc)
        assert r.status_code == 422
        assert "n99" in json.dumps(r.json())

    def test_presets_listing(self, client):
        r = client.get("/api/presets")
        assert r.status_code == 200
        names = [p["name"] for p in r.json()["presets"]]
        assert names == ["Base", "Model7", "Model9", "Model11"]


class TestSimulate:
    def test_valid_request_yields_accuracy_cell(self, client):
        r = client.post("/api/simulate", json=SIM_BODY)
        assert r.status_code == 200
        doc = r.json()
        assert len(doc["cells"]) == 1
        cell = doc["cells"][0]
        assert cell["preset"] == "Base"
        assert 0.0 <= cell["accuracy"] <= 1.0

    def test_same_body_same_response(self, client):
        a = client.post("/api/simulate", json=SIM_BODY).json()
        b = client.post("/api/simulate", json=SIM_BODY).json()
        a.pop("created_at"), b.pop("created_at")
        assert a == b

    def test_unknown_preset_names_field(self, client):
        r = client.post("/api/simulate", json={**SIM_BODY, "preset": "Model8"})
        assert r.status_code == 422
        assert r.json()["detail"][0]["field"] == "preset"

    def test_zero_replications_rejected(self, client):
        r = client.post("/api/simulate", json={**SIM_BODY, "replications": 0})
        assert r.status_code == 422
        assert r.json()["detail"][0]["field"] == "replications"

    def test_malformed_json_is_400(self, client):
        r = client.post("/api/simulate", content=b"{not json",
                        headers={"content-type": "application/json"})
        assert r.status_code == 400

    def test_custom_cameras_accepted(self, client):
        body = {**SIM_BODY, "preset": None,
                "cameras": [{"id": "c1", "x": 30.0, "y": 14.0, "pan_deg": 90.0,
                             "max_range_m": 19.0}]}
        r = client.post("/api/simulate", json=body)
        assert r.status_code == 200
        assert r.json()["cells"][0]["preset"] == "custom"

    def test_csv_download_format(self, client):
        r = client.post("/api/simulate?format=csv", json=SIM_BODY)
        assert r.status_code == 200
        assert r.headers["content-type"].startswith("text/csv")
        assert r.text.startswith("preset,period,scenario")

    def test_markdown_download_format(self, client):
        r = client.post("/api/simulate?format=markdown", json=SIM_BODY)
        assert r.status_code == 200
        assert r.text.startswith("| Model |")


class TestHeatmap:
    def test_no_cameras_all_zero(self, client):
        r = client.post("/api/heatmap", json={"cell_size": 2.0})
        assert r.status_code == 200
        doc = r.json()
        assert set(doc["values"]) == {0.0}
        assert doc["width"] == 30
        assert doc["height"] == 15

    def test_single_camera_nonzero_inside_cone(self, client):
        body = {"cameras": [{"id": "c1", "x": 0.0, "y": 15.0, "pan_deg": 0.0,
                             "max_range_m": 19.0}], "cell_size": 1.0}
        r = client.post("/api/heatmap", json=body)
        doc = r.json()
        assert any(v > 0 for v in doc["values"])

    def test_preset_accepted(self, client):
        r = client.post("/api/heatmap", json={"preset": "Base", "cell_size": 1.0})
        assert r.status_code == 200

    def test_bad_cell_size(self, client):
        r = client.post("/api/heatmap", json={"preset": "Base", "cell_size": 0})
        assert r.status_code == 422
        assert r.json()["detail"][0]["field"] == "cell_size"


OPT_BODY = {
    "preset": "Base",
    "free": {"cam_gate_n": {"pan": [0.0, 360.0]}},
    "budget": 12,
    "restarts": 1,
    "objective": {"mode": "stochastic", "periods": ["Morning"],
                  "scenarios": [3], "replications": 1,
                  "duration_minutes": 5.0, "suspects_per_hour_mean": 60.0},
}


class TestOptimize:
    def test_final_at_least_initial(self, client):
        r = client.post("/api/optimize", json=OPT_BODY)
        assert r.status_code == 200
        doc = r.json()
        assert doc["final_objective"] >= doc["initial_objective"]
        assert doc["evaluations"] <= 12

    def test_budget_zero_is_409(self, client):
        r = client.post("/api/optimize", json={**OPT_BODY, "budget": 0})
        assert r.status_code == 409

    def test_no_free_params_is_422(self, client):
        body = {**OPT_BODY, "free": {"cam_gate_n": {}}}
        r = client.post("/api/optimize", json=body)
        assert r.status_code == 422
        assert r.json()["detail"][0]["field"] == "free"

    def test_ndjson_stream_progress_is_monotone(self, client):
        with client.stream("POST", "/api/optimize", json=OPT_BODY,
                           headers={"accept": "application/x-ndjson"}) as r:
            assert r.status_code == 200
            assert r.headers["content-type"].startswith("application/x-ndjson")
            events = [json.loads(line) for line in r.iter_lines() if line]
        progress = [e for e in events if e["type"] == "progress"]
        assert progress
        bests = [e["best"] for e in progress]
        assert all(b >= a for a, b in zip(bests, bests[1:]))
        assert events[-1]["type"] == "result"
        assert events[-1]["final_objective"] >= events[-1]["initial_objective"]
