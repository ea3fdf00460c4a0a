import json

import pytest
from fastapi.testclient import TestClient

from numguard.service import create_app


@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


class TestHealth:
    def test_healthz(self, client):
        body = client.get("/healthz").json()
        assert body["status"] == "ok"


class TestRebalanceEndpoint:
    def test_float_recorded_row(self, client):
        r = client.post(
            "/rebalance",
            json={"algo": "float", "tasks": [1048627, 524206], "new_total": 1099511627744},
        )
        assert r.status_code == 200
        body = r.json()
        assert body["final_rest"] == "0x1.fff0000000000p-1"
        assert body["lost"] == 1
        assert body["checks"]["sum_ok"] is False

    def test_int_keeps_sum(self, client):
        r = client.post(
            "/rebalance", json={"algo": "int", "tasks": [1, 1, 1], "new_total": 4}
        )
        body = r.json()
        assert body["new_tasks"] == [1, 1, 2]
        assert body["checks"]["sum_ok"] is True
        assert body["final_rest"] == "0"

    def test_precondition_violation_is_422(self, client):
        r = client.post("/rebalance", json={"algo": "int", "tasks": [0], "new_total": 4})
        assert r.status_code == 422
        assert "total_tasks" in r.json()["detail"]

    def test_schema_violation_is_422(self, client):
        r = client.post("/rebalance", json={"algo": "nope", "tasks": [1], "new_total": 4})
        assert r.status_code == 422


class TestFuzzEndpoints:
    def test_fuzz_rebalance_finds(self, client):
        r = client.post("/fuzz/rebalance", json={"seed": 42, "iterations": 3000})
        assert r.status_code == 200
        body = r.json()
        assert body["iterations_done"] == 3000
        assert len(body["counterexamples"]) >= 1

    def test_fuzz_rebalance_deterministic(self, client):
        payload = {"seed": 7, "iterations": 1500}
        first = client.post("/fuzz/rebalance", json=payload).json()
        second = client.post("/fuzz/rebalance", json=payload).json()
        assert first == second

    def test_differential_endpoint_clean(self, client):
        r = client.post(
            "/fuzz/rebalance/differential", json={"seed": 7, "iterations": 1000}
        )
        assert r.status_code == 200
        assert r.json()["violations"] == []

    def test_invalid_config_is_422(self, client):
        r = client.post("/fuzz/rebalance", json={"seed": 1, "iterations": 0})
        assert r.status_code == 422


class TestOrientEndpoint:
    def test_exact_simplex(self, client):
        r = client.post(
            "/orient",
            json={
                "predicate": "exact",
                "points": [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
            },
        )
        assert r.json()["sign"] == "above"

    def test_hex_float_coordinates(self, client):
        r = client.post(
            "/orient",
            json={
                "predicate": "majority",
                "points": [
                    ["0x0p+0", "0x0p+0", "0x0p+0"],
                    ["0x1p+0", 0, 0],
                    [0, "0x1p+0", 0],
                    [0, 0, "0x1p-3"],
                ],
            },
        )
        body = r.json()
        assert body["sign"] == "above"
        assert body["tie"] is False

    def test_fixture_disagreement_visible(self, client, fixtures_dir):
        doc = json.loads((fixtures_dir / "orient_majority_64.json").read_text())
        cex = doc["counterexample"]
        r = client.post(
            "/orient",
            json={
                "predicate": "majority",
                "points": [cex["a"], cex["b"], cex["c"], cex["d"]],
            },
        )
        body = r.json()
        assert body["sign"] == cex["majority_sign"]
        assert body["exact_sign"] == cex["exact_sign"]
        assert body["agrees_exact"] is False

    def test_wrong_point_count_is_422(self, client):
        r = client.post(
            "/orient", json={"predicate": "exact", "points": [[0, 0, 0]]}
        )
        assert r.status_code == 422

    def test_non_finite_coordinate_is_422(self, client):
        r = client.post(
            "/orient",
            json={
                "predicate": "exact",
                "points": [["inf", 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
            },
        )
        assert r.status_code == 422


class TestHullEndpoint:
    CUBE = [[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)]

    def test_cube_valid(self, client):
        r = client.post("/hull", json={"predicate": "exact", "points": self.CUBE})
        body = r.json()
        assert body["built"] is True
        assert body["facet_count"] == 12
        assert body["validity"]["valid"] is True

    def test_validation_can_be_skipped(self, client):
        r = client.post(
            "/hull",
            json={"predicate": "exact", "points": self.CUBE, "validate_hull": False},
        )
        assert r.json()["validity"] is None

    def test_adversarial_cloud_reports_breakage(self, client, fixtures_dir):
        doc = json.loads((fixtures_dir / "hull_breakage.json").read_text())
        r = client.post(
            "/hull", json={"predicate": "float", "points": doc["points"]}
        )
        body = r.json()
        assert body["built"] is False or body["validity"]["valid"] is False

    def test_degenerate_input_is_422(self, client):
        flat = [[i, j, 0] for i in range(3) for j in range(3)]
        r = client.post("/hull", json={"predicate": "exact", "points": flat})
        assert r.status_code == 422


class TestSearchAndSmtEndpoints:
    def test_search_orient_stats(self, client):
        r = client.post("/search/orient", json={"seed": 4, "iterations": 400})
        body = r.json()
        stats = body["stats"]
        assert stats["samples"] == 400
        assert stats["majority_err"] <= stats["two_base_err"] <= stats["one_base_err"]

    def test_search_orient_deterministic(self, client):
        payload = {"seed": 4, "iterations": 300}
        assert (
            client.post("/search/orient", json=payload).json()
            == client.post("/search/orient", json=payload).json()
        )

    def test_emit_smt_binary32(self, client):
        r = client.post("/emit-smt", json={"float_width": 32})
        assert r.status_code == 200
        assert "(_ FloatingPoint 8 24)" in r.text

    def test_emit_smt_fixed_coordinate(self, client):
        r = client.post(
            "/emit-smt", json={"float_width": 64, "fixed": {"ax": "0x1.8p0"}}
        )
        assert "(assert (= ax" in r.text

    def test_emit_smt_bad_band_is_422(self, client):
        r = client.post("/emit-smt", json={"float_width": 32, "e_max": 500})
        assert r.status_code == 422
