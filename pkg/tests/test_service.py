from __future__ import annotations

import warnings

import pytest

warnings.filterwarnings("ignore", category=DeprecationWarning)

from fastapi.testclient import TestClient

from tiger.cli import main
from tiger.service import SessionStore, create_app


@pytest.fixture()
def client(fixture_dir, qualitative_path, tmp_path):
    store = SessionStore.open(
        store_dir=str(tmp_path / "store"),
        dataset_dir=str(fixture_dir),
        qualitative_file=str(qualitative_path),
    )
    with TestClient(create_app(store)) as test_client:
        yield test_client


class TestReads:
    def test_assessment_overall(self, client):
        response = client.get("/api/v1/assessment")
        assert response.status_code == 200
        payload = response.json()
        assert payload["overall"] == 3.8
        assert payload["verdict"] == "sufficient"
        assert "X-Audit-Seq" in response.headers

    def test_assessment_matches_cli_bytes(self, client, fixture_dir, qualitative_path, tmp_path, capsys):
        code = main(
            [
                "assess",
                "--dataset",
                str(fixture_dir),
                "--qualitative",
                str(qualitative_path),
                "--out",
                str(tmp_path / "cli-out"),
            ]
        )
        capsys.readouterr()
        assert code == 0
        cli_bytes = (tmp_path / "cli-out" / "assessment.json").read_bytes()
        assert client.get("/api/v1/assessment").content == cli_bytes

    def test_radar(self, client):
        payload = client.get("/api/v1/radar").json()
        assert payload["axes"] == ["T", "I", "G", "E", "R"]
        assert payload["values"] == [3, 5, 3, 5, 3]

    def test_dataset_summary(self, client):
        payload = client.get("/api/v1/dataset/summary").json()
        assert payload["dao_name"] == "Compound"
        assert payload["counts"]["proposals"] == 113
        assert payload["supply"]["max"] == "10000000"

    def test_metrics_payload(self, client):
        payload = client.get("/api/v1/metrics").json()
        assert payload["insider_share_pct"] == 49.95
        assert payload["delegation"]["distinct_via_delegates"] == 60
        assert payload["governance_nakamoto"] == 4
        assert payload["timing"] == {"total_days": 8, "pass": True}

    def test_characteristics_list_and_detail(self, client):
        listing = client.get("/api/v1/characteristics").json()
        assert len(listing["characteristics"]) == 15
        detail = client.get("/api/v1/characteristics/token_distribution").json()
        assert detail["score"] == 3
        assert detail["metric_values"]["insider_share_pct"] == 49.95
        missing = client.get("/api/v1/characteristics/nonsense")
        assert missing.status_code == 400

    def test_report_is_markdown(self, client):
        response = client.get("/api/v1/report")
        assert response.headers["content-type"].startswith("text/markdown")
        assert "# Decentralization Assessment" in response.text

    def test_audit_log(self, client):
        payload = client.get("/api/v1/session/audit").json()
        assert payload["seq"] == 4  # four preloaded qualitative entries
        assert all(e["kind"] == "qualitative" for e in payload["events"])


class TestMutations:
    def test_qualitative_updates_seq_and_scores(self, client):
        seq_before = int(client.get("/api/v1/assessment").headers["X-Audit-Seq"])
        response = client.post(
            "/api/v1/qualitative",
            json={"characteristic": "soft_power", "score": 4, "evidence": "new", "assessor": "t"},
        )
        assert response.status_code == 200
        assert int(response.headers["X-Audit-Seq"]) == seq_before + 1
        detail = client.get("/api/v1/characteristics/soft_power").json()
        assert detail["score"] == 4

    def test_score_out_of_range_rejected(self, client):
        response = client.post(
            "/api/v1/qualitative", json={"characteristic": "soft_power", "score": 6}
        )
        assert response.status_code == 400
        assert "score out of range" in response.json()["error"]["message"]

    def test_entry_on_quantitative_characteristic_rejected(self, client):
        response = client.post(
            "/api/v1/qualitative", json={"characteristic": "token_distribution", "score": 4}
        )
        assert response.status_code == 400

    def test_scenario_push_and_delete_restores_assessment(self, client):
        before = client.get("/api/v1/assessment").content
        push = client.post("/api/v1/scenario", json={"spec": {"kind": "vesting_complete"}})
        assert push.status_code == 200
        assert client.get("/api/v1/assessment").content != before
        summary = client.get("/api/v1/dataset/summary").json()
        assert summary["scenarios"] == [{"kind": "vesting_complete"}]
        delete = client.delete("/api/v1/scenario/0")
        assert delete.status_code == 200
        assert client.get("/api/v1/assessment").content == before

    def test_invalid_scenario_rejected_with_machine_readable_body(self, client):
        response = client.post(
            "/api/v1/scenario",
            json={"spec": {"kind": "split_whale", "address": "0x" + "1" * 40, "parts": 2}},
        )
        assert response.status_code == 400
        body = response.json()
        assert body["error"]["code"] == "invalid-scenario"
        response = client.delete("/api/v1/scenario/5")
        assert response.status_code == 400

    def test_override_refreshes_dependent_metrics(self, client):
        metrics = client.get("/api/v1/metrics").json()
        via = next(a for a in metrics["agents"] if a["class"] == "VIA")
        response = client.post(
            "/api/v1/agents/override", json={"address": via["address"], "class": "UIA"}
        )
        assert response.status_code == 200
        after = client.get("/api/v1/metrics").json()
        assert after["delegation"]["distinct_via_delegates"] == 59

    def test_override_unknown_address_rejected(self, client):
        response = client.post(
            "/api/v1/agents/override",
            json={"address": "0x" + "9" * 40, "class": "VIA"},
        )
        assert response.status_code == 400

    def test_session_persists_across_reopen(self, fixture_dir, qualitative_path, tmp_path):
        store_dir = tmp_path / "persist"
        store = SessionStore.open(
            store_dir=str(store_dir),
            dataset_dir=str(fixture_dir),
            qualitative_file=str(qualitative_path),
        )
        with TestClient(create_app(store)) as client:
            client.post("/api/v1/scenario", json={"spec": {"kind": "vesting_complete"}})
            seq = int(client.get("/api/v1/assessment").headers["X-Audit-Seq"])
            body = client.get("/api/v1/assessment").content

        reopened = SessionStore.open(store_dir=str(store_dir))
        with TestClient(create_app(reopened)) as client:
            assert int(client.get("/api/v1/assessment").headers["X-Audit-Seq"]) == seq
            assert client.get("/api/v1/assessment").content == body
