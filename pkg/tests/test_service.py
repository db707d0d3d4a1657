import json
import sys
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from proofdesk.service import Service, ServiceConfig, create_app

SECOND_ARTICLE = """\
article usest1; reserve X for set;
func relincl(X) -> relation;
theorem t1: for X holds wellorder(relincl(X))
proof let X; thus wellorder(relincl(X)) by t2_mtest1; end;
"""

COUNTERSAT_ARTICLE = """\
article weak1;
theorem t1: p proof thus p by d1_mtest1; end;
"""

SLEEPER_DB = """\
name = staller
command = {python} {script} %s
status Theorem = SZS status Theorem
"""


@pytest.fixture
def service(tmp_path):
    svc = Service(ServiceConfig(workdir=tmp_path / "work"))
    yield svc
    svc.close()


@pytest.fixture
def client(service):
    return TestClient(create_app(service))


def submit(client, text, name=None):
    response = client.post("/articles", json={"text": text, "name": name})
    assert response.status_code == 200, response.text
    return response.json()["id"]


def wait_state(client, job_id, target="Ready", timeout=10.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get(f"/articles/{job_id}").json()
        if doc["state"] == target:
            return doc
        if doc["state"] == "Failed" and target != "Failed":
            raise AssertionError(f"job failed: {doc['error']}")
        time.sleep(0.02)
    raise TimeoutError(f"job did not reach {target}")


class TestSubmission:
    def test_golden_end_to_end(self, client, golden_text):
        job_id = submit(client, golden_text)
        doc = wait_state(client, job_id)
        assert doc["state"] == "Ready"
        problems = client.get(f"/articles/{job_id}/obligations").json()
        assert [p["id"] for p in problems] == ["e2_2__mtest1"]
        assert problems[0]["status"] == "verified"
        assert problems[0]["generated"] is True
        text = client.get(
            f"/articles/{job_id}/obligations/e2_2__mtest1/problem"
        ).text
        assert "fof(e2_2__mtest1, conjecture" in text
        assert "% generated: " in text

    def test_empty_body_rejected(self, client):
        assert client.post("/articles", json={"text": ""}).status_code == 400

    def test_oversize_body_rejected(self, client):
        big = "article big; theorem t1: p;" + " " * (1 << 20)
        assert client.post("/articles", json={"text": big}).status_code == 400

    def test_syntax_error_becomes_failed_state(self, client):
        job_id = submit(client, "article broken; theorem t1 p;")
        doc = wait_state(client, job_id, "Failed")
        assert "parse error" in doc["error"]
        assert any(ch.isdigit() for ch in doc["error"])  # line number

    def test_unknown_job_404(self, client):
        assert client.get("/articles/zzz").status_code == 404
        assert client.get("/articles/zzz/render").status_code == 404

    def test_log_shows_pipeline_ordering(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        log = client.get(f"/articles/{job_id}/log").text
        events = [line.split(" ", 1)[1] for line in log.strip().splitlines()]
        positions = {
            "parsed": events.index("parsed"),
            "verified": events.index("verified"),
            "generated": events.index("generated e2_2__mtest1"),
            "ready": events.index("ready"),
        }
        assert (
            positions["parsed"]
            < positions["verified"]
            < positions["generated"]
            < positions["ready"]
        )

    def test_isolated_workspaces_for_same_article_name(self, client, golden_text, service):
        job_a = submit(client, golden_text)
        job_b = submit(client, golden_text)
        assert job_a != job_b
        wait_state(client, job_a)
        wait_state(client, job_b)
        path_a = service.jobs[job_a].problem_path("e2_2__mtest1")
        path_b = service.jobs[job_b].problem_path("e2_2__mtest1")
        assert path_a != path_b
        assert path_a.exists() and path_b.exists()

    def test_repeated_gets_are_byte_identical(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        for route in ("render", "log", "obligations"):
            first = client.get(f"/articles/{job_id}/{route}").content
            second = client.get(f"/articles/{job_id}/{route}").content
            assert first == second


class TestRender:
    def test_render_available_after_verify(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        model = client.get(f"/articles/{job_id}/render").json()
        items = {i["label"]: i for i in model["items"]}
        thus = items["t2"]["steps"][2]
        assert thus["obligation_id"] == "e2_2__mtest1"
        assert thus["status"] == "verified"

    def test_render_conflicts_before_verification(self, client, service):
        job = service.jobs_dir / "pending"
        # a job that never parsed: simulate by direct construction
        response = client.post("/articles", json={"text": "article x; theorem t1 p;"})
        job_id = response.json()["id"]
        wait_state(client, job_id, "Failed")
        assert client.get(f"/articles/{job_id}/render").status_code == 409


class TestProve:
    def test_mini_e_theorem_with_dt_references(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        response = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/prove", json={}
        )
        assert response.status_code == 200, response.text
        doc = response.json()
        assert doc["system"] == "mini-e"
        assert doc["status"] == "Theorem"
        used = {r["name"] for r in doc["used_references"]}
        assert "d1_mtest1" in used
        assert any(name.startswith("dt_") for name in used)
        assert doc["hints_available"] is False
        raw = client.get(doc["raw_output"])
        assert raw.status_code == 200
        assert "SZS status Theorem" in raw.text

    def test_used_reference_metadata(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        doc = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/prove", json={}
        ).json()
        refs = {r["name"]: r for r in doc["used_references"]}
        d1 = refs["d1_mtest1"]
        assert d1["kind"] == "definition"
        assert d1["anchor"] == "#label-d1"
        assert "wellorder" in d1["title"]

    def test_countersatisfiable_offers_hints(self, client, golden_text):
        submit_golden = submit(client, golden_text)
        wait_state(client, submit_golden)
        client.post(f"/articles/{submit_golden}/install", json={})
        job_id = submit(client, COUNTERSAT_ARTICLE)
        wait_state(client, job_id)
        doc = client.post(
            f"/articles/{job_id}/obligations/e1_1__weak1/prove", json={}
        ).json()
        assert doc["status"] == "CounterSatisfiable"
        assert doc["hints_available"] is True

    def test_unknown_obligation_404(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        response = client.post(
            f"/articles/{job_id}/obligations/e9_9__mtest1/prove", json={}
        )
        assert response.status_code == 404

    def test_not_yet_generated_409(self, client, golden_text, service):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        service.jobs[job_id].problem_path("e2_2__mtest1").unlink()
        response = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/prove", json={}
        )
        assert response.status_code == 409
        assert "not yet generated" in response.json()["detail"]

    def test_stalling_external_system_resource_out(self, tmp_path, golden_text):
        script = tmp_path / "staller.py"
        script.write_text("import time\ntime.sleep(60)\n")
        db = tmp_path / "systems.db"
        db.write_text(SLEEPER_DB.format(python=sys.executable, script=script))
        svc = Service(ServiceConfig(workdir=tmp_path / "work", systems_db=db))
        try:
            client = TestClient(create_app(svc))
            job_id = submit(client, golden_text)
            wait_state(client, job_id)
            started = time.perf_counter()
            doc = client.post(
                f"/articles/{job_id}/obligations/e2_2__mtest1/prove",
                json={"system": "staller", "cpu": 1},
            ).json()
            elapsed = time.perf_counter() - started
            assert doc["status"] == "ResourceOut"
            assert doc["wall_millis"] <= 1500
            assert elapsed < 2.5
            assert doc["hints_available"] is True
        finally:
            svc.close()

    def test_unknown_system_404(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        response = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/prove",
            json={"system": "vampire"},
        )
        assert response.status_code == 404


class TestHintsAndLibrary:
    def test_untrained_model_empty_hints(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        doc = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/hints", json={}
        ).json()
        assert doc["hints"] == []

    def test_k_zero_rejected(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        response = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/hints", json={"k": 0}
        )
        assert response.status_code == 400

    def test_install_then_hints_and_citation(self, client, golden_text):
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        response = client.post(f"/articles/{job_id}/install", json={})
        assert response.status_code == 200, response.text
        installed = response.json()
        assert "t2_mtest1" in installed["items"]
        assert installed["training_examples"] == 1

        # the library lists and serves the new items
        names = {i["name"] for i in client.get("/library").json()}
        assert {"d1_mtest1", "t1_mtest1", "t2_mtest1", "dt_k1_mtest1"} <= names
        item = client.get("/library/t2_mtest1").json()
        assert item["article"] == "mtest1"
        assert "wellorder" in item["formula"]

        # a second article can now cite t2_mtest1
        second = submit(client, SECOND_ARTICLE)
        doc = wait_state(client, second)
        report_obligations = client.get(f"/articles/{second}/obligations").json()
        assert report_obligations[0]["status"] == "verified"

        # hints for the golden obligation now include d1_mtest1
        hints = client.post(
            f"/articles/{job_id}/obligations/e2_2__mtest1/hints", json={"k": 5}
        ).json()
        hint_names = [h["name"] for h in hints["hints"]]
        assert hint_names and "d1_mtest1" in hint_names

    def test_install_requires_clean_report(self, client, golden_text):
        golden = submit(client, golden_text)
        wait_state(client, golden)
        client.post(f"/articles/{golden}/install", json={})
        weak = submit(client, COUNTERSAT_ARTICLE)
        wait_state(client, weak)
        response = client.post(f"/articles/{weak}/install", json={})
        assert response.status_code == 409
        forced = client.post(f"/articles/{weak}/install", json={"force": True})
        assert forced.status_code == 200

    def test_unknown_library_item(self, client):
        assert client.get("/library/t9_nowhere").status_code == 404


class TestRestart:
    def test_generating_job_resumes(self, tmp_path, golden_text):
        workdir = tmp_path / "work"
        svc = Service(ServiceConfig(workdir=workdir))
        client = TestClient(create_app(svc))
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        svc.close()
        # simulate a crash right before the Ready transition
        job_dir = workdir / "jobs" / job_id
        state = json.loads((job_dir / "job.json").read_text())
        state["state"] = "Generating"
        (job_dir / "job.json").write_text(json.dumps(state))
        log_before = (job_dir / "log.txt").read_text()

        svc2 = Service(ServiceConfig(workdir=workdir))
        try:
            client2 = TestClient(create_app(svc2))
            doc = wait_state(client2, job_id)
            assert doc["state"] == "Ready"
            generation_log = (job_dir / "mtest1" / "generation.log").read_text()
            assert generation_log.count("generated e2_2__mtest1") == 1
            assert (job_dir / "mtest1" / "problems" / "e2_2__mtest1.p").exists()
        finally:
            svc2.close()

    def test_preverification_job_fails_on_restart(self, tmp_path, golden_text):
        workdir = tmp_path / "work"
        svc = Service(ServiceConfig(workdir=workdir))
        client = TestClient(create_app(svc))
        job_id = submit(client, golden_text)
        wait_state(client, job_id)
        svc.close()
        job_dir = workdir / "jobs" / job_id
        state = json.loads((job_dir / "job.json").read_text())
        state["state"] = "Received"
        (job_dir / "job.json").write_text(json.dumps(state))
        svc2 = Service(ServiceConfig(workdir=workdir))
        try:
            assert svc2.jobs[job_id].state == "Failed"
        finally:
            svc2.close()
