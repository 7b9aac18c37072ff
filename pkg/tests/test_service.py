from __future__ import annotations

import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from assumption_forge.harvest import (
    MockComment,
    MockGitHub,
    MockRepo,
    MockThread,
    MockTransport,
)
from assumption_forge.service import create_app
from assumption_forge.workspace import Workspace
from helpers import write_vocab_for


def fixture_server():
    """Repository whose threads yield roughly sixty sentences."""
    server = MockGitHub()
    repo = MockRepo(owner="acme", name="widgets", created_at=10.0)
    keyword_lines = [
        "this pass assumes the buffer stays pinned.",
        "fix the broken assumption in the planner.",
        "do not assume the order is stable.",
    ]
    cue_lines = [
        "i think the loader should retry here.",
        "this will probably break old builds.",
        "we expect the cache to fill quickly.",
    ]
    plain_lines = [
        "update the readme for the release.",
        "the worker writes results to disk.",
        "refactor the queue setup code.",
    ]
    comments = []
    for i in range(18):
        body = f"{keyword_lines[i % 3]} {cue_lines[i % 3]} {plain_lines[i % 3]}"
        comments.append(MockComment(id=f"c{i}", body=body, created_at=30.0 + i))
    repo.issues.append(
        MockThread(number=1, title="tracking issue for planner cleanups", body="triage below.",
                   created_at=20.0, comments=comments[:9])
    )
    repo.prs.append(
        MockThread(number=2, title="rework padding logic", body="details inline.",
                   created_at=21.0, comments=comments[9:])
    )
    server.add_repo(repo)
    return server


@pytest.fixture()
def client(tmp_path):
    workspace = Workspace(tmp_path / "ws")
    vocab_path = tmp_path / "v.vocab"
    write_vocab_for(
        ["assumes assumption assume buffer stays pinned i think probably expect cache "
         "update readme worker writes results refactor queue the to for"],
        vocab_path,
    )
    app = create_app(
        workspace,
        transport=MockTransport(fixture_server()),
        vocab_path=vocab_path,
    )
    with TestClient(app) as tc:
        tc.workspace = workspace
        yield tc


def wait_job(client, job_id, timeout=30.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        job = client.get(f"/jobs/{job_id}").json()
        if job["state"] in ("done", "failed"):
            return job
        time.sleep(0.02)
    raise TimeoutError("job did not finish")


def harvested_client(client):
    created = client.post("/repos", json={"owner": "acme", "name": "widgets"})
    assert created.status_code == 201
    repo_id = created.json()["id"]
    job = client.post(f"/repos/{repo_id}/harvest", json={"cutoff": 1000.0})
    assert job.status_code == 202
    finished = wait_job(client, job.json()["job_id"])
    assert finished["state"] == "done", finished
    return client


def test_create_repo_conflict(client):
    assert client.post("/repos", json={"owner": "a", "name": "b"}).status_code == 201
    assert client.post("/repos", json={"owner": "a", "name": "b"}).status_code == 409


def test_harvest_job_extracts_sentences(client):
    harvested_client(client)
    page = client.get("/sentences", params={"page_size": 500}).json()
    assert page["total"] >= 50
    with_verdicts = [s for s in page["sentences"] if s.get("verdict")]
    assert len(with_verdicts) == page["total"]


def test_sentence_query_filter(client):
    harvested_client(client)
    page = client.get("/sentences", params={"query": "assum", "page_size": 500}).json()
    assert page["total"] > 0
    for s in page["sentences"]:
        assert "assum" in s["raw_text"].lower()


def test_suggestion_hints_present(client):
    harvested_client(client)
    page = client.get("/sentences", params={"query": "do not assume", "page_size": 50}).json()
    assert page["total"] >= 1
    verdict = page["sentences"][0]["verdict"]
    assert verdict["suggested_label"] == "SCA"
    assert "SCA_IC4" in verdict["matched_rules"]


def test_label_crud(client):
    labels = client.get("/labels").json()
    assert {l["name"]: l["value"] for l in labels} == {"NA": 0, "PA": 1, "SCA": 2}
    assert client.post("/labels", json={"name": "MAYBE", "value": 7}).status_code == 201
    assert client.post("/labels", json={"name": "DUP", "value": 7}).status_code == 409


def test_annotation_errors(client):
    harvested_client(client)
    missing = client.post("/annotations", json={"sentence_id": "zzz", "label": "NA"})
    assert missing.status_code == 404
    page = client.get("/sentences", params={"page_size": 1}).json()
    sid = page["sentences"][0]["id"]
    bad_label = client.post("/annotations", json={"sentence_id": sid, "label": "WAT"})
    assert bad_label.status_code == 400


def test_annotate_relabel_audit(client):
    harvested_client(client)
    page = client.get("/sentences", params={"page_size": 1}).json()
    sid = page["sentences"][0]["id"]
    first = client.post("/annotations", json={"sentence_id": sid, "label": "SCA"})
    assert first.status_code == 200 and first.json()["audit_length"] == 1
    second = client.post("/annotations", json={"sentence_id": sid, "label": "PA"})
    assert second.json()["label"] == "PA"
    assert second.json()["audit_length"] == 2


def label_everything(client):
    page = client.get("/sentences", params={"page_size": 500}).json()
    for sentence in page["sentences"]:
        label = sentence["verdict"]["suggested_label"]
        client.post("/annotations", json={"sentence_id": sentence["id"], "label": label})
    return page["total"]


def test_dataset_csv_download_label_values(client):
    harvested_client(client)
    label_everything(client)
    created = client.post("/datasets", json={"seed": 4})
    assert created.status_code == 201
    dataset_id = created.json()["id"]
    body = client.get(f"/datasets/{dataset_id}/download")
    assert body.status_code == 200
    lines = body.text.splitlines()
    assert lines[0] == "text,label"
    values = {row.rsplit(",", 1)[1] for row in lines[1:]}
    assert values <= {"0", "1", "2"}
    listing = client.get("/datasets").json()
    assert any(d["id"] == dataset_id for d in listing)


def test_full_toy_pipeline_run(client):
    harvested_client(client)
    label_everything(client)
    dataset_id = client.post("/datasets", json={"seed": 4}).json()["id"]
    run = client.post(
        "/runs",
        json={
            "dataset_id": dataset_id,
            "models": ["CART"],
            "split": {"train_fraction": 0.8, "seed": 1},
            "seed": 1,
            "feature_cap": 500,
        },
    )
    assert run.status_code == 202
    run_id = run.json()["run_id"]
    finished = wait_job(client, run_id)
    assert finished["state"] == "done", finished
    report = client.get(f"/runs/{run_id}").json()
    cart = report["report"]["models"]["CART"]["report"]
    for field in ("precision_macro", "recall_macro", "f1", "accuracy", "strict_accuracy_macro"):
        assert field in cart
    assert set(cart["labels"]) == {"NA", "PA", "SCA"}
    table = client.get(f"/runs/{run_id}/table")
    assert table.status_code == 200 and "CART" in table.text


def test_missing_job_and_run(client):
    assert client.get("/jobs/nope").status_code == 404
    assert client.get("/runs/nope").status_code == 404


def test_ui_bundle_mounted_when_built(tmp_path):
    dist = Path(__file__).resolve().parent.parent / "frontend" / "dist"
    if not dist.exists():
        pytest.skip("frontend bundle not built")
    app = create_app(Workspace(tmp_path / "ws"), ui_dist=dist)
    with TestClient(app) as tc:
        index = tc.get("/ui/")
        assert index.status_code == 200
        assert "workbench" in index.text
        js = tc.get("/ui/assets/main.js")
        assert js.status_code == 200
        assert "WorkbenchStore" in js.text or "store" in js.text
