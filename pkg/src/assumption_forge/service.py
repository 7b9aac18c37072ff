"""HTTP facade over the pipeline.

Mirrors the labeling workflow end to end: register repositories, harvest
them as background jobs, browse extracted sentences with rule-engine hints,
commit annotations, assemble balanced datasets, download them as CSV, and
launch train/evaluate runs. Long jobs run on worker threads and expose a
polled status. The frontend bundle, when built, is mounted statically.
"""

from __future__ import annotations

import json
import threading
import traceback
import uuid
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.responses import FileResponse, JSONResponse, PlainTextResponse
from pydantic import BaseModel, Field

from .dataset import SplitSpec, balanced_select
from .errors import (
    DuplicateName,
    DuplicateValue,
    ForgeError,
    InsufficientClass,
    NotFound,
    UnknownLabel,
    UnknownSentence,
)
from .harvest import Harvester, RateBudget, RecordKind, RepoRef
from .models import ModelSpec
from .pipeline import run_training
from .vectorize import Vocabulary, load_vocab
from .workspace import Workspace


class RepoIn(BaseModel):
    owner: str
    name: str


class HarvestIn(BaseModel):
    kinds: list[str] = Field(default_factory=lambda: [k.value for k in RecordKind])
    cutoff: float
    page_size: int = 50
    comments_page_size: int = 20


class AnnotationIn(BaseModel):
    sentence_id: str
    label: str | int
    annotator: str = "anonymous"


class LabelIn(BaseModel):
    name: str
    value: int


class DatasetIn(BaseModel):
    seed: int = 0


class SplitIn(BaseModel):
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True


class RunIn(BaseModel):
    dataset_id: str
    models: list[str] = Field(default_factory=lambda: ["CART"])
    split: SplitIn = Field(default_factory=SplitIn)
    seed: int = 0
    feature_cap: int = 5000


class JobRegistry:
    """Background jobs with polled status."""

    def __init__(self):
        self._jobs: dict[str, dict] = {}
        self._lock = threading.Lock()

    def create(self, kind: str) -> str:
        job_id = uuid.uuid4().hex[:12]
        with self._lock:
            self._jobs[job_id] = {"id": job_id, "kind": kind, "state": "queued", "detail": None}
        return job_id

    def update(self, job_id: str, **fields) -> None:
        with self._lock:
            self._jobs[job_id].update(fields)

    def get(self, job_id: str) -> dict | None:
        with self._lock:
            job = self._jobs.get(job_id)
            return dict(job) if job else None


def create_app(
    workspace: Workspace,
    transport=None,
    vocab: Vocabulary | None = None,
    vocab_path=None,
    budget: RateBudget | None = None,
    ui_dist=None,
) -> FastAPI:
    app = FastAPI(title="assumption-forge", version="0.1.0")
    jobs = JobRegistry()
    repos_path = workspace.root / "repos.json"
    repos: dict[str, dict] = (
        json.loads(repos_path.read_text("utf-8")) if repos_path.exists() else {}
    )
    state = {"vocab": vocab}

    def get_vocab() -> Vocabulary:
        if state["vocab"] is None:
            if vocab_path is None:
                raise HTTPException(status_code=409, detail="no vocabulary configured")
            state["vocab"] = load_vocab(vocab_path)
        return state["vocab"]

    def save_repos() -> None:
        repos_path.write_text(json.dumps(repos, indent=2), encoding="utf-8")

    @app.exception_handler(ForgeError)
    async def forge_error_handler(_, exc: ForgeError):
        status = 404 if isinstance(exc, (NotFound, UnknownSentence)) else 400
        return JSONResponse(status_code=status, content=exc.payload())

    # --- repositories ---
    @app.post("/repos", status_code=201)
    def create_repo(body: RepoIn):
        ref = RepoRef(owner=body.owner, name=body.name)
        if ref.slug in repos:
            raise HTTPException(status_code=409, detail=f"repository {ref.slug} already exists")
        repo_id = uuid.uuid4().hex[:8]
        repos[ref.slug] = {"id": repo_id, "owner": ref.owner, "name": ref.name}
        save_repos()
        return repos[ref.slug]

    @app.get("/repos")
    def list_repos():
        return list(repos.values())

    def find_repo(repo_id: str) -> RepoRef:
        for entry in repos.values():
            if entry["id"] == repo_id:
                return RepoRef(owner=entry["owner"], name=entry["name"])
        raise HTTPException(status_code=404, detail=f"repository id {repo_id} not found")

    # --- harvest ---
    @app.post("/repos/{repo_id}/harvest", status_code=202)
    def start_harvest(repo_id: str, body: HarvestIn):
        ref = find_repo(repo_id)
        if transport is None:
            raise HTTPException(status_code=409, detail="no harvest transport configured")
        job_id = jobs.create("harvest")
        harvester = Harvester(transport=transport, budget=budget or RateBudget())

        def pausing_waiter(reset_at):
            jobs.update(job_id, state="paused-rate-limit")
            import time as _time

            _time.sleep(0.01)
            jobs.update(job_id, state="running")

        harvester.waiter = pausing_waiter

        def work():
            jobs.update(job_id, state="running")
            try:
                report = harvester.harvest(
                    ref,
                    [RecordKind(k) for k in body.kinds],
                    cutoff=body.cutoff,
                    store=workspace.records,
                    page_size=body.page_size,
                    comments_page_size=body.comments_page_size,
                )
                extracted = workspace.extract_from_records(repo=ref.slug)
                jobs.update(
                    job_id,
                    state="done",
                    detail={"report": report.to_dict(), "sentences_extracted": extracted},
                )
            except Exception as exc:  # job surface: report, do not crash the service
                jobs.update(job_id, state="failed", detail=str(exc))
                traceback.print_exc()

        threading.Thread(target=work, daemon=True).start()
        return {"job_id": job_id}

    @app.get("/jobs/{job_id}")
    def job_status(job_id: str):
        job = jobs.get(job_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"job {job_id} not found")
        return job

    # --- sentences ---
    @app.get("/sentences")
    def list_sentences(
        query: str = "",
        label: str | None = None,
        kind: str | None = None,
        page: int = Query(default=1, ge=1),
        page_size: int = Query(default=50, ge=1, le=500),
    ):
        rows = []
        for sentence in workspace.store.sentences():
            if query and query.lower() not in sentence.raw_text.lower():
                continue
            if kind and sentence.kind != kind:
                continue
            annotation = workspace.store.annotation(sentence.id)
            if label is not None:
                if annotation is None or annotation.label.name != label:
                    continue
            row = sentence.to_dict()
            row["committed_label"] = annotation.label.name if annotation else None
            row["audit_length"] = len(workspace.store.audit_trail(sentence.id))
            rows.append(row)
        total = len(rows)
        start = (page - 1) * page_size
        return {
            "total": total,
            "page": page,
            "page_size": page_size,
            "sentences": rows[start : start + page_size],
        }

    # --- labels ---
    @app.get("/labels")
    def list_labels():
        return [{"name": l.name, "value": l.value} for l in workspace.store.registry.all()]

    @app.post("/labels", status_code=201)
    def create_label(body: LabelIn):
        try:
            label = workspace.create_label(body.name, body.value)
        except (DuplicateName, DuplicateValue) as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return {"name": label.name, "value": label.value}

    # --- annotations ---
    @app.post("/annotations")
    def annotate(body: AnnotationIn):
        try:
            label = body.label if not isinstance(body.label, str) or not body.label.isdigit() else int(body.label)
            example = workspace.annotate(body.sentence_id, label, annotator=body.annotator)
        except UnknownSentence as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except UnknownLabel as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from None
        out = example.to_dict()
        out["audit_length"] = len(workspace.store.audit_trail(body.sentence_id))
        return out

    # --- datasets ---
    @app.post("/datasets", status_code=201)
    def create_dataset(body: DatasetIn):
        try:
            dataset = balanced_select(workspace.store, seed=body.seed)
        except InsufficientClass as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        dataset_id = workspace.save_dataset(dataset, seed=body.seed)
        return {"id": dataset_id, "rows": len(dataset)}

    @app.get("/datasets")
    def list_datasets():
        return workspace.list_datasets()

    @app.get("/datasets/{dataset_id}/download")
    def download_dataset(dataset_id: str):
        try:
            path = workspace.dataset_csv_path(dataset_id)
        except NotFound as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        return FileResponse(path, media_type="text/csv", filename=f"{dataset_id}.csv")

    # --- runs ---
    @app.post("/runs", status_code=202)
    def start_run(body: RunIn):
        dataset = workspace.load_dataset(body.dataset_id)
        specs = [ModelSpec(m) for m in body.models]
        vocab_obj = get_vocab()
        job_id = jobs.create("run")
        run_out = workspace.run_dir(job_id)

        def work():
            jobs.update(job_id, state="running")
            try:
                run_training(
                    dataset,
                    SplitSpec(
                        train_fraction=body.split.train_fraction,
                        seed=body.split.seed,
                        stratified=body.split.stratified,
                    ),
                    specs,
                    vocab_obj,
                    seed=body.seed,
                    feature_cap=body.feature_cap,
                    out_dir=run_out,
                )
                jobs.update(job_id, state="done", detail={"run_id": job_id})
            except Exception as exc:
                jobs.update(job_id, state="failed", detail=str(exc))
                traceback.print_exc()

        threading.Thread(target=work, daemon=True).start()
        return {"job_id": job_id, "run_id": job_id}

    @app.get("/runs/{run_id}")
    def run_report(run_id: str):
        job = jobs.get(run_id)
        report_path = workspace.run_dir(run_id) / "report.json"
        if not report_path.exists():
            if job is not None:
                return {"id": run_id, "state": job["state"], "detail": job["detail"]}
            raise HTTPException(status_code=404, detail=f"run {run_id} not found")
        manifest = json.loads((workspace.run_dir(run_id) / "manifest.json").read_text("utf-8"))
        return {
            "id": run_id,
            "state": "done",
            "manifest": manifest,
            "report": json.loads(report_path.read_text("utf-8")),
        }

    @app.get("/runs/{run_id}/table")
    def run_table(run_id: str):
        path = workspace.run_dir(run_id) / "report.txt"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"run {run_id} has no table yet")
        return PlainTextResponse(path.read_text("utf-8"))

    # --- static frontend ---
    dist = Path(ui_dist) if ui_dist else None
    if dist and dist.exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=dist, html=True), name="ui")

    return app
