"""Training/evaluation orchestration and run manifests.

A run takes a labeled dataset, splits it, tokenizes against a vocabulary,
builds per-model feature spaces, trains every requested model and scores it
under the strict multiclass scheme. The manifest pins everything that
determines the outputs, so identical manifests reproduce identical report
bytes.
"""

from __future__ import annotations

import hashlib
import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__ as package_version
from .dataset import Dataset, SplitSpec, split
from .metrics import MetricsReport, binary_collapse, build_confusion, metrics, render_table
from .models import (
    CAPPED_ALGORITHMS,
    DEFAULT_FEATURE_CAP,
    ModelSpec,
    TrainedModel,
    build_estimator,
)
from .vectorize import (
    Vocabulary,
    build_feature_map,
    tokenize,
    vectorize_all,
)


@dataclass(frozen=True)
class RunManifest:
    run_id: str
    dataset_hash: str
    split: SplitSpec
    models: tuple[ModelSpec, ...]
    seed: int
    feature_cap: int
    vocab_size: int
    versions: dict = field(default_factory=dict)
    created_at: float = 0.0

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "dataset_hash": self.dataset_hash,
            "split": self.split.to_dict(),
            "models": [m.to_dict() for m in self.models],
            "seed": self.seed,
            "feature_cap": self.feature_cap,
            "vocab_size": self.vocab_size,
            "versions": self.versions,
            "created_at": self.created_at,
        }

    def fingerprint(self) -> str:
        payload = self.to_dict()
        payload.pop("run_id")
        payload.pop("created_at")
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


@dataclass
class ModelOutcome:
    spec: ModelSpec
    report: MetricsReport
    model_path: str | None = None
    train_seconds: float = 0.0

    def to_dict(self) -> dict:
        return {
            "algorithm": self.spec.algorithm,
            "report": self.report.to_dict(),
            "binary": binary_collapse(self.report.matrix).to_dict(),
            # basename only: the report must not depend on where the run lives
            "model_file": Path(self.model_path).name if self.model_path else None,
        }


@dataclass
class RunResult:
    manifest: RunManifest
    outcomes: list[ModelOutcome]

    def report_dict(self) -> dict:
        # deterministic bytes: no wall-clock fields in the report body
        return {
            "manifest_fingerprint": self.manifest.fingerprint(),
            "dataset_hash": self.manifest.dataset_hash,
            "models": {o.spec.algorithm: o.to_dict() for o in self.outcomes},
        }

    def report_json(self) -> str:
        return json.dumps(self.report_dict(), sort_keys=True, indent=2)

    def report_table(self) -> str:
        return render_table([(o.spec.algorithm, o.report) for o in self.outcomes])


def new_manifest(
    dataset: Dataset,
    split_spec: SplitSpec,
    model_specs: list[ModelSpec],
    seed: int,
    feature_cap: int,
    vocab_size: int,
) -> RunManifest:
    return RunManifest(
        run_id=uuid.uuid4().hex[:12],
        dataset_hash=dataset.content_hash(),
        split=split_spec,
        models=tuple(model_specs),
        seed=seed,
        feature_cap=feature_cap,
        vocab_size=vocab_size,
        versions={"assumption-forge": package_version},
        created_at=time.time(),
    )


def run_training(
    dataset: Dataset,
    split_spec: SplitSpec,
    model_specs: list[ModelSpec],
    vocab: Vocabulary,
    seed: int = 0,
    feature_cap: int = DEFAULT_FEATURE_CAP,
    out_dir=None,
    save_models: bool = True,
) -> RunResult:
    manifest = new_manifest(dataset, split_spec, model_specs, seed, feature_cap, len(vocab))
    train_set, test_set = split(dataset, split_spec)

    train_tokens = [tokenize(t.lower(), vocab) for t in train_set.texts]
    test_tokens = [tokenize(t.lower(), vocab) for t in test_set.texts]
    full_map = build_feature_map(train_tokens, cap=len(vocab), vocab_size=len(vocab))
    capped_map = build_feature_map(train_tokens, cap=feature_cap, vocab_size=len(vocab))

    matrices = {}
    for name, fmap in (("full", full_map), ("capped", capped_map)):
        matrices[name] = (
            vectorize_all(train_tokens, "counts", fmap),
            vectorize_all(test_tokens, "counts", fmap),
        )

    out_path = Path(out_dir) if out_dir else None
    if out_path:
        out_path.mkdir(parents=True, exist_ok=True)
        (out_path / "manifest.json").write_text(
            json.dumps(manifest.to_dict(), sort_keys=True, indent=2), encoding="utf-8"
        )

    outcomes: list[ModelOutcome] = []
    for spec in model_specs:
        group = "capped" if spec.algorithm in CAPPED_ALGORITHMS else "full"
        fmap = capped_map if group == "capped" else full_map
        X_train, X_test = matrices[group]
        started = time.monotonic()
        estimator = build_estimator(spec, seed=seed)
        estimator.fit(X_train, train_set.labels)
        elapsed = time.monotonic() - started
        preds = estimator.predict(X_test)
        cm = build_confusion(list(test_set.labels), [int(p) for p in preds])
        outcome = ModelOutcome(spec=spec, report=metrics(cm), train_seconds=elapsed)
        if out_path and save_models:
            model = TrainedModel(
                spec=spec,
                estimator=estimator,
                seed=seed,
                feature_map_hash=fmap.fingerprint(),
            )
            model_file = out_path / f"{spec.algorithm.lower()}.afm"
            model.save(model_file)
            outcome.model_path = str(model_file)
        outcomes.append(outcome)

    result = RunResult(manifest=manifest, outcomes=outcomes)
    if out_path:
        (out_path / "report.json").write_text(result.report_json(), encoding="utf-8")
        (out_path / "report.txt").write_text(result.report_table() + "\n", encoding="utf-8")
        timing = {o.spec.algorithm: round(o.train_seconds, 3) for o in outcomes}
        (out_path / "run_meta.json").write_text(
            json.dumps({"train_seconds": timing}, indent=2), encoding="utf-8"
        )
    return result
