"""On-disk workspace shared by the CLI and the HTTP service.

Single-directory embedded storage: JSONL stores plus per-dataset and
per-run subdirectories. The annotation audit trail is the source of truth
for labels; reopening a workspace replays it in order.
"""

from __future__ import annotations

import json
import uuid
from pathlib import Path

from .corpus import Sentence, extract_sentences, read_sentences, write_sentences
from .criteria import CriteriaEngine, load_lexicon
from .dataset import (
    AnnotationStore,
    Dataset,
    LabelRegistry,
    export_csv,
    import_csv,
)
from .errors import NotFound, UnknownSentence
from .harvest import RecordStore


class Workspace:
    def __init__(self, root, lexicon_path=None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "datasets").mkdir(exist_ok=True)
        (self.root / "runs").mkdir(exist_ok=True)
        cues = load_lexicon(lexicon_path) if lexicon_path else None
        self.engine = CriteriaEngine(cues=cues) if cues else CriteriaEngine()
        self.records = RecordStore(self.root / "records.jsonl")
        self.store = AnnotationStore(registry=self._load_labels())
        self._load_sentences()
        self._replay_annotations()

    # --- paths ---
    @property
    def sentences_path(self) -> Path:
        return self.root / "sentences.jsonl"

    @property
    def annotations_path(self) -> Path:
        return self.root / "annotations.jsonl"

    @property
    def labels_path(self) -> Path:
        return self.root / "labels.json"

    # --- labels ---
    def _load_labels(self) -> LabelRegistry:
        if self.labels_path.exists():
            return LabelRegistry.from_dict(json.loads(self.labels_path.read_text("utf-8")))
        registry = LabelRegistry.canonical()
        self._save_labels(registry)
        return registry

    def _save_labels(self, registry: LabelRegistry | None = None) -> None:
        registry = registry or self.store.registry
        self.labels_path.write_text(json.dumps(registry.to_dict(), indent=2), encoding="utf-8")

    def create_label(self, name: str, value: int):
        label = self.store.registry.create(name, value)
        self._save_labels()
        return label

    # --- sentences ---
    def _load_sentences(self) -> None:
        if self.sentences_path.exists():
            self.store.add_sentences(read_sentences(self.sentences_path))

    def extract_from_records(self, repo: str | None = None) -> int:
        """Sentence-split all records, attach rule verdicts, persist new ones."""
        fresh: list[Sentence] = []
        known = {s.id for s in self.store.sentences()}
        for record in self.records.records(repo=repo):
            for sentence in extract_sentences(record):
                if sentence.id in known:
                    continue
                sentence.verdict = self.engine.classify(sentence.raw_text).to_dict()
                fresh.append(sentence)
                known.add(sentence.id)
        if fresh:
            write_sentences(self.sentences_path, fresh)
            self.store.add_sentences(fresh)
        return len(fresh)

    def add_sentences(self, sentences: list[Sentence], classify: bool = True) -> int:
        for s in sentences:
            if classify and s.verdict is None:
                s.verdict = self.engine.classify(s.raw_text).to_dict()
        added = self.store.add_sentences(sentences)
        write_sentences(self.sentences_path, sentences)
        return added

    # --- annotations ---
    def _replay_annotations(self) -> None:
        if not self.annotations_path.exists():
            return
        with open(self.annotations_path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                row = json.loads(line)
                try:
                    self.store.annotate(
                        row["sentence_id"],
                        row["label"],
                        annotator=row.get("annotator", "anonymous"),
                        verdict_hint=row.get("verdict_hint"),
                        at=row.get("labeled_at"),
                    )
                except UnknownSentence:
                    continue

    def annotate(self, sentence_id: str, label, annotator: str = "anonymous", verdict_hint=None):
        example = self.store.annotate(
            sentence_id, label, annotator=annotator, verdict_hint=verdict_hint
        )
        with open(self.annotations_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(example.to_dict(), ensure_ascii=False) + "\n")
        return example

    # --- datasets ---
    def save_dataset(self, dataset: Dataset, seed: int) -> str:
        dataset_id = uuid.uuid4().hex[:12]
        csv_path = self.root / "datasets" / f"{dataset_id}.csv"
        export_csv(dataset, csv_path)
        meta = {
            "id": dataset_id,
            "seed": seed,
            "rows": len(dataset),
            "hash": dataset.content_hash(),
            "kinds": dataset.kinds,
        }
        (self.root / "datasets" / f"{dataset_id}.json").write_text(
            json.dumps(meta, indent=2), encoding="utf-8"
        )
        return dataset_id

    def dataset_csv_path(self, dataset_id: str) -> Path:
        path = self.root / "datasets" / f"{dataset_id}.csv"
        if not path.exists():
            raise NotFound(f"dataset {dataset_id!r} does not exist")
        return path

    def load_dataset(self, dataset_id: str) -> Dataset:
        dataset = import_csv(self.dataset_csv_path(dataset_id), self.store.registry)
        meta_path = self.root / "datasets" / f"{dataset_id}.json"
        if meta_path.exists():
            meta = json.loads(meta_path.read_text("utf-8"))
            kinds = meta.get("kinds")
            if kinds and len(kinds) == len(dataset):
                dataset.kinds = kinds
        return dataset

    def list_datasets(self) -> list[dict]:
        out = []
        for meta_file in sorted((self.root / "datasets").glob("*.json")):
            meta = json.loads(meta_file.read_text("utf-8"))
            meta.pop("kinds", None)
            out.append(meta)
        return out

    def run_dir(self, run_id: str) -> Path:
        return self.root / "runs" / run_id
