"""Label registry, annotation store, dataset assembly and CSV round trip.

The canonical label triple is NA=0, PA=1, SCA=2. Balanced selection keeps
every example of the scarcest class of interest (SCA) and draws seeded
uniform samples of the others down to the same size. Splits are stratified
by default so the balanced class priors survive into the test set.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Sentence
from .errors import (
    DuplicateName,
    DuplicateValue,
    InsufficientClass,
    MalformedRow,
    UnknownLabel,
    UnknownLabelValue,
    UnknownSentence,
)
from .rng import SplitMix64, sample_indices

CANONICAL_LABELS = (("NA", 0), ("PA", 1), ("SCA", 2))

# Published per-source counts of the reference corpus (SCA, PA, NA).
REFERENCE_PER_CLASS = {"SCA": 5118, "PA": 5118, "NA": 5118}
REFERENCE_PER_SOURCE = {
    "commit": {"SCA": 598, "PA": 542, "NA": 4171},
    "pr": {"SCA": 883, "PA": 4044, "NA": 675},
    "issue": {"SCA": 3637, "PA": 532, "NA": 272},
}

KIND_TO_SOURCE = {
    "commit_message": "commit",
    "pr_title": "pr",
    "pr_body": "pr",
    "pr_comment_body": "pr",
    "issue_title": "issue",
    "issue_body": "issue",
    "issue_comment_body": "issue",
}


@dataclass(frozen=True)
class Label:
    name: str
    value: int


class LabelRegistry:
    """Registered labels, unique by both name and numeric value."""

    def __init__(self):
        self._by_name: dict[str, Label] = {}
        self._by_value: dict[int, Label] = {}

    def create(self, name: str, value: int) -> Label:
        if name in self._by_name:
            raise DuplicateName(f"label name {name!r} already registered")
        if value in self._by_value:
            raise DuplicateValue(f"label value {value} already registered")
        label = Label(name=name, value=value)
        self._by_name[name] = label
        self._by_value[value] = label
        return label

    def get(self, key: str | int) -> Label:
        table = self._by_value if isinstance(key, int) else self._by_name
        if key not in table:
            raise UnknownLabel(f"label {key!r} is not registered")
        return table[key]

    def __contains__(self, key) -> bool:
        return key in (self._by_value if isinstance(key, int) else self._by_name)

    def all(self) -> list[Label]:
        return sorted(self._by_name.values(), key=lambda l: l.value)

    def to_dict(self) -> dict:
        return {l.name: l.value for l in self.all()}

    @classmethod
    def canonical(cls) -> "LabelRegistry":
        reg = cls()
        for name, value in CANONICAL_LABELS:
            reg.create(name, value)
        return reg

    @classmethod
    def from_dict(cls, data: dict) -> "LabelRegistry":
        reg = cls()
        for name, value in sorted(data.items(), key=lambda kv: kv[1]):
            reg.create(name, int(value))
        return reg


@dataclass
class LabeledExample:
    sentence: Sentence
    label: Label
    annotator: str
    labeled_at: float
    verdict_hint: dict | None = None

    def to_dict(self) -> dict:
        out = {
            "sentence_id": self.sentence.id,
            "label": self.label.name,
            "value": self.label.value,
            "annotator": self.annotator,
            "labeled_at": self.labeled_at,
        }
        if self.verdict_hint is not None:
            out["verdict_hint"] = self.verdict_hint
        return out


class AnnotationStore:
    """Sentences plus their labels, with an upsert audit trail.

    Re-annotating a sentence overwrites the committed label and appends the
    prior value to that sentence's audit history.
    """

    def __init__(self, registry: LabelRegistry | None = None):
        self.registry = registry or LabelRegistry.canonical()
        self._sentences: dict[str, Sentence] = {}
        self._order: list[str] = []
        self._annotations: dict[str, LabeledExample] = {}
        self._audit: dict[str, list[dict]] = {}

    # --- sentences ---
    def add_sentences(self, sentences: Iterable[Sentence]) -> int:
        n = 0
        for s in sentences:
            if s.id not in self._sentences:
                self._order.append(s.id)
                n += 1
            self._sentences[s.id] = s
        return n

    def sentences(self) -> list[Sentence]:
        return [self._sentences[i] for i in self._order]

    def get_sentence(self, sentence_id: str) -> Sentence:
        if sentence_id not in self._sentences:
            raise UnknownSentence(f"no sentence with id {sentence_id!r}")
        return self._sentences[sentence_id]

    # --- annotation ---
    def annotate(
        self,
        sentence_id: str,
        label: str | int | Label,
        annotator: str = "anonymous",
        verdict_hint: dict | None = None,
        at: float | None = None,
    ) -> LabeledExample:
        sentence = self.get_sentence(sentence_id)
        if not isinstance(label, Label):
            label = self.registry.get(label)
        elif label.name not in self.registry:
            raise UnknownLabel(f"label {label.name!r} is not registered")
        example = LabeledExample(
            sentence=sentence,
            label=label,
            annotator=annotator,
            labeled_at=time.time() if at is None else at,
            verdict_hint=verdict_hint,
        )
        trail = self._audit.setdefault(sentence_id, [])
        trail.append(example.to_dict())
        self._annotations[sentence_id] = example
        return example

    def audit_trail(self, sentence_id: str) -> list[dict]:
        return list(self._audit.get(sentence_id, []))

    def annotation(self, sentence_id: str) -> LabeledExample | None:
        return self._annotations.get(sentence_id)

    def labeled(self) -> list[LabeledExample]:
        return [self._annotations[i] for i in self._order if i in self._annotations]

    def write_audit(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for sid in self._order:
                for entry in self._audit.get(sid, []):
                    fh.write(json.dumps(entry, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ValueError("train_fraction must be in (0, 1)")

    def to_dict(self) -> dict:
        return {
            "train_fraction": self.train_fraction,
            "seed": self.seed,
            "stratified": self.stratified,
        }


@dataclass
class Dataset:
    """Ordered (text, label value) rows with optional provenance kinds."""

    texts: list[str]
    labels: list[int]
    kinds: list[str | None] = field(default_factory=list)

    def __post_init__(self):
        if not self.kinds:
            self.kinds = [None] * len(self.texts)
        if not (len(self.texts) == len(self.labels) == len(self.kinds)):
            raise ValueError("texts, labels and kinds must align")

    def __len__(self) -> int:
        return len(self.texts)

    def rows(self):
        return zip(self.texts, self.labels, self.kinds)

    def content_hash(self) -> str:
        h = hashlib.sha256()
        for text, label, _ in self.rows():
            h.update(text.encode("utf-8"))
            h.update(b"\x00")
            h.update(str(label).encode())
            h.update(b"\x01")
        return h.hexdigest()


def balanced_select(store: AnnotationStore, seed: int) -> Dataset:
    """Every SCA plus equal-size seeded samples of PA and NA."""
    buckets: dict[str, list[LabeledExample]] = {"NA": [], "PA": [], "SCA": []}
    for ex in store.labeled():
        if ex.label.name in buckets:
            buckets[ex.label.name].append(ex)
    n_sca = len(buckets["SCA"])
    for name in ("PA", "NA"):
        if len(buckets[name]) < n_sca:
            raise InsufficientClass(name, len(buckets[name]), n_sca)
    rng = SplitMix64(seed)
    chosen: list[LabeledExample] = list(buckets["SCA"])
    for stream, name in enumerate(("PA", "NA")):
        idx = sorted(sample_indices(len(buckets[name]), n_sca, rng.derive(stream)))
        chosen.extend(buckets[name][i] for i in idx)
    return Dataset(
        texts=[ex.sentence.raw_text for ex in chosen],
        labels=[ex.label.value for ex in chosen],
        kinds=[ex.sentence.kind for ex in chosen],
    )


def split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Disjoint train/test partition; per-class floor rounding when stratified."""
    if len(dataset) == 0:
        raise ValueError("dataset is empty")
    rng = SplitMix64(spec.seed)
    if spec.stratified:
        train_idx: list[int] = []
        for label in sorted(set(dataset.labels)):
            members = [i for i, l in enumerate(dataset.labels) if l == label]
            take = int(spec.train_fraction * len(members))
            picked = sample_indices(len(members), take, rng.derive(label))
            train_idx.extend(members[i] for i in picked)
    else:
        take = int(spec.train_fraction * len(dataset))
        train_idx = sample_indices(len(dataset), take, rng)
    train_set = set(train_idx)
    train_rows = sorted(train_set)
    test_rows = [i for i in range(len(dataset)) if i not in train_set]

    def subset(rows: list[int]) -> Dataset:
        return Dataset(
            texts=[dataset.texts[i] for i in rows],
            labels=[dataset.labels[i] for i in rows],
            kinds=[dataset.kinds[i] for i in rows],
        )

    return subset(train_rows), subset(test_rows)


# --- CSV interchange ------------------------------------------------------

CSV_HEADER = ["text", "label"]


def export_csv(dataset: Dataset, path) -> None:
    """Write `text,label` rows with RFC-4180 quoting."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, quoting=csv.QUOTE_MINIMAL)
        writer.writerow(CSV_HEADER)
        for text, label, _ in dataset.rows():
            writer.writerow([text, label])


def import_csv(path, registry: LabelRegistry | None = None) -> Dataset:
    registry = registry or LabelRegistry.canonical()
    texts: list[str] = []
    labels: list[int] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise MalformedRow("file is empty", 1) from None
        if [h.strip().lower() for h in header[:2]] != CSV_HEADER:
            raise MalformedRow(f"expected header {CSV_HEADER}, got {header}", 1)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != 2:
                raise MalformedRow(f"expected 2 cells, got {len(row)}", line)
            text, raw_label = row
            try:
                value = int(raw_label)
            except ValueError:
                raise MalformedRow(f"label {raw_label!r} is not an integer", line) from None
            if value not in registry:
                raise UnknownLabelValue(f"line {line}: label value {value} is not registered")
            texts.append(text)
            labels.append(value)
    return Dataset(texts=texts, labels=labels)


# --- reference validation --------------------------------------------------

@dataclass
class ValidationReport:
    per_class: dict[str, dict[str, int]]
    per_source: dict[str, dict[str, dict[str, int]]] | None
    matches_reference: bool

    def to_dict(self) -> dict:
        return {
            "per_class": self.per_class,
            "per_source": self.per_source,
            "matches_reference": self.matches_reference,
        }


def validate_against_reference(dataset: Dataset) -> ValidationReport:
    """Compare class and per-source counts to the published reference corpus."""
    names = {value: name for name, value in CANONICAL_LABELS}
    per_class: dict[str, dict[str, int]] = {}
    counts = {name: 0 for name, _ in CANONICAL_LABELS}
    for label in dataset.labels:
        counts[names[label]] += 1
    ok = True
    for name, expected in REFERENCE_PER_CLASS.items():
        actual = counts[name]
        per_class[name] = {"actual": actual, "expected": expected, "delta": actual - expected}
        ok = ok and actual == expected

    have_kinds = all(k is not None for k in dataset.kinds) and len(dataset) > 0
    per_source = None
    if have_kinds:
        per_source = {}
        grid = {src: {name: 0 for name, _ in CANONICAL_LABELS} for src in REFERENCE_PER_SOURCE}
        for label, kind in zip(dataset.labels, dataset.kinds):
            src = KIND_TO_SOURCE.get(kind or "", None)
            if src:
                grid[src][names[label]] += 1
        for src, expected_counts in REFERENCE_PER_SOURCE.items():
            per_source[src] = {}
            for name, expected in expected_counts.items():
                actual = grid[src][name]
                per_source[src][name] = {
                    "actual": actual,
                    "expected": expected,
                    "delta": actual - expected,
                }
                ok = ok and actual == expected
    return ValidationReport(per_class=per_class, per_source=per_source, matches_reference=ok)
