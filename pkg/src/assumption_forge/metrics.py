"""Three-class evaluation with strict per-label counts.

The scoring scheme treats each label in turn as the positive class. True
negatives are counted strictly: a sample only counts as a true negative for
label L when its prediction matches the ground truth exactly on one of the
other labels, i.e. TN_L sums the off-label diagonal of the confusion matrix.
All ratios are computed in exact rational arithmetic and exposed both as
`Fraction` and as floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InvalidLabel, LengthMismatch

LABELS = (0, 1, 2)
LABEL_NAMES = {0: "NA", 1: "PA", 2: "SCA"}


@dataclass(frozen=True)
class ConfusionMatrix3:
    """3x3 counts; rows are actual labels, columns predicted labels."""

    counts: tuple[tuple[int, int, int], ...]

    def __post_init__(self):
        if len(self.counts) != 3 or any(len(r) != 3 for r in self.counts):
            raise InvalidLabel("confusion matrix must be 3x3")
        if any(c < 0 for row in self.counts for c in row):
            raise InvalidLabel("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return sum(sum(row) for row in self.counts)

    @property
    def trace(self) -> int:
        return sum(self.counts[i][i] for i in LABELS)

    def row(self, label: int) -> tuple[int, int, int]:
        return self.counts[label]

    def column(self, label: int) -> tuple[int, int, int]:
        return tuple(self.counts[i][label] for i in LABELS)

    def to_lists(self) -> list[list[int]]:
        return [list(row) for row in self.counts]


@dataclass(frozen=True)
class StrictCounts:
    label: int
    tp: int
    tn: int
    fp: int
    fn: int


@dataclass(frozen=True)
class LabelMetrics:
    label: int
    precision: Fraction
    recall: Fraction
    f1: Fraction
    strict_accuracy: Fraction
    degenerate: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetricsReport:
    matrix: ConfusionMatrix3
    per_label: tuple[LabelMetrics, ...]
    precision_macro: Fraction
    recall_macro: Fraction
    f1: Fraction
    accuracy: Fraction
    strict_accuracy_macro: Fraction
    degenerate: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "matrix": self.matrix.to_lists(),
            "labels": {
                LABEL_NAMES[m.label]: {
                    "precision": float(m.precision),
                    "recall": float(m.recall),
                    "f1": float(m.f1),
                    "strict_accuracy": float(m.strict_accuracy),
                    "degenerate": list(m.degenerate),
                }
                for m in self.per_label
            },
            "precision_macro": float(self.precision_macro),
            "recall_macro": float(self.recall_macro),
            "f1": float(self.f1),
            "accuracy": float(self.accuracy),
            "strict_accuracy_macro": float(self.strict_accuracy_macro),
            "degenerate": list(self.degenerate),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def build_confusion(truths: Sequence[int], preds: Sequence[int]) -> ConfusionMatrix3:
    if len(truths) != len(preds):
        raise LengthMismatch(f"{len(truths)} truths vs {len(preds)} predictions")
    grid = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    for t, p in zip(truths, preds):
        if t not in LABELS or p not in LABELS:
            raise InvalidLabel(f"labels must be in {LABELS}, got ({t}, {p})")
        grid[t][p] += 1
    return ConfusionMatrix3(tuple(tuple(row) for row in grid))


def strict_counts(cm: ConfusionMatrix3, label: int) -> StrictCounts:
    if label not in LABELS:
        raise InvalidLabel(f"label must be in {LABELS}, got {label}")
    tp = cm.counts[label][label]
    fp = sum(cm.counts[i][label] for i in LABELS if i != label)
    fn = sum(cm.counts[label][j] for j in LABELS if j != label)
    tn = sum(cm.counts[i][i] for i in LABELS if i != label)
    return StrictCounts(label=label, tp=tp, tn=tn, fp=fp, fn=fn)


def _ratio(num: int, den: int, flags: list[str], name: str) -> Fraction:
    # Zero denominators are reported as 0 with a flag instead of NaN.
    if den == 0:
        flags.append(name)
        return Fraction(0)
    return Fraction(num, den)


def metrics(cm: ConfusionMatrix3) -> MetricsReport:
    per_label: list[LabelMetrics] = []
    precisions: list[Fraction] = []
    recalls: list[Fraction] = []
    stricts: list[Fraction] = []
    for label in LABELS:
        sc = strict_counts(cm, label)
        flags: list[str] = []
        p = _ratio(sc.tp, sc.tp + sc.fp, flags, "precision")
        r = _ratio(sc.tp, sc.tp + sc.fn, flags, "recall")
        if p + r == 0:
            flags.append("f1")
            f1 = Fraction(0)
        else:
            f1 = 2 * p * r / (p + r)
        acc = _ratio(sc.tp + sc.tn, sc.tp + sc.fp + sc.fn + sc.tn, flags, "strict_accuracy")
        per_label.append(
            LabelMetrics(
                label=label,
                precision=p,
                recall=r,
                f1=f1,
                strict_accuracy=acc,
                degenerate=tuple(flags),
            )
        )
        precisions.append(p)
        recalls.append(r)
        stricts.append(acc)
    p_macro = sum(precisions, Fraction(0)) / 3
    r_macro = sum(recalls, Fraction(0)) / 3
    top_flags: list[str] = []
    if p_macro + r_macro == 0:
        top_flags.append("f1")
        f1_macro = Fraction(0)
    else:
        f1_macro = 2 * p_macro * r_macro / (p_macro + r_macro)
    accuracy = _ratio(cm.trace, cm.total, top_flags, "accuracy")
    return MetricsReport(
        matrix=cm,
        per_label=tuple(per_label),
        precision_macro=p_macro,
        recall_macro=r_macro,
        f1=f1_macro,
        accuracy=accuracy,
        strict_accuracy_macro=sum(stricts, Fraction(0)) / 3,
        degenerate=tuple(top_flags),
    )


@dataclass(frozen=True)
class BinaryReport:
    """Two-class collapse: non-assumptions vs assumptions (PA and SCA merged)."""

    matrix: tuple[tuple[int, int], tuple[int, int]]
    precision_macro: Fraction
    recall_macro: Fraction
    f1: Fraction
    accuracy: Fraction
    degenerate: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "matrix": [list(r) for r in self.matrix],
            "precision_macro": float(self.precision_macro),
            "recall_macro": float(self.recall_macro),
            "f1": float(self.f1),
            "accuracy": float(self.accuracy),
            "degenerate": list(self.degenerate),
        }


def binary_collapse(cm: ConfusionMatrix3) -> BinaryReport:
    """Collapse classes into {NA} vs {PA, SCA} and score the 2x2 matrix."""
    groups = ((0,), (1, 2))
    grid = [[0, 0], [0, 0]]
    for gi, rows in enumerate(groups):
        for gj, cols in enumerate(groups):
            grid[gi][gj] = sum(cm.counts[i][j] for i in rows for j in cols)
    return score_binary_grid(grid)


def build_binary_confusion(truths: Sequence[int], preds: Sequence[int]) -> BinaryReport:
    """Score 0/1 labels directly (0 = non-assumption, 1 = assumption)."""
    if len(truths) != len(preds):
        raise LengthMismatch(f"{len(truths)} truths vs {len(preds)} predictions")
    grid = [[0, 0], [0, 0]]
    for t, p in zip(truths, preds):
        if t not in (0, 1) or p not in (0, 1):
            raise InvalidLabel(f"binary labels must be 0 or 1, got ({t}, {p})")
        grid[t][p] += 1
    return score_binary_grid(grid)


def score_binary_grid(grid: list[list[int]]) -> BinaryReport:
    flags: list[str] = []
    precisions = []
    recalls = []
    for k in (0, 1):
        tp = grid[k][k]
        fp = grid[1 - k][k]
        fn = grid[k][1 - k]
        precisions.append(_ratio(tp, tp + fp, flags, f"precision[{k}]"))
        recalls.append(_ratio(tp, tp + fn, flags, f"recall[{k}]"))
    p_macro = sum(precisions, Fraction(0)) / 2
    r_macro = sum(recalls, Fraction(0)) / 2
    if p_macro + r_macro == 0:
        flags.append("f1")
        f1 = Fraction(0)
    else:
        f1 = 2 * p_macro * r_macro / (p_macro + r_macro)
    total = grid[0][0] + grid[0][1] + grid[1][0] + grid[1][1]
    accuracy = _ratio(grid[0][0] + grid[1][1], total, flags, "accuracy")
    return BinaryReport(
        matrix=(tuple(grid[0]), tuple(grid[1])),
        precision_macro=p_macro,
        recall_macro=r_macro,
        f1=f1,
        accuracy=accuracy,
        degenerate=tuple(flags),
    )


def render_table(rows: list[tuple[str, MetricsReport]]) -> str:
    """Aligned text table with one line per model."""
    header = ("Model", "Accuracy", "Precision", "Recall", "F1-score")
    body = [
        (
            name,
            f"{float(rep.accuracy):.4f}",
            f"{float(rep.precision_macro):.4f}",
            f"{float(rep.recall_macro):.4f}",
            f"{float(rep.f1):.4f}",
        )
        for name, rep in rows
    ]
    widths = [max(len(header[c]), *(len(r[c]) for r in body)) if body else len(header[c]) for c in range(5)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(header))]
    lines.append("  ".join("-" * w for w in widths))
    for r in body:
        lines.append("  ".join(r[i].ljust(widths[i]) for i in range(5)))
    return "\n".join(lines)
