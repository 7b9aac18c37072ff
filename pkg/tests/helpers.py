"""Shared test fixtures: oracles, corpus generators, vocab builders."""

from __future__ import annotations

from fractions import Fraction

from assumption_forge.dataset import Dataset
from assumption_forge.rng import SplitMix64


# --- independent metrics oracle -------------------------------------------
# Computes every quantity straight from the (truth, prediction) pairs with
# exact rationals; never touches the package's confusion-matrix code path.

def oracle_confusion(truths, preds):
    grid = [[0] * 3 for _ in range(3)]
    for t, p in zip(truths, preds):
        grid[t][p] += 1
    return grid


def _safe_frac(num, den):
    return Fraction(0) if den == 0 else Fraction(num, den)


def oracle_strict_counts(truths, preds, label):
    tp = sum(1 for t, p in zip(truths, preds) if t == label and p == label)
    fp = sum(1 for t, p in zip(truths, preds) if t != label and p == label)
    fn = sum(1 for t, p in zip(truths, preds) if t == label and p != label)
    tn = sum(1 for t, p in zip(truths, preds) if t == p and t != label)
    return tp, tn, fp, fn


def oracle_metrics(truths, preds):
    per_label = {}
    precisions, recalls, stricts = [], [], []
    for label in (0, 1, 2):
        tp, tn, fp, fn = oracle_strict_counts(truths, preds, label)
        p = _safe_frac(tp, tp + fp)
        r = _safe_frac(tp, tp + fn)
        f1 = Fraction(0) if p + r == 0 else 2 * p * r / (p + r)
        acc = _safe_frac(tp + tn, tp + fp + fn + tn)
        per_label[label] = {"precision": p, "recall": r, "f1": f1, "strict_accuracy": acc}
        precisions.append(p)
        recalls.append(r)
        stricts.append(acc)
    p_macro = sum(precisions, Fraction(0)) / 3
    r_macro = sum(recalls, Fraction(0)) / 3
    f1_macro = Fraction(0) if p_macro + r_macro == 0 else 2 * p_macro * r_macro / (p_macro + r_macro)
    correct = sum(1 for t, p in zip(truths, preds) if t == p)
    return {
        "per_label": per_label,
        "precision_macro": p_macro,
        "recall_macro": r_macro,
        "f1": f1_macro,
        "accuracy": _safe_frac(correct, len(truths)),
        "strict_accuracy_macro": sum(stricts, Fraction(0)) / 3,
    }


# --- synthetic keyword-separable corpus ------------------------------------

_SUBJECTS = [
    "the loader", "this kernel", "the resize op", "our scheduler", "the cache layer",
    "the parser", "that wrapper", "the gradient pass", "the session runner", "the allocator",
]
_OBJECTS = [
    "the input tensor", "the device buffer", "the batch queue", "the shape metadata",
    "the thread pool", "the checkpoint file", "the graph nodes", "the index table",
]
_STATES = [
    "stays contiguous", "fits in memory", "is already sorted", "keeps its rank",
    "uses row order", "has a static shape", "remains pinned", "is cached locally",
]
_FACT_VERBS = ["updates", "copies", "rebuilds", "clears", "loads", "tracks", "writes", "scans"]
_SCA_FRAMES = [
    "{subj} assumes {obj} {state}.",
    "note that {subj} assumed {obj} {state}.",
    "fix the invalid assumption that {obj} {state}.",
    "{subj} is assuming {obj} {state} during warmup.",
]
_PA_FRAMES = [
    "i think {subj} should handle {obj} here.",
    "{subj} will probably drop {obj} next release.",
    "we expect {obj} to change once {subj} lands.",
    "maybe {subj} can reuse {obj} for this case.",
]
_NA_FRAMES = [
    "{subj} {verb} {obj} on startup.",
    "{subj} {verb} {obj} after each step.",
    "updated docs: {subj} {verb} {obj}.",
    "{subj} {verb} {obj} for every worker.",
]


def synth_corpus(n_per_class: int = 1000, seed: int = 7) -> Dataset:
    """Keyword-separable sentences: class is decided by marker vocabulary."""
    rng = SplitMix64(seed)
    texts: list[str] = []
    labels: list[int] = []

    def pick(pool):
        return pool[rng.below(len(pool))]

    for i in range(n_per_class):
        texts.append(
            pick(_NA_FRAMES).format(subj=pick(_SUBJECTS), verb=pick(_FACT_VERBS), obj=pick(_OBJECTS))
            + f" (case {i})"
        )
        labels.append(0)
        texts.append(
            pick(_PA_FRAMES).format(subj=pick(_SUBJECTS), obj=pick(_OBJECTS)) + f" (case {i})"
        )
        labels.append(1)
        texts.append(
            pick(_SCA_FRAMES).format(subj=pick(_SUBJECTS), obj=pick(_OBJECTS), state=pick(_STATES))
            + f" (case {i})"
        )
        labels.append(2)
    return Dataset(texts=texts, labels=labels)


def write_vocab_for(texts, path, extra_pieces=()):
    """Vocabulary file covering every word of `texts` plus single characters."""
    words: set[str] = set()
    chars: set[str] = set()
    for text in texts:
        for word in text.lower().split():
            words.add("▁" + word)
            chars.update(word)
    pieces = ["<unk>"] + sorted(words) + sorted(chars) + ["▁"] + list(extra_pieces)
    seen = set()
    lines = []
    for i, piece in enumerate(pieces):
        if piece in seen:
            continue
        seen.add(piece)
        lines.append(f"{piece}\t{-float(i):.1f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
