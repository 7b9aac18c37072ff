"""Sentence extraction and corpus statistics.

Records harvested from commits, PRs and issues are markdown-ish free text.
Segmentation splits on terminator punctuation followed by whitespace, on
blank lines and on markdown bullets, while protecting inline code spans,
URLs and dotted version strings. Every non-whitespace character of the
record survives into exactly one sentence, in order.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

_TERMINATORS = ".!?"
# Dotted abbreviations that must not end a sentence.
_ABBREVIATIONS = {"e.g", "i.e", "etc", "vs", "cf", "al"}
_BULLET_RE = re.compile(r"^\s*(?:[-*+]\s+|\d+[.)]\s+)")
_URL_RE = re.compile(r"(?:https?://|www\.)\S*$", re.IGNORECASE)


@dataclass
class Sentence:
    id: str
    record_id: str
    index_in_record: int
    raw_text: str
    normalized_text: str = ""
    word_count: int = 0
    kind: str | None = None
    verdict: dict | None = None

    def __post_init__(self):
        if not self.normalized_text:
            self.normalized_text = self.raw_text.lower()
        if not self.word_count:
            self.word_count = word_count(self.raw_text)

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "record_id": self.record_id,
            "index_in_record": self.index_in_record,
            "raw_text": self.raw_text,
            "normalized_text": self.normalized_text,
            "word_count": self.word_count,
        }
        if self.kind is not None:
            out["kind"] = self.kind
        if self.verdict is not None:
            out["verdict"] = self.verdict
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "Sentence":
        return cls(
            id=data["id"],
            record_id=data["record_id"],
            index_in_record=data["index_in_record"],
            raw_text=data["raw_text"],
            normalized_text=data.get("normalized_text", ""),
            word_count=data.get("word_count", 0),
            kind=data.get("kind"),
            verdict=data.get("verdict"),
        )


def word_count(text: str) -> int:
    """Whitespace tokens containing at least one alphanumeric character."""
    return sum(1 for tok in text.split() if any(ch.isalnum() for ch in tok))


def _sentence_id(record_id: str, index: int, text: str) -> str:
    digest = hashlib.sha256(f"{record_id}\x00{index}\x00{text}".encode("utf-8")).hexdigest()
    return digest[:16]


def _protected(text: str, pos: int, backtick_depth: int) -> bool:
    """True when the terminator at ``pos`` must not split the text."""
    if backtick_depth > 0:
        return True
    ch = text[pos]
    if ch != ".":
        return False
    # version strings: digit on both sides of the dot
    if 0 < pos < len(text) - 1 and text[pos - 1].isdigit() and text[pos + 1].isdigit():
        return True
    # URL in progress: scan back to the last whitespace
    start = pos
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    if _URL_RE.match(text[start : pos + 1]):
        return True
    word = text[start:pos].rstrip(".").lower()
    return word in _ABBREVIATIONS


def _split_flow(text: str) -> list[str]:
    """Split one paragraph on terminator punctuation followed by whitespace."""
    pieces: list[str] = []
    start = 0
    backticks = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "`":
            backticks ^= 1
            i += 1
            continue
        if ch in _TERMINATORS and not _protected(text, i, backticks):
            # swallow the whole punctuation run ("?!", "...")
            j = i
            while j + 1 < n and text[j + 1] in _TERMINATORS + ")\"'":
                j += 1
            if j + 1 >= n or text[j + 1].isspace():
                pieces.append(text[start : j + 1])
                start = j + 1
            i = j + 1
            continue
        i += 1
    if start < n:
        pieces.append(text[start:])
    return [p for p in pieces if p.strip()]


def split_sentences(text: str) -> list[str]:
    """Segment free text into sentence strings, order preserved."""
    sentences: list[str] = []
    for block in re.split(r"\n\s*\n", text):
        lines = block.split("\n")
        segments: list[str] = []
        current: list[str] = []
        for line in lines:
            if _BULLET_RE.match(line) and current:
                segments.append("\n".join(current))
                current = [line]
            else:
                current.append(line)
        if current:
            segments.append("\n".join(current))
        for segment in segments:
            sentences.extend(s.strip() for s in _split_flow(segment) if s.strip())
    return [s for s in sentences if s]


def extract_sentences(record) -> list[Sentence]:
    """Turn a harvested record into ordered Sentence objects."""
    texts = split_sentences(record.text or "")
    kind = getattr(record.kind, "value", record.kind)
    return [
        Sentence(
            id=_sentence_id(record.id, idx, raw),
            record_id=record.id,
            index_in_record=idx,
            raw_text=raw,
            kind=kind,
        )
        for idx, raw in enumerate(texts)
    ]


def dedup(sentences: Sequence[Sentence]) -> list[Sentence]:
    """Keep the first occurrence of each exact raw text.

    Comparison is byte equality after trimming trailing line breaks only;
    casing and interior whitespace differences keep both copies.
    """
    seen: set[str] = set()
    out: list[Sentence] = []
    for s in sentences:
        key = s.raw_text.rstrip("\r\n")
        if key in seen:
            continue
        seen.add(key)
        out.append(s)
    return out


# --- statistics ----------------------------------------------------------

INTERVALS = [(i * 10 + 1, (i + 1) * 10) for i in range(10)] + [(101, None)]


def interval_label(low: int, high: int | None) -> str:
    return f"{low}-{high}" if high is not None else f">{low - 1}"


@dataclass
class LabelHistogram:
    count: int = 0
    minimum: int | None = None
    maximum: int | None = None
    buckets: list[int] = field(default_factory=lambda: [0] * 11)

    def add(self, wc: int) -> None:
        self.count += 1
        self.minimum = wc if self.minimum is None else min(self.minimum, wc)
        self.maximum = wc if self.maximum is None else max(self.maximum, wc)
        idx = 10 if wc > 100 else max(0, (wc - 1) // 10)
        self.buckets[idx] += 1

    def to_dict(self) -> dict:
        return {
            "count": self.count,
            "min": self.minimum,
            "max": self.maximum,
            "intervals": {
                interval_label(lo, hi): self.buckets[i]
                for i, (lo, hi) in enumerate(INTERVALS)
            },
        }


def corpus_stats(examples: Iterable) -> dict[str, LabelHistogram]:
    """Per-label word-count histogram over labeled examples."""
    out: dict[str, LabelHistogram] = {}
    for ex in examples:
        name = ex.label.name if hasattr(ex.label, "name") else str(ex.label)
        wc = ex.sentence.word_count if hasattr(ex, "sentence") else ex.word_count
        out.setdefault(name, LabelHistogram()).add(wc)
    return out


# --- persistence ---------------------------------------------------------

def write_sentences(path, sentences: Iterable[Sentence]) -> int:
    n = 0
    with open(path, "a", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(json.dumps(s.to_dict(), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_sentences(path) -> list[Sentence]:
    out: list[Sentence] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(Sentence.from_dict(json.loads(line)))
    return out
