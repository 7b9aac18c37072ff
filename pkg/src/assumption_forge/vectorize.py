"""Subword vocabulary, tokenizer and sparse feature construction.

The vocabulary file carries one `piece<TAB>score` entry per line; ids follow
line order. Tokenization is greedy longest-match against the vocabulary:
each whitespace word is prefixed with the word-start marker and consumed
left to right by the longest matching piece, falling back to one unknown id
per unmatched character. This needs only the vocabulary file, no trained
segmentation model, and is total over arbitrary UTF-8 input.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import DuplicateToken, EmptyFile, MalformedLine

WORD_START = "▁"  # the conventional lower-one-eighth block marker
UNK_SURFACES = ("<unk>", "[UNK]", "<UNK>")


@dataclass
class Vocabulary:
    tokens: list[str]
    scores: list[float]
    unk_id: int
    boundary_marker: str = WORD_START
    index: dict[str, int] = field(default_factory=dict)
    max_piece_len: int = 0
    _by_first: dict[str, list[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {tok: i for i, tok in enumerate(self.tokens)}
        if not self.max_piece_len:
            self.max_piece_len = max((len(t) for t in self.tokens), default=0)

    def __len__(self) -> int:
        return len(self.tokens)

    def id_of(self, piece: str) -> int | None:
        return self.index.get(piece)


def load_vocab(path) -> Vocabulary:
    tokens: list[str] = []
    scores: list[float] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise MalformedLine(f"expected 'token<TAB>score', got {line!r}", lineno)
            token, raw_score = parts
            try:
                score = float(raw_score)
            except ValueError:
                raise MalformedLine(f"score {raw_score!r} is not a number", lineno) from None
            if token in seen:
                raise DuplicateToken(f"line {lineno}: token {token!r} repeated")
            seen.add(token)
            tokens.append(token)
            scores.append(score)
    if not tokens:
        raise EmptyFile(f"vocabulary file {path} has no entries")
    unk_id = next((i for i, t in enumerate(tokens) if t in UNK_SURFACES), None)
    if unk_id is None:
        raise MalformedLine("no unknown-token entry (<unk>) in vocabulary", 1)
    return Vocabulary(tokens=tokens, scores=scores, unk_id=unk_id, boundary_marker=WORD_START)


def tokenize(text: str, vocab: Vocabulary) -> list[int]:
    """Greedy longest-match token ids; expects pre-lowercased text."""
    ids: list[int] = []
    index = vocab.index
    cap = vocab.max_piece_len
    for word in text.split():
        s = vocab.boundary_marker + word
        i = 0
        n = len(s)
        while i < n:
            matched = None
            top = min(cap, n - i)
            for length in range(top, 0, -1):
                piece = s[i : i + length]
                if piece in index:
                    matched = (index[piece], length)
                    break
            if matched is None:
                ids.append(vocab.unk_id)
                i += 1
            else:
                ids.append(matched[0])
                i += matched[1]
    return ids


def detokenize(ids: Sequence[int], vocab: Vocabulary) -> str:
    """Inverse of tokenize up to unknown spans, which are elided."""
    pieces = [vocab.tokens[i] for i in ids if i != vocab.unk_id]
    return "".join(pieces).replace(vocab.boundary_marker, " ").strip()


@dataclass(frozen=True)
class FeatureVector:
    """Sparse mapping of feature position -> value."""

    values: dict[int, float]
    dimension: int

    def __post_init__(self):
        for k, v in self.values.items():
            if not 0 <= k < self.dimension:
                raise ValueError(f"feature id {k} outside dimension {self.dimension}")
            if v < 0:
                raise ValueError("feature values must be non-negative")

    def to_csr(self) -> sparse.csr_matrix:
        cols = sorted(self.values)
        data = [self.values[c] for c in cols]
        return sparse.csr_matrix(
            (data, (np.zeros(len(cols), dtype=np.int32), cols)),
            shape=(1, self.dimension),
        )


@dataclass
class FeatureMap:
    """Vocabulary ids kept as features, chosen on the training split only."""

    kept_ids: list[int]
    cap: int
    positions: dict[int, int] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.kept_ids) > self.cap:
            raise ValueError("kept_ids exceeds cap")
        if not self.positions:
            self.positions = {tid: pos for pos, tid in enumerate(self.kept_ids)}

    @property
    def dimension(self) -> int:
        return len(self.kept_ids)

    def fingerprint(self) -> str:
        import hashlib

        h = hashlib.sha256()
        h.update(str(self.cap).encode())
        h.update(b":")
        h.update(",".join(map(str, self.kept_ids)).encode())
        return h.hexdigest()[:16]


def build_feature_map(token_lists: Iterable[Sequence[int]], cap: int, vocab_size: int) -> FeatureMap:
    """Top-`cap` vocabulary ids by training frequency; ties favor smaller ids."""
    if cap < 1:
        raise ValueError("cap must be >= 1")
    freq = Counter()
    for ids in token_lists:
        freq.update(ids)
    ranked = sorted(range(vocab_size), key=lambda tid: (-freq.get(tid, 0), tid))
    kept = sorted(ranked[: min(cap, vocab_size)])
    return FeatureMap(kept_ids=kept, cap=cap)


def vectorize(ids: Sequence[int], mode: str, fmap: FeatureMap) -> FeatureVector:
    """Counts or binary indicators over kept ids; everything else dropped."""
    if mode not in ("counts", "binary"):
        raise ValueError(f"mode must be 'counts' or 'binary', got {mode!r}")
    values: dict[int, float] = {}
    for tid in ids:
        pos = fmap.positions.get(tid)
        if pos is None:
            continue
        if mode == "binary":
            values[pos] = 1.0
        else:
            values[pos] = values.get(pos, 0.0) + 1.0
    return FeatureVector(values=values, dimension=fmap.dimension)


def vectorize_all(
    token_lists: Sequence[Sequence[int]], mode: str, fmap: FeatureMap
) -> sparse.csr_matrix:
    """CSR matrix of shape (len(token_lists), fmap.dimension)."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for ids in token_lists:
        fv = vectorize(ids, mode, fmap)
        cols = sorted(fv.values)
        indices.extend(cols)
        data.extend(fv.values[c] for c in cols)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int32), np.array(indptr, dtype=np.int32)),
        shape=(len(token_lists), fmap.dimension),
    )


class SubwordVectorizer:
    """fit/transform wrapper tying vocabulary, feature map and mode together."""

    def __init__(self, vocab: Vocabulary, cap: int | None = None, mode: str = "counts"):
        self.vocab = vocab
        self.cap = cap if cap is not None else len(vocab)
        self.mode = mode
        self.feature_map: FeatureMap | None = None

    def get_params(self) -> dict:
        return {"cap": self.cap, "mode": self.mode}

    def fit(self, texts: Sequence[str]) -> "SubwordVectorizer":
        token_lists = [tokenize(t.lower(), self.vocab) for t in texts]
        self.feature_map = build_feature_map(token_lists, self.cap, len(self.vocab))
        return self

    def transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        if self.feature_map is None:
            raise RuntimeError("vectorizer is not fitted")
        token_lists = [tokenize(t.lower(), self.vocab) for t in texts]
        return vectorize_all(token_lists, self.mode, self.feature_map)

    def fit_transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        return self.fit(texts).transform(texts)
