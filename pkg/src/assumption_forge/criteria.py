"""Rule-based suggestion engine for assumption labeling.

Encodes the inclusion/exclusion criteria used during manual labeling as a
deterministic, explainable pre-labeler. Verdicts list every criterion that
fired; they are hints for a human annotator, never final labels. The only
verdicts marked ``definite`` are the keyword-free/cue-free case and the
identifier-only keyword case, which are NA by construction.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

KEYWORDS = (
    "assumption",
    "assumptions",
    "assume",
    "assumes",
    "assumed",
    "assuming",
    "assumable",
    "assumably",
)

# Epistemic/modal cue lexicon for potential assumptions. Entries ending in
# '*' match token prefixes; multi-word entries match phrases.
DEFAULT_PA_CUES = (
    "should",
    "would",
    "expect*",
    "think*",
    "believe*",
    "seem*",
    "likely",
    "probably",
    "possible",
    "possibly",
    "maybe",
    "perhaps",
    "suppose*",
    "guess*",
    "suspect*",
    "will",
    "hope*",
    "feel*",
    "felt",
    "wonder*",
    "going to",
    "potential",
    "potentially",
)

QUESTION_OPENERS = frozenset(
    "what which who whom whose where when why how "
    "do does did is are was were can could will would should have has may might".split()
)

_KEYWORD_RE = re.compile(r"assum(?:ptions|ption|able|ably|ing|ed|es|e)", re.IGNORECASE)
_TOKEN_CHARS = re.compile(r"[A-Za-z0-9_.]")


def load_lexicon(path) -> tuple[str, ...]:
    """Read cue entries, one per line, '#' starts a comment."""
    cues: list[str] = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            entry = line.split("#", 1)[0].strip().lower()
            if entry:
                cues.append(entry)
    return tuple(cues)


@dataclass(frozen=True)
class KeywordSpan:
    start: int
    end: int
    surface: str
    in_identifier: bool


@dataclass(frozen=True)
class RuleVerdict:
    suggested_label: str  # "NA" | "PA" | "SCA"
    matched_rules: tuple[str, ...]
    keyword_spans: tuple[KeywordSpan, ...]
    question_form: str  # "standard" | "nonstandard" | "none"
    confidence: str  # "definite" | "heuristic"

    def to_dict(self) -> dict:
        return {
            "suggested_label": self.suggested_label,
            "matched_rules": list(self.matched_rules),
            "keyword_spans": [
                {
                    "start": s.start,
                    "end": s.end,
                    "surface": s.surface,
                    "in_identifier": s.in_identifier,
                }
                for s in self.keyword_spans
            ],
            "question_form": self.question_form,
            "confidence": self.confidence,
        }


# --- span masking --------------------------------------------------------

def _code_spans(text: str) -> list[tuple[int, int]]:
    """Regions delimited by backticks; a backtick closes on ` or '."""
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i] == "`":
            j = i + 1
            while j < n and text[j] not in "`'":
                j += 1
            if j < n:
                spans.append((i, j + 1))
                i = j + 1
                continue
        i += 1
    return spans


def _quote_spans(text: str) -> list[tuple[int, int]]:
    """Single/double-quoted literals, skipping in-word apostrophes."""
    spans: list[tuple[int, int]] = []
    open_at: int | None = None
    quote = ""
    for i, ch in enumerate(text):
        if ch not in "'\"":
            continue
        prev = text[i - 1] if i else ""
        nxt = text[i + 1] if i + 1 < len(text) else ""
        if open_at is None:
            # an opener must not sit between two letters (contraction)
            if ch == "'" and prev.isalpha() and nxt.isalpha():
                continue
            if ch == "'" and prev.isalpha():
                continue
            open_at, quote = i, ch
        elif ch == quote:
            if ch == "'" and prev.isalpha() and nxt.isalpha():
                continue
            spans.append((open_at, i + 1))
            open_at = None
    return spans


_CODEY = re.compile(r"[_()\[\]{}=<>;\\/]|\d")


def _call_spans(text: str) -> list[tuple[int, int]]:
    """Parenthesized regions opened directly after an identifier character."""
    spans: list[tuple[int, int]] = []
    stack: list[tuple[int, bool]] = []
    for i, ch in enumerate(text):
        if ch == "(":
            call_like = i > 0 and (text[i - 1].isalnum() or text[i - 1] in "_.]")
            stack.append((i, call_like))
        elif ch == ")" and stack:
            start, call_like = stack.pop()
            if call_like:
                spans.append((start, i + 1))
    for start, call_like in stack:  # unclosed call parens run to the end
        if call_like:
            spans.append((start, len(text)))
    return spans


def _inside(pos: int, spans: Iterable[tuple[int, int]]) -> bool:
    return any(a <= pos < b for a, b in spans)


def _containing_token(text: str, start: int, end: int) -> str:
    a = start
    while a > 0 and _TOKEN_CHARS.match(text[a - 1]):
        a -= 1
    b = end
    while b < len(text) and _TOKEN_CHARS.match(text[b]):
        b += 1
    return text[a:b]


def _token_is_codey(tok: str) -> bool:
    tok = tok.strip()
    if not tok:
        return False
    return bool(re.search(r"[_()\[\]{}=<>\\]|\d|\w\.\w|::", tok)) or bool(
        re.search(r"[a-z][A-Z]", tok)
    )


def _in_code_enumeration(text: str, start: int, end: int) -> bool:
    """Keyword is a bare item of a comma list that also holds code-like items."""
    left = max((text.rfind(c, 0, start) for c in ".;!?"), default=-1)
    right_candidates = [text.find(c, end) for c in ".;!?"]
    right_candidates = [c for c in right_candidates if c != -1]
    right = min(right_candidates) if right_candidates else len(text)
    region = text[left + 1 : right]
    offset = start - (left + 1)
    pos = 0
    items = region.split(",")
    target = None
    for item in items:
        if pos <= offset < pos + len(item):
            target = item
        pos += len(item) + 1
    if target is None or target.strip().lower() not in KEYWORDS:
        return False
    others = [i for i in items if i is not target]
    return len(others) >= 2 and any(_token_is_codey(i) for i in others)


def detect_keywords(text: str) -> list[KeywordSpan]:
    """Case-insensitive whole-word matches of the assumption keywords.

    Word boundaries also break on case transitions so that keywords buried
    in camelCase identifiers are still reported (flagged as identifiers).
    """
    code = _code_spans(text)
    quotes = [s for s in _quote_spans(text) if _CODEY.search(text[s[0] : s[1]])]
    calls = _call_spans(text)
    spans: list[KeywordSpan] = []
    for m in _KEYWORD_RE.finditer(text):
        start, end = m.span()
        prev = text[start - 1] if start else ""
        nxt = text[end] if end < len(text) else ""
        if prev.isalpha() and not (prev.islower() and text[start].isupper()):
            continue
        if nxt.isalpha() and not (text[end - 1].islower() and nxt.isupper()):
            continue
        token = _containing_token(text, start, end)
        embedded = any(ch.isalnum() for ch in (token.replace(m.group(0), "", 1)))
        in_ident = (
            embedded
            or _inside(start, code)
            or _inside(start, quotes)
            or _inside(start, calls)
            or (end < len(text) and text[end] == "(")
            or _in_code_enumeration(text, start, end)
        )
        spans.append(KeywordSpan(start=start, end=end, surface=m.group(0), in_identifier=in_ident))
    return spans


# --- question shape ------------------------------------------------------

def detect_question_form(text: str) -> str:
    code = _code_spans(text)
    marks = [i for i, ch in enumerate(text) if ch == "?" and not _inside(i, code)]
    if not marks:
        return "none"
    boundaries = [i for i, ch in enumerate(text) if ch in ".!?;,"]
    for q in marks:
        starts = [b for b in boundaries if b < q]
        clause_start = starts[-1] + 1 if starts else 0
        clause = text[clause_start:q].strip()
        clause = re.sub(r"^[\s\"'(\[*#>-]+", "", clause)
        words = clause.split()
        while words and words[0].startswith("@"):
            words = words[1:]
        if words and re.sub(r"\W+", "", words[0]).lower() in QUESTION_OPENERS:
            return "standard"
    return "nonstandard"


# --- cue scanning --------------------------------------------------------

# comparative idiom ("as soon as possible", "as close to X as possible"):
# the trailing "as possible" is never an epistemic cue
_AS_POSSIBLE = re.compile(r"\bas\s+(possible)\b", re.IGNORECASE)


def find_pa_cues(text: str, cues: tuple[str, ...] = DEFAULT_PA_CUES) -> list[tuple[int, str]]:
    """Offsets of epistemic/modal cues, with idiomatic uses discounted."""
    lowered = text.lower()
    discounted: set[int] = set()
    for m in _AS_POSSIBLE.finditer(lowered):
        discounted.add(m.start(1))
    found: list[tuple[int, str]] = []
    for cue in cues:
        if " " in cue:
            for m in re.finditer(r"\b" + re.escape(cue) + r"\b", lowered):
                found.append((m.start(), cue))
            continue
        prefix = cue.endswith("*")
        stem = cue.rstrip("*")
        pattern = r"\b" + re.escape(stem) + (r"[a-z]*" if prefix else r"") + r"\b"
        for m in re.finditer(pattern, lowered):
            if m.start() not in discounted:
                found.append((m.start(), cue))
    return sorted(set(found))


def _ask_regions(text: str) -> list[tuple[int, int]]:
    """For each question mark, the span of the clause being asked."""
    code = _code_spans(text)
    regions: list[tuple[int, int]] = []
    lowered = text.lower()
    for q, ch in enumerate(text):
        if ch != "?" or _inside(q, code):
            continue
        starts = [i for i, c in enumerate(text[:q]) if c in ".!?;"]
        start = starts[-1] + 1 if starts else 0
        # narrow to the last interrogative opener inside the segment
        best = start
        for m in re.finditer(r"\b[a-z]+\b", lowered[start:q]):
            if m.group(0) in QUESTION_OPENERS:
                candidate = start + m.start()
                best = candidate
        regions.append((best, q + 1))
    return regions


# --- framing patterns ----------------------------------------------------

_IF_FRAME = re.compile(r"\bif\b[^,.;!?]*?\bassum[a-z]*\b", re.IGNORECASE)
_OR_FRAME = re.compile(r"\bor\b[^,.;!?]*?\bassum[a-z]*\b", re.IGNORECASE)
_PREMISE_FRAME = re.compile(
    r"\bassum(?:ing|e)\b\s+(?:you|that|we|it)\b[^.;!?]*?,?\s*\bthen\b", re.IGNORECASE
)
_WARNING_FRAME = re.compile(
    r"\b(?:do\s+not|don't|does\s+not|doesn't|did\s+not|didn't|should\s+not|shouldn't|"
    r"must\s+not|mustn't|cannot|can't|never|without|avoid(?:s|ed|ing)?|not\s+to)\s+"
    r"(?:\w+\s+)?assum[a-z]*\b",
    re.IGNORECASE,
)
_ASK_WHETHER_PATTERNS = (
    re.compile(
        r"\b(?:can|could|should|shall|may|might|do|does|did|will|would)\s+"
        r"(?:i|we|you|they|one|he|she|it)\s+(?:\w+\s+)?assum[a-z]*\b",
        re.IGNORECASE,
    ),
    re.compile(r"\bare\s+there\s+(?:\w+\s+)?assum[a-z]*\b", re.IGNORECASE),
    re.compile(r"\bis\s+there\s+(?:an|any)\s+assum[a-z]*\b", re.IGNORECASE),
    re.compile(r"\bwhat\s+(?:is|are)\s+the\s+assum[a-z]*\b", re.IGNORECASE),
    re.compile(r"\bwhether\s+(?:\w+\s+){0,3}(?:to\s+)?assum[a-z]*\b", re.IGNORECASE),
    re.compile(r"\bis\s+(?:this|that|it)\s+an\s+assum[a-z]*\b", re.IGNORECASE),
)

_CONDITION_MARK = re.compile(r"\b(?:if|when|unless)\b", re.IGNORECASE)


def _noun_only(spans: list[KeywordSpan], text: str) -> bool:
    """All keyword uses are bare noun mentions without a stated content clause."""
    lowered = text.lower()
    for s in spans:
        if s.surface.lower() not in ("assumption", "assumptions"):
            return False
        tail = lowered[s.end : s.end + 30]
        if re.match(r"\s+(?:that|behind|about|of\s+\w+ing)\b", tail):
            return False
    return True


@dataclass
class CriteriaEngine:
    """Deterministic labeling-suggestion engine; stateless after construction."""

    cues: tuple[str, ...] = DEFAULT_PA_CUES

    def classify(self, text: str) -> RuleVerdict:
        spans = detect_keywords(text)
        qform = detect_question_form(text)
        outside = [s for s in spans if not s.in_identifier]
        if not outside:
            return self._without_keyword(text, spans, qform)
        return self._with_keyword(text, spans, outside, qform)

    # keyword absent (or identifier-only): SCA excluded, scan for PA cues
    def _without_keyword(self, text, spans, qform) -> RuleVerdict:
        fired = ["SCA_EC2" if spans else "SCA_EC1"]
        cue_hits = find_pa_cues(text, self.cues)
        if not cue_hits:
            fired.append("PA_EC4")
            return RuleVerdict("NA", tuple(fired), tuple(spans), qform, "definite")
        if self._cues_only_conditional(text, cue_hits):
            fired.append("PA_EC2")
            return RuleVerdict("NA", tuple(fired), tuple(spans), qform, "heuristic")
        if self._pure_ask(text, cue_hits, qform):
            fired.append("PA_EC3")
            return RuleVerdict("NA", tuple(fired), tuple(spans), qform, "heuristic")
        fired.append("PA_IC2" if qform != "none" else "PA_IC1")
        return RuleVerdict("PA", tuple(fired), tuple(spans), qform, "heuristic")

    # keyword present outside identifiers: SCA rules in priority order
    def _with_keyword(self, text, spans, outside, qform) -> RuleVerdict:
        if _IF_FRAME.search(text) or _OR_FRAME.search(text) or _PREMISE_FRAME.search(text):
            return RuleVerdict("NA", ("SCA_EC3",), tuple(spans), qform, "heuristic")
        if qform != "none" and any(p.search(text) for p in _ASK_WHETHER_PATTERNS):
            return RuleVerdict("NA", ("SCA_EC4",), tuple(spans), qform, "heuristic")
        if qform != "none":
            return RuleVerdict("SCA", ("SCA_IC3",), tuple(spans), qform, "heuristic")
        if _WARNING_FRAME.search(text):
            return RuleVerdict("SCA", ("SCA_IC4",), tuple(spans), qform, "heuristic")
        rule = "SCA_IC2" if _noun_only(outside, text) else "SCA_IC1"
        return RuleVerdict("SCA", (rule,), tuple(spans), qform, "heuristic")

    def _cues_only_conditional(self, text: str, cue_hits) -> bool:
        clauses: list[tuple[int, int]] = []
        for m in _CONDITION_MARK.finditer(text):
            stop = len(text)
            for c in ",.;!?":
                k = text.find(c, m.start())
                if k != -1:
                    stop = min(stop, k)
            clauses.append((m.start(), stop))
        if not clauses:
            return False
        return all(_inside(pos, clauses) for pos, _ in cue_hits)

    def _pure_ask(self, text: str, cue_hits, qform: str) -> bool:
        if qform == "none":
            return False
        regions = _ask_regions(text)
        if not all(_inside(pos, regions) for pos, _ in cue_hits):
            return False
        return True


def classify_candidate(sentence, engine: CriteriaEngine | None = None) -> RuleVerdict:
    """Verdict for a Sentence object or plain string."""
    text = sentence.raw_text if hasattr(sentence, "raw_text") else str(sentence)
    return (engine or CriteriaEngine()).classify(text)
