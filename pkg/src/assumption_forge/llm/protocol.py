"""Chat-model classification protocol.

A session opens with six warm-up questions probing the model's grasp of
assumptions in software work, then states the task rules and label
definitions. Each sentence is then classified in a fresh chat carrying the
same context, so no earlier answer can leak into a later one. Responses
must contain one of the canonical label tokens; unparsable answers are
retried with a stricter instruction before giving up.
"""

from __future__ import annotations

import hashlib
import json
import re
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..criteria import KEYWORDS
from ..errors import NoLabelFound, TransportError, UnparseableResponse

DEFAULT_WARMUP_QUESTIONS = (
    "What is an assumption in software development?",
    "Are the assumptions different in general software development and deep learning framework development?",
    "Could assumptions in deep learning framework development be related to other assumptions or other types of software artifacts such as requirements, design decisions, and bugs?",
    "Is identifying assumptions important in deep learning framework development?",
    "Many deep learning framework projects are on GitHub. What sources of a deep learning framework project on GitHub may contain assumptions?",
    "How do you identify assumptions in the sources of a deep learning framework project on GitHub?",
)

DEFAULT_SENTENCE_TEMPLATE = (
    "Classify the following sentence as SCA, PA, or NA. Reply with the label "
    "first, then a short rationale.\nSentence: {sentence}"
)

STRICT_RETRY_INSTRUCTION = (
    "Your previous answer did not contain a label. Reply with exactly one of "
    "the tokens SCA, PA, or NA and nothing else."
)


def default_task_preamble(binary: bool = False) -> str:
    """Task rules composed from the label definitions and keyword list."""
    keywords = ", ".join(f'"{k}"' for k in KEYWORDS)
    lines = [
        "You will label sentences taken from commits, pull requests, and issues of software repositories.",
        "Labels:",
        f"- SCA (self-claimed assumption): the sentence explicitly asserts an assumption using one of the keywords {keywords}, and the assumption actually exists. Warnings not to assume something and questions about an existing assumption's validity still count.",
        "- PA (potential assumption): the sentence is not an SCA but plausibly expresses an expectation, future event, possibility, guess, opinion, feeling, or suspicion.",
        "- NA: neither of the above. Keyword mentions that are only identifiers (file, class, function, or variable names), assumptions that appear only as conditions or alternatives, and questions about whether to assume something are NA.",
        "Rules: judge only the sentence itself, do not invent context, and give exactly one label per sentence.",
    ]
    if binary:
        lines.append(
            "For this session, collapse SCA and PA into the single label ASSUMPTION; keep NA for the rest."
        )
    return "\n".join(lines)


@dataclass(frozen=True)
class ChatProtocolConfig:
    model_name: str
    warmup_questions: tuple[str, ...] = DEFAULT_WARMUP_QUESTIONS
    task_preamble: str = ""
    sentence_template: str = DEFAULT_SENTENCE_TEMPLATE
    options: dict = field(default_factory=dict)
    max_attempts: int = 3
    binary: bool = False

    def __post_init__(self):
        if len(self.warmup_questions) != 6:
            raise ValueError(f"exactly six warm-up questions required, got {len(self.warmup_questions)}")
        if not self.task_preamble:
            object.__setattr__(self, "task_preamble", default_task_preamble(self.binary))
        if self.sentence_template.count("{sentence}") != 1:
            raise ValueError("sentence_template must contain the {sentence} placeholder exactly once")

    def preamble_hash(self) -> str:
        blob = json.dumps(
            [list(self.warmup_questions), self.task_preamble, self.sentence_template],
            ensure_ascii=False,
        )
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@dataclass
class ChatTranscript:
    session_id: str
    turns: list[tuple[str, str]] = field(default_factory=list)

    def append(self, role: str, text: str) -> None:
        self.turns.append((role, text))

    def fork(self) -> "ChatTranscript":
        return ChatTranscript(session_id=str(uuid.uuid4()), turns=list(self.turns))


@dataclass
class ClassificationResult:
    sentence_id: str
    label: str
    rationale: str
    raw_response: str
    attempts: int

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "label": self.label,
            "rationale": self.rationale,
            "raw_response": self.raw_response,
            "attempts": self.attempts,
        }


_LABEL_PATTERNS = (
    (re.compile(r"self[- ]claimed assumptions?", re.IGNORECASE), "SCA"),
    (re.compile(r"potential assumptions?", re.IGNORECASE), "PA"),
    (re.compile(r"not an assumption", re.IGNORECASE), "NA"),
    (re.compile(r"non[- ]assumption", re.IGNORECASE), "NA"),
    (re.compile(r"\bSCA\b", re.IGNORECASE), "SCA"),
    (re.compile(r"\bPA\b", re.IGNORECASE), "PA"),
    (re.compile(r"\bNA\b", re.IGNORECASE), "NA"),
)

_BINARY_PATTERNS = (
    (re.compile(r"not an assumption|non[- ]assumption", re.IGNORECASE), "NA"),
    (re.compile(r"\bNA\b", re.IGNORECASE), "NA"),
    (re.compile(r"\bassumption\b", re.IGNORECASE), "ASSUMPTION"),
)


def parse_response(text: str, binary: bool = False) -> str:
    """First standalone label token or long form, scanning left to right."""
    patterns = _BINARY_PATTERNS if binary else _LABEL_PATTERNS
    hits = []
    for pattern, label in patterns:
        m = pattern.search(text)
        if m:
            hits.append((m.start(), -len(m.group(0)), label))
    if not hits:
        raise NoLabelFound(f"no label token in response: {text[:120]!r}")
    hits.sort()
    return hits[0][2]


def build_session(transport, config: ChatProtocolConfig) -> ChatTranscript:
    """Warm-up question turns followed by the task preamble and its ack."""
    transcript = ChatTranscript(session_id=str(uuid.uuid4()))
    for question in config.warmup_questions:
        transcript.append("user", question)
        answer = transport.send(config.model_name, transcript.turns)
        transcript.append("model", answer)
    transcript.append("user", config.task_preamble)
    ack = transport.send(config.model_name, transcript.turns)
    transcript.append("model", ack)
    return transcript


def classify_sentence(
    transport,
    config: ChatProtocolConfig,
    sentence,
    session: ChatTranscript,
) -> ClassificationResult:
    """Classify one sentence in a fresh chat seeded with the session context."""
    text = sentence.raw_text if hasattr(sentence, "raw_text") else str(sentence)
    sid = sentence.id if hasattr(sentence, "id") else sentence_hash(text)
    chat = session.fork()
    chat.append("user", config.sentence_template.format(sentence=text))
    attempts = 0
    last = ""
    while attempts < config.max_attempts:
        attempts += 1
        last = transport.send(config.model_name, chat.turns)
        chat.append("model", last)
        try:
            label = parse_response(last, binary=config.binary)
        except NoLabelFound:
            chat.append("user", STRICT_RETRY_INSTRUCTION)
            continue
        return ClassificationResult(
            sentence_id=sid,
            label=label,
            rationale=last.strip(),
            raw_response=last,
            attempts=attempts,
        )
    raise UnparseableResponse(
        f"no label after {attempts} attempts; last response: {last[:120]!r}"
    )


def sentence_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


class ResultCache:
    """JSONL cache keyed by (model, preamble hash, sentence hash)."""

    def __init__(self, path):
        self.path = Path(path) if path else None
        self._rows: dict[str, dict] = {}
        if self.path and self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        row = json.loads(line)
                        self._rows[row["key"]] = row

    @staticmethod
    def key(config: ChatProtocolConfig, text: str) -> str:
        return f"{config.model_name}:{config.preamble_hash()}:{sentence_hash(text)}"

    def get(self, key: str) -> dict | None:
        return self._rows.get(key)

    def put(self, key: str, row: dict) -> None:
        row = {"key": key, **row}
        self._rows[key] = row
        if self.path:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(row, ensure_ascii=False) + "\n")


def run_batch(
    transport,
    config: ChatProtocolConfig,
    sentences,
    cache_path=None,
    session: ChatTranscript | None = None,
):
    """Classify a batch, caching results and aggregating per-sentence errors.

    Returns (results, failures); a failure records the sentence id and the
    error message without aborting the rest of the batch.
    """
    cache = ResultCache(cache_path)
    results: list[ClassificationResult] = []
    failures: list[dict] = []
    built_session = session
    for sentence in sentences:
        text = sentence.raw_text if hasattr(sentence, "raw_text") else str(sentence)
        sid = sentence.id if hasattr(sentence, "id") else sentence_hash(text)
        key = cache.key(config, text)
        cached = cache.get(key)
        if cached is not None:
            if cached.get("error"):
                failures.append({"sentence_id": sid, "error": cached["error"]})
            else:
                results.append(
                    ClassificationResult(
                        sentence_id=sid,
                        label=cached["label"],
                        rationale=cached.get("rationale", ""),
                        raw_response=cached.get("raw_response", ""),
                        attempts=cached.get("attempts", 1),
                    )
                )
            continue
        if built_session is None:
            built_session = build_session(transport, config)
        try:
            result = classify_sentence(transport, config, sentence, built_session)
        except (UnparseableResponse, TransportError) as exc:
            failures.append({"sentence_id": sid, "error": str(exc)})
            cache.put(key, {"sentence_id": sid, "error": str(exc)})
            continue
        results.append(result)
        cache.put(key, result.to_dict())
    return results, failures
