from .protocol import (
    DEFAULT_WARMUP_QUESTIONS,
    DEFAULT_SENTENCE_TEMPLATE,
    ChatProtocolConfig,
    ChatTranscript,
    ClassificationResult,
    ResultCache,
    build_session,
    classify_sentence,
    default_task_preamble,
    parse_response,
    run_batch,
    sentence_hash,
)
from .transports import HttpChatTransport, ReplayTransport, request_hash

__all__ = [
    "DEFAULT_WARMUP_QUESTIONS",
    "DEFAULT_SENTENCE_TEMPLATE",
    "ChatProtocolConfig",
    "ChatTranscript",
    "ClassificationResult",
    "ResultCache",
    "build_session",
    "classify_sentence",
    "default_task_preamble",
    "parse_response",
    "run_batch",
    "sentence_hash",
    "HttpChatTransport",
    "ReplayTransport",
    "request_hash",
]
