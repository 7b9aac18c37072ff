"""Flat key/value configuration files.

Format: one `key = value` per line, '#' starts a comment, blank lines are
ignored. Keys are validated against the known set so a typo fails loudly
with the offending key named.
"""

from __future__ import annotations

from pathlib import Path

from .errors import ConfigError

KNOWN_KEYS = {
    "workspace": "directory holding stores, datasets, runs and models",
    "token": "hosting API token (the environment variable wins)",
    "api_endpoint": "GraphQL endpoint URL",
    "vocab": "path to the subword vocabulary file",
    "lexicon": "path to a potential-assumption cue lexicon",
    "llm_url": "chat-completion endpoint URL",
    "llm_model": "chat model name",
    "llm_fixture": "replay fixture JSONL for offline chat runs",
    "llm_cache": "classification result cache path",
    "feature_cap": "feature budget for capped algorithms",
    "page_size": "harvest page size",
    "comments_page_size": "nested comment page size",
    "points_per_hour": "rate budget points per hour",
    "host": "service bind host",
    "port": "service bind port",
}

_INT_KEYS = {"feature_cap", "page_size", "comments_page_size", "points_per_hour", "port"}


def load_config(path) -> dict:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    out: dict[str, object] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in stripped.split("=", 1))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}", key=key)
        if key in _INT_KEYS:
            try:
                out[key] = int(value)
            except ValueError:
                raise ConfigError(
                    f"{path}:{lineno}: key {key!r} needs an integer, got {value!r}", key=key
                ) from None
        else:
            out[key] = value
    return out
