"""Domain types for repository harvesting."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum


def to_epoch(value) -> float:
    """Seconds since the epoch from a number or an ISO-8601 timestamp."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    parsed = datetime.fromisoformat(text)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed.timestamp()


def to_git_timestamp(epoch: float) -> str:
    """ISO-8601 UTC string as the hosting API's GitTimestamp expects."""
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class RecordKind(str, Enum):
    """The seven text fields collected from a repository."""

    COMMIT_MESSAGE = "commit_message"
    PR_TITLE = "pr_title"
    PR_BODY = "pr_body"
    PR_COMMENT_BODY = "pr_comment_body"
    ISSUE_TITLE = "issue_title"
    ISSUE_BODY = "issue_body"
    ISSUE_COMMENT_BODY = "issue_comment_body"


ALL_KINDS = tuple(RecordKind)

COMMIT_KINDS = (RecordKind.COMMIT_MESSAGE,)
PR_KINDS = (RecordKind.PR_TITLE, RecordKind.PR_BODY, RecordKind.PR_COMMENT_BODY)
ISSUE_KINDS = (RecordKind.ISSUE_TITLE, RecordKind.ISSUE_BODY, RecordKind.ISSUE_COMMENT_BODY)


@dataclass(frozen=True)
class RepoRef:
    owner: str
    name: str
    created_at: float | None = None

    def __post_init__(self):
        for value, label in ((self.owner, "owner"), (self.name, "name")):
            if not value or re.search(r"\s", value):
                raise ValueError(f"repository {label} must be non-empty without whitespace")

    @property
    def slug(self) -> str:
        return f"{self.owner}/{self.name}"


@dataclass(frozen=True)
class RawRecord:
    id: str
    repo: str  # owner/name slug
    kind: RecordKind
    text: str
    created_at: float
    source_number: int | None = None  # PR/issue number; commits have none

    def to_dict(self) -> dict:
        out = {
            "id": self.id,
            "repo": self.repo,
            "kind": self.kind.value,
            "text": self.text,
            "created_at": self.created_at,
        }
        if self.source_number is not None:
            out["source_number"] = self.source_number
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "RawRecord":
        return cls(
            id=data["id"],
            repo=data["repo"],
            kind=RecordKind(data["kind"]),
            text=data["text"],
            created_at=data["created_at"],
            source_number=data.get("source_number"),
        )


@dataclass(frozen=True)
class RepoMeta:
    repo: str
    created_at: float
    commit_count: int
    pr_count: int
    issue_count: int
    release_count: int = 0


@dataclass
class HarvestReport:
    repo: str
    counts: dict[str, int] = field(default_factory=dict)
    pages: int = 0
    rate_limit_pauses: int = 0

    def to_dict(self) -> dict:
        return {
            "repo": self.repo,
            "counts": dict(self.counts),
            "pages": self.pages,
            "rate_limit_pauses": self.rate_limit_pauses,
        }


@dataclass
class CountReport:
    repo: str
    rows: dict[str, dict]  # kind -> {local, remote, delta} (remote None => skipped)

    @property
    def complete(self) -> bool:
        checked = [r for r in self.rows.values() if r["remote"] is not None]
        return bool(checked) and all(r["delta"] == 0 for r in checked)

    def to_dict(self) -> dict:
        return {"repo": self.repo, "rows": self.rows, "complete": self.complete}
