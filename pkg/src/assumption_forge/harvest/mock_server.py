"""In-process mock of the hosting GraphQL API.

Serves the same operations the harvester issues against the live endpoint:
repository metadata, commit history pages, PR/issue pages with nested
comment connections, and comment continuation pages. Pagination uses
opaque cursors, and the server can be told to throw rate-limit errors or
enforce the node cap, so harvest retry/resume paths are testable offline.
"""

from __future__ import annotations

import base64
import re
from dataclasses import dataclass, field

from ..errors import TransportError
from .transport import raise_for_graphql_errors
from .types import to_epoch

_OP_RE = re.compile(r"\bquery\s+(\w+)")


def _cursor(index: int) -> str:
    return base64.b64encode(f"cursor:{index}".encode()).decode()


def _parse_cursor(cursor: str | None) -> int:
    if not cursor:
        return 0
    raw = base64.b64decode(cursor.encode()).decode()
    return int(raw.split(":", 1)[1]) + 1


@dataclass
class MockComment:
    id: str
    body: str
    created_at: float


@dataclass
class MockThread:  # a PR or an issue
    number: int
    title: str
    body: str
    created_at: float
    comments: list[MockComment] = field(default_factory=list)


@dataclass
class MockCommit:
    oid: str
    message: str
    created_at: float


@dataclass
class MockRepo:
    owner: str
    name: str
    created_at: float = 0.0
    commits: list[MockCommit] = field(default_factory=list)  # newest first
    prs: list[MockThread] = field(default_factory=list)  # ascending created_at
    issues: list[MockThread] = field(default_factory=list)
    releases: int = 0

    @property
    def slug(self) -> str:
        return f"{self.owner}/{self.name}"


class MockGitHub:
    """Holds repositories and answers GraphQL operations against them."""

    def __init__(self, max_nodes_per_call: int = 500_000):
        self.repos: dict[str, MockRepo] = {}
        self.max_nodes_per_call = max_nodes_per_call
        self.requests_served = 0
        # when set, the next `rate_limit_failures` requests raise RATE_LIMITED
        self.rate_limit_failures = 0
        self.rate_limit_reset_at: float | None = None
        self.transport_failures = 0
        self.valid_tokens: set[str] | None = None

    def add_repo(self, repo: MockRepo) -> MockRepo:
        self.repos[repo.slug] = repo
        return repo

    # --- protocol ---
    def execute(self, query: str, variables: dict) -> dict:
        self.requests_served += 1
        if self.transport_failures > 0:
            self.transport_failures -= 1
            raise TransportError("injected transport failure")
        if self.rate_limit_failures > 0:
            self.rate_limit_failures -= 1
            raise_for_graphql_errors(
                [
                    {
                        "type": "RATE_LIMITED",
                        "message": "API rate limit exhausted",
                        "extensions": {"reset_at": self.rate_limit_reset_at},
                    }
                ]
            )
        nodes = self._estimate_nodes(variables)
        if nodes > self.max_nodes_per_call:
            raise_for_graphql_errors(
                [{"type": "NODE_LIMIT_EXCEEDED", "message": f"{nodes} nodes requested"}]
            )
        m = _OP_RE.search(query)
        if not m:
            raise TransportError(f"unrecognized query: {query[:80]!r}")
        op = m.group(1)
        handler = getattr(self, f"_op_{op}", None)
        if handler is None:
            raise TransportError(f"mock cannot serve operation {op!r}")
        return handler(variables)

    @staticmethod
    def _estimate_nodes(variables: dict) -> int:
        first = int(variables.get("first", 0) or 0)
        nested = int(variables.get("commentsFirst", 0) or 0)
        return first * (1 + nested) if nested else first

    def _repo(self, variables: dict) -> MockRepo:
        slug = f"{variables['owner']}/{variables['name']}"
        repo = self.repos.get(slug)
        if repo is None:
            raise_for_graphql_errors(
                [{"type": "NOT_FOUND", "message": f"repository {slug} does not exist"}]
            )
        return repo

    # --- operations ---
    def _op_RepoMeta(self, variables: dict) -> dict:
        repo = self._repo(variables)
        return {
            "repository": {
                "createdAt": repo.created_at,
                "defaultBranchRef": {"target": {"history": {"totalCount": len(repo.commits)}}},
                "pullRequests": {"totalCount": len(repo.prs)},
                "issues": {"totalCount": len(repo.issues)},
                "releases": {"totalCount": repo.releases},
            }
        }

    def _op_CommitPage(self, variables: dict) -> dict:
        repo = self._repo(variables)
        until = variables.get("until")
        if until is not None:
            until = to_epoch(until)
        commits = [c for c in repo.commits if until is None or c.created_at <= until]
        return {
            "repository": {
                "defaultBranchRef": {
                    "target": {"history": self._page(commits, variables, self._commit_node)}
                }
            }
        }

    def _op_PrPage(self, variables: dict) -> dict:
        repo = self._repo(variables)
        return {
            "repository": {
                "pullRequests": self._page(
                    repo.prs, variables, lambda t: self._thread_node(t, variables)
                )
            }
        }

    def _op_IssuePage(self, variables: dict) -> dict:
        repo = self._repo(variables)
        return {
            "repository": {
                "issues": self._page(
                    repo.issues, variables, lambda t: self._thread_node(t, variables)
                )
            }
        }

    def _op_PrCommentPage(self, variables: dict) -> dict:
        repo = self._repo(variables)
        return {"repository": {"pullRequest": self._comment_page(repo.prs, variables)}}

    def _op_IssueCommentPage(self, variables: dict) -> dict:
        repo = self._repo(variables)
        return {"repository": {"issue": self._comment_page(repo.issues, variables)}}

    def _comment_page(self, threads: list[MockThread], variables: dict) -> dict:
        number = variables["number"]
        thread = next((t for t in threads if t.number == number), None)
        if thread is None:
            raise_for_graphql_errors([{"type": "NOT_FOUND", "message": f"number {number}"}])
        return {
            "number": thread.number,
            "comments": self._page(thread.comments, variables, self._comment_node),
        }

    @staticmethod
    def _commit_node(c: MockCommit) -> dict:
        return {"oid": c.oid, "message": c.message, "committedDate": c.created_at}

    @staticmethod
    def _comment_node(c: MockComment) -> dict:
        return {"id": c.id, "body": c.body, "createdAt": c.created_at}

    def _thread_node(self, t: MockThread, variables: dict) -> dict:
        comments_first = int(variables.get("commentsFirst", 100) or 100)
        return {
            "id": f"T_{t.number}",
            "number": t.number,
            "title": t.title,
            "body": t.body,
            "createdAt": t.created_at,
            "comments": self._page(t.comments, {"first": comments_first}, self._comment_node),
        }

    @staticmethod
    def _page(items: list, variables: dict, node_fn) -> dict:
        first = int(variables.get("first", 100) or 100)
        start = _parse_cursor(variables.get("after"))
        chunk = items[start : start + first]
        end_index = start + len(chunk) - 1
        return {
            "totalCount": len(items),
            "nodes": [node_fn(x) for x in chunk],
            "pageInfo": {
                "hasNextPage": start + len(chunk) < len(items),
                "endCursor": _cursor(end_index) if chunk else None,
            },
        }


class MockTransport:
    """Direct in-process transport over a MockGitHub server."""

    def __init__(self, server: MockGitHub):
        self.server = server

    def execute(self, query: str, variables: dict) -> dict:
        return self.server.execute(query, variables)
