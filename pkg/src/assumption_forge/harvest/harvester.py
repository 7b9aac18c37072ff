"""Harvest orchestration: metadata, paged collection, count verification.

Pagination is cursor-based with a persisted checkpoint per (repo, kind);
a rate-limit pause or a crash resumes from the last completed page. Every
record carries an id unique per store, so replays cannot duplicate. Records
created after the cutoff are discarded at ingestion, and thread pagination
stops early once the server (serving ascending creation order) moves past
the cutoff.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from ..errors import NodeCapExceeded, RateLimited, TransportError
from .budget import RateBudget
from .store import RecordStore
from .types import (
    CountReport,
    HarvestReport,
    RawRecord,
    RecordKind,
    RepoMeta,
    RepoRef,
    to_epoch,
    to_git_timestamp,
)

META_QUERY = """
query RepoMeta($owner: String!, $name: String!) {
  repository(owner: $owner, name: $name) {
    createdAt
    defaultBranchRef { target { ... on Commit { history { totalCount } } } }
    pullRequests { totalCount }
    issues { totalCount }
    releases { totalCount }
  }
}
"""

COMMIT_QUERY = """
query CommitPage($owner: String!, $name: String!, $first: Int!, $after: String, $until: GitTimestamp) {
  repository(owner: $owner, name: $name) {
    defaultBranchRef {
      target {
        ... on Commit {
          history(first: $first, after: $after, until: $until) {
            totalCount
            nodes { oid message committedDate }
            pageInfo { hasNextPage endCursor }
          }
        }
      }
    }
  }
}
"""

PR_QUERY = """
query PrPage($owner: String!, $name: String!, $first: Int!, $after: String, $commentsFirst: Int!) {
  repository(owner: $owner, name: $name) {
    pullRequests(first: $first, after: $after, orderBy: {field: CREATED_AT, direction: ASC}) {
      totalCount
      nodes {
        id number title body createdAt
        comments(first: $commentsFirst) {
          totalCount
          nodes { id body createdAt }
          pageInfo { hasNextPage endCursor }
        }
      }
      pageInfo { hasNextPage endCursor }
    }
  }
}
"""

ISSUE_QUERY = PR_QUERY.replace("PrPage", "IssuePage").replace("pullRequests", "issues")

PR_COMMENT_QUERY = """
query PrCommentPage($owner: String!, $name: String!, $number: Int!, $first: Int!, $after: String) {
  repository(owner: $owner, name: $name) {
    pullRequest(number: $number) {
      number
      comments(first: $first, after: $after) {
        totalCount
        nodes { id body createdAt }
        pageInfo { hasNextPage endCursor }
      }
    }
  }
}
"""

ISSUE_COMMENT_QUERY = PR_COMMENT_QUERY.replace("PrCommentPage", "IssueCommentPage").replace(
    "pullRequest(", "issue("
)

_THREAD_KINDS = {
    RecordKind.PR_TITLE: ("PrPage", PR_QUERY, "pullRequests", "pr"),
    RecordKind.PR_BODY: ("PrPage", PR_QUERY, "pullRequests", "pr"),
    RecordKind.PR_COMMENT_BODY: ("PrPage", PR_QUERY, "pullRequests", "pr"),
    RecordKind.ISSUE_TITLE: ("IssuePage", ISSUE_QUERY, "issues", "issue"),
    RecordKind.ISSUE_BODY: ("IssuePage", ISSUE_QUERY, "issues", "issue"),
    RecordKind.ISSUE_COMMENT_BODY: ("IssuePage", ISSUE_QUERY, "issues", "issue"),
}


def _default_waiter(reset_at: float | None) -> None:
    delay = 5.0 if reset_at is None else max(0.0, reset_at - time.monotonic())
    time.sleep(min(delay, 3600.0))


@dataclass
class Harvester:
    transport: object
    budget: RateBudget
    max_transport_retries: int = 4
    backoff_base: float = 0.5
    waiter: object = _default_waiter
    sleeper: object = time.sleep

    # --- low-level call with retry/backoff and budget accounting ---
    def _call(self, query: str, variables: dict, nodes: int, report: HarvestReport | None = None):
        attempts = 0
        while True:
            try:
                self.budget.reserve(nodes)
            except RateLimited as exc:
                if report is not None:
                    report.rate_limit_pauses += 1
                self.waiter(exc.reset_at)
                continue
            try:
                return self.transport.execute(query, variables)
            except RateLimited as exc:
                if report is not None:
                    report.rate_limit_pauses += 1
                self.waiter(exc.reset_at)
            except TransportError:
                attempts += 1
                if attempts >= self.max_transport_retries:
                    raise
                self.sleeper(self.backoff_base * (2 ** (attempts - 1)))

    def fetch_repository_meta(self, repo: RepoRef) -> RepoMeta:
        data = self._call(META_QUERY, {"owner": repo.owner, "name": repo.name}, nodes=1)
        node = data["repository"]
        history = (node.get("defaultBranchRef") or {}).get("target", {}).get("history", {})
        return RepoMeta(
            repo=repo.slug,
            created_at=to_epoch(node["createdAt"]),
            commit_count=history.get("totalCount", 0),
            pr_count=node["pullRequests"]["totalCount"],
            issue_count=node["issues"]["totalCount"],
            release_count=node.get("releases", {}).get("totalCount", 0),
        )

    # --- harvest ---
    def harvest(
        self,
        repo: RepoRef,
        kinds,
        cutoff: float,
        store: RecordStore,
        page_size: int = 50,
        comments_page_size: int = 20,
        fanout: int = 4,
    ) -> HarvestReport:
        kinds = [RecordKind(k) for k in kinds]
        report = HarvestReport(repo=repo.slug, counts={k.value: 0 for k in kinds})
        groups: list[tuple] = []
        if RecordKind.COMMIT_MESSAGE in kinds:
            groups.append(("commit", [RecordKind.COMMIT_MESSAGE]))
        pr_kinds = [k for k in kinds if k in (RecordKind.PR_TITLE, RecordKind.PR_BODY, RecordKind.PR_COMMENT_BODY)]
        if pr_kinds:
            groups.append(("pr", pr_kinds))
        issue_kinds = [k for k in kinds if k in (RecordKind.ISSUE_TITLE, RecordKind.ISSUE_BODY, RecordKind.ISSUE_COMMENT_BODY)]
        if issue_kinds:
            groups.append(("issue", issue_kinds))

        def run(group):
            family, members = group
            if family == "commit":
                self._harvest_commits(repo, cutoff, store, page_size, report)
            else:
                self._harvest_threads(
                    repo, family, members, cutoff, store, page_size, comments_page_size, report
                )

        if fanout <= 1 or len(groups) <= 1:
            for g in groups:
                run(g)
        else:
            with ThreadPoolExecutor(max_workers=min(fanout, len(groups))) as pool:
                for future in [pool.submit(run, g) for g in groups]:
                    future.result()
        return report

    def _harvest_commits(self, repo, cutoff, store, page_size, report) -> None:
        kind = RecordKind.COMMIT_MESSAGE
        state = store.get_checkpoint(repo.slug, kind) or {}
        if state.get("done") and state.get("cutoff") == cutoff:
            return
        if state.get("cutoff") != cutoff:
            state = {"cutoff": cutoff}
        cursor = state.get("cursor")
        size = page_size
        while True:
            variables = {
                "owner": repo.owner,
                "name": repo.name,
                "first": size,
                "after": cursor,
                "until": to_git_timestamp(cutoff),
            }
            try:
                data = self._call(COMMIT_QUERY, variables, nodes=size, report=report)
            except NodeCapExceeded:
                if size == 1:
                    raise
                size = max(1, size // 2)  # split the query
                continue
            report.pages += 1
            history = data["repository"]["defaultBranchRef"]["target"]["history"]
            for node in history["nodes"]:
                committed_at = to_epoch(node["committedDate"])
                if committed_at > cutoff:
                    continue
                added = store.append(
                    RawRecord(
                        id=f"{repo.slug}:commit:{node['oid']}",
                        repo=repo.slug,
                        kind=kind,
                        text=node["message"],
                        created_at=committed_at,
                    )
                )
                if added:
                    report.counts[kind.value] += 1
            page = history["pageInfo"]
            cursor = page["endCursor"]
            store.set_checkpoint(repo.slug, kind, {"cutoff": cutoff, "cursor": cursor})
            if not page["hasNextPage"]:
                break
        store.set_checkpoint(repo.slug, kind, {"cutoff": cutoff, "done": True})

    def _harvest_threads(
        self, repo, family, members, cutoff, store, page_size, comments_page_size, report
    ) -> None:
        op_name, query, conn_key, prefix = _THREAD_KINDS[members[0]]
        checkpoint_kind = members[0]
        title_kind = RecordKind.PR_TITLE if family == "pr" else RecordKind.ISSUE_TITLE
        body_kind = RecordKind.PR_BODY if family == "pr" else RecordKind.ISSUE_BODY
        comment_kind = (
            RecordKind.PR_COMMENT_BODY if family == "pr" else RecordKind.ISSUE_COMMENT_BODY
        )
        comment_query = PR_COMMENT_QUERY if family == "pr" else ISSUE_COMMENT_QUERY

        state = store.get_checkpoint(repo.slug, checkpoint_kind) or {}
        if state.get("done") and state.get("cutoff") == cutoff:
            return
        if state.get("cutoff") != cutoff:
            state = {"cutoff": cutoff}
        cursor = state.get("cursor")
        size = page_size
        comments_size = comments_page_size
        finished = False
        while not finished:
            variables = {
                "owner": repo.owner,
                "name": repo.name,
                "first": size,
                "after": cursor,
                "commentsFirst": comments_size,
            }
            try:
                data = self._call(
                    query, variables, nodes=size * (1 + comments_size), report=report
                )
            except NodeCapExceeded:
                # split the query: shrink the page, then the nested page
                if size > 1:
                    size = size // 2
                elif comments_size > 1:
                    comments_size = comments_size // 2
                else:
                    raise
                continue
            report.pages += 1
            connection = data["repository"][conn_key]
            for node in connection["nodes"]:
                if to_epoch(node["createdAt"]) > cutoff:
                    # ascending creation order: everything beyond is newer
                    finished = True
                    break
                self._ingest_thread(
                    repo, prefix, node, members, cutoff, store, report,
                    title_kind, body_kind, comment_kind, comment_query, comments_size,
                )
            page = connection["pageInfo"]
            cursor = page["endCursor"]
            store.set_checkpoint(repo.slug, checkpoint_kind, {"cutoff": cutoff, "cursor": cursor})
            if not page["hasNextPage"]:
                finished = True
        store.set_checkpoint(repo.slug, checkpoint_kind, {"cutoff": cutoff, "done": True})

    def _ingest_thread(
        self, repo, prefix, node, members, cutoff, store, report,
        title_kind, body_kind, comment_kind, comment_query, comments_page_size,
    ) -> None:
        number = node["number"]

        def put(kind, suffix, text, created_at, source_number):
            if kind not in members or not text:
                return
            if created_at > cutoff:
                return
            if store.append(
                RawRecord(
                    id=f"{repo.slug}:{prefix}:{number}:{suffix}",
                    repo=repo.slug,
                    kind=kind,
                    text=text,
                    created_at=created_at,
                    source_number=source_number,
                )
            ):
                report.counts[kind.value] += 1

        thread_created = to_epoch(node["createdAt"])
        put(title_kind, "title", node.get("title"), thread_created, number)
        put(body_kind, "body", node.get("body"), thread_created, number)
        if comment_kind in members:
            connection = node["comments"]
            for comment in connection["nodes"]:
                put(
                    comment_kind,
                    f"comment:{comment['id']}",
                    comment.get("body"),
                    to_epoch(comment["createdAt"]),
                    number,
                )
            page = connection["pageInfo"]
            cursor = page["endCursor"]
            while page["hasNextPage"]:
                variables = {
                    "owner": repo.owner,
                    "name": repo.name,
                    "number": number,
                    "first": comments_page_size,
                    "after": cursor,
                }
                data = self._call(
                    comment_query, variables, nodes=comments_page_size, report=report
                )
                report.pages += 1
                key = "pullRequest" if prefix == "pr" else "issue"
                connection = data["repository"][key]["comments"]
                for comment in connection["nodes"]:
                    put(
                        comment_kind,
                        f"comment:{comment['id']}",
                        comment.get("body"),
                        to_epoch(comment["createdAt"]),
                        number,
                    )
                page = connection["pageInfo"]
                cursor = page["endCursor"]

    # --- verification ---
    def verify_counts(self, repo: RepoRef, store: RecordStore) -> CountReport:
        meta = self.fetch_repository_meta(repo)
        remote = {
            RecordKind.COMMIT_MESSAGE: meta.commit_count,
            RecordKind.PR_TITLE: meta.pr_count,
            RecordKind.ISSUE_TITLE: meta.issue_count,
        }
        rows: dict[str, dict] = {}
        for kind in RecordKind:
            local = store.count(repo.slug, kind)
            remote_count = remote.get(kind)
            rows[kind.value] = {
                "local": local,
                "remote": remote_count,
                "delta": None if remote_count is None else remote_count - local,
            }
        return CountReport(repo=repo.slug, rows=rows)
