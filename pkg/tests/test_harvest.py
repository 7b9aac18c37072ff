from __future__ import annotations

import pytest

from assumption_forge.errors import NodeCapExceeded, NotFound, RateLimited, TransportError
from assumption_forge.harvest import (
    Harvester,
    MockCommit,
    MockComment,
    MockGitHub,
    MockRepo,
    MockThread,
    MockTransport,
    RateBudget,
    RawRecord,
    RecordKind,
    RecordStore,
    RepoRef,
)


def make_server(n_commits=6, n_comments=5):
    server = MockGitHub()
    repo = MockRepo(owner="acme", name="widgets", created_at=100.0, releases=2)
    for i in range(n_commits):
        repo.commits.append(MockCommit(oid=f"c{i}", message=f"commit message {i}", created_at=900.0 - i))
    repo.prs.append(
        MockThread(
            number=1,
            title="improve docs",
            body="pr body text",
            created_at=200.0,
            comments=[MockComment(id="pc1", body="pr comment text", created_at=205.0)],
        )
    )
    repo.issues.append(
        MockThread(
            number=2,
            title="crash on load",
            body="issue body text",
            created_at=220.0,
            comments=[
                MockComment(id=f"ic{j}", body=f"issue comment {j}", created_at=230.0 + j)
                for j in range(n_comments)
            ],
        )
    )
    server.add_repo(repo)
    return server


REF = RepoRef("acme", "widgets")
ALL = list(RecordKind)
TOTAL = 6 + 3 + 2 + 5  # commits + pr rows + issue title/body + issue comments


def harvester(server, **kw):
    return Harvester(transport=MockTransport(server), budget=kw.pop("budget", RateBudget()), **kw)


# --- RepoRef / RawRecord -----------------------------------------------------

def test_repo_ref_validation():
    with pytest.raises(ValueError):
        RepoRef("", "x")
    with pytest.raises(ValueError):
        RepoRef("a b", "x")


def test_raw_record_round_trip():
    rec = RawRecord(id="1", repo="a/b", kind=RecordKind.PR_BODY, text="t", created_at=1.0, source_number=4)
    assert RawRecord.from_dict(rec.to_dict()) == rec


# --- metadata ------------------------------------------------------------------

def test_fetch_meta_counts():
    h = harvester(make_server())
    meta = h.fetch_repository_meta(REF)
    assert meta.commit_count == 6
    assert meta.pr_count == 1
    assert meta.issue_count == 1
    assert meta.release_count == 2


def test_fetch_meta_not_found():
    h = harvester(make_server())
    with pytest.raises(NotFound):
        h.fetch_repository_meta(RepoRef("no", "such"))


# --- harvest -------------------------------------------------------------------

def test_cutoff_before_creation_yields_nothing(tmp_path):
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(make_server())
    report = h.harvest(REF, ALL, cutoff=50.0, store=store, page_size=3)
    assert len(store) == 0
    assert all(v == 0 for v in report.counts.values())


def test_two_pages_of_three_commits_in_order(tmp_path):
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(make_server())
    h.harvest(REF, [RecordKind.COMMIT_MESSAGE], cutoff=1000.0, store=store, page_size=3)
    messages = [r.text for r in store.records(kind=RecordKind.COMMIT_MESSAGE)]
    assert messages == [f"commit message {i}" for i in range(6)]


@pytest.mark.parametrize("page_size", list(range(1, 11)))
def test_exactly_once_across_page_sizes(tmp_path, page_size):
    store = RecordStore(tmp_path / f"r{page_size}.jsonl")
    h = harvester(make_server())
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=page_size, comments_page_size=page_size)
    assert len(store) == TOTAL
    ids = [r.id for r in store.records()]
    assert len(ids) == len(set(ids))


def test_idempotent_re_run(tmp_path):
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(make_server())
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=4)
    again = h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=2)
    assert sum(again.counts.values()) == 0
    assert len(store) == TOTAL


def test_cutoff_discards_newer_records(tmp_path):
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(make_server())
    # commits sit at 895..900, issue comments at 230..234
    h.harvest(REF, ALL, cutoff=232.0, store=store, page_size=3)
    texts = {r.text for r in store.records()}
    assert "commit message 5" not in texts
    assert "issue comment 2" in texts  # created exactly at the cutoff
    assert "issue comment 3" not in texts
    for r in store.records():
        assert r.created_at <= 232.0


def test_resume_after_interruption(tmp_path):
    server = make_server(n_commits=9)
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(server)
    # interrupt mid-pagination by failing transport after a few requests
    real_execute = server.execute
    state = {"served": 0}

    def flaky(query, variables):
        state["served"] += 1
        if state["served"] == 3:
            raise TransportError("cut")
        return real_execute(query, variables)

    h.transport.execute = flaky
    h.max_transport_retries = 1
    with pytest.raises(TransportError):
        h.harvest(REF, [RecordKind.COMMIT_MESSAGE], cutoff=1000.0, store=store, page_size=2, fanout=1)
    partial = len(store)
    assert 0 < partial < 9

    # a fresh harvester over the same store resumes from the checkpoint
    h2 = harvester(server)
    h2.harvest(REF, [RecordKind.COMMIT_MESSAGE], cutoff=1000.0, store=store, page_size=2)
    assert len(store) == 9
    messages = [r.text for r in store.records()]
    assert messages == [f"commit message {i}" for i in range(9)]


def test_rate_limit_pause_and_resume(tmp_path):
    server = make_server()
    server.rate_limit_failures = 2
    server.rate_limit_reset_at = 123.0
    waits = []
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(server, waiter=lambda reset: waits.append(reset))
    report = h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=2, comments_page_size=2, fanout=1)
    assert report.rate_limit_pauses == 2
    assert waits == [123.0, 123.0]
    assert len(store) == TOTAL


def test_budget_sliding_window_never_exceeded(tmp_path):
    clock = {"t": 0.0}
    budget = RateBudget(points_per_hour=40, clock=lambda: clock["t"])
    server = make_server()
    store = RecordStore(tmp_path / "r.jsonl")
    spend_log = []

    def waiter(reset_at):
        # advance the fake clock past the oldest charge
        clock["t"] = (reset_at or clock["t"]) + 1.0

    h = Harvester(transport=MockTransport(server), budget=budget, waiter=waiter)
    real_reserve = budget.reserve

    def tracked(nodes):
        cost = real_reserve(nodes)
        spend_log.append(budget.spent_in_window())
        return cost

    budget.reserve = tracked
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=3, comments_page_size=3, fanout=1)
    assert len(store) == TOTAL
    assert max(spend_log) <= 40


def test_node_cap_splits_query(tmp_path):
    server = make_server()
    server.max_nodes_per_call = 8
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(server)
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=50, comments_page_size=3, fanout=1)
    assert len(store) == TOTAL


def test_oversized_estimate_becomes_split_not_deadlock(tmp_path):
    clock = {"t": 0.0}
    budget = RateBudget(points_per_hour=30, clock=lambda: clock["t"])
    server = make_server()
    store = RecordStore(tmp_path / "r.jsonl")

    def waiter(reset_at):
        clock["t"] = (reset_at or clock["t"]) + 1.0

    h = Harvester(transport=MockTransport(server), budget=budget, waiter=waiter)
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=100, comments_page_size=100, fanout=1)
    assert len(store) == TOTAL


def test_transport_retry_backoff(tmp_path):
    server = make_server()
    server.transport_failures = 2
    sleeps = []
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(server, sleeper=lambda s: sleeps.append(s))
    h.harvest(REF, [RecordKind.COMMIT_MESSAGE], cutoff=1000.0, store=store, page_size=3)
    assert sleeps == [0.5, 1.0]
    assert store.count("acme/widgets", RecordKind.COMMIT_MESSAGE) == 6


def test_transport_failure_bounded(tmp_path):
    server = make_server()
    server.transport_failures = 99
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(server, sleeper=lambda s: None)
    with pytest.raises(TransportError):
        h.harvest(REF, [RecordKind.COMMIT_MESSAGE], cutoff=1000.0, store=store, fanout=1)


def test_verify_counts_flow(tmp_path):
    store = RecordStore(tmp_path / "r.jsonl")
    h = harvester(make_server())
    # empty store vs remote counts
    report = h.verify_counts(REF, store)
    assert not report.complete
    assert report.rows["commit_message"]["delta"] == 6
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=4)
    done = h.verify_counts(REF, store)
    assert done.complete
    assert done.rows["commit_message"]["delta"] == 0
    # comment kinds have no cheap remote total and stay unchecked
    assert done.rows["issue_comment_body"]["remote"] is None


def test_verify_counts_incomplete_delta(tmp_path):
    store = RecordStore(tmp_path / "r.jsonl")
    server = make_server()
    h = harvester(server)
    h.harvest(REF, [RecordKind.COMMIT_MESSAGE], cutoff=1000.0, store=store)
    server.repos["acme/widgets"].commits.append(MockCommit(oid="late", message="x", created_at=910.0))
    report = h.verify_counts(REF, store)
    assert report.rows["commit_message"]["delta"] == 1
    assert not report.complete


def test_iso_timestamps_as_served_by_the_live_api(tmp_path):
    from assumption_forge.harvest.types import to_epoch, to_git_timestamp

    server = make_server()

    class IsoFacade:
        """Re-encodes mock timestamps as ISO strings, like the live endpoint."""

        def execute(self, query, variables):
            def walk(x):
                if isinstance(x, dict):
                    return {
                        k: (
                            to_git_timestamp(v)
                            if k in ("committedDate", "createdAt") and isinstance(v, (int, float))
                            else walk(v)
                        )
                        for k, v in x.items()
                    }
                if isinstance(x, list):
                    return [walk(v) for v in x]
                return x

            return walk(server.execute(query, variables))

    store = RecordStore(tmp_path / "r.jsonl")
    h = Harvester(transport=IsoFacade(), budget=RateBudget())
    meta = h.fetch_repository_meta(REF)
    assert meta.created_at == 100.0
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=4)
    assert len(store) == TOTAL
    assert all(isinstance(r.created_at, float) for r in store.records())
    assert to_epoch(to_git_timestamp(123456789.0)) == 123456789.0


def test_store_survives_reopen(tmp_path):
    path = tmp_path / "r.jsonl"
    store = RecordStore(path)
    h = harvester(make_server())
    h.harvest(REF, ALL, cutoff=1000.0, store=store, page_size=4)
    reopened = RecordStore(path)
    assert len(reopened) == TOTAL
    assert reopened.count("acme/widgets", RecordKind.ISSUE_COMMENT_BODY) == 5


def test_budget_reserve_errors():
    clock = {"t": 0.0}
    budget = RateBudget(points_per_hour=10, clock=lambda: clock["t"])
    budget.reserve(5)  # cost 6
    with pytest.raises(RateLimited) as err:
        budget.reserve(5)
    assert err.value.reset_at == pytest.approx(3600.0)
    clock["t"] = 3601.0
    assert budget.reserve(5) == 6
    with pytest.raises(NodeCapExceeded):
        budget.reserve(10_000_000)
