from .budget import RateBudget
from .harvester import Harvester
from .mock_server import MockCommit, MockComment, MockGitHub, MockRepo, MockThread, MockTransport
from .store import RecordStore
from .transport import HttpGraphQLTransport, resolve_token, TOKEN_ENV
from .types import (
    ALL_KINDS,
    CountReport,
    HarvestReport,
    RawRecord,
    RecordKind,
    RepoMeta,
    RepoRef,
)

__all__ = [
    "ALL_KINDS",
    "CountReport",
    "Harvester",
    "HarvestReport",
    "HttpGraphQLTransport",
    "MockCommit",
    "MockComment",
    "MockGitHub",
    "MockRepo",
    "MockThread",
    "MockTransport",
    "RateBudget",
    "RawRecord",
    "RecordKind",
    "RecordStore",
    "RepoMeta",
    "RepoRef",
    "resolve_token",
    "TOKEN_ENV",
]
