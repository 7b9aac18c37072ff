"""GraphQL transport abstraction.

A transport executes one GraphQL document with variables and returns the
`data` payload, translating endpoint failures into the toolkit's error
types. Tests use the in-process mock server transport; production talks to
the hosting API over HTTPS with a bearer token.
"""

from __future__ import annotations

import os
import time

from ..errors import AuthError, NodeCapExceeded, NotFound, RateLimited, TransportError

TOKEN_ENV = "ASSUMPTION_FORGE_TOKEN"
DEFAULT_ENDPOINT = "https://api.github.com/graphql"


def resolve_token(explicit: str | None = None, config: dict | None = None) -> str:
    """Token precedence: explicit argument, environment, config file."""
    if explicit:
        return explicit
    env = os.environ.get(TOKEN_ENV)
    if env:
        return env
    if config and config.get("token"):
        return str(config["token"])
    raise AuthError(f"no API token: set {TOKEN_ENV} or the 'token' config key")


def raise_for_graphql_errors(errors: list[dict]) -> None:
    for err in errors:
        etype = (err.get("type") or "").upper()
        message = err.get("message", "GraphQL error")
        if etype == "RATE_LIMITED":
            reset = err.get("extensions", {}).get("reset_at")
            raise RateLimited(message, reset_at=reset)
        if etype == "NOT_FOUND":
            raise NotFound(message)
        if etype == "NODE_LIMIT_EXCEEDED":
            raise NodeCapExceeded(message)
        if etype in ("FORBIDDEN", "UNAUTHORIZED"):
            raise AuthError(message)
    raise TransportError("; ".join(e.get("message", "?") for e in errors))


class HttpGraphQLTransport:
    def __init__(
        self,
        token: str,
        endpoint: str = DEFAULT_ENDPOINT,
        timeout: float = 30.0,
    ):
        self.token = token
        self.endpoint = endpoint
        self.timeout = timeout

    def execute(self, query: str, variables: dict) -> dict:
        import httpx

        try:
            resp = httpx.post(
                self.endpoint,
                json={"query": query, "variables": variables},
                headers={"Authorization": f"Bearer {self.token}"},
                timeout=self.timeout,
            )
        except httpx.HTTPError as exc:
            raise TransportError(f"request failed: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthError(f"endpoint rejected credentials: {resp.status_code}")
        if resp.status_code == 429:
            retry_after = float(resp.headers.get("Retry-After", 60))
            raise RateLimited("endpoint throttled", reset_at=time.time() + retry_after)
        if resp.status_code >= 400:
            raise TransportError(f"endpoint error {resp.status_code}: {resp.text[:200]}")
        body = resp.json()
        if body.get("errors"):
            raise_for_graphql_errors(body["errors"])
        return body.get("data", {})
