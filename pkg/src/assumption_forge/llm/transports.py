"""Chat transports: live HTTP endpoint and deterministic replay fixtures."""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from ..errors import RateLimited, TransportError


def request_hash(model_name: str, turns: list[tuple[str, str]]) -> str:
    """Stable key for one chat request: model plus the ordered transcript."""
    canon = json.dumps(
        {"model": model_name, "turns": [[r, t] for r, t in turns]},
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


class ReplayTransport:
    """Serves recorded responses from a JSONL fixture of {request, response}.

    In record mode it wraps a live transport and appends every new exchange
    to the fixture, so a captured session replays offline afterwards.
    """

    def __init__(self, fixture_path, live=None):
        self.fixture_path = Path(fixture_path)
        self.live = live
        self._responses: dict[str, str] = {}
        if self.fixture_path.exists():
            with open(self.fixture_path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    row = json.loads(line)
                    self._responses[row["request"]] = row["response"]
        self.calls = 0

    def send(self, model_name: str, turns: list[tuple[str, str]]) -> str:
        self.calls += 1
        key = request_hash(model_name, turns)
        if key in self._responses:
            return self._responses[key]
        if self.live is None:
            raise TransportError(f"no fixture entry for request {key[:12]}...")
        response = self.live.send(model_name, turns)
        self._responses[key] = response
        with open(self.fixture_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps({"request": key, "response": response}, ensure_ascii=False) + "\n")
        return response


class HttpChatTransport:
    """OpenAI-style chat-completion endpoint speaking JSON over HTTPS."""

    def __init__(
        self,
        url: str,
        credential_env: str = "ASSUMPTION_FORGE_LLM_KEY",
        options: dict | None = None,
        max_attempts: int = 4,
        timeout: float = 60.0,
        sleep=time.sleep,
    ):
        self.url = url
        self.credential_env = credential_env
        self.options = options or {}
        self.max_attempts = max_attempts
        self.timeout = timeout
        self.sleep = sleep

    def send(self, model_name: str, turns: list[tuple[str, str]]) -> str:
        import httpx

        token = os.environ.get(self.credential_env, "")
        headers = {"Content-Type": "application/json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        role_map = {"user": "user", "model": "assistant", "system": "system"}
        payload = {
            "model": model_name,
            "messages": [{"role": role_map.get(r, r), "content": t} for r, t in turns],
            **self.options,
        }
        delay = 1.0
        last_error: Exception | None = None
        for _ in range(self.max_attempts):
            try:
                resp = httpx.post(self.url, json=payload, headers=headers, timeout=self.timeout)
            except httpx.HTTPError as exc:
                last_error = exc
                self.sleep(delay)
                delay *= 2
                continue
            if resp.status_code == 429:
                retry_after = float(resp.headers.get("Retry-After", delay))
                raise RateLimited("chat endpoint throttled", reset_at=time.time() + retry_after)
            if resp.status_code >= 500:
                last_error = TransportError(f"server error {resp.status_code}")
                self.sleep(delay)
                delay *= 2
                continue
            if resp.status_code >= 400:
                raise TransportError(f"chat endpoint rejected request: {resp.status_code} {resp.text[:200]}")
            body = resp.json()
            try:
                return body["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError):
                raise TransportError(f"unexpected response shape: {str(body)[:200]}") from None
        raise TransportError(f"transport failed after {self.max_attempts} attempts: {last_error}")
