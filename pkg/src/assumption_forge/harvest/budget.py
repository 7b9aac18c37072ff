"""Sliding-window request budget for the hosting API.

Cost of a call is estimated conservatively as one point for the page plus
one per node requested. A call is only issued when its estimate fits in
the remaining window budget; otherwise the caller pauses until the oldest
charge expires.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass, field

from ..errors import NodeCapExceeded, RateLimited

WINDOW_SECONDS = 3600.0


@dataclass
class RateBudget:
    points_per_hour: int = 5000
    max_nodes_per_call: int = 500_000
    clock: object = time.monotonic
    _charges: list[tuple[float, int]] = field(default_factory=list)
    _lock: threading.Lock = field(default_factory=threading.Lock)

    @staticmethod
    def estimate_cost(nodes: int) -> int:
        return 1 + nodes

    def _prune(self, now: float) -> None:
        horizon = now - WINDOW_SECONDS
        while self._charges and self._charges[0][0] <= horizon:
            self._charges.pop(0)

    @property
    def remaining(self) -> int:
        with self._lock:
            now = self.clock()
            self._prune(now)
            return self.points_per_hour - sum(c for _, c in self._charges)

    @property
    def reset_at(self) -> float:
        with self._lock:
            now = self.clock()
            self._prune(now)
            if not self._charges:
                return now
            return self._charges[0][0] + WINDOW_SECONDS

    def check_nodes(self, nodes: int) -> None:
        if nodes > self.max_nodes_per_call:
            raise NodeCapExceeded(
                f"call requests {nodes} nodes, cap is {self.max_nodes_per_call}"
            )

    def reserve(self, nodes: int) -> int:
        """Charge for a call of `nodes` nodes or raise RateLimited."""
        self.check_nodes(nodes)
        cost = self.estimate_cost(nodes)
        if cost > self.points_per_hour:
            # can never fit in any window; the query must be split, not waited on
            raise NodeCapExceeded(
                f"estimated cost {cost} exceeds the whole hourly budget {self.points_per_hour}"
            )
        with self._lock:
            now = self.clock()
            self._prune(now)
            spent = sum(c for _, c in self._charges)
            if spent + cost > self.points_per_hour:
                reset = self._charges[0][0] + WINDOW_SECONDS if self._charges else now
                raise RateLimited(
                    f"cost {cost} exceeds remaining budget {self.points_per_hour - spent}",
                    reset_at=reset,
                )
            self._charges.append((now, cost))
            return cost

    def spent_in_window(self) -> int:
        with self._lock:
            now = self.clock()
            self._prune(now)
            return sum(c for _, c in self._charges)
