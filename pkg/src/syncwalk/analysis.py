"""Synchronizability, reset thresholds and shortest pair-merging words."""
from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

from .automaton import Automaton, apply_word
from .errors import NotSynchronizing, PairNotSynchronizable, ResourceExceeded
from .generators import normalize_pair

DEFAULT_CAP = 2_000_000


def default_cap() -> int:
    """Subset cap, overridable through ``SYNCWALK_CAP``."""
    raw = os.environ.get("SYNCWALK_CAP")
    return int(raw) if raw else DEFAULT_CAP


@dataclass(frozen=True)
class ResetReport:
    threshold: int
    witness: tuple
    explored: int

    def to_json(self, A: Automaton) -> dict:
        return {
            "threshold": self.threshold,
            "witness": A.format_word(self.witness),
            "explored": self.explored,
        }


def is_sync_word(A: Automaton, w) -> bool:
    return len(apply_word(A, A.full_set(), w)) == 1


def _pair_predecessors(A: Automaton):
    # preds[(u, v)] lists the pairs mapped onto {u, v} by some letter
    preds: dict = {}
    merging = []
    n = A.num_states
    for row in A.delta:
        for s in range(n):
            for t in range(s + 1, n):
                u, v = row[s], row[t]
                if u == v:
                    merging.append((s, t))
                else:
                    preds.setdefault((min(u, v), max(u, v)), []).append((s, t))
    return preds, merging


def is_synchronizing(A: Automaton) -> bool:
    """True iff every pair of states can be merged by some word."""
    n = A.num_states
    if n == 1:
        return True
    preds, merging = _pair_predecessors(A)
    seen = set(merging)
    queue = deque(seen)
    while queue:
        for p in preds.get(queue.popleft(), ()):
            if p not in seen:
                seen.add(p)
                queue.append(p)
    return len(seen) == n * (n - 1) // 2


def reset_threshold(A: Automaton, cap: int | None = None) -> ResetReport:
    """Shortest reset word by breadth-first search over subset images.

    Letters are expanded in alphabet order, so the witness is the
    lexicographically smallest reset word of minimum length.
    """
    if not is_synchronizing(A):
        raise NotSynchronizing("automaton has an unmergeable pair of states")
    cap = default_cap() if cap is None else cap
    start = (1 << A.num_states) - 1
    if start & (start - 1) == 0:
        return ResetReport(0, (), 1)
    parent = {start: None}
    queue = deque([start])
    while queue:
        mask = queue.popleft()
        for x in A.letters:
            image = A.image_mask(mask, x)
            if image in parent:
                continue
            parent[image] = (mask, x)
            if image & (image - 1) == 0:
                word = []
                node = image
                while parent[node] is not None:
                    node, letter = parent[node]
                    word.append(letter)
                word.reverse()
                return ResetReport(len(word), tuple(word), len(parent))
            if len(parent) > cap:
                raise ResourceExceeded(f"more than {cap} subsets visited")
            queue.append(image)
    raise NotSynchronizing("no singleton reachable")  # pragma: no cover


def pair_reset_length(A: Automaton, pair) -> int:
    """Length of a shortest word merging the two states of ``pair``."""
    s, t = normalize_pair(pair, A.num_states)
    dist = {(s, t): 0}
    queue = deque([(s, t)])
    while queue:
        u, v = queue.popleft()
        d = dist[(u, v)]
        for row in A.delta:
            a, b = row[u], row[v]
            if a == b:
                return d + 1
            key = (a, b) if a < b else (b, a)
            if key not in dist:
                dist[key] = d + 1
                queue.append(key)
    raise PairNotSynchronizable(f"no word merges {{{s},{t}}}")
