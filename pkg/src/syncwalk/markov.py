"""Absorbing Markov chains driven by Bernoulli letters, and their
expected absorption times.

With a rational letter probability every step of the solve is carried out
in :class:`fractions.Fraction`, so results are exact. With a float
probability the system is factorised with partial pivoting.
"""
from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .analysis import default_cap
from .automaton import Automaton, StateSet
from .errors import (
    DomainError, NotAbsorbing, NotSynchronizing, ResourceExceeded, SingularSystem,
)
from .generators import SINK, normalize_pair, pair_label

PIVOT_TOL = 1e-12
FLOAT_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class LetterDistribution:
    """Bernoulli source: letter ``a`` with probability ``p``, ``b`` with ``q``."""

    p: Fraction | float

    def __post_init__(self):
        p = self.p
        if isinstance(p, bool):
            raise DomainError("p must be a number")
        if isinstance(p, Rational):
            p = Fraction(p)
        elif isinstance(p, float):
            pass
        else:
            raise DomainError(f"p must be a Fraction or float, got {type(p).__name__}")
        if not 0 < p < 1:
            raise DomainError(f"p must lie strictly between 0 and 1, got {p}")
        object.__setattr__(self, "p", p)

    @classmethod
    def parse(cls, text: str) -> LetterDistribution:
        """``"m/k"`` or an integer ratio gives the exact path, decimals the float path."""
        text = text.strip()
        try:
            if "/" in text:
                return cls(Fraction(text))
            return cls(float(text))
        except (ValueError, ZeroDivisionError):
            raise DomainError(f"cannot parse probability {text!r}") from None

    @property
    def q(self):
        return 1 - self.p

    @property
    def exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @property
    def probs(self) -> tuple:
        return (self.p, self.q)

    def __str__(self):
        return str(self.p)


@dataclass
class AbsorbingChain:
    """Finite chain; ``transitions[i]`` lists ``(target, probability)`` with
    parallel letters already merged."""

    keys: list
    labels: list[str]
    transitions: list[list[tuple[int, object]]]
    absorbing: frozenset
    start: int
    distribution: LetterDistribution

    def __len__(self):
        return len(self.keys)

    def index(self, key) -> int:
        try:
            return self._index[key]
        except AttributeError:
            self._index = {k: i for i, k in enumerate(self.keys)}
            return self._index[key]


@dataclass
class HittingTimeVector:
    chain: AbsorbingChain
    mu: list

    @property
    def exact(self) -> bool:
        return self.chain.distribution.exact

    @property
    def at_start(self):
        return self.mu[self.chain.start]

    def __getitem__(self, key):
        return self.mu[self.chain.index(key)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["state_label", "mu_exact", "mu_float"])
        for label, m in zip(self.chain.labels, self.mu):
            exact = f"{m.numerator}/{m.denominator}" if isinstance(m, Fraction) else ""
            w.writerow([label, exact, repr(float(m))])
        return buf.getvalue()


def _binary(A: Automaton):
    if len(A.alphabet) != 2:
        raise DomainError("Bernoulli letter source needs a two-letter alphabet")


def _merge(targets, probs):
    out: dict[int, object] = {}
    for t, pr in zip(targets, probs):
        out[t] = out.get(t, 0) + pr
    return sorted(out.items())


def subset_graph(A: Automaton, start_mask: int, cap: int | None = None):
    """Subsets reachable from ``start_mask`` in BFS order, with the index of
    each subset's image under every letter."""
    cap = default_cap() if cap is None else cap
    masks = [start_mask]
    index = {start_mask: 0}
    succ = []
    k = 0
    while k < len(masks):
        row = []
        for x in A.letters:
            image = A.image_mask(masks[k], x)
            j = index.get(image)
            if j is None:
                j = index[image] = len(masks)
                masks.append(image)
                if len(masks) > cap:
                    raise ResourceExceeded(f"more than {cap} reachable subsets")
            row.append(j)
        succ.append(tuple(row))
        k += 1
    return masks, succ


def build_subset_chain(A: Automaton, d: LetterDistribution, start=None,
                       cap: int | None = None) -> AbsorbingChain:
    """Chain of the random process ``S := delta(S, x)`` stopped at singletons."""
    _binary(A)
    if start is None:
        start = A.full_set()
    elif not isinstance(start, StateSet):
        start = A.state_set(start)
    if start.mask == 0:
        raise DomainError("start set must be non-empty")
    masks, succ = subset_graph(A, start.mask, cap)
    absorbing = frozenset(i for i, m in enumerate(masks) if m & (m - 1) == 0)
    transitions = [
        [(i, 1)] if i in absorbing else _merge(succ[i], d.probs)
        for i in range(len(masks))
    ]
    labels = [str(StateSet(m, A.num_states)) for m in masks]
    return AbsorbingChain(masks, labels, transitions, absorbing, 0, d)


def _walk(A: Automaton, d, starts, is_absorbing, key_of, label_of):
    keys = list(starts)
    index = {k: i for i, k in enumerate(keys)}
    transitions = []
    k = 0
    while k < len(keys):
        key = keys[k]
        if is_absorbing(key):
            transitions.append([(k, 1)])
        else:
            targets = []
            for row in A.delta:
                nxt = key_of(key, row)
                j = index.get(nxt)
                if j is None:
                    j = index[nxt] = len(keys)
                    keys.append(nxt)
                targets.append(j)
            transitions.append(_merge(targets, d.probs))
        k += 1
    absorbing = frozenset(i for i, key in enumerate(keys) if is_absorbing(key))
    return AbsorbingChain(keys, [label_of(key) for key in keys], transitions, absorbing, 0, d)


def _pair_step(key, row):
    if key == SINK:
        return SINK
    u, v = row[key[0]], row[key[1]]
    if u == v:
        return SINK
    return (u, v) if u < v else (v, u)


def build_pair_chain(A: Automaton, d: LetterDistribution, pair=None) -> AbsorbingChain:
    """Chain on pair states reachable from ``pair`` and absorbed in the sink.

    With ``pair=None`` every pair is included, in canonical order.
    """
    _binary(A)
    n = A.num_states
    if pair is None:
        starts = [(s, t) for s in range(n) for t in range(s + 1, n)] or [SINK]
    else:
        starts = [normalize_pair(pair, n)]
    return _walk(A, d, starts, lambda k: k == SINK, _pair_step, pair_label)


def build_walk_chain(A: Automaton, d: LetterDistribution, start: int,
                     absorbing) -> AbsorbingChain:
    """Random walk of one state of ``A`` until it enters ``absorbing``."""
    _binary(A)
    absorbing = frozenset(absorbing)
    if not 0 <= start < A.num_states:
        raise DomainError(f"start state {start} out of range")
    return _walk(A, d, [start], absorbing.__contains__,
                 lambda s, row: row[s], A.label)


# -- solving -----------------------------------------------------------------

def _distances(chain: AbsorbingChain) -> list:
    """BFS distance of every state to the absorbing set (None if unreachable)."""
    preds = [[] for _ in chain.keys]
    for i, row in enumerate(chain.transitions):
        for j, _ in row:
            if j != i:
                preds[j].append(i)
    dist: list = [None] * len(chain)
    queue = deque()
    for a in sorted(chain.absorbing):
        dist[a] = 0
        queue.append(a)
    while queue:
        j = queue.popleft()
        for i in preds[j]:
            if dist[i] is None:
                dist[i] = dist[j] + 1
                queue.append(i)
    return dist


def _residuals(chain: AbsorbingChain, mu) -> list:
    return [
        mu[i] - 1 - sum(pr * mu[j] for j, pr in row)
        for i, row in enumerate(chain.transitions)
        if i not in chain.absorbing
    ]


def solve_expected(chain: AbsorbingChain) -> HittingTimeVector:
    """Expected number of steps to absorption from every state."""
    dist = _distances(chain)
    stuck = [chain.labels[i] for i, d in enumerate(dist) if d is None]
    if stuck:
        raise NotAbsorbing(
            f"{len(stuck)} transient states never reach absorption, e.g. {stuck[0]}"
        )
    order = sorted((i for i in range(len(chain)) if i not in chain.absorbing),
                   key=lambda i: (dist[i], i))
    if chain.distribution.exact:
        mu = _solve_exact(chain, order)
        bad = [r for r in _residuals(chain, mu) if r != 0]
        if bad:
            raise SingularSystem(f"exact residual check failed: {bad[0]}")  # pragma: no cover
    else:
        mu = _solve_float(chain, order)
        scale = max(1.0, max(abs(m) for m in mu))
        worst = max((abs(r) for r in _residuals(chain, mu)), default=0.0)
        if worst > FLOAT_RESIDUAL_TOL * scale:
            raise SingularSystem(f"residual {worst:.3e} exceeds tolerance")
    return HittingTimeVector(chain, mu)


def _solve_exact(chain: AbsorbingChain, order) -> list:
    # Row i encodes mu_i - sum_j P(i,j) mu_j = 1 over transient j.
    absorbing = chain.absorbing
    rows: dict[int, dict[int, Fraction]] = {}
    rhs: dict[int, Fraction] = {}
    cols: dict[int, set] = {i: set() for i in order}
    for i in order:
        coeffs: dict[int, Fraction] = {i: Fraction(1)}
        for j, pr in chain.transitions[i]:
            if j in absorbing:
                continue
            coeffs[j] = coeffs.get(j, 0) - pr
        coeffs = {j: c for j, c in coeffs.items() if c != 0}
        rows[i] = coeffs
        rhs[i] = Fraction(1)
        for j in coeffs:
            cols[j].add(i)

    done = set()
    for v in order:
        row = rows[v]
        piv = row.get(v, 0)
        if piv == 0:
            raise SingularSystem(f"zero pivot at {chain.labels[v]}")  # pragma: no cover
        if piv != 1:
            row = rows[v] = {j: c / piv for j, c in row.items()}
            rhs[v] /= piv
        done.add(v)
        for r in list(cols[v]):
            if r in done:
                continue
            target = rows[r]
            factor = target.pop(v)
            for j, c in row.items():
                if j == v:
                    continue
                new = target.get(j, 0) - factor * c
                if new == 0:
                    if j in target:
                        del target[j]
                        cols[j].discard(r)
                else:
                    if j not in target:
                        cols[j].add(r)
                    target[j] = new
            rhs[r] -= factor * rhs[v]
        cols[v] = set()

    mu: list = [Fraction(0)] * len(chain)
    for v in reversed(order):
        mu[v] = rhs[v] - sum(c * mu[j] for j, c in rows[v].items() if j != v)
    return mu


def _solve_float(chain: AbsorbingChain, order) -> list:
    pos = {v: k for k, v in enumerate(order)}
    r, c, vals = [], [], []
    for v in order:
        r.append(pos[v]); c.append(pos[v]); vals.append(1.0)
        for j, pr in chain.transitions[v]:
            if j in pos:
                r.append(pos[v]); c.append(pos[j]); vals.append(-float(pr))
    m = len(order)
    mu = [0.0] * len(chain)
    if m == 0:
        return mu
    M = sp.csc_matrix((vals, (r, c)), shape=(m, m))
    try:
        lu = spla.splu(M, permc_spec="NATURAL", diag_pivot_thresh=1.0)
    except RuntimeError as exc:
        raise SingularSystem(str(exc)) from None
    if np.min(np.abs(lu.U.diagonal())) < PIVOT_TOL:
        raise SingularSystem("pivot below tolerance")
    x = lu.solve(np.ones(m))
    for v in order:
        mu[v] = float(x[pos[v]])
    return mu


# -- convenience entry points ------------------------------------------------

def expected_sync_time(A: Automaton, d: LetterDistribution, cap: int | None = None):
    """Expected number of letters until the full state set is a singleton."""
    try:
        return solve_expected(build_subset_chain(A, d, cap=cap)).at_start
    except NotAbsorbing:
        raise NotSynchronizing("some subset image never shrinks to a singleton") from None


def expected_pair_time(A: Automaton, d: LetterDistribution, pair):
    return solve_expected(build_pair_chain(A, d, pair)).at_start


def pair_values(A: Automaton, d: LetterDistribution) -> dict:
    """Expected merging time of every pair, from a single solve."""
    h = solve_expected(build_pair_chain(A, d))
    return {key: m for key, m in zip(h.chain.keys, h.mu) if key != SINK}


def argmax_pair(A: Automaton, d: LetterDistribution):
    """Pair with the largest expected merging time; ties go to the
    lexicographically smallest pair."""
    values = pair_values(A, d)
    if not values:
        raise DomainError("automaton has no pairs of states")
    best = max(values.values())
    pair = min(k for k, v in values.items() if v == best)
    return pair, best
