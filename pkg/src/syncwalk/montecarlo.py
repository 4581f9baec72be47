"""Monte Carlo estimates of synchronization times.

Every trial owns an independent Philox counter-based stream keyed by
``(seed, trial index)``. A trial's letters therefore do not depend on how
trials are batched or ordered, and :func:`estimate` reproduces exactly the
step counts :func:`run_trial` gives for each stream.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .automaton import Automaton, StateSet
from .errors import (
    DomainError, EstimateTruncated, NotAbsorbing, SingularSystem, TruncationRefused,
)
from .markov import LetterDistribution, build_subset_chain, solve_expected, subset_graph

RNG_NAME = "numpy-philox4x64"
CHUNK = 256
DEFAULT_MAX_STEPS = 10**8
_U64 = 1 << 64


@dataclass(frozen=True)
class BernoulliSource:
    """Letter ``a`` (index 0) with probability ``p``, else ``b`` (index 1)."""

    p: float
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        p = float(self.p)
        if not 0 < p < 1:
            raise DomainError(f"p must lie strictly between 0 and 1, got {self.p}")
        object.__setattr__(self, "p", p)
        for name in ("seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, int) or not 0 <= v < _U64:
                raise DomainError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=self.seed | self.stream_id << 64))

    def stream(self):
        """Endless sequence of letter-index chunks."""
        gen = self.generator()
        while True:
            yield (gen.random(CHUNK) >= self.p).astype(np.intp)


def _start_set(A: Automaton, start) -> StateSet:
    if start is None:
        return A.full_set()
    if not isinstance(start, StateSet):
        start = A.state_set(start)
    if start.mask == 0:
        raise DomainError("start set must be non-empty")
    return start


def run_trial(A: Automaton, src, start=None, max_steps: int = DEFAULT_MAX_STEPS):
    """Apply letters from ``src`` until the set is a singleton.

    Returns the number of letters read, or None if ``max_steps`` letters did
    not synchronize the set.
    """
    if max_steps < 1:
        raise DomainError("max_steps must be at least 1")
    mask = _start_set(A, start).mask
    steps = 0
    if mask & (mask - 1) == 0:
        return 0
    for chunk in src.stream():
        for x in chunk:
            mask = A.image_mask(mask, int(x))
            steps += 1
            if mask & (mask - 1) == 0:
                return steps
            if steps >= max_steps:
                return None
    return None


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    truncated: int
    seed: int
    p: float
    start: str
    family: str | None = None
    n: int | None = None
    rng: str = RNG_NAME
    stderr_defined: bool = True

    def to_json(self) -> dict:
        return asdict(self)


def _expected_steps(A, p, start, cap):
    try:
        chain = build_subset_chain(A, LetterDistribution(float(p)), start, cap=cap)
        return solve_expected(chain).at_start
    except NotAbsorbing:
        return math.inf
    except SingularSystem:
        # Huge expectations give pivots near 1/mu; redo exactly.
        chain = build_subset_chain(A, LetterDistribution(Fraction(float(p))), start, cap=cap)
        return float(solve_expected(chain).at_start)


def estimate(A: Automaton, p, start=None, trials: int = 100_000, seed: int = 0,
             max_steps: int = DEFAULT_MAX_STEPS, cap: int | None = None) -> Estimate:
    """Sample mean and standard error of the synchronization time.

    Refuses up front (:class:`TruncationRefused`) when the exact expectation
    exceeds ``max_steps / 10``; raises :class:`EstimateTruncated` if a trial
    still reaches ``max_steps``.
    """
    if isinstance(p, Fraction):
        p = float(p)
    if not isinstance(trials, int) or trials < 1:
        raise DomainError("trials must be a positive integer")
    if max_steps < 1:
        raise DomainError("max_steps must be at least 1")
    BernoulliSource(p, seed)  # argument validation
    S = _start_set(A, start)
    expected = _expected_steps(A, p, S, cap)
    if expected > max_steps / 10:
        raise TruncationRefused(
            f"expected {expected:.4g} steps exceeds max_steps/10 = {max_steps / 10:.4g}"
        )

    masks, succ = subset_graph(A, S.mask, cap)
    table = np.asarray(succ, dtype=np.intp)
    absorbed = np.array([m & (m - 1) == 0 for m in masks])
    steps = np.zeros(trials, dtype=np.int64)
    if not absorbed[0]:
        steps[:] = -1
        gens = [BernoulliSource(p, seed, k).generator() for k in range(trials)]
        state = np.zeros(trials, dtype=np.intp)
        active = np.arange(trials)
        offset = 0
        while active.size and offset < max_steps:
            width = CHUNK
            letters = np.stack([gens[k].random(width) >= p for k in active]).astype(np.intp)
            st = state[active]
            hit = np.full(active.size, -1, dtype=np.int64)
            limit = min(width, max_steps - offset)
            for t in range(limit):
                st = table[st, letters[:, t]]
                fresh = (hit < 0) & absorbed[st]
                hit[fresh] = offset + t + 1
                if t % 32 == 31 and hit.min() >= 0:
                    break
            state[active] = st
            finished = hit >= 0
            steps[active[finished]] = hit[finished]
            active = active[~finished]
            offset += limit
    truncated = int(np.count_nonzero(steps < 0))
    done = steps[steps >= 0]
    mean = float(done.mean()) if done.size else math.nan
    defined = done.size > 1
    stderr = float(done.std(ddof=1) / math.sqrt(done.size)) if defined else 0.0
    est = Estimate(
        mean=mean, stderr=stderr, trials=trials, truncated=truncated, seed=seed,
        p=float(p), start=str(S), family=A.meta.get("family"), n=A.meta.get("n"),
        stderr_defined=defined,
    )
    if truncated:
        err = EstimateTruncated(f"{truncated} of {trials} trials hit max_steps={max_steps}")
        err.estimate = est
        raise err
    return est
