"""Automata families: Cerny automata, pattern automata U_n and pair automata.

Pair automaton states are either a tuple ``(s, t)`` with ``s < t`` or the
sink marker :data:`SINK`. The explicit presentation of the pair automaton of
an odd Cerny automaton uses tuples ``(i, l)`` where ``l`` is the cyclic
distance from ``i`` to the other member of the pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .automaton import Automaton
from .errors import DomainError

SINK = "z"


def _require_int(n, lo, what="n"):
    if not isinstance(n, int) or isinstance(n, bool) or n < lo:
        raise DomainError(f"{what} must be an integer >= {lo}, got {n!r}")


def gen_cerny(n: int) -> Automaton:
    """The n-state Cerny automaton: ``a`` maps 0 to 1 and fixes the rest,
    ``b`` is the cyclic shift ``i -> i + 1 mod n``."""
    _require_int(n, 2)
    delta_a = [1] + list(range(1, n))
    delta_b = [(i + 1) % n for i in range(n)]
    return Automaton(
        n, (delta_a, delta_b), labels=[str(i) for i in range(n)],
        meta={"family": "cerny", "n": n},
    )


def failure_function(pattern: Sequence) -> list[int]:
    """``f[k]`` is the length of the longest proper border of ``pattern[:k]``;
    ``f[0] = -1``."""
    f = [-1] * (len(pattern) + 1)
    for k in range(1, len(pattern) + 1):
        j = f[k - 1]
        while j >= 0 and pattern[j] != pattern[k - 1]:
            j = f[j]
        f[k] = j + 1
    return f


def factor_automaton(pattern: Sequence[int], alphabet=("a", "b")) -> Automaton:
    """Minimal DFA of the words containing ``pattern`` as a factor.

    State ``k < m`` records that the longest suffix of the input which is a
    prefix of the pattern has length ``k``; state ``m = len(pattern)`` is an
    absorbing sink reached once the pattern has occurred.
    """
    m = len(pattern)
    sigma = len(alphabet)
    if any(not 0 <= x < sigma for x in pattern):
        raise DomainError("pattern uses letters outside the alphabet")
    f = failure_function(pattern)
    delta = [[0] * (m + 1) for _ in range(sigma)]
    for x in range(sigma):
        delta[x][m] = m
        for k in range(m):
            j = k
            while j >= 0 and pattern[j] != x:
                j = f[j]
            delta[x][k] = j + 1
    return Automaton(m + 1, delta, alphabet=alphabet)


def un_pattern(n: int) -> tuple[int, int]:
    """Lengths ``(j, k)`` of the a-block and b-block defining U_n."""
    _require_int(n, 1)
    if n % 2:
        return (n + 1) // 2, (n - 1) // 2
    return n // 2, n // 2


def gen_un(n: int) -> Automaton:
    """U_n, the (n+1)-state minimal automaton of ``Sigma* a^j b^k Sigma*``.

    Internal state ``k`` corresponds to state ``k + 1`` in 1-based numbering,
    so the initial state is 0 and the sink is ``n``. Labels keep the 1-based
    names.
    """
    j, k = un_pattern(n)
    base = factor_automaton((0,) * j + (1,) * k)
    return Automaton(
        base.num_states, base.delta, labels=[str(s + 1) for s in range(n + 1)],
        meta={"family": "un", "n": n},
    )


# -- pair automata -----------------------------------------------------------

def pair_states(num_states: int) -> list:
    """Canonical pair-state order: ``(s, t)`` lexicographic, sink last."""
    out: list = [(s, t) for s in range(num_states) for t in range(s + 1, num_states)]
    out.append(SINK)
    return out


def normalize_pair(pair, num_states: int) -> tuple[int, int]:
    try:
        s, t = pair
    except (TypeError, ValueError):
        raise DomainError(f"pair must have two members, got {pair!r}") from None
    for v in (s, t):
        if not (isinstance(v, int) and 0 <= v < num_states):
            raise DomainError(f"pair member {v!r} out of range({num_states})")
    if s == t:
        raise DomainError(f"pair members must differ, got {{{s},{t}}}")
    return (s, t) if s < t else (t, s)


def pair_label(state) -> str:
    return SINK if state == SINK else "{%d,%d}" % state


def pair_automaton(A: Automaton) -> Automaton:
    """Automaton on unordered pairs of distinct states plus a sink.

    A pair goes to the sink on a letter that merges it; otherwise it moves
    to the pair of images.
    """
    states = pair_states(A.num_states)
    index = {st: i for i, st in enumerate(states)}
    sink = index[SINK]
    delta = []
    for row in A.delta:
        targets = []
        for st in states:
            if st == SINK:
                targets.append(sink)
                continue
            u, v = row[st[0]], row[st[1]]
            targets.append(sink if u == v else index[(min(u, v), max(u, v))])
        delta.append(targets)
    meta = {"family": "pair", "base": dict(A.meta)} if A.meta else {"family": "pair"}
    return Automaton(
        len(states), delta, alphabet=A.alphabet,
        labels=[pair_label(st) for st in states], meta=meta,
    )


def pn_states(n: int) -> list:
    """States ``(i, l)`` of P_n ordered by ``l`` then ``i``, sink last."""
    _require_odd(n)
    out: list = [(i, l) for l in range(1, (n - 1) // 2 + 1) for i in range(n)]
    out.append(SINK)
    return out


def _require_odd(n):
    _require_int(n, 3)
    if n % 2 == 0:
        raise DomainError(f"n must be odd, got {n}")


def pn_label(state) -> str:
    return SINK if state == SINK else "%d,%d" % state


def gen_pn(n: int) -> Automaton:
    """Explicit (i, l) presentation of the pair automaton of odd C_n."""
    _require_odd(n)
    h = (n - 1) // 2
    states = pn_states(n)
    index = {st: k for k, st in enumerate(states)}

    def on_a(i, l):
        if i == 0:
            return SINK if l == 1 else (1, l - 1)
        if i == n - l and l <= h - 1:
            return (i, l + 1)
        if (i, l) == ((n + 1) // 2, h):
            return (1, h)
        return (i, l)

    delta_a, delta_b = [], []
    for st in states:
        if st == SINK:
            delta_a.append(index[SINK])
            delta_b.append(index[SINK])
            continue
        i, l = st
        delta_a.append(index[on_a(i, l)])
        delta_b.append(index[((i + 1) % n, l)])
    return Automaton(
        len(states), (delta_a, delta_b),
        labels=[pn_label(st) for st in states], meta={"family": "pn", "n": n},
    )


def pair_iso_map(n: int, pair) -> tuple[int, int]:
    """Image of the Cerny pair ``{s, t}`` in the (i, l) presentation."""
    s, t = normalize_pair(pair, n)
    m = (t - s) % n
    if m <= n - m:
        return (s, m)
    return (t, n - m)


def pair_iso_mapping(n: int) -> list[int]:
    """State bijection from ``pair_automaton(gen_cerny(n))`` to ``gen_pn(n)``,
    as a list indexed by pair-automaton state."""
    target = {st: k for k, st in enumerate(pn_states(n))}
    return [
        target[SINK] if st == SINK else target[pair_iso_map(n, st)]
        for st in pair_states(n)
    ]


@dataclass(frozen=True)
class IsomorphismCheck:
    ok: bool
    diagnostic: str = ""

    def __bool__(self):
        return self.ok


def check_isomorphism(A: Automaton, B: Automaton, mapping) -> IsomorphismCheck:
    """Check that ``mapping`` (state of A -> state of B) is a bijection that
    commutes with every letter."""
    if isinstance(mapping, Mapping):
        missing = [s for s in A.states if s not in mapping]
        if missing:
            return IsomorphismCheck(False, f"mapping undefined on states {missing[:5]}")
        phi = [mapping[s] for s in A.states]
    else:
        phi = list(mapping)
        if len(phi) != A.num_states:
            return IsomorphismCheck(False, f"mapping has {len(phi)} entries for {A.num_states} states")
    if A.alphabet != B.alphabet:
        return IsomorphismCheck(False, "alphabets differ")
    if A.num_states != B.num_states:
        return IsomorphismCheck(False, f"state counts differ: {A.num_states} vs {B.num_states}")
    if sorted(phi) != list(B.states):
        return IsomorphismCheck(False, "mapping is not a bijection")
    for x, sym in enumerate(A.alphabet):
        for s in A.states:
            lhs = phi[A.delta[x][s]]
            rhs = B.delta[x][phi[s]]
            if lhs != rhs:
                return IsomorphismCheck(
                    False,
                    f"letter {sym!r} at {A.label(s)}: maps to {B.label(lhs)}, "
                    f"image goes to {B.label(rhs)}",
                )
    return IsomorphismCheck(True)
