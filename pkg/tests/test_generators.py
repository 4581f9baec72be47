import pytest

from syncwalk.analysis import reset_threshold
from syncwalk.automaton import Automaton, run_word
from syncwalk.errors import DomainError
from syncwalk.generators import (
    SINK, check_isomorphism, factor_automaton, failure_function, gen_cerny, gen_pn,
    gen_un, pair_automaton, pair_iso_map, pair_iso_mapping, pair_states, pn_states,
    un_pattern,
)

from conftest import all_words


def explicit_un_odd(n):
    """Piecewise 1-based transition table for odd n, shifted to 0-based."""
    mid = (n + 3) // 2
    a, b = [], []
    for i in range(1, n + 2):
        if i < mid:
            a.append(i + 1)
        elif i == mid:
            a.append(i)
        elif i < n + 1:
            a.append(2)
        else:
            a.append(n + 1)
        if i < mid:
            b.append(1)
        elif i < n + 1:
            b.append(i + 1)
        else:
            b.append(n + 1)
    if n == 1:
        # mid and n + 1 coincide; both cases agree on the sink
        a[-1] = n + 1
    return [[t - 1 for t in a], [t - 1 for t in b]]


def moore_classes(A, finals):
    """Number of Myhill-Nerode classes by partition refinement."""
    block = [int(s in finals) for s in A.states]
    while True:
        sig = [(block[s],) + tuple(block[row[s]] for row in A.delta) for s in A.states]
        ids = {v: k for k, v in enumerate(sorted(set(sig)))}
        new = [ids[v] for v in sig]
        if len(set(new)) == len(set(block)):
            return len(set(new))
        block = new


def test_cerny_7_transcription():
    C7 = gen_cerny(7)
    b_edges = {(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0)}
    a_edges = {(0, 1)} | {(i, i) for i in range(1, 7)}
    assert {(s, C7.delta[0][s]) for s in C7.states} == a_edges
    assert {(s, C7.delta[1][s]) for s in C7.states} == b_edges


def test_cerny_small():
    assert gen_cerny(3).delta == ((1, 1, 2), (1, 2, 0))
    assert gen_cerny(2).delta == ((1, 1), (1, 0))
    for bad in (1, 0, -3, 2.0):
        with pytest.raises(DomainError):
            gen_cerny(bad)


def test_failure_function():
    assert failure_function("aabaa") == [-1, 0, 1, 0, 1, 2]
    assert failure_function((0, 0, 0, 1, 1)) == [-1, 0, 1, 2, 0, 0]


def test_un_7_transcription():
    U7 = gen_un(7)
    assert U7.num_states == 8
    assert U7.delta[0] == (1, 2, 3, 4, 4, 1, 1, 7)
    assert U7.delta[1] == (0, 0, 0, 0, 5, 6, 7, 7)
    assert U7.labels == tuple(str(i) for i in range(1, 9))


@pytest.mark.parametrize("n", range(1, 16, 2))
def test_un_odd_equals_explicit_table(n):
    assert [list(r) for r in gen_un(n).delta] == explicit_un_odd(n)


def test_un_3_shortest_sync_word():
    U3 = gen_un(3)
    assert U3.num_states == 4
    sync = [w for w in all_words(4) if len({run_word(U3, s, w) for s in U3.states}) == 1]
    shortest = min(len(w) for w in sync)
    assert [w for w in sync if len(w) == shortest] == [(0, 0, 1)]
    assert reset_threshold(U3).witness == (0, 0, 1)


def test_un_8_minimal():
    U8 = gen_un(8)
    assert U8.num_states == 9
    assert un_pattern(8) == (4, 4)
    assert moore_classes(U8, {8}) == 9


@pytest.mark.parametrize("n", range(2, 13))
def test_un_minimal_and_language(n):
    U = gen_un(n)
    j, k = un_pattern(n)
    assert U.num_states == n + 1
    assert moore_classes(U, {n}) == n + 1
    pattern = "a" * j + "b" * k
    for w in all_words(n + 2):
        text = U.format_word(w)
        assert (run_word(U, 0, w) == n) == (pattern in text), text


def test_un_domain():
    with pytest.raises(DomainError):
        gen_un(0)
    with pytest.raises(DomainError):
        factor_automaton((0, 2))


def test_pair_automaton_cerny_3():
    P = pair_automaton(gen_cerny(3))
    assert P.num_states == 4
    idx = {st: i for i, st in enumerate(pair_states(3))}
    a, b = P.delta
    z = idx[SINK]
    assert a[idx[(0, 1)]] == z
    assert a[idx[(0, 2)]] == idx[(1, 2)]
    assert a[idx[(1, 2)]] == idx[(1, 2)]
    assert b[idx[(0, 1)]] == idx[(1, 2)]
    assert b[idx[(0, 2)]] == idx[(0, 1)]
    assert b[idx[(1, 2)]] == idx[(0, 2)]
    assert a[z] == b[z] == z
    assert P.labels == ("{0,1}", "{0,2}", "{1,2}", "z")


def test_pair_automaton_merging_letter_goes_to_sink():
    A = Automaton(3, ([2, 2, 0], [1, 2, 0]))
    P = pair_automaton(A)
    idx = {st: i for i, st in enumerate(pair_states(3))}
    assert P.delta[0][idx[(0, 1)]] == idx[SINK]


def test_pair_automaton_single_state():
    P = pair_automaton(Automaton(1, ([0], [0])))
    assert P.num_states == 1 and P.labels == ("z",)


@pytest.mark.parametrize("n", range(1, 9))
def test_pair_automaton_size(n):
    A = Automaton(n, ([(i * 3) % n for i in range(n)], [(i + 1) % n for i in range(n)]))
    assert pair_automaton(A).num_states == n * (n - 1) // 2 + 1


def test_pn_11_transcription():
    P = gen_pn(11)
    idx = {st: i for i, st in enumerate(pn_states(11))}
    inv = {i: st for st, i in idx.items()}
    drawn_a = {
        (0, 1): SINK, (0, 2): (1, 1), (0, 3): (1, 2), (0, 4): (1, 3), (0, 5): (1, 4),
        (10, 1): (10, 2), (9, 2): (9, 3), (8, 3): (8, 4), (7, 4): (7, 5), (6, 5): (1, 5),
    }
    assert P.num_states == 11 * 5 + 1
    for st in pn_states(11):
        if st == SINK:
            continue
        i, l = st
        assert inv[P.delta[1][idx[st]]] == ((i + 1) % 11, l)
        assert inv[P.delta[0][idx[st]]] == drawn_a.get(st, st)
    assert P.labels[idx[(6, 5)]] == "6,5"
    assert P.labels[-1] == "z"


def test_pn_3():
    P = gen_pn(3)
    assert pn_states(3) == [(0, 1), (1, 1), (2, 1), SINK]
    assert P.delta[0] == (3, 1, 1, 3)
    assert P.delta[1] == (1, 2, 0, 3)
    assert check_isomorphism(pair_automaton(gen_cerny(3)), P, pair_iso_mapping(3))


@pytest.mark.parametrize("n", [2, 4, 1, 10])
def test_pn_domain(n):
    with pytest.raises(DomainError):
        gen_pn(n)


def test_pair_iso_map_examples():
    assert pair_iso_map(11, (1, 6)) == (1, 5)
    assert pair_iso_map(11, (6, 1)) == (1, 5)
    assert pair_iso_map(11, (0, 1)) == (0, 1)
    assert pair_iso_map(11, (9, 10)) == (9, 1)
    assert pair_iso_map(11, (0, 10)) == (10, 1)
    with pytest.raises(DomainError):
        pair_iso_map(11, (3, 3))


def test_check_isomorphism_pair_cerny_11():
    res = check_isomorphism(pair_automaton(gen_cerny(11)), gen_pn(11), pair_iso_mapping(11))
    assert res.ok and bool(res)


def test_check_isomorphism_identity():
    P = gen_pn(7)
    assert check_isomorphism(P, P, list(P.states))
    assert check_isomorphism(P, P, {s: s for s in P.states})


def test_check_isomorphism_detects_swap():
    P = gen_pn(11)
    idx = {st: i for i, st in enumerate(pn_states(11))}
    phi = list(P.states)
    u, v = idx[(0, 1)], idx[(3, 2)]
    phi[u], phi[v] = phi[v], phi[u]
    res = check_isomorphism(P, P, phi)
    assert not res
    assert "letter" in res.diagnostic


def test_check_isomorphism_rejects_non_bijection():
    P = gen_pn(5)
    res = check_isomorphism(P, P, [0] * P.num_states)
    assert not res and "bijection" in res.diagnostic
    assert not check_isomorphism(P, P, {0: 0})
    assert not check_isomorphism(P, gen_pn(7), list(P.states))


@pytest.mark.parametrize("n", range(3, 16, 2))
def test_pair_cerny_isomorphic_to_pn(n):
    assert check_isomorphism(pair_automaton(gen_cerny(n)), gen_pn(n), pair_iso_mapping(n))
