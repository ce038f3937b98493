import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chevgreen.weyl import (EnumerationCapError, build_cartan, conjugacy_classes,
                            enumerate_by_length, generate_roots, inversion_set, poincare,
                            quotient_length_counts, root_system, torus_order, _poly_mul)

LABELS = ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4", "E6", "E7", "E8"]


def test_cartan_examples():
    g2 = build_cartan("G2")
    assert g2.matrix == ((2, -1), (-3, 2))
    assert g2.epsilon == (1, -1)
    assert build_cartan("B3").matrix == ((2, -2, 0), (-1, 2, -1), (0, -1, 2))
    e7 = build_cartan("E7").epsilon
    # nodes 1..6 as labelled in the Dynkin table; node 7 is forced by alternation
    assert e7[:6] == (1, -1, -1, 1, -1, 1) and e7[6] == -e7[5]


@pytest.mark.parametrize("label", LABELS)
def test_cartan_invariants(label):
    c = build_cartan(label)
    c.check()
    A = c.array
    assert (np.diag(A) == 2).all()
    assert ((A == 0) == (A.T == 0)).all()


@pytest.mark.parametrize("bad", ["H3", "E9", "A0", "Gx", "D3"])
def test_cartan_rejects(bad):
    with pytest.raises(ValueError, match="|".join([bad[:1], bad])):
        build_cartan(bad)


def test_root_counts():
    sizes = {"G2": 12, "F4": 48, "E6": 72, "E7": 126, "E8": 240}
    for label, n in sizes.items():
        rs = root_system(label)
        assert rs.size == n and rs.positive_count == n // 2


def test_b2_roots():
    rs = root_system("B2")
    assert set(rs.roots) == {(1, 0), (0, 1), (1, 1), (2, 1), (-1, 0), (0, -1), (-1, -1), (-2, -1)}


@pytest.mark.parametrize("label", LABELS)
def test_root_system_closed(label):
    rs = root_system(label)
    N = rs.positive_count
    assert all(sum(c) > 0 for c in rs.roots[:N])
    assert rs.roots[N:] == [tuple(-x for x in c) for c in rs.roots[:N]]
    for i in range(rs.rank):
        assert rs.roots[i] == tuple(int(i == j) for j in range(rs.rank))
        assert sorted(rs.reflection_table[i]) == list(range(rs.size))
    heights = rs.height[:N]
    assert (np.diff(heights) >= 0).all()


def test_generate_roots_matches_cached():
    assert generate_roots(build_cartan("F4")).roots == root_system("F4").roots


def test_inversion_sets():
    rs = root_system("G2")
    assert inversion_set(rs, rs.element(())) == []
    for i in range(rs.rank):
        assert inversion_set(rs, rs.element((i,))) == [i]
    assert inversion_set(rs, rs.longest_element()) == list(range(6))


@pytest.mark.parametrize("label", ["G2", "B3", "F4", "E6"])
def test_length_equals_inversions(label):
    rs = root_system(label)
    for w in enumerate_by_length(rs, 6):
        assert len(inversion_set(rs, w)) == w.length == len(w.word)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["B3", "F4", "E6", "E7"]), st.lists(st.integers(0, 6), max_size=12))
def test_word_independence(label, word):
    """Any word and the canonical reduced word of the same element act alike."""
    rs = root_system(label)
    word = [i % rs.rank for i in word]
    perm = rs.word_perm(word)
    w = rs.element_from_perm(perm)
    assert np.array_equal(rs.word_perm(w.word), perm)
    assert w.length == rs.length(perm) <= len(word)


def test_empty_word_identity():
    rs = root_system("E6")
    assert np.array_equal(rs.word_perm(()), np.arange(rs.size))


def test_e6_enumeration():
    rs = root_system("E6")
    elems = enumerate_by_length(rs, 12)
    assert len(elems) == 8335
    assert sum(3 ** w.length for w in elems) == 1569060811
    S = [4, 3, 2, 0, 5]
    filt = enumerate_by_length(rs, 12, filter=S)
    assert len(filt) == 47
    assert sum(3 ** w.length for w in filt) == 4220491
    words = {w.word for w in elems}
    assert {w.word for w in filt} <= words
    N = rs.positive_count
    assert all(w.perm[a] < N for w in filt for a in S)


def test_filter_with_nonsimple_roots():
    rs = root_system("F4")
    S = [rs.root_index((0, 1, 1, 0)), 0]
    filt = enumerate_by_length(rs, 5, filter=S)
    full = enumerate_by_length(rs, 5)
    expect = [w for w in full if all(w.perm[a] < rs.positive_count for a in S)]
    assert [w.word for w in filt] == [w.word for w in expect]


def test_reduced_words_lex_smallest():
    rs = root_system("B3")
    elems = enumerate_by_length(rs)
    best = {}
    for n in range(rs.positive_count + 1):
        for word in itertools.product(range(3), repeat=n):
            perm = rs.word_perm(word)
            if rs.length(perm) == n:
                best.setdefault(perm[:3].tobytes(), word)
    assert {w.perm[:3].tobytes(): w.word for w in elems} == best


def test_enumeration_cap():
    rs = root_system("E7")
    with pytest.raises(EnumerationCapError) as err:
        enumerate_by_length(rs, 10, cap=5000)
    assert err.value.completed_length >= 1


def test_g2_full():
    assert len(enumerate_by_length(root_system("G2"))) == 12


@pytest.mark.parametrize("label,order", [("G2", 12), ("F4", 1152), ("E6", 51840)])
def test_poincare_factorisation(label, order):
    P = poincare(root_system(label))
    assert P.order == order == np.prod(P.degrees)
    rhs = [1]
    for d in P.degrees:
        rhs = _poly_mul(rhs, [-1] + [0] * (d - 1) + [1])
    lhs = list(P.coefficients)
    for _ in range(len(P.degrees)):
        lhs = _poly_mul(lhs, [-1, 1])
    assert lhs == rhs


def test_g2_orders():
    P = poincare(root_system("G2"))
    assert P.degrees == (2, 6)
    assert P.coset_count(2) == 189
    assert P.group_order(2) == 12096


def test_bundled_degrees():
    assert poincare(root_system("E7")).order == 2903040
    assert poincare(root_system("E8")).order == 696729600


def test_quotient_length_counts():
    rs = root_system("E6")
    counts = quotient_length_counts(rs, [4, 3, 2, 0, 5])
    filt = enumerate_by_length(rs, 12, filter=[4, 3, 2, 0, 5])
    assert counts[:13] == [sum(1 for w in filt if w.length == n) for n in range(13)]


@pytest.mark.parametrize("label,n", [("G2", 6), ("F4", 25), ("A1", 2)])
def test_class_counts(label, n):
    rs = root_system(label)
    classes = conjugacy_classes(rs)
    assert len(classes) == n
    assert sum(c.size for c in classes) == poincare(rs).order
    for c in classes:
        assert c.representative.length == len(c.representative.word)
    if label == "A1":
        assert [c.size for c in classes] == [1, 1]


def test_torus_small():
    rs = root_system("A1")
    assert torus_order(rs, rs.element(()), 3) == 2
    assert torus_order(rs, rs.element((0,)), 3) == 4
    g2 = root_system("F4")
    assert torus_order(g2, g2.element(()), 5) == 4 ** 4


@pytest.mark.parametrize("label", ["G2", "F4"])
@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_steinberg_identity(label, q):
    rs = root_system(label)
    P = poincare(rs)
    G = P.group_order(q)
    total = 0
    for c in conjugacy_classes(rs):
        T = torus_order(rs, c.representative, q)
        assert G % T == 0
        total += c.size * (G // T)
    assert total == P.order * q ** (2 * rs.positive_count)
