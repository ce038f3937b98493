import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chevgreen.chevgroup import (ChevalleyGroup, FrobeniusSpec, UnknownRootError, WordSyntaxError,
                                 parse_word, sign_variants, torus_canonicalise)
from chevgreen.gfp import FieldError, field, format_partition, is_upper_triangular, jordan_type
from chevgreen.weyl import enumerate_by_length

from conftest import group

F4_A1 = "x[1,0,0,0](1)*x[0,1,0,0](1)*x[0,1,1,0](1)*x[0,0,1,1](1)"
F4_A3 = "x[1,1,0,0](1)*x[0,1,2,0](-1)*x[0,1,2,2](1)*x[1,1,2,2](-1)"
F4_C3A1 = "x[0,1,0,0](1)*x[0,0,0,1](1)*x[0,1,2,0](1)"


def test_parse_roundtrip():
    for text in (F4_A1, F4_A3, "h[1,0](2)*n[0,1](-1)", "x[1,1](z+1)"):
        spec = parse_word(text)
        assert parse_word(spec.text()) == spec
    assert len(parse_word("")) == 0


@pytest.mark.parametrize("bad", ["x[1,0](1)x[0,1](1)", "y[1,0](1)", "x[1,0]()", "x[1,0](1)*"])
def test_parse_errors(bad):
    with pytest.raises(WordSyntaxError, match="position"):
        parse_word(bad)


def test_unknown_root():
    g = group("F4", 3)
    with pytest.raises(UnknownRootError):
        g.evaluate("x[9,9,9,9](1)")
    with pytest.raises(FieldError):
        g.evaluate("x[1,0,0,0](z)")
    assert g.evaluate("") == g.identity()


def test_root_elements():
    g = group("G2", 5)
    N = g.rs.positive_count
    for r in range(g.rs.size):
        assert g.x(r, 0) == g.identity()
        for s, t in [(1, 2), (3, 4), (2, 2)]:
            assert g.x(r, s) @ g.x(r, t) == g.x(r, (s + t) % 5)
        c = g.x(r, 1).codes()
        assert (np.diag(c) == 1).all()
        assert not (np.tril(c, -1) if r < N else np.triu(c, 1)).any()


def test_root_elements_gf9():
    g = group("G2", 9)
    fld = g.field
    for r in range(g.rs.size):
        for s, t in [(4, 5), (7, 8)]:
            assert g.x(r, s) @ g.x(r, t) == g.x(r, int(fld.add[s, t]))


def test_torus_and_weyl_reps():
    g = group("F4", 3)
    for r in range(g.rs.size):
        assert g.h_elem(r, 1) == g.identity()
        for t in (1, 2):
            c = g.h_elem(r, t).codes()
            assert np.array_equal(c, np.diag(np.diag(c)))
        n = g.n_elem(r, 1).codes()[:, g.basis.root_pos]
        assert ((n != 0).sum(axis=0) == 1).all()
    with pytest.raises(ValueError):
        g.n_elem(0, 0)


def test_weyl_conjugation_of_root_groups():
    """n_a(1) x_b(t) n_a(1)^-1 is a root element at s_a(b); only the sign is free."""
    g = group("G2", 5)
    rs = g.rs
    for a in range(rs.size):
        n = g.n_elem(a, 1)
        ninv = n.inverse()
        ca = np.array(rs.roots[a])
        for b in range(rs.size):
            cb = np.array(rs.roots[b])
            # s_a(b) = b - <b, a^vee> a, computed from the a-string through b
            p, q = rs.string_constants
            img = rs.root_index(cb - (q[a, b] - p[a, b]) * ca) if a % rs.positive_count != b % rs.positive_count else int(rs.negation[b])
            conj = n @ g.x(b, 2) @ ninv
            assert conj in (g.x(img, 2), g.x(img, 3))


def test_wdot_monomial_pattern():
    g = group("G2", 5)
    rs, b = g.rs, g.basis
    for w in enumerate_by_length(rs):
        c = g.wdot(w).codes()
        for k in range(rs.size):
            col = c[:, b.root_pos[k]]
            assert np.nonzero(col)[0].tolist() == [b.root_pos[w.perm[k]]]
    assert g.wdot(rs.element(())) == g.identity()
    assert g.wdot(rs.element((1,))) == g.n_elem(1, 1)


def test_wdot_conjugates_root_groups():
    g = group("G2", 5)
    rs = g.rs
    for w in enumerate_by_length(rs, 3):
        wd = g.wdot(w)
        wdi = wd.inverse()
        inv = np.argsort(w.perm)
        for beta in range(rs.size):
            conj = wdi @ g.x(beta, 1) @ wd
            assert conj in (g.x(int(inv[beta]), 1), g.x(int(inv[beta]), 4))


@pytest.mark.parametrize("label,q", [("G2", 2), ("G2", 5), ("F4", 3), ("E6", 3), ("B3", 7)])
def test_positive_words_unitriangular(label, q):
    g = group(label, q)
    rng = np.random.default_rng(q)
    for _ in range(10):
        roots = rng.integers(0, g.rs.positive_count, 6)
        ts = rng.integers(0, g.field.q, 6)
        x = g.identity()
        for r, t in zip(roots, ts):
            x = x @ g.x(int(r), int(t))
        assert is_upper_triangular(x.matrix)
        assert (np.diag(x.codes()) == 1).all()


def test_jordan_types_f4():
    g = group("F4", 3)
    assert format_partition(jordan_type(g.evaluate(F4_A3).matrix)) == "7,6^2,5^3,3^6"
    for s in ("1", "-1"):
        u = g.evaluate(F4_C3A1.replace("x[0,1,2,0](1)", f"x[0,1,2,0]({s})"))
        assert format_partition(jordan_type(u.matrix)) == "7,6^2,5,4^4,3^3,1^3"


def test_torus_orbits_f4():
    g = group("F4", 3)
    assert len(torus_canonicalise(sign_variants(F4_A1), g)) == 1
    orbits = torus_canonicalise(sign_variants(F4_C3A1), g)
    assert len(orbits) == 2
    reps = [sign_variants(F4_C3A1)[o[0]] for o in orbits]
    plus = g.evaluate(F4_C3A1)
    minus = g.evaluate(F4_C3A1.replace("x[0,1,2,0](1)", "x[0,1,2,0](-1)"))
    found = {g.evaluate(r) for r in reps}
    assert len(found) == 2
    index = {g.evaluate(v): k for k, v in enumerate(sign_variants(F4_C3A1))}
    groups = [set(o) for o in orbits]
    assert not any(index[plus] in o and index[minus] in o for o in groups)
    assert torus_canonicalise([F4_A1], g) == [[0]]


def test_e6_x18_sign_variants_one_orbit():
    g = group("E6", 3)
    x18 = ("x[0,0,0,0,1,0](1)*x[0,0,0,1,0,0](1)*x[0,0,1,0,0,0](1)*x[1,0,0,0,0,0](1)"
           "*x[0,0,0,0,0,1](1)*x[1,1,1,1,1,1](1)")
    assert len(torus_canonicalise(sign_variants(x18), g)) == 1


def test_split_frobenius():
    g = group("G2", 9)
    fld = g.field
    frob = FrobeniusSpec(3)
    for r in range(g.rs.size):
        for t in range(9):
            assert g.frobenius(g.x(r, t), frob) == g.x(r, fld.power(t, 3))
    g3 = group("G2", 3)
    with pytest.raises(FieldError):
        g3.frobenius(g.x(0, 1))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 11), st.integers(0, 8)), min_size=1, max_size=6))
def test_frobenius_homomorphism(factors):
    g = group("G2", 9)
    frob = FrobeniusSpec(3)
    prod = g.identity()
    image = g.identity()
    for r, t in factors:
        x = g.x(r, t)
        prod = prod @ x
        image = image @ g.frobenius(x, frob)
    assert g.frobenius(prod, frob) == image


def test_tau_involution_and_generators():
    g = group("E6", 3, True)
    tau = g.tau
    assert np.array_equal(tau[tau], np.arange(g.n))
    gamma = g.rs.graph_automorphism
    for i in range(g.rs.rank):
        for t in range(1, 3):
            assert g.apply_tau(g.x(i, t)) == g.x(int(gamma[i]), t)
    for r in range(g.rs.size):
        e = g.rep.canonical[r].toarray()
        img = np.empty_like(e)
        img[np.ix_(tau, tau)] = e
        assert np.array_equal(img, g.rep.canonical[int(gamma[r])].toarray())


def test_twisted_fixed_elements():
    g = group("E6", 3, True)
    fld = g.field
    gamma = g.rs.graph_automorphism
    sub = fld.subfield(3)
    for r in range(g.rs.positive_count):
        if gamma[r] == r:
            for t in sub:
                assert g.is_fixed(g.x(r, t))
        elif r < gamma[r]:
            for t in range(fld.q):
                x = g.x(r, t) @ g.x(int(gamma[r]), fld.power(t, 3))
                assert g.is_fixed(x)


def test_twisted_needs_e6():
    with pytest.raises(ValueError):
        ChevalleyGroup("F4", field(9), twisted=True)


def test_fixed_wdot():
    g = group("E6", 3, True)
    gamma = g.rs.graph_automorphism
    for w in enumerate_by_length(g.rs, 4):
        if np.array_equal(gamma[w.perm], w.perm[gamma]):
            wd, _ = g.fixed_wdot(w)
            assert g.is_fixed(wd)
