import numpy as np
import pytest

from chevgreen.liealg import (CanonicalBasisError, adjoint_rep, bracket, build_operators,
                              canonical_basis, module_basis, sparse_triples, structure_constant,
                              verify_chevalley_relations)
from chevgreen.weyl import root_system

TYPES = ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4", "E6"]


@pytest.mark.parametrize("label", TYPES)
def test_relations(label):
    rs = root_system(label)
    rep = build_operators(rs)
    report = verify_chevalley_relations(rep)
    assert report.ok, report.lines()
    assert report.dimension == rs.rank + rs.size
    assert report.lines()[-1] == "chevalley_relations true"


@pytest.mark.parametrize("label,dim", [("E7", 133), ("E8", 248)])
def test_big_dimensions(label, dim):
    rep = build_operators(root_system(label))
    assert rep.dim == dim
    assert rep.e[0].shape == (dim, dim)


def test_module_basis_order():
    rs = root_system("F4")
    b = module_basis(rs)
    hts = [rs.height[k] if kind == "v" else 0 for kind, k in b.labels]
    assert hts == sorted(hts, reverse=True)
    assert b.dim == 52


def test_e_i_on_cartan():
    rs = root_system("G2")
    rep = build_operators(rs)
    A = rs.cartan.matrix
    for i in range(rs.rank):
        E = rep.e[i].toarray()
        for j in range(rs.rank):
            col = E[:, rep.basis.u_pos[j]]
            expect = np.zeros(rep.dim, dtype=np.int64)
            expect[rep.basis.root_pos[i]] = abs(A[j][i])
            assert np.array_equal(col, expect)


@pytest.mark.parametrize("label", ["G2", "F4", "E6"])
def test_triangular_shapes(label):
    rep = build_operators(root_system(label))
    for i in range(rep.rs.rank):
        E, F, H = (m.toarray() for m in (rep.e[i], rep.f[i], rep.h[i]))
        assert not np.tril(E).any()
        assert not np.triu(F).any()
        assert np.array_equal(H, np.diag(np.diag(H)))


def test_serre_negative_control():
    rs = root_system("G2")
    rep = build_operators(rs)
    E = rep.e[0].tolil()
    r, c = rep.basis.root_pos[2], rep.basis.root_pos[1]
    E[r, c] = E[r, c] + 1
    rep.e[0] = E.tocsr()
    report = verify_chevalley_relations(rep)
    assert not report.ok
    assert not report.families["serre"]
    assert any(f[0] == "serre" for f in report.failures)


def test_epsilon_flip():
    rs = root_system("F4")
    rep = build_operators(rs)
    eps = rs.cartan.epsilon
    plus = {k: m.copy() for k, m in canonical_basis(rep, eps).items()}
    minus = canonical_basis(build_operators(rs), tuple(-e for e in eps))
    for k in plus:
        assert (plus[k] + minus[k]).count_nonzero() == 0


def test_simple_root_normalisation():
    rep = adjoint_rep("E6")
    eps = rep.rs.cartan.epsilon
    N = rep.rs.positive_count
    for i in range(rep.rs.rank):
        assert (rep.canonical[i] - eps[i] * rep.e[i]).count_nonzero() == 0
        assert (rep.canonical[i + N] + eps[i] * rep.f[i]).count_nonzero() == 0


def test_f4_structure_constants():
    rep = adjoint_rep("F4")
    rs = rep.rs
    _, q = rs.string_constants
    n = 0
    for a in range(rs.size):
        for b in range(rs.size):
            if rs.add(a, b) is None:
                continue
            assert abs(structure_constant(rep, a, b)) == q[a, b] + 1
            n += 1
    assert n > 0
    assert structure_constant(rep, 0, 0) is None


@pytest.mark.parametrize("label", ["G2", "F4"])
def test_pivot_independence(label):
    rs = root_system(label)
    small = canonical_basis(build_operators(rs), pivot="smallest")
    large = canonical_basis(build_operators(rs), pivot="largest")
    for k in small:
        assert (small[k] - large[k]).count_nonzero() == 0


def test_broken_strings_detected():
    rs = root_system("B3")
    rep = build_operators(rs)
    E = rep.e[1].tolil()
    E[:, :] = E.toarray() * 2
    rep.e[1] = E.tocsr()
    with pytest.raises(CanonicalBasisError, match="root"):
        canonical_basis(rep)


@pytest.mark.parametrize("label", ["G2", "F4"])
def test_canonical_nilpotent_and_eigen(label):
    rep = adjoint_rep(label)
    rs = rep.rs
    for k, m in rep.canonical.items():
        M = m.toarray()
        P = np.linalg.matrix_power(M, rep.dim)
        assert not P.any()
        for i in range(rs.rank):
            br = bracket(rep.h[i], m)
            A = rs.cartan.matrix
            weight = sum(rs.roots[k][j] * A[i][j] for j in range(rs.rank))
            assert (br - weight * m).count_nonzero() == 0


def test_positive_canonical_upper():
    rep = adjoint_rep("F4")
    N = rep.rs.positive_count
    for k, m in rep.canonical.items():
        M = m.toarray()
        assert not (np.tril(M) if k < N else np.triu(M)).any()


def test_sparse_triples():
    rep = adjoint_rep("A1")
    lines = sparse_triples(rep.canonical[0])
    assert lines and all(len(ln.split()) == 3 for ln in lines)
