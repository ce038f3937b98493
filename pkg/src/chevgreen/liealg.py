"""The simple Lie algebra inside End(M), M = span{u_i} + span{v_alpha}.

The operators e_i, f_i act on M by explicit integer formulas in terms of root
strings; the epsilon-canonical Chevalley basis is then obtained by the bracket
recursion along root heights.  All matrices are exact integer matrices, stored
as scipy CSR arrays (int64).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .weyl import RootSystem


class CanonicalBasisError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModuleBasis:
    """Ordering of the basis of M by decreasing height."""
    labels: tuple        # ("v", root_index) or ("u", i)
    root_pos: np.ndarray  # root index -> position in M
    u_pos: np.ndarray     # i -> position of u_i
    weight_height: np.ndarray  # height of each basis vector (0 for u_i)

    @property
    def dim(self) -> int:
        return len(self.labels)


def module_basis(rs: RootSystem) -> ModuleBasis:
    N = rs.positive_count
    pos = sorted(range(N), key=lambda k: (-rs.height[k], k))
    neg = sorted(range(N, 2 * N), key=lambda k: (-rs.height[k], k))
    labels = [("v", k) for k in pos] + [("u", i) for i in range(rs.rank)] + [("v", k) for k in neg]
    root_pos = np.zeros(rs.size, dtype=np.int64)
    u_pos = np.zeros(rs.rank, dtype=np.int64)
    hts = np.zeros(len(labels), dtype=np.int64)
    for m, (kind, k) in enumerate(labels):
        if kind == "v":
            root_pos[k] = m
            hts[m] = rs.height[k]
        else:
            u_pos[k] = m
    for a in (root_pos, u_pos, hts):
        a.setflags(write=False)
    return ModuleBasis(tuple(labels), root_pos, u_pos, hts)


def _csr(rows, cols, vals, n):
    return sp.csr_array((np.array(vals, dtype=np.int64), (np.array(rows, dtype=np.int64),
                         np.array(cols, dtype=np.int64))), shape=(n, n), dtype=np.int64)


def bracket(a, b):
    c = (a @ b - b @ a).tocsr()
    c.eliminate_zeros()
    return c


def _is_zero(a) -> bool:
    a = a.tocsr()
    a.eliminate_zeros()
    return a.nnz == 0


def _equal(a, b) -> bool:
    return _is_zero(a - b)


@dataclass
class AdjointRep:
    rs: RootSystem
    basis: ModuleBasis
    e: list
    f: list
    h: list
    canonical: dict = field(default_factory=dict)  # root index -> CSR matrix
    epsilon: tuple = ()

    @property
    def dim(self) -> int:
        return self.basis.dim

    def dense(self, mat) -> np.ndarray:
        return mat.toarray()


def build_operators(rs: RootSystem) -> AdjointRep:
    """e_i, f_i on M by the root-string formulas, and h_i = [e_i, f_i]."""
    basis = module_basis(rs)
    n = basis.dim
    A = rs.cartan.matrix
    p, q = rs.string_constants
    N = rs.positive_count
    es, fs = [], []
    for i in range(rs.rank):
        ai, mai = i, i + N  # indices of alpha_i and -alpha_i
        er, ec, ev = [], [], []
        fr, fc, fv = [], [], []
        for j in range(rs.rank):
            if A[j][i]:
                er.append(basis.root_pos[ai]); ec.append(basis.u_pos[j]); ev.append(abs(A[j][i]))
                fr.append(basis.root_pos[mai]); fc.append(basis.u_pos[j]); fv.append(abs(A[j][i]))
        for k in range(rs.size):
            if k == mai:
                er.append(basis.u_pos[i]); ec.append(basis.root_pos[k]); ev.append(1)
            elif k != ai:
                s = rs.add(ai, k)
                if s is not None:
                    er.append(basis.root_pos[s]); ec.append(basis.root_pos[k]); ev.append(q[ai, k] + 1)
            if k == ai:
                fr.append(basis.u_pos[i]); fc.append(basis.root_pos[k]); fv.append(1)
            elif k != mai:
                d = rs.add(mai, k)
                if d is not None:
                    fr.append(basis.root_pos[d]); fc.append(basis.root_pos[k]); fv.append(p[ai, k] + 1)
        es.append(_csr(er, ec, ev, n))
        fs.append(_csr(fr, fc, fv, n))
    hs = [bracket(es[i], fs[i]) for i in range(rs.rank)]
    return AdjointRep(rs, basis, es, fs, hs)


# -- relation checks -----------------------------------------------------------

@dataclass
class RelationReport:
    label: str
    dimension: int
    expected_dimension: int
    failures: list  # (family, i, j)
    families: dict  # family -> bool

    @property
    def ok(self) -> bool:
        return not self.failures and self.dimension == self.expected_dimension

    def lines(self):
        out = [f"type {self.label}", f"dim {self.dimension} expected {self.expected_dimension}"]
        for fam, good in self.families.items():
            out.append(f"{fam} {'pass' if good else 'FAIL'}")
        for fam, i, j in self.failures:
            out.append(f"failure {fam} i={i + 1} j={j + 1}" if j is not None else f"failure {fam}")
        out.append(f"chevalley_relations {'true' if self.ok else 'false'}")
        return out


def verify_chevalley_relations(rep: AdjointRep) -> RelationReport:
    """Check the defining relations of the e_i, f_i, h_i and the dimension of
    the Lie algebra they generate.

    With a_ij = <alpha_j, alpha_i^vee> (so s_i(alpha_j) = alpha_j - a_ij alpha_i)
    the relations are [h_i, e_j] = a_ij e_j, [h_i, f_j] = -a_ij f_j,
    [e_i, f_j] = 0 (i != j) and ad(e_i)^{1 - a_ij} e_j = 0.
    """
    rs = rep.rs
    A = rs.cartan.matrix
    r = rs.rank
    failures = []
    fam = {"h_commute": True, "h_eigen": True, "ef_orthogonal": True, "serre": True,
           "h_diagonal": True, "span_dimension": True}

    def fail(name, i, j):
        fam[name] = False
        failures.append((name, i, j))

    for i in range(r):
        h = rep.h[i]
        if not _is_zero(h - sp.diags_array(h.diagonal()).tocsr()):
            fail("h_diagonal", i, None)
        for j in range(r):
            if not _is_zero(bracket(h, rep.h[j])):
                fail("h_commute", i, j)
            if not _equal(bracket(h, rep.e[j]), A[i][j] * rep.e[j]):
                fail("h_eigen", i, j)
            if not _equal(bracket(h, rep.f[j]), -A[i][j] * rep.f[j]):
                fail("h_eigen", i, j)
            if i != j:
                if not _is_zero(bracket(rep.e[i], rep.f[j])):
                    fail("ef_orthogonal", i, j)
                xe, xf = rep.e[j], rep.f[j]
                for _ in range(1 - A[i][j]):
                    xe = bracket(rep.e[i], xe)
                    xf = bracket(rep.f[i], xf)
                if not (_is_zero(xe) and _is_zero(xf)):
                    fail("serre", i, j)
    dim = generated_dimension(rep)
    expected = r + rs.size
    if dim != expected:
        fam["span_dimension"] = False
    return RelationReport(rs.label, dim, expected, failures, fam)


def generated_dimension(rep: AdjointRep) -> int:
    """Dimension of the Lie algebra generated by the e_i and f_i.

    Iterated brackets of generators are homogeneous for the root grading, so
    independence is tested inside each weight space separately (exactly, over
    the rationals).  A nonzero element of a weight that is neither a root nor
    zero counts towards the dimension too, so broken operators show up as a
    dimension mismatch.
    """
    rs = rep.rs
    r = rs.rank
    spaces: dict = {}  # weight -> list of reduced rows (dict col -> Fraction)

    def add(weight, mat):
        vec = _as_vector(mat)
        if not vec:
            return False
        rows = spaces.setdefault(weight, [])
        v = dict(vec)
        for piv, row in rows:
            c = v.get(piv)
            if c:
                for k, x in row.items():
                    y = v.get(k, 0) - c * x
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
        if not v:
            return False
        piv = min(v)
        c = v[piv]
        v = {k: x / c for k, x in v.items()}
        # keep rows fully reduced against the new pivot
        for idx, (p2, row) in enumerate(rows):
            c2 = row.get(piv)
            if c2:
                for k, x in v.items():
                    y = row.get(k, 0) - c2 * x
                    if y:
                        row[k] = y
                    else:
                        row.pop(k, None)
        rows.append((piv, v))
        return True

    gens = []
    for i in range(r):
        w = tuple(int(k == i) for k in range(r))
        gens.append((w, rep.e[i]))
        gens.append((tuple(-x for x in w), rep.f[i]))
    frontier = []
    for w, g in gens:
        if add(w, g):
            frontier.append((w, g))
    while frontier:
        nxt = []
        for w, x in frontier:
            for gw, g in gens:
                nw = tuple(a + b for a, b in zip(w, gw))
                y = bracket(g, x)
                if y.nnz and add(nw, y):
                    nxt.append((nw, y))
        frontier = nxt
    return sum(len(v) for v in spaces.values())


def _as_vector(mat):
    m = mat.tocoo()
    n = m.shape[1]
    return {int(a) * n + int(b): Fraction(int(v)) for a, b, v in zip(m.row, m.col, m.data) if v}


# -- canonical Chevalley basis -------------------------------------------------

def canonical_basis(rep: AdjointRep, epsilon=None, pivot: str = "smallest") -> dict:
    """The epsilon-canonical Chevalley basis {e_alpha}, keyed by root index.

    e_{alpha_i} = eps(i) e_i and e_{-alpha_i} = -eps(i) f_i; for higher roots
    [e_i, e_alpha] = (q_{alpha_i,alpha} + 1) e_{alpha + alpha_i} and
    [f_i, e_alpha] = (p_{alpha_i,alpha} + 1) e_{alpha - alpha_i} on the negative
    side.  The pivot i is the smallest (or largest) admissible index; every
    other admissible index is checked against the result.
    """
    rs = rep.rs
    eps = tuple(epsilon) if epsilon is not None else rs.cartan.epsilon
    N = rs.positive_count
    p, q = rs.string_constants
    out = {}
    for i in range(rs.rank):
        out[i] = (eps[i] * rep.e[i]).tocsr()
        out[i + N] = (-eps[i] * rep.f[i]).tocsr()
    for k in range(rs.rank, N):  # positive roots in height order
        cand = [i for i in range(rs.rank) if rs.index.get(tuple(rs.coords[k] - rs.coords[i])) is not None]
        i = cand[0] if pivot == "smallest" else cand[-1]
        prev = rs.index[tuple(rs.coords[k] - rs.coords[i])]
        out[k] = _exact_div(bracket(rep.e[i], out[prev]), q[i, prev] + 1, rs, k)
        mk = k + N
        mprev = prev + N
        out[mk] = _exact_div(bracket(rep.f[i], out[mprev]), p[i, mprev] + 1, rs, mk)
    # cross-check every admissible pivot
    for k in range(rs.size):
        for i in range(rs.rank):
            s = rs.add(i, k)
            if s is not None and not _equal(bracket(rep.e[i], out[k]), (q[i, k] + 1) * out[s]):
                raise CanonicalBasisError(f"inconsistent canonical basis at root {list(rs.roots[s])}")
            d = rs.add(i + N, k)
            if d is not None and not _equal(bracket(rep.f[i], out[k]), (p[i, k] + 1) * out[d]):
                raise CanonicalBasisError(f"inconsistent canonical basis at root {list(rs.roots[d])}")
    rep.canonical = out
    rep.epsilon = eps
    return out


def _exact_div(mat, c, rs, k):
    mat = mat.tocsr()
    if np.any(mat.data % c):
        raise CanonicalBasisError(f"non-integral canonical basis element at root {list(rs.roots[k])}")
    out = mat.copy()
    out.data //= c
    return out


def structure_constant(rep: AdjointRep, a: int, b: int):
    """N_{a,b} with [e_a, e_b] = N e_{a+b}; None if a + b is not a root."""
    s = rep.rs.add(a, b)
    if s is None:
        return None
    br = bracket(rep.canonical[a], rep.canonical[b])
    target = rep.canonical[s]
    t = target.tocoo()
    r0, c0, v0 = int(t.row[0]), int(t.col[0]), int(t.data[0])
    val = int(br[r0, c0])
    if val % v0:
        raise CanonicalBasisError("bracket not proportional to a basis element")
    nab = val // v0
    if not _equal(br, nab * target):
        raise CanonicalBasisError("bracket not proportional to a basis element")
    return nab


def adjoint_rep(label_or_rs, epsilon=None) -> AdjointRep:
    """Operators plus canonical basis (cached per type and sign function)."""
    from .weyl import root_system
    rs = root_system(label_or_rs) if isinstance(label_or_rs, str) else label_or_rs
    eps = tuple(epsilon) if epsilon is not None else rs.cartan.epsilon
    key = (rs.label, eps)
    if key not in _REP_CACHE:
        rep = build_operators(rs)
        canonical_basis(rep, eps)
        _REP_CACHE[key] = rep
    return _REP_CACHE[key]


_REP_CACHE: dict = {}


def sparse_triples(mat):
    """Rows ``row col value`` (0-based) of a sparse integer matrix."""
    m = mat.tocoo()
    order = np.lexsort((m.col, m.row))
    return [f"{int(m.row[t])} {int(m.col[t])} {int(m.data[t])}" for t in order if m.data[t]]
