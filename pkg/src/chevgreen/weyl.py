"""Cartan data, root systems and Weyl group combinatorics.

Simple roots are labelled 1..r in the user-facing notation (words, filters,
checkpoint files) and 0..r-1 internally.  A Weyl element is stored as the
permutation it induces on the root list: ``perm[j]`` is the index of
``w(roots[j])``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

RANK_BOUNDS = {"A": (1, 8), "B": (2, 8), "C": (2, 8), "D": (4, 8),
               "E": (6, 8), "F": (4, 4), "G": (2, 2)}

# Degrees of the basic invariants for the types whose Weyl groups are too
# large to enumerate.
BUNDLED_DEGREES = {"E7": (2, 6, 8, 10, 12, 14, 18),
                   "E8": (2, 8, 12, 14, 18, 20, 24, 30)}

ROOT_CAP = 1000


class EnumerationCapError(RuntimeError):
    """Raised when a Weyl enumeration would exceed its memory cap."""

    def __init__(self, message, completed_length=None, partial=None):
        super().__init__(message)
        self.completed_length = completed_length
        self.partial = partial


@dataclass(frozen=True)
class CartanDatum:
    label: str
    matrix: tuple  # tuple of row tuples, a_ij = matrix[i][j]
    epsilon: tuple

    @property
    def rank(self) -> int:
        return len(self.matrix)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=np.int64)

    def check(self) -> None:
        A = self.matrix
        r = len(A)
        for i in range(r):
            if A[i][i] != 2:
                raise ValueError(f"{self.label}: a_{i+1}{i+1} != 2")
            for j in range(r):
                if i == j:
                    continue
                if A[i][j] not in (0, -1, -2, -3):
                    raise ValueError(f"{self.label}: bad entry a_{i+1}{j+1}={A[i][j]}")
                if (A[i][j] == 0) != (A[j][i] == 0):
                    raise ValueError(f"{self.label}: a_{i+1}{j+1}, a_{j+1}{i+1} not both zero")
                if A[i][j] != 0 and self.epsilon[i] != -self.epsilon[j]:
                    raise ValueError(f"{self.label}: epsilon not alternating on edge {i+1}-{j+1}")


def _edges(series: str, n: int):
    """Return (simple edges, directed double/triple edges) of the diagram.

    A directed edge (i, j, m) means a_ij = -1 and a_ji = -m, i.e. the arrow
    points towards j and alpha_j is the shorter root.
    """
    chain = [(i, i + 1) for i in range(n - 1)]
    if series == "A":
        return chain, []
    if series == "B":
        # alpha_1 short: arrow from node 2 towards node 1
        return chain[1:], [(1, 0, 2)]
    if series == "C":
        # alpha_1 long, the others short
        return chain[1:], [(0, 1, 2)]
    if series == "D":
        return [(0, 2), (1, 2)] + [(i, i + 1) for i in range(2, n - 1)], []
    if series == "E":
        simple = [(0, 2), (2, 3), (1, 3)] + [(i, i + 1) for i in range(3, n - 1)]
        return simple, []
    if series == "F":
        return [(0, 1), (2, 3)], [(1, 2, 2)]
    if series == "G":
        return [], [(0, 1, 3)]
    raise ValueError(series)


def build_cartan(label: str) -> CartanDatum:
    """Cartan matrix and sign function for a label such as ``"G2"`` or ``"E6"``."""
    m = re.fullmatch(r"\s*([A-Ga-g])\s*_?\s*(\d+)\s*", label)
    if not m:
        raise ValueError(f"unknown Cartan type label: {label!r}")
    series, n = m.group(1).upper(), int(m.group(2))
    lo, hi = RANK_BOUNDS[series]
    if not lo <= n <= hi:
        raise ValueError(f"unsupported rank in label {label!r}: {series}{n}")
    A = [[2 if i == j else 0 for j in range(n)] for i in range(n)]
    simple, directed = _edges(series, n)
    for i, j in simple:
        A[i][j] = A[j][i] = -1
    for i, j, mult in directed:
        A[i][j] = -1
        A[j][i] = -mult
    # two-colouring of the (connected) diagram with epsilon(1) = +1
    eps = [0] * n
    eps[0] = 1
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(n):
            if j != i and A[i][j] != 0 and eps[j] == 0:
                eps[j] = -eps[i]
                stack.append(j)
    cd = CartanDatum(f"{series}{n}", tuple(map(tuple, A)), tuple(eps))
    cd.check()
    return cd


def _height_key(c):
    return (sum(c), tuple(-x for x in c))


class RootSystem:
    """Roots in simple-root coordinates with reflection tables.

    Positive roots are sorted by height, ties by decreasing coordinate
    vector, so ``roots[i]`` is the simple root alpha_{i+1} for i < rank.
    Negative roots follow, in the same order.
    """

    def __init__(self, cartan: CartanDatum):
        self.cartan = cartan
        A = cartan.matrix
        r = cartan.rank
        self.rank = r
        simple = [tuple(int(i == j) for j in range(r)) for i in range(r)]
        found = set(simple)
        frontier = list(simple)
        while frontier:
            nxt = []
            for b in frontier:
                for i in range(r):
                    img = _reflect(A, i, b)
                    if img not in found:
                        found.add(img)
                        nxt.append(img)
                        if len(found) > ROOT_CAP:
                            raise ValueError(f"{cartan.label}: root closure exceeds {ROOT_CAP}")
            frontier = nxt
        pos = sorted((c for c in found if sum(c) > 0), key=_height_key)
        neg = [tuple(-x for x in c) for c in pos]
        if set(pos) | set(neg) != found:
            raise ValueError(f"{cartan.label}: roots are not all positive or negative")
        self.roots = pos + neg
        self.positive_count = len(pos)
        self.index = {c: k for k, c in enumerate(self.roots)}
        N = self.positive_count
        self.coords = np.array(self.roots, dtype=np.int64)
        self.height = self.coords.sum(axis=1)
        self.negation = np.array([(k + N) % (2 * N) for k in range(2 * N)], dtype=np.int64)
        self.reflection_table = np.array(
            [[self.index[_reflect(A, i, c)] for c in self.roots] for i in range(r)],
            dtype=np.int64)

    def __repr__(self):
        return f"RootSystem({self.cartan.label}, |Phi|={len(self.roots)})"

    @property
    def label(self) -> str:
        return self.cartan.label

    @property
    def size(self) -> int:
        return len(self.roots)

    def is_positive(self, k) -> bool:
        return k < self.positive_count

    def root_index(self, coords: Sequence[int]) -> int:
        try:
            return self.index[tuple(int(x) for x in coords)]
        except KeyError:
            raise KeyError(f"not a root of {self.label}: {list(coords)}") from None

    def add(self, a: int, b: int):
        """Index of roots[a] + roots[b], or None if that is not a root."""
        return self.index.get(tuple(x + y for x, y in zip(self.roots[a], self.roots[b])))

    @cached_property
    def string_constants(self):
        """Arrays (p, q) with p[a,b] = max{i : b + i a in Phi} and
        q[a,b] = max{i : b - i a in Phi}."""
        n = self.size
        p = np.zeros((n, n), dtype=np.int64)
        q = np.zeros((n, n), dtype=np.int64)
        for a in range(n):
            ca = self.coords[a]
            for b in range(n):
                cb = self.coords[b]
                i = 0
                while tuple(cb + (i + 1) * ca) in self.index:
                    i += 1
                p[a, b] = i
                i = 0
                while tuple(cb - (i + 1) * ca) in self.index:
                    i += 1
                q[a, b] = i
        return p, q

    # -- Weyl group elements -------------------------------------------------

    def identity_perm(self) -> np.ndarray:
        return np.arange(self.size, dtype=np.int64)

    def word_perm(self, word: Iterable[int]) -> np.ndarray:
        """Root permutation of s_{i1} s_{i2} ... (0-based letters)."""
        perm = self.identity_perm()
        for i in word:
            perm = perm[self.reflection_table[i]]
        return perm

    def element(self, word: Sequence[int]) -> "WeylElement":
        """Weyl element of a word (0-based letters), with its canonical word."""
        perm = self.word_perm(word)
        return self.element_from_perm(perm)

    def element_from_perm(self, perm: np.ndarray) -> "WeylElement":
        perm = np.asarray(perm, dtype=np.int64)
        word = []
        cur = perm.copy()
        N = self.positive_count
        # peel off the smallest left descent: s_i w is shorter iff w^{-1}(alpha_i) < 0
        while True:
            inv = np.empty_like(cur)
            inv[cur] = np.arange(len(cur))
            desc = [i for i in range(self.rank) if inv[i] >= N]
            if not desc:
                break
            i = desc[0]
            word.append(i)
            cur = self.reflection_table[i][cur]
        return WeylElement(tuple(word), _freeze(perm), len(word))

    def length(self, perm: np.ndarray) -> int:
        N = self.positive_count
        return int(np.count_nonzero(perm[:N] >= N))

    def reflection_matrix(self, perm: np.ndarray) -> np.ndarray:
        """Matrix of w on the alpha-coordinate space (column i = w(alpha_i))."""
        return self.coords[perm[:self.rank]].T.copy()

    def longest_element(self) -> "WeylElement":
        cur = self.identity_perm()
        N = self.positive_count
        # keep multiplying on the right by a simple reflection that is not a descent
        while self.length(cur) < N:
            i = next(i for i in range(self.rank) if cur[i] < N)
            cur = cur[self.reflection_table[i]]
        return self.element_from_perm(cur)

    @cached_property
    def graph_automorphism(self):
        """Root permutation induced by the nontrivial diagram symmetry of E6
        (1<->6, 3<->5), or None for other types."""
        if self.label != "E6":
            return None
        sigma = [5, 1, 4, 3, 2, 0]
        return np.array([self.index[tuple(c[sigma[k]] for k in range(6))] for c in self.roots],
                        dtype=np.int64)

    @cached_property
    def simple_norms(self) -> tuple:
        """Squared lengths (alpha_i, alpha_i), scaled so the shortest is 1 on
        each component; from a_ij (alpha_i, alpha_i) = a_ji (alpha_j, alpha_j)."""
        A = self.cartan.matrix
        r = self.rank
        norm = [None] * r
        for root in range(r):
            if norm[root] is not None:
                continue
            norm[root] = Fraction(1)
            comp, stack = [root], [root]
            while stack:
                i = stack.pop()
                for j in range(r):
                    if A[i][j] and norm[j] is None:
                        norm[j] = norm[i] * A[i][j] / A[j][i]
                        comp.append(j)
                        stack.append(j)
            low = min(norm[i] for i in comp)
            for i in comp:
                norm[i] /= low
        return tuple(int(x) for x in norm)

    def is_long_simple(self, i: int) -> bool:
        return self.simple_norms[i] == max(self.simple_norms)


def _reflect(A, i, c):
    s = sum(c[j] * A[i][j] for j in range(len(c)))
    out = list(c)
    out[i] -= s
    return tuple(out)


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeylElement:
    word: tuple  # canonical (lexicographically smallest) reduced word, 0-based
    perm: np.ndarray = field(repr=False)
    length: int

    def __eq__(self, other):
        return isinstance(other, WeylElement) and np.array_equal(self.perm, other.perm)

    def __hash__(self):
        return hash(self.perm.tobytes())

    @property
    def label(self) -> str:
        """1-based comma-separated word; empty string for the identity."""
        return format_word(self.word)


def format_word(word: Sequence[int]) -> str:
    return ",".join(str(i + 1) for i in word)


def parse_weyl_word(text: str) -> tuple:
    text = text.strip()
    if not text or text in ("e", "()"):
        return ()
    return tuple(int(t) - 1 for t in re.split(r"[,\s]+", text) if t)


def generate_roots(cartan: CartanDatum) -> RootSystem:
    return RootSystem(cartan)


def root_system(label: str) -> RootSystem:
    return _root_system_cached(build_cartan(label).label)


_RS_CACHE: dict = {}


def _root_system_cached(label: str) -> RootSystem:
    if label not in _RS_CACHE:
        _RS_CACHE[label] = RootSystem(build_cartan(label))
    return _RS_CACHE[label]


def inversion_set(rs: RootSystem, w: WeylElement) -> list:
    """Indices of {alpha > 0 : w(alpha) < 0} in root order."""
    N = rs.positive_count
    return [k for k in range(N) if w.perm[k] >= N]


def enumerate_by_length(rs: RootSystem, maxlen: int | None = None,
                        filter: Iterable[int] | None = None,
                        cap: int = 2_000_000) -> list:
    """All Weyl elements of length <= maxlen, ordered by (length, word).

    ``filter`` is a collection of root indices S; only elements with
    w(alpha) > 0 for every alpha in S are kept.  When S consists of simple
    roots these are the minimal coset representatives for W_S, a set closed
    under deleting the first letter of a reduced word, so the search never
    leaves it.  For a general S the unfiltered set is enumerated and cut down.
    """
    if maxlen is None:
        maxlen = rs.positive_count
    if maxlen < 0:
        raise ValueError("maxlen must be >= 0")
    S = sorted(set(int(a) for a in filter)) if filter else []
    simple_only = all(a < rs.rank for a in S)
    prune = S if simple_only else []
    N = rs.positive_count
    refl = rs.reflection_table
    level_perms = rs.identity_perm()[None, :]
    level_words = [()]
    out = [WeylElement((), _freeze(level_perms[0]), 0)]
    total = 1
    for length in range(1, min(maxlen, N) + 1):
        inv = np.argsort(level_perms, axis=1)
        seen: dict = {}
        new_perms = []
        new_words = []
        for i in range(rs.rank):
            grows = inv[:, i] < N
            if not grows.any():
                continue
            idx = np.nonzero(grows)[0]
            cand = refl[i][level_perms[idx]]
            if prune:
                ok = (cand[:, prune] < N).all(axis=1)
                idx, cand = idx[ok], cand[ok]
            keys = cand[:, :rs.rank]
            for row, k in enumerate(idx):
                key = keys[row].tobytes()
                if key in seen:
                    continue
                seen[key] = len(new_words)
                new_perms.append(cand[row])
                new_words.append((i,) + level_words[k])
        if not new_words:
            break
        total += len(new_words)
        if total > cap:
            raise EnumerationCapError(
                f"Weyl enumeration of {rs.label} exceeds cap {cap} at length {length}",
                completed_length=length - 1, partial=out)
        order = sorted(range(len(new_words)), key=lambda t: new_words[t])
        level_perms = np.array([new_perms[t] for t in order], dtype=np.int64)
        level_words = [new_words[t] for t in order]
        out.extend(WeylElement(wd, _freeze(pm), length) for wd, pm in zip(level_words, level_perms))
    if S and not simple_only:
        out = [w for w in out if all(w.perm[a] < N for a in S)]
    return out


# -- Poincare polynomial, degrees and orders -----------------------------------

def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_divmod_exact(a, b):
    """Divide integer polynomial a by monic b; return quotient or None."""
    a = list(a)
    db = len(b) - 1
    if len(a) - 1 < db:
        return None
    q = [0] * (len(a) - db)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if c:
            q[k - db] = c
            for j in range(db + 1):
                a[k - db + j] -= c * b[j]
    if any(a):
        return None
    return q


@dataclass(frozen=True)
class PoincareData:
    coefficients: tuple  # number of elements of each length
    degrees: tuple
    positive_count: int
    twisted_signs: tuple = ()

    @property
    def order(self) -> int:
        return sum(self.coefficients)

    def coset_count(self, q: int) -> int:
        return sum(c * q ** l for l, c in enumerate(self.coefficients))

    def group_order(self, q: int, twisted: bool = False) -> int:
        """|G^F| = q^N prod(q^d - e_d), e_d = 1 (split) or the sign of the
        diagram automorphism on the invariant of degree d (twisted)."""
        out = q ** self.positive_count
        signs = self.twisted_signs if twisted else (1,) * len(self.degrees)
        if twisted and not signs:
            raise ValueError("no twisted form for this type")
        for d, e in zip(self.degrees, signs):
            out *= q ** d - e
        return out


def poincare(rs: RootSystem, cap: int = 100_000) -> PoincareData:
    N = rs.positive_count
    twisted_signs = ()
    if rs.label == "E6":
        twisted_signs = (1, -1, 1, 1, -1, 1)  # degrees 2,5,6,8,9,12
    if rs.label in BUNDLED_DEGREES:
        degrees = BUNDLED_DEGREES[rs.label]
        poly = [1]
        for d in degrees:
            poly = _poly_mul(poly, [1] * d)
        return PoincareData(tuple(poly), degrees, N, twisted_signs)
    elems = enumerate_by_length(rs, N, cap=cap)
    coeffs = [0] * (N + 1)
    for w in elems:
        coeffs[w.length] += 1
    rem = list(coeffs)
    degrees = []
    while len(rem) > 1:
        for d in range(len(rem), 1, -1):
            qt = _poly_divmod_exact(rem, [1] * d)
            if qt is not None:
                degrees.append(d)
                rem = qt
                break
        else:
            raise RuntimeError(f"{rs.label}: Poincare polynomial does not factor into [d]_t")
    if rem != [1] or len(degrees) != rs.rank:
        raise RuntimeError(f"{rs.label}: inconsistent Poincare factorisation {degrees}")
    return PoincareData(tuple(coeffs), tuple(sorted(degrees)), N, twisted_signs)


def parabolic_length_counts(rs: RootSystem, S: Iterable[int], cap: int = 3_000_000) -> list:
    """Number of elements of each length in the standard parabolic W_S."""
    S = sorted(set(int(a) for a in S))
    if any(a >= rs.rank for a in S):
        raise ValueError("parabolic subgroups are generated by simple reflections")
    N = rs.positive_count
    refl = rs.reflection_table
    level = {b"": rs.identity_perm()}
    counts = [1]
    total = 1
    while True:
        nxt = {}
        for perm in level.values():
            inv = np.argsort(perm)
            for i in S:
                if inv[i] < N:
                    c = refl[i][perm]
                    nxt.setdefault(c[:rs.rank].tobytes(), c)
        if not nxt:
            return counts
        total += len(nxt)
        if total > cap:
            raise EnumerationCapError(f"parabolic subgroup of {rs.label} exceeds cap {cap}")
        counts.append(len(nxt))
        level = nxt


def quotient_length_counts(rs: RootSystem, S: Iterable[int]) -> list:
    """Length distribution of {w : w(alpha_s) > 0 for s in S}, the minimal
    coset representatives of W/W_S, as the quotient P_W / P_{W_S}."""
    full = list(poincare(rs).coefficients)
    part = parabolic_length_counts(rs, S)
    out = _poly_divmod_exact(full, part)
    if out is None:
        raise RuntimeError("Poincare polynomial of W_S does not divide that of W")
    return out


def _int_det(M) -> int:
    """Exact determinant of a small integer matrix (fraction-free elimination)."""
    A = [[int(x) for x in row] for row in M]
    n = len(A)
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for r in range(k + 1, n):
                if A[r][k] != 0:
                    A[k], A[r] = A[r], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1] if n else 1


def torus_order(rs: RootSystem, w, q: int, twist=None) -> int:
    """|T_w^F| = |det(q - rho(gamma w))| on the alpha-coordinate space."""
    perm = w.perm if isinstance(w, WeylElement) else np.asarray(w)
    if twist is not None:
        perm = np.asarray(twist)[perm]
    M = rs.reflection_matrix(perm)
    r = rs.rank
    return abs(_int_det([[q * (i == j) - int(M[i, j]) for j in range(r)] for i in range(r)]))


def char_poly(rs: RootSystem, perm) -> list:
    """Coefficients c_0..c_r of det(t - rho(w)) (exact, via interpolation)."""
    r = rs.rank
    M = rs.reflection_matrix(np.asarray(perm))
    vals = [_int_det([[t * (i == j) - int(M[i, j]) for j in range(r)] for i in range(r)])
            for t in range(r + 1)]
    return _interpolate_int(list(range(r + 1)), vals)


def _interpolate_int(xs, ys) -> list:
    """Lagrange interpolation with exact rationals; returns coefficient list."""
    n = len(xs)
    coeffs = [Fraction(0)] * n
    for i in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for j in range(n):
            if j != i:
                basis = _poly_mul(basis, [Fraction(-xs[j]), Fraction(1)])
                denom *= xs[i] - xs[j]
        for k, c in enumerate(basis):
            coeffs[k] += c * ys[i] / denom
    return [int(c) if c.denominator == 1 else c for c in coeffs]


# -- conjugacy classes ----------------------------------------------------------

@dataclass(frozen=True)
class WeylClass:
    representative: WeylElement
    size: int

    @property
    def label(self) -> str:
        return self.representative.label or "1"


def conjugacy_classes(rs: RootSystem, cap: int = 100_000) -> list:
    """Conjugacy classes of W, sorted by (length, word) of the representative,
    which is the lexicographically smallest reduced word of minimal length."""
    return class_partition(rs, cap).classes


@dataclass
class ClassPartition:
    """All elements of W with their class ids; ``where`` maps the image of the
    simple roots (bytes of ``perm[:r]``) to the element index."""
    elements: list
    perms: np.ndarray
    class_of: np.ndarray
    where: dict
    classes: list
    rank: int

    def index(self, perm) -> int:
        return self.where[np.asarray(perm, dtype=np.int64)[:self.rank].tobytes()]


def class_partition(rs: RootSystem, cap: int = 100_000) -> ClassPartition:
    try:
        elems = enumerate_by_length(rs, rs.positive_count, cap=cap)
    except EnumerationCapError:
        raise EnumerationCapError(
            f"|W({rs.label})| exceeds the enumeration cap; supply a class data file") from None
    P = np.array([w.perm for w in elems], dtype=np.int64)
    r = rs.rank
    where = {P[k, :r].tobytes(): k for k in range(len(elems))}
    nbrs = []
    for i in range(r):
        s = rs.reflection_table[i]
        C = s[P[:, s]]
        nbrs.append(np.array([where[C[k, :r].tobytes()] for k in range(len(elems))]))
    cls = np.full(len(elems), -1, dtype=np.int64)
    out = []
    for start in range(len(elems)):  # elements are sorted by (length, word)
        if cls[start] >= 0:
            continue
        cid = len(out)
        cls[start] = cid
        stack = [start]
        size = 0
        while stack:
            k = stack.pop()
            size += 1
            for nb in nbrs:
                m = nb[k]
                if cls[m] < 0:
                    cls[m] = cid
                    stack.append(m)
        out.append(WeylClass(elems[start], size))
    return ClassPartition(elems, P, cls, where, out, r)
