"""Chevalley groups G(K) inside GL(M) over small finite fields.

Root elements are exp(t e_alpha) for the epsilon-canonical Chevalley basis.
In the adjoint module the divided powers e_alpha^j / j! are integer
matrices, so they are computed once over the integers and only then reduced
modulo p.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .gfp import (FieldError, FieldSpec, PackedMatrix, field as make_field, frobenius_entrywise,
                  mat_inverse, mat_mul, split_prime_power)
from .liealg import adjoint_rep, bracket
from .weyl import WeylElement, root_system


class WordSyntaxError(ValueError):
    pass


class UnknownRootError(KeyError):
    pass


# -- word specifications -------------------------------------------------------

@dataclass(frozen=True)
class Factor:
    kind: str      # "x", "h" or "n"
    root: tuple    # coordinates in the simple-root basis
    scalar: str    # normalised scalar literal

    def text(self) -> str:
        return f"{self.kind}[{','.join(str(c) for c in self.root)}]({self.scalar})"


@dataclass(frozen=True)
class WordSpec:
    factors: tuple = ()

    def text(self) -> str:
        return "*".join(f.text() for f in self.factors)

    def __str__(self):
        return self.text()

    def __len__(self):
        return len(self.factors)


_FACTOR = re.compile(r"\s*([xhn])\s*\[\s*(-?\d+(?:\s*,\s*-?\d+)*)\s*\]\s*\(\s*([^()]*?)\s*\)\s*")


def parse_word(text: str) -> WordSpec:
    """Parse ``x[1,0,0,0](1)*h[0,1,0,0](2)*...``; the empty string is the identity."""
    if not text.strip() or text.strip() in ("1", "id"):
        return WordSpec(())
    factors = []
    pos = 0
    while True:
        m = _FACTOR.match(text, pos)
        if not m:
            raise WordSyntaxError(f"syntax error at position {pos}: {text[pos:pos + 20]!r}")
        kind, coords, scalar = m.groups()
        if not scalar:
            raise WordSyntaxError(f"empty scalar at position {m.start(3)}")
        scalar = scalar.replace(" ", "")
        if not re.fullmatch(r"[+-]?[0-9z^*+-]+", scalar):
            raise WordSyntaxError(f"bad scalar {scalar!r} at position {m.start(3)}")
        factors.append(Factor(kind, tuple(int(c) for c in coords.split(",")), scalar))
        pos = m.end()
        if pos == len(text):
            break
        if text[pos] != "*":
            raise WordSyntaxError(f"expected '*' at position {pos}")
        pos += 1
    return WordSpec(tuple(factors))


def format_word(spec: WordSpec) -> str:
    return spec.text()


# -- group elements -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GroupElement:
    matrix: PackedMatrix
    provenance: WordSpec | None = None

    @property
    def field(self) -> FieldSpec:
        return self.matrix.field

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(mat_mul(self.matrix, other.matrix))

    def __mul__(self, other):
        return self @ other

    def inverse(self) -> "GroupElement":
        return GroupElement(mat_inverse(self.matrix))

    def __eq__(self, other):
        return isinstance(other, GroupElement) and self.matrix == other.matrix

    def __hash__(self):
        return hash(self.matrix)

    def codes(self) -> np.ndarray:
        return self.matrix.codes()


@dataclass(frozen=True)
class FrobeniusSpec:
    q: int
    twisted: bool = False


class ChevalleyGroup:
    """The adjoint Chevalley group of a given type over GF(p^k).

    For the twisted group 2E6(q) pass ``twisted=True``; the field is then
    GF(q^2) and F = tau o (entrywise q-th power).
    """

    def __init__(self, label: str, fld: FieldSpec | int, twisted: bool = False, q: int | None = None):
        self.rs = root_system(label)
        self.label = self.rs.label
        self.field = make_field(fld) if isinstance(fld, int) else fld
        self.rep = adjoint_rep(self.rs)
        self.basis = self.rep.basis
        self.n = self.rep.dim
        self.twisted = twisted
        if twisted:
            if self.label != "E6":
                raise ValueError("only 2E6 is supported as a twisted type")
            if q is None:
                if self.field.k != 2:
                    raise FieldError("twisted group needs a quadratic extension field")
                q = self.field.p
        elif q is None:
            q = self.field.q
        self.frob = FrobeniusSpec(q, twisted)
        self._exp_cache: dict = {}
        self._elt_cache: dict = {}

    def __repr__(self):
        tw = "2" if self.twisted else ""
        return f"ChevalleyGroup({tw}{self.label}, {self.field})"

    # -- integer exponentials ---------------------------------------------------

    def divided_powers(self, root: int) -> list:
        """[E_0, E_1, ...] with E_j = e_alpha^j / j! as int64 arrays."""
        if root not in self._exp_cache:
            e = self.rep.canonical[root].toarray()
            terms = [np.eye(self.n, dtype=np.int64)]
            cur = terms[0]
            j = 1
            while True:
                nxt = cur @ e
                if not nxt.any():
                    break
                if np.any(nxt % j):
                    raise ArithmeticError("divided power is not integral")
                cur = nxt // j
                terms.append(cur)
                j += 1
                if j > self.n:
                    raise ArithmeticError("canonical basis element is not nilpotent")
            for t in terms:
                t.setflags(write=False)
            self._exp_cache[root] = terms
        return self._exp_cache[root]

    def root_index(self, coords) -> int:
        try:
            return self.rs.root_index(coords)
        except KeyError:
            raise UnknownRootError(f"{list(coords)} is not a root of {self.label}") from None

    def scalar(self, value) -> int:
        """Field encoding of an int, a literal string or an encoding."""
        if isinstance(value, str):
            return self.field.parse(value)
        return self.field.from_int(value)

    def root_planes(self, root: int, t: int) -> np.ndarray:
        """Digit planes (k, n, n) of x_alpha(t), t a field encoding."""
        fld = self.field
        terms = self.divided_powers(root)
        out = np.zeros((fld.k, self.n, self.n), dtype=np.int64)
        tj = 1
        for E in terms:
            digs = fld.digits[tj]
            for d in range(fld.k):
                if digs[d]:
                    out[d] += int(digs[d]) * E
            tj = int(fld.mul[tj, t])
        return out % fld.p

    def x(self, root: int, t: int) -> GroupElement:
        key = ("x", root, t)
        if key not in self._elt_cache:
            m = PackedMatrix.from_planes(self.root_planes(root, t), self.field)
            self._elt_cache[key] = GroupElement(m)
        return self._elt_cache[key]

    def root_element(self, coords, t) -> GroupElement:
        return self.x(self.root_index(coords), self.scalar(t))

    def sl2_sign(self, root: int) -> int:
        """c = +-1 with [e_alpha, c e_{-alpha}] = h and [h, e_alpha] = 2 e_alpha.

        The textbook formulas for n_alpha and h_alpha assume this
        normalisation; in the epsilon-canonical basis c depends on alpha
        (c = -1 for the simple roots)."""
        e = self.rep.canonical[root]
        f = self.rep.canonical[int(self.rs.negation[root])]
        br = bracket(bracket(e, f), e)
        if not (br - 2 * e).toarray().any():
            return 1
        if not (br + 2 * e).toarray().any():
            return -1
        raise ArithmeticError("e_alpha, e_-alpha do not span an sl2-triple")

    def n_elem(self, root: int, t: int) -> GroupElement:
        """n_alpha(t) = x_alpha(t) x'_{-alpha}(-1/t) x_alpha(t), where
        x'_{-alpha}(s) = x_{-alpha}(c s) is the root element of the opposite
        sl2-generator (see ``sl2_sign``)."""
        if t == 0:
            raise ValueError("n_alpha(t) needs t != 0")
        key = ("n", root, t)
        if key not in self._elt_cache:
            fld = self.field
            neg = int(self.rs.negation[root])
            s = int(fld.neg[fld.inv[t]])
            if self.sl2_sign(root) < 0:
                s = int(fld.neg[s])
            self._elt_cache[key] = self.x(root, t) @ self.x(neg, s) @ self.x(root, t)
        return self._elt_cache[key]

    def h_elem(self, root: int, t: int) -> GroupElement:
        """h_alpha(t) = n_alpha(t) n_alpha(1)^{-1}."""
        if t == 0:
            raise ValueError("h_alpha(t) needs t != 0")
        key = ("h", root, t)
        if key not in self._elt_cache:
            self._elt_cache[key] = self.n_elem(root, t) @ self.n_elem(root, 1).inverse()
        return self._elt_cache[key]

    def torus_element(self, coords, t) -> GroupElement:
        return self.h_elem(self.root_index(coords), self.scalar(t))

    def weyl_element_rep(self, coords, t) -> GroupElement:
        return self.n_elem(self.root_index(coords), self.scalar(t))

    def identity(self) -> GroupElement:
        return GroupElement(PackedMatrix.identity(self.n, self.field))

    def wdot(self, w: WeylElement) -> GroupElement:
        """Product of n_{alpha_i}(1) along the canonical reduced word of w."""
        g = self.identity()
        for i in w.word:
            g = g @ self.n_elem(i, 1)
        return g

    # -- words -----------------------------------------------------------------

    def evaluate(self, spec: WordSpec | str) -> GroupElement:
        """Multiply the factors left to right."""
        if isinstance(spec, str):
            spec = parse_word(spec)
        g = self.identity()
        for f in spec.factors:
            if len(f.root) != self.rs.rank:
                raise UnknownRootError(f"{list(f.root)} has the wrong rank for {self.label}")
            root = self.root_index(f.root)
            t = self.scalar(f.scalar)
            if f.kind == "x":
                g = g @ self.x(root, t)
            elif f.kind == "h":
                g = g @ self.h_elem(root, t)
            else:
                g = g @ self.n_elem(root, t)
        return GroupElement(g.matrix, spec)

    # -- Frobenius ------------------------------------------------------------

    @cached_property
    def tau(self) -> np.ndarray:
        """Module permutation for the graph automorphism of E6: u1<->u6,
        u3<->u5, v_alpha -> v_{alpha-dagger}; returned as an index map."""
        gamma = self.rs.graph_automorphism
        if gamma is None:
            raise ValueError(f"{self.label} has no supported graph automorphism")
        sigma = [5, 1, 4, 3, 2, 0]
        perm = np.empty(self.n, dtype=np.int64)
        for k in range(self.rs.size):
            perm[self.basis.root_pos[k]] = self.basis.root_pos[gamma[k]]
        for i in range(self.rs.rank):
            perm[self.basis.u_pos[i]] = self.basis.u_pos[sigma[i]]
        return perm

    def apply_tau(self, g: GroupElement) -> GroupElement:
        """tau g tau for the permutation matrix tau (an involution)."""
        c = g.codes()
        t = self.tau
        out = np.empty_like(c)
        out[np.ix_(t, t)] = c
        return GroupElement(PackedMatrix.from_codes(out, self.field))

    def frobenius(self, g: GroupElement, spec: FrobeniusSpec | None = None) -> GroupElement:
        spec = spec or self.frob
        if g.field != self.field:
            raise FieldError("element lives over a different field")
        _, m = split_prime_power(spec.q)
        if self.field.p ** m != spec.q:
            raise FieldError("incompatible q")
        h = GroupElement(frobenius_entrywise(g.matrix, spec.q))
        return self.apply_tau(h) if spec.twisted else h

    def is_fixed(self, g: GroupElement) -> bool:
        return self.frobenius(g) == g

    # -- torus -----------------------------------------------------------------

    def split_torus(self, ts=None):
        """All prod_i h_{alpha_i}(t_i) with t_i ranging over ``ts``
        (default: the nonzero prime-field elements), as (params, element)."""
        fld = self.field
        ts = list(ts) if ts is not None else list(range(1, fld.p))
        for params in itertools.product(ts, repeat=self.rs.rank):
            g = self.identity()
            for i, t in enumerate(params):
                if t != 1:
                    g = g @ self.h_elem(i, t)
            yield params, g

    def fixed_wdot(self, w: WeylElement, search_cap: int = 100_000):
        """An F-fixed representative of w (gamma(w) = w in the twisted case).

        Returns (element, correcting torus parameters or None)."""
        g = self.wdot(w)
        if self.is_fixed(g):
            return g, None
        fld = self.field
        nonzero = [t for t in range(1, fld.q)]
        count = 0
        for ts in (range(1, fld.p), nonzero):
            for params, h in self.split_torus(ts):
                count += 1
                if count > search_cap:
                    break
                cand = g @ h
                if self.is_fixed(cand):
                    return cand, params
        raise RuntimeError(f"no F-fixed representative of w={w.label} found in the torus search")


def torus_canonicalise(variants, group: ChevalleyGroup, cap: int = 5000):
    """Partition word variants into orbits under conjugation by T_0(F_p).

    Returns a list of orbits, each a list of indices into ``variants``;
    orbits are ordered by their smallest index.
    """
    specs = [parse_word(v) if isinstance(v, str) else v for v in variants]
    fld = group.field
    size = (fld.p - 1) ** group.rs.rank
    if size > cap:
        raise RuntimeError(f"torus T0(F_{fld.p}) has {size} elements, above the cap {cap}")
    mats = [group.evaluate(s) for s in specs]
    where = {}
    for k, g in enumerate(mats):
        where.setdefault(g, k)
    parent = list(range(len(mats)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for _, h in group.split_torus():
        hinv = h.inverse()
        for k, g in enumerate(mats):
            c = h @ g @ hinv
            m = where.get(c)
            if m is not None:
                a, b = find(k), find(m)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    for k, g in enumerate(mats):  # identical matrices are one element
        a, b = find(k), find(where[g])
        if a != b:
            parent[max(a, b)] = min(a, b)
    orbits: dict = {}
    for k in range(len(mats)):
        orbits.setdefault(find(k), []).append(k)
    return [orbits[r] for r in sorted(orbits)]


def sign_variants(spec: WordSpec | str, positions=None):
    """All words obtained by replacing the scalars at ``positions`` by +-1."""
    spec = parse_word(spec) if isinstance(spec, str) else spec
    positions = list(range(len(spec))) if positions is None else list(positions)
    out = []
    for signs in itertools.product((1, -1), repeat=len(positions)):
        fs = list(spec.factors)
        for pos, s in zip(positions, signs):
            f = fs[pos]
            fs[pos] = Factor(f.kind, f.root, str(s))
        out.append(WordSpec(tuple(fs)))
    return out
