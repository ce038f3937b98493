"""Almost-character bookkeeping on unipotent elements.

Given the character table of W, the torus orders |T_w^F| and the Springer
correspondence (which fixes d_E and the block of each E), we form

    omega~_{E',E} = 1/|W| sum_w [G^F : T_w^F] Tr(w, E') Tr(w, E)

and solve P^t Lambda P = Omega with P unitriangular (p_{E',E} = 0 unless
E' = E or d_{E'} > d_E) and Lambda block diagonal along unipotent classes.
Everything is exact: rationals at a fixed integer q, and polynomials in q by
solving at enough q and interpolating.

Only the split case (sigma_E = id) is handled here.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np

from .weyl import (class_partition, format_word, parse_weyl_word, poincare,
                   root_system, torus_order, char_poly)


class CharacterTableError(ValueError):
    pass


class SpringerTableError(ValueError):
    pass


class LSError(ArithmeticError):
    pass


# -- character tables -----------------------------------------------------------

@dataclass
class CharacterTable:
    """Integer character table of a Weyl group; rows are characters, columns
    conjugacy classes in file order."""
    type_label: str
    class_labels: list
    class_sizes: list
    class_words: list
    char_labels: list
    values: np.ndarray
    aliases: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return int(sum(self.class_sizes))

    @property
    def degrees(self) -> list:
        one = self.class_words.index(())
        return [int(v) for v in self.values[:, one]]

    def dim(self, label) -> int:
        return self.degrees[self.index(label)]

    def index(self, label) -> int:
        label = self.aliases.get(label, label)
        try:
            return self.char_labels.index(label)
        except ValueError:
            raise KeyError(f"{self.type_label}: unknown character {label!r}") from None

    def row(self, label) -> np.ndarray:
        return self.values[self.index(label)]

    def validate(self) -> None:
        """Both orthogonality relations, exactly."""
        X = np.array(self.values, dtype=object)
        sizes = np.array(self.class_sizes, dtype=object)
        n, m = X.shape
        if n != m:
            raise CharacterTableError(f"{self.type_label}: {n} characters but {m} classes")
        if len(set(self.char_labels)) != n or len(set(self.class_labels)) != m:
            raise CharacterTableError(f"{self.type_label}: repeated labels")
        order = self.order
        gram = (X * sizes).dot(X.T)
        bad = [(self.char_labels[i], self.char_labels[j])
               for i in range(n) for j in range(n) if gram[i, j] != (order if i == j else 0)]
        if bad:
            raise CharacterTableError(f"{self.type_label}: row orthogonality fails at {bad[:3]}")
        cols = X.T.dot(X)
        for k in range(m):
            for l in range(m):
                want = Fraction(order, self.class_sizes[k]) if k == l else 0
                if cols[k, l] != want:
                    raise CharacterTableError(
                        f"{self.type_label}: column orthogonality fails at classes "
                        f"{self.class_labels[k]}, {self.class_labels[l]}")

    def to_text(self, header=()) -> str:
        out = [f"# {line}" for line in header]
        out.append(f"type {self.type_label}")
        for lab, size, word in zip(self.class_labels, self.class_sizes, self.class_words):
            out.append(f"class {lab} size={size} word={format_word(word)}")
        for lab, vals in zip(self.char_labels, self.values):
            out.append(f"char {lab} dim={self.dim(lab)} values={' '.join(str(int(v)) for v in vals)}")
        for k, v in sorted(self.aliases.items()):
            out.append(f"alias {k} {v}")
        return "\n".join(out) + "\n"


def _fields(tokens, where):
    out = {}
    for tok in tokens:
        if "=" not in tok:
            raise ValueError(f"{where}: expected key=value, got {tok!r}")
        k, v = tok.split("=", 1)
        out[k] = v
    return out


def parse_character_table(text: str, source="<string>") -> CharacterTable:
    type_label = None
    classes, chars, aliases = [], [], {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{n}"
        head, *rest = line.split(None, 2)
        if head == "type":
            type_label = rest[0]
        elif head == "class":
            lab, tail = rest[0], (rest[1] if len(rest) > 1 else "")
            f = _fields(tail.split(), where)
            classes.append((lab, int(f["size"]), parse_weyl_word(f.get("word", ""))))
        elif head == "char":
            lab, tail = rest[0], rest[1]
            m = re.fullmatch(r"dim=(\d+)\s+values=(.*)", tail.strip())
            if not m:
                raise CharacterTableError(f"{where}: malformed char line")
            chars.append((lab, int(m.group(1)), [int(v) for v in m.group(2).split()]))
        elif head == "alias":
            aliases[rest[0]] = rest[1].strip()
        else:
            raise CharacterTableError(f"{where}: unknown record {head!r}")
    if not classes or not chars:
        raise CharacterTableError(f"{source}: no classes or characters")
    for lab, dim, vals in chars:
        if len(vals) != len(classes):
            raise CharacterTableError(f"{source}: character {lab} has {len(vals)} values "
                                      f"for {len(classes)} classes")
    table = CharacterTable(type_label or "?", [c[0] for c in classes], [c[1] for c in classes],
                           [c[2] for c in classes], [c[0] for c in chars],
                           np.array([c[2] for c in chars], dtype=np.int64), aliases)
    for lab, dim, _ in chars:
        if table.dim(lab) != dim:
            raise CharacterTableError(f"{source}: {lab} declares dim={dim} but takes value "
                                      f"{table.dim(lab)} at the identity")
    for k, v in aliases.items():
        if v not in table.char_labels:
            raise CharacterTableError(f"{source}: alias {k} points to unknown character {v}")
    table.validate()
    return table


def _data_text(name: str) -> str:
    return resources.files("chevgreen").joinpath("data", name).read_text()


@lru_cache(maxsize=None)
def character_table(type_label: str) -> CharacterTable:
    """Bundled table, validated on load."""
    name = f"chartable_{type_label}.txt"
    return parse_character_table(_data_text(name), name)


def compute_character_table(rs, seed: int = 0) -> CharacterTable:
    """Character table by the Dixon-Schneider method: common eigenvectors of
    the class multiplication matrices, computed in floating point and then
    rounded; ``validate`` certifies the rounded table exactly.

    Labels are phi_{d,b} with b the lowest degree of E in the symmetric
    algebra; ties are split by primes (see ``_prime_order``).
    """
    part = class_partition(rs)
    P, cls = part.perms, part.class_of
    ncl = len(part.classes)
    order = len(part.elements)
    sizes = np.array([c.size for c in part.classes], dtype=np.int64)
    inv = np.argsort(P, axis=1)
    # a[j, k, l] = #{x in C_j : x^{-1} z_l in C_k} for a fixed z_l in C_l
    a = np.zeros((ncl, ncl, ncl), dtype=np.int64)
    r = rs.rank
    for l, c in enumerate(part.classes):
        z = c.representative.perm
        prod = np.take_along_axis(inv, np.broadcast_to(z[:r], (order, r)), axis=1)
        ks = np.array([part.where[row.tobytes()] for row in np.ascontiguousarray(prod)])
        np.add.at(a, (cls, cls[ks], l), 1)
    rng = np.random.default_rng(seed)
    for _attempt in range(8):
        M = np.tensordot(rng.standard_normal(ncl), a, axes=1).astype(float)
        evals, evecs = np.linalg.eig(M)
        if np.min(np.abs(np.subtract.outer(evals, evals)) + np.eye(ncl) * 1e9) < 1e-6:
            continue
        rows = []
        for v in evecs.T:
            v = np.real(v / v[0])  # central character, omega(identity) = 1
            dim = np.sqrt(order / np.sum(v * v / sizes))
            rows.append(np.rint(v * dim / sizes).astype(np.int64))
        values = np.array(rows)
        values = values[np.lexsort((-values.T)[::-1])]
        table = CharacterTable(rs.label, [f"c{k + 1}" for k in range(ncl)], sizes.tolist(),
                               [c.representative.word for c in part.classes],
                               [str(k) for k in range(ncl)], values)
        try:
            table.validate()
        except CharacterTableError:
            continue
        _assign_labels(rs, table)
        return table
    raise CharacterTableError(f"{rs.label}: Dixon-Schneider did not separate the characters")


def b_values(rs, table: CharacterTable) -> list:
    """Lowest degree in which each character occurs in S(V), from Molien's
    formula 1/|W| sum_w chi(w) / det(1 - t w)."""
    N = rs.positive_count
    series = []
    for word in table.class_words:
        perm = rs.word_perm(word)
        c = char_poly(rs, perm)        # det(t - w), constant term first
        den = [int(x) for x in reversed(c)]  # det(1 - t w)
        s = [0] * (N + 1)
        s[0] = 1
        for k in range(1, N + 1):
            s[k] = -sum(den[i] * s[k - i] for i in range(1, min(k, len(den) - 1) + 1))
        series.append(s)
    S = np.array(series, dtype=object)
    weighted = np.array(table.values, dtype=object) * np.array(table.class_sizes, dtype=object)
    mult = weighted.dot(S)
    out = []
    for row in mult:
        nz = [k for k, x in enumerate(row) if x != 0]
        if not nz:
            raise CharacterTableError(f"{rs.label}: character missing from S(V) below degree {N}")
        out.append(nz[0])
    return out


def class_index(rs, table, word) -> int:
    """Column of ``table`` holding the Weyl element given by ``word``."""
    part = class_partition(rs)
    k = part.class_of[part.index(rs.word_perm(word))]
    rep = part.classes[k].representative.word
    return table.class_words.index(rep)


def _prime_order(rs, table, idx) -> list:
    """Order characters sharing (dim, b): the one with the smaller value on a
    long simple reflection gets the single prime.  For G2 this is the usual
    convention Tr(s_long, phi'_{1,3}) = -1."""
    k = class_index(rs, table, (next(i for i in range(rs.rank) if rs.is_long_simple(i)),))
    short = [i for i in range(rs.rank) if not rs.is_long_simple(i)]
    ks = class_index(rs, table, (short[0],)) if short else k
    return sorted(idx, key=lambda i: (table.values[i, k], -table.values[i, ks]))


def _assign_labels(rs, table: CharacterTable) -> None:
    bs = b_values(rs, table)
    groups = {}
    for i, (d, b) in enumerate(zip(table.degrees, bs)):
        groups.setdefault((d, b), []).append(i)
    labels = [None] * len(bs)
    for (d, b), idx in groups.items():
        if len(idx) == 1:
            labels[idx[0]] = f"phi{d},{b}"
            continue
        if len(idx) > 3:
            raise CharacterTableError(f"{rs.label}: {len(idx)} characters share phi{d},{b}")
        for n, i in enumerate(_prime_order(rs, table, idx)):
            labels[i] = f"phi{d},{b}" + "'" * (n + 1)
    order = sorted(range(len(bs)), key=lambda i: (bs[i], table.degrees[i], labels[i]))
    table.values = table.values[order]
    table.char_labels = [labels[i] for i in order]


# -- Springer correspondence ----------------------------------------------------

@dataclass(frozen=True)
class SpringerRow:
    char: str
    d: int
    unip_class: str
    local_system: str
    dim_local: int
    source: str = ""


@dataclass
class SpringerTable:
    type_label: str
    p: str
    rows: list

    def __post_init__(self):
        self.check()

    def check(self) -> None:
        chars = [r.char for r in self.rows]
        if len(set(chars)) != len(chars):
            raise SpringerTableError(f"{self.type_label}: a character occurs twice")
        pairs = [(r.unip_class, r.local_system) for r in self.rows]
        if len(set(pairs)) != len(pairs):
            raise SpringerTableError(f"{self.type_label}: Springer map is not injective")
        for c in self.classes:
            rows = self.block(c)
            if len({r.d for r in rows}) != 1:
                raise SpringerTableError(f"{self.type_label}: d varies on class {c}")
            if sum(r.local_system == "1" for r in rows) != 1:
                raise SpringerTableError(
                    f"{self.type_label}: class {c} needs exactly one trivial local system")

    @property
    def classes(self) -> list:
        out = []
        for r in self.rows:
            if r.unip_class not in out:
                out.append(r.unip_class)
        return out

    def block(self, unip_class) -> list:
        return [r for r in self.rows if r.unip_class == unip_class]

    def row(self, char) -> SpringerRow:
        for r in self.rows:
            if r.char == char:
                return r
        raise KeyError(char)

    @property
    def d_map(self) -> dict:
        return {r.char: r.d for r in self.rows}

    def trivial_system(self, unip_class) -> SpringerRow:
        return next(r for r in self.block(unip_class) if r.local_system == "1")

    def to_text(self, header=()) -> str:
        out = [f"# {line}" for line in header]
        out.append(f"type {self.type_label} p={self.p}")
        for r in self.rows:
            line = (f"row char={r.char} d={r.d} class={r.unip_class} "
                    f"localsys={r.local_system} dimE={r.dim_local}")
            if r.source:
                line += f"  # {r.source}"
            out.append(line)
        return "\n".join(out) + "\n"


def parse_springer_table(text: str, source="<string>") -> SpringerTable:
    type_label, p, rows = None, "?", []
    for n, raw in enumerate(text.splitlines(), 1):
        line, _, comment = raw.partition("#")
        line = line.strip()
        if not line:
            continue
        head, *rest = line.split()
        if head == "type":
            type_label = rest[0]
            p = _fields(rest[1:], f"{source}:{n}").get("p", "?")
        elif head == "row":
            f = _fields(rest, f"{source}:{n}")
            try:
                rows.append(SpringerRow(f["char"], int(f["d"]), f["class"], f["localsys"],
                                        int(f["dimE"]), comment.strip()))
            except KeyError as exc:
                raise SpringerTableError(f"{source}:{n}: missing field {exc}") from None
        else:
            raise SpringerTableError(f"{source}:{n}: unknown record {head!r}")
    return SpringerTable(type_label or "?", p, rows)


SPRINGER_FILES = {("G2", "3"): "springer_G2_p3.txt",
                  ("G2", "good"): "springer_G2_pgood.txt",
                  ("F4", "3"): "springer_F4_p3.txt"}


def springer_key(type_label: str, p: int) -> tuple:
    if type_label == "G2":
        return ("G2", "3" if p == 3 else "good")
    if type_label == "F4" and p == 3:
        return ("F4", "3")
    raise KeyError(f"no bundled Springer data for {type_label} in characteristic {p}")


@lru_cache(maxsize=None)
def springer_table(type_label: str, p: int) -> SpringerTable:
    name = SPRINGER_FILES[springer_key(type_label, p)]
    return parse_springer_table(_data_text(name), name)


# -- Omega ----------------------------------------------------------------------

@dataclass
class OmegaMatrix:
    labels: list
    q: int
    tilde: list      # omega~ as lists of Fractions
    omega: list      # q^{-d_E - d_E'} omega~

    def entry(self, a, b, variant="omega") -> Fraction:
        M = self.tilde if variant == "tilde" else self.omega
        return M[self.labels.index(a)][self.labels.index(b)]


def class_torus_indices(rs, table: CharacterTable, q: int) -> list:
    """[G^F : T_w^F] for the representative of each class."""
    Gq = poincare(rs).group_order(q)
    out = []
    for word in table.class_words:
        t = torus_order(rs, rs.element(word), q)
        if Gq % t:
            raise ArithmeticError(f"|T_w^F| = {t} does not divide |G^F|")
        out.append(Gq // t)
    return out


def compute_omega(table: CharacterTable, rs, q: int, d_map: dict, labels=None) -> OmegaMatrix:
    if q < 2:
        raise ValueError("q must be at least 2")
    if table.order != poincare(rs).order:
        raise CharacterTableError(f"class sizes sum to {table.order}, |W| = {poincare(rs).order}")
    labels = list(labels) if labels is not None else list(d_map)
    missing = [c for c in labels if c not in d_map]
    if missing:
        raise CharacterTableError(f"no d value for {missing}")
    rows = np.array([table.row(c) for c in labels], dtype=object)
    weights = np.array([s * t for s, t in zip(table.class_sizes, class_torus_indices(rs, table, q))],
                       dtype=object)
    raw = (rows * weights).dot(rows.T)
    W = table.order
    tilde = [[Fraction(int(raw[i, j]), W) for j in range(len(labels))] for i in range(len(labels))]
    omega = [[tilde[i][j] / Fraction(q) ** (d_map[labels[i]] + d_map[labels[j]])
              for j in range(len(labels))] for i in range(len(labels))]
    return OmegaMatrix(labels, q, tilde, omega)


# -- the block solver -------------------------------------------------------------

@dataclass
class LSResult:
    labels: list
    q: int
    P: list
    Lambda: list
    d: dict
    blocks: list            # list of (class, [labels]) in processing order
    p_tilde: dict = field(default_factory=dict)

    def p(self, a, b) -> Fraction:
        return self.P[self.labels.index(a)][self.labels.index(b)]

    def lam(self, a, b) -> Fraction:
        return self.Lambda[self.labels.index(a)][self.labels.index(b)]

    def row(self, a) -> list:
        return self.P[self.labels.index(a)]

    def column(self, b) -> list:
        j = self.labels.index(b)
        return [r[j] for r in self.P]

    def residual(self, omega: OmegaMatrix) -> list:
        """P^t Lambda P - Omega (all zero for a solved instance)."""
        n = len(self.labels)
        perm = [omega.labels.index(c) for c in self.labels]
        PL = _matmul(_transpose(self.P), self.Lambda)
        R = _matmul(PL, self.P)
        return [[R[i][j] - omega.omega[perm[i]][perm[j]] for j in range(n)] for i in range(n)]


def _transpose(A):
    return [list(r) for r in zip(*A)]


def _matmul(A, B):
    Bt = _transpose(B)
    return [[sum((x * y for x, y in zip(r, c) if x and y), Fraction(0)) for c in Bt] for r in A]


def _solve(M, rhs):
    """Exact solution of M X = rhs (M square, rhs a list of columns)."""
    n = len(M)
    A = [list(M[i]) + [col[i] for col in rhs] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if A[i][k] != 0), None)
        if piv is None:
            return None
        A[k], A[piv] = A[piv], A[k]
        inv = 1 / A[k][k]
        A[k] = [x * inv for x in A[k]]
        for i in range(n):
            if i != k and A[i][k] != 0:
                f = A[i][k]
                A[i] = [x - f * y for x, y in zip(A[i], A[k])]
    return [[A[i][n + c] for i in range(n)] for c in range(len(rhs))]


def ls_solve(omega: OmegaMatrix, springer: SpringerTable, require_integral: bool = True) -> LSResult:
    d = springer.d_map
    classes = sorted(springer.classes, key=lambda c: -springer.block(c)[0].d)
    blocks = [(c, [r.char for r in springer.block(c)]) for c in classes]
    labels = [ch for _, chars in blocks for ch in chars]
    if set(labels) != set(omega.labels):
        raise LSError("Omega and Springer data index different characters")
    src = [omega.labels.index(c) for c in labels]
    Om = [[omega.omega[i][j] for j in src] for i in src]
    n = len(labels)
    if any(Om[i][j] != Om[j][i] for i in range(n) for j in range(i)):
        raise LSError("Omega is not symmetric")
    zero = Fraction(0)
    P = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    L = [[zero] * n for _ in range(n)]
    # PL[e][f] = (P^t Lambda)_{e,f}; fixed once e and f are both processed
    PL = [[zero] * n for _ in range(n)]
    block_of = {}
    done = []   # positions already processed
    pos = 0
    for cls, chars in blocks:
        cur = list(range(pos, pos + len(chars)))
        pos += len(chars)
        for i in cur:
            block_of[i] = cur
        dB = d[chars[0]]
        higher = [i for i in done if d[labels[i]] > dB]
        if higher:
            M = [[PL[e2][f] for f in higher] for e2 in higher]
            sol = _solve(M, [[Om[e2][e] for e2 in higher] for e in cur])
            if sol is None:
                raise LSError(f"degenerate Lambda block above class {cls}")
            for e, col in zip(cur, sol):
                for f, val in zip(higher, col):
                    P[f][e] = val
            for a in cur:
                for f in higher:
                    PL[a][f] = sum((P[f2][a] * L[f2][f] for f2 in block_of[f] if P[f2][a]), zero)

        def acc(a, b):
            return sum((PL[a][f] * P[f][b] for f in higher if P[f][b] and PL[a][f]), zero)

        for a in cur:
            for b in cur:
                L[a][b] = Om[a][b] - acc(a, b)
        for a in cur:
            for b in cur:
                PL[a][b] = L[a][b]
        for e2 in done:
            if d[labels[e2]] != dB:
                continue
            for e in cur:
                if Om[e2][e] != acc(e2, e):
                    raise LSError(f"inconsistent Omega/Springer data: classes "
                                  f"{cls} and the class of {labels[e2]} share d={dB} "
                                  f"but omega({labels[e2]},{labels[e]}) does not vanish")
        done.extend(cur)
    if require_integral:
        bad = [(labels[i], labels[j]) for i in range(n) for j in range(n)
               if P[i][j].denominator != 1]
        if bad:
            raise LSError(f"non-integral p at q={omega.q}: {bad[:4]}")
    return LSResult(labels, omega.q, P, L, dict(d), blocks)


def p_tilde(ls: LSResult, table: CharacterTable, q: int | None = None) -> dict:
    """p~_{E'} = sum_E q^{d_E} dim(E) p_{E',E}."""
    q = ls.q if q is None else q
    out = {}
    for i, a in enumerate(ls.labels):
        out[a] = sum((Fraction(q) ** ls.d[b] * table.dim(b) * ls.P[i][j]
                      for j, b in enumerate(ls.labels)), Fraction(0))
    ls.p_tilde = out
    return out


def solve_instance(type_label: str, p: int, q: int, table=None, springer=None) -> LSResult:
    rs = root_system(type_label)
    table = table or character_table(type_label)
    springer = springer or springer_table(type_label, p)
    om = compute_omega(table, rs, q, springer.d_map, labels=[r.char for r in springer.rows])
    ls = ls_solve(om, springer)
    p_tilde(ls, table)
    return ls


# -- lambda from finite class data -------------------------------------------------

def lambda_from_class_data(reps, group_order: int, values_a, values_b, signs=(1, 1)):
    """lambda_{E',E} = delta' delta sum_i [G^F : C(u_i)^F] Tr(a_i, E'_u) Tr(a_i, E_u).

    ``reps`` lists the centraliser orders |C(u_i)^F|; ``values_a/b`` the
    local-system traces at the matching A(u)-classes.  Returns the value and
    whether it vanishes (the degenerate case where Q1 counts are needed).
    """
    total = Fraction(0)
    for c, x, y in zip(reps, values_a, values_b):
        total += Fraction(group_order, c) * x * y
    total *= signs[0] * signs[1]
    return total, total == 0


# -- polynomials in q ------------------------------------------------------------

@dataclass
class SymbolicLS:
    labels: list
    P: list          # coefficient lists, constant term first
    p_tilde: dict
    Lambda: list
    d: dict
    blocks: list


class Interpolator:
    """Exact interpolation at fixed nodes through one inverse Vandermonde
    matrix; an extra held-out node certifies the degree bound."""

    def __init__(self, xs, hold=None):
        self.xs = [Fraction(x) for x in xs]
        self.hold = hold
        n = len(xs)
        V = [[x ** k for k in range(n)] for x in self.xs]
        cols = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
        self.Vinv = _transpose(_solve(V, cols))  # coefficients = Vinv . ys

    def fit(self, ys, hold_y=None):
        if all(y == ys[0] for y in ys) and (hold_y is None or hold_y == ys[0]):
            return [Fraction(ys[0])]
        coeffs = [sum((c * y for c, y in zip(row, ys) if c and y), Fraction(0))
                  for row in self.Vinv]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        if self.hold is not None and hold_y is not None:
            if evaluate_poly(coeffs, self.hold) != hold_y:
                return None
        return coeffs


def evaluate_poly(coeffs, x):
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def interpolate(xs, ys, check_x=None, check_y=None):
    """Exact interpolating polynomial (constant term first), or None if it
    misses the optional check point."""
    return Interpolator(xs, check_x).fit([Fraction(y) for y in ys], check_y)


def solve_symbolic(type_label: str, p: int, qs: Sequence[int] | None = None) -> SymbolicLS:
    """Solve at 2N + 2 values of q and interpolate; the last value is held out
    to certify the degree bound 2N."""
    rs = root_system(type_label)
    N = rs.positive_count
    if qs is None:
        qs = list(range(2, 2 * N + 4))
    results = [solve_instance(type_label, p, q) for q in qs]
    labels = results[0].labels
    n = len(labels)
    interp = Interpolator(qs[:-1], qs[-1])

    def fit(get):
        ys = [get(r) for r in results]
        return interp.fit(ys[:-1], ys[-1])

    P = [[fit(lambda r, i=i, j=j: r.P[i][j]) for j in range(n)] for i in range(n)]
    if any(c is None for row in P for c in row):
        raise LSError("p entries are not polynomials of degree <= 2N")
    pt = {a: fit(lambda r, a=a: r.p_tilde[a]) for a in labels}
    Lam = [[fit(lambda r, i=i, j=j: r.Lambda[i][j]) for j in range(n)] for i in range(n)]
    return SymbolicLS(labels, P, pt, Lam, results[0].d, results[0].blocks)


def format_poly(coeffs, var="q") -> str:
    if coeffs is None:
        return "(not polynomial)"
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[k])
        if c == 0:
            continue
        mag = abs(c)
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if mono and mag == 1:
            body = mono
        else:
            body = str(mag) + mono
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    head = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    return head + "".join(f"{s}{b}" for s, b in terms[1:])


_POLY_TOKEN = re.compile(r"\s*(?:(\d+)|(q)|(.))")


def parse_poly(text: str, var: str = "q") -> list:
    """Parse an integer polynomial such as ``2q^12(q^2-1)`` or
    ``30q^3+20q^2+6q+1`` into coefficients, constant term first."""
    toks = []
    for m in _POLY_TOKEN.finditer(text.strip()):
        num, q, other = m.groups()
        if num:
            toks.append(("n", int(num)))
        elif q:
            toks.append(("q", None))
        elif other and not other.isspace():
            toks.append((other, None))
    if var != "q":
        raise ValueError("only the variable q is supported")
    pos = 0

    def peek():
        return toks[pos][0] if pos < len(toks) else None

    def take(kind=None):
        nonlocal pos
        if pos >= len(toks) or (kind and toks[pos][0] != kind):
            raise ValueError(f"bad polynomial {text!r}")
        pos += 1
        return toks[pos - 1]

    def expr():
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if take()[0] == "-" else 1
        acc = _pscale(term(), sign)
        while peek() in ("+", "-"):
            s = -1 if take()[0] == "-" else 1
            acc = _padd(acc, _pscale(term(), s))
        return acc

    def term():
        acc = factor()
        while peek() in ("n", "q", "(", "*"):
            if peek() == "*":
                take()
            acc = _pmul(acc, factor())
        return acc

    def factor():
        kind = peek()
        if kind == "n":
            base = [Fraction(take()[1])]
        elif kind == "q":
            take()
            base = [Fraction(0), Fraction(1)]
        elif kind == "(":
            take()
            base = expr()
            take(")")
        else:
            raise ValueError(f"bad polynomial {text!r}")
        if peek() == "^":
            take()
            e = take("n")[1]
            out = [Fraction(1)]
            for _ in range(e):
                out = _pmul(out, base)
            base = out
        return base

    result = expr()
    if pos != len(toks):
        raise ValueError(f"bad polynomial {text!r}")
    while len(result) > 1 and result[-1] == 0:
        result.pop()
    return result


def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


def _pscale(a, s):
    return [s * x for x in a]
