"""Small finite fields GF(p^k) (p <= 7, k <= 2) and dense matrices over them.

Elements are encoded as integers a0 + a1*p, meaning a0 + a1*z where z is a
root of the Conway polynomial.  ``PackedMatrix`` stores one bit per entry
for GF(2) and one byte per entry otherwise.  ``BatchKernel`` is the
counting engine's inner loop: it conjugates whole batches of matrices at
once with float32 BLAS products, which are exact as long as every
intermediate integer stays below 2^24.
"""
from __future__ import annotations

import re
from functools import lru_cache

import numpy as np

SUPPORTED_PRIMES = (2, 3, 5, 7)

# z^2 + c1*z + c0
CONWAY = {2: (1, 1), 3: (2, 2), 5: (2, 4), 7: (3, 6)}


class FieldError(ValueError):
    pass


class SingularMatrixError(ArithmeticError):
    pass


class NotUnipotentError(ValueError):
    pass


class FieldSpec:
    """GF(p^k) with full addition/multiplication tables."""

    def __init__(self, p: int, k: int = 1):
        if p not in SUPPORTED_PRIMES or k not in (1, 2):
            raise FieldError(f"unsupported field GF({p}^{k})")
        self.p, self.k, self.q = p, k, p ** k
        q = self.q
        digits = np.array([[(a // p ** j) % p for j in range(k)] for a in range(q)], dtype=np.int64)
        self.digits = digits
        weights = np.array([p ** j for j in range(k)], dtype=np.int64)
        self.add = ((digits[:, None, :] + digits[None, :, :]) % p) @ weights
        self.neg = ((-digits) % p) @ weights
        if k == 1:
            self.mul = np.outer(np.arange(p), np.arange(p)) % p
        else:
            c0, c1 = CONWAY[p]
            a0, a1 = digits[:, None, 0], digits[:, None, 1]
            b0, b1 = digits[None, :, 0], digits[None, :, 1]
            hi = a1 * b1
            d0 = (a0 * b0 - c0 * hi) % p
            d1 = (a0 * b1 + a1 * b0 - c1 * hi) % p
            self.mul = d0 + p * d1
        self.sub = self.add[:, self.neg]
        self.inv = np.zeros(q, dtype=np.int64)
        for a in range(1, q):
            b = int(np.nonzero(self.mul[a] == 1)[0][0])
            self.inv[a] = b
        for t in (self.add, self.mul, self.neg, self.inv, self.sub):
            t.setflags(write=False)
        self._check_axioms()

    def __repr__(self):
        return f"GF({self.q})"

    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.k) == (other.p, other.k)

    def __hash__(self):
        return hash((self.p, self.k))

    def _check_axioms(self):
        q = self.q
        A, M = self.add, self.mul
        r = np.arange(q)
        if not (np.array_equal(A[0], r) and np.array_equal(M[1], r)):
            raise FieldError("identity elements broken")
        # exhaustive associativity and distributivity (q <= 49)
        if not np.array_equal(M[M[:, :, None], r[None, None, :]], M[r[:, None, None], M[None, :, :]]):
            raise FieldError("multiplication not associative")
        if not np.array_equal(A[A[:, :, None], r[None, None, :]], A[r[:, None, None], A[None, :, :]]):
            raise FieldError("addition not associative")
        left = M[r[:, None, None], A[None, :, :]]
        right = A[M[:, :, None], M[:, None, :]]
        if not np.array_equal(left, right):
            raise FieldError("distributivity fails")
        if not np.all(M[np.arange(1, q), self.inv[1:]] == 1):
            raise FieldError("inverse table broken")

    # -- scalars ----------------------------------------------------------

    def from_int(self, n: int) -> int:
        return int(n) % self.p

    def power(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = int(self.mul[out, a])
        return out

    def frobenius_map(self, e: int) -> np.ndarray:
        """Array t -> t^e."""
        return np.array([self.power(a, e) for a in range(self.q)], dtype=np.int64)

    def elements(self):
        return range(self.q)

    def subfield(self, order: int):
        """Encodings of the elements t with t^order = t."""
        f = self.frobenius_map(order)
        return [a for a in range(self.q) if f[a] == a]

    def format(self, a: int) -> str:
        a = int(a)
        if self.k == 1:
            return str(a)
        a0, a1 = a % self.p, a // self.p
        if a1 == 0:
            return str(a0)
        head = "z" if a1 == 1 else f"{a1}z"
        return head if a0 == 0 else f"{head}+{a0}"

    def parse(self, text: str) -> int:
        """Parse a signed integer or a polynomial in z such as ``2z+1``."""
        s = text.replace(" ", "").replace("*", "")
        if not s:
            raise FieldError("empty scalar")
        if not re.fullmatch(r"[+-]?(\d*z(\^\d+)?|\d+)([+-](\d*z(\^\d+)?|\d+))*", s):
            raise FieldError(f"malformed scalar {text!r}")
        if "z" in s and self.k == 1:
            raise FieldError(f"scalar {text!r} not in prime field GF({self.p})")
        total = 0
        for sign, coef, zpart, exp in re.findall(r"([+-]?)(\d*)(z?)(?:\^(\d+))?", s):
            if not coef and not zpart:
                continue
            c = int(coef) if coef else 1
            if sign == "-":
                c = -c
            e = (int(exp) if exp else 1) if zpart else 0
            term = self.from_int(c)
            if e:
                term = int(self.mul[term, self.power(self.p, e)])
            total = int(self.add[total, term])
        return total


@lru_cache(maxsize=None)
def field(q_or_p: int, k: int | None = None) -> FieldSpec:
    """field(9) or field(3, 2) -> GF(9)."""
    if k is None:
        for p in SUPPORTED_PRIMES:
            for kk in (1, 2):
                if p ** kk == q_or_p:
                    return FieldSpec(p, kk)
        raise FieldError(f"unsupported field order {q_or_p}")
    return FieldSpec(q_or_p, k)


def split_prime_power(q: int):
    for p in SUPPORTED_PRIMES:
        m, x = 0, q
        while x % p == 0:
            x //= p
            m += 1
        if x == 1 and m >= 1:
            return p, m
    raise FieldError(f"{q} is not a power of a supported prime")


# -- matrices ------------------------------------------------------------------

class PackedMatrix:
    """Square matrix over a small field.

    GF(2) rows are bit-packed (``np.packbits``, little bit order); every
    other field stores one byte per entry holding the element encoding.
    """

    __slots__ = ("n", "field", "data")

    def __init__(self, n: int, fld: FieldSpec, data: np.ndarray):
        self.n, self.field, self.data = n, fld, data

    @property
    def bitpacked(self) -> bool:
        return self.field.q == 2

    @classmethod
    def from_codes(cls, codes, fld: FieldSpec) -> "PackedMatrix":
        codes = np.asarray(codes)
        n = codes.shape[0]
        if codes.shape != (n, n):
            raise ValueError("square matrix expected")
        if codes.size and (codes.min() < 0 or codes.max() >= fld.q):
            raise FieldError("entry outside the field encoding range")
        if fld.q == 2:
            data = np.packbits(codes.astype(np.uint8), axis=1, bitorder="little")
        else:
            data = codes.astype(np.uint8)
        data.setflags(write=False)
        return cls(n, fld, data)

    @classmethod
    def from_integers(cls, mat, fld: FieldSpec) -> "PackedMatrix":
        """Reduce an integer matrix into the prime field."""
        return cls.from_codes(np.asarray(mat, dtype=np.int64) % fld.p, fld)

    @classmethod
    def identity(cls, n: int, fld: FieldSpec) -> "PackedMatrix":
        return cls.from_codes(np.eye(n, dtype=np.int64), fld)

    def codes(self) -> np.ndarray:
        if self.bitpacked:
            return np.unpackbits(self.data, axis=1, count=self.n, bitorder="little").astype(np.int64)
        return self.data.astype(np.int64)

    def planes(self) -> np.ndarray:
        """Digit planes (k, n, n) of the entries as int64."""
        c = self.codes()
        p = self.field.p
        return np.stack([(c // p ** j) % p for j in range(self.field.k)])

    @classmethod
    def from_planes(cls, planes, fld: FieldSpec) -> "PackedMatrix":
        planes = np.asarray(planes, dtype=np.int64) % fld.p
        codes = sum(planes[j] * fld.p ** j for j in range(fld.k))
        return cls.from_codes(codes, fld)

    def __eq__(self, other):
        return (isinstance(other, PackedMatrix) and self.field == other.field
                and self.n == other.n and np.array_equal(self.data, other.data))

    def __hash__(self):
        return hash((self.n, self.field.q, self.data.tobytes()))

    def __repr__(self):
        return f"PackedMatrix(n={self.n}, {self.field})"

    def __matmul__(self, other):
        return mat_mul(self, other)

    def triples(self):
        c = self.codes()
        r, s = np.nonzero(c)
        return [f"{a} {b} {self.field.format(c[a, b])}" for a, b in zip(r, s)]


def _check_pair(a: PackedMatrix, b: PackedMatrix):
    if a.field != b.field:
        raise FieldError(f"field mismatch: {a.field} vs {b.field}")
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def planes_matmul(A: np.ndarray, B: np.ndarray, fld: FieldSpec) -> np.ndarray:
    """Product of digit-plane stacks (k, n, n) over GF(p^k), reduced mod p."""
    p = fld.p
    if fld.k == 1:
        return (A[0] @ B[0])[None] % p
    c0, c1 = CONWAY[p]
    a0, a1 = A
    b0, b1 = B
    hi = a1 @ b1
    return np.stack([(a0 @ b0 - c0 * hi) % p, (a0 @ b1 + a1 @ b0 - c1 * hi) % p])


def mat_mul(a: PackedMatrix, b: PackedMatrix) -> PackedMatrix:
    _check_pair(a, b)
    fld = a.field
    if a.bitpacked:
        # row XOR-accumulate: row i of ab is the XOR of the rows k of b with a[i,k] = 1
        ac = a.codes().astype(bool)
        out = np.zeros_like(b.data)
        for k in range(a.n):
            rows = ac[:, k]
            if rows.any():
                out[rows] ^= b.data[k]
        out.setflags(write=False)
        return PackedMatrix(a.n, fld, out)
    if fld.k == 1:
        return PackedMatrix.from_codes((a.codes() @ b.codes()) % fld.p, fld)
    return PackedMatrix.from_planes(planes_matmul(a.planes(), b.planes(), fld), fld)


def _eliminate(codes: np.ndarray, fld: FieldSpec, augment: np.ndarray | None = None):
    """Gauss-Jordan elimination over the field tables; returns (rank, R, aug)."""
    M = codes.copy()
    aug = None if augment is None else augment.copy()
    n_rows, n_cols = M.shape
    rank = 0
    for col in range(n_cols):
        piv = None
        for r in range(rank, n_rows):
            if M[r, col]:
                piv = r
                break
        if piv is None:
            continue
        if piv != rank:
            M[[rank, piv]] = M[[piv, rank]]
            if aug is not None:
                aug[[rank, piv]] = aug[[piv, rank]]
        iv = fld.inv[M[rank, col]]
        M[rank] = fld.mul[iv, M[rank]]
        if aug is not None:
            aug[rank] = fld.mul[iv, aug[rank]]
        others = np.nonzero(M[:, col])[0]
        for r in others:
            if r == rank:
                continue
            f = M[r, col]
            M[r] = fld.sub[M[r], fld.mul[f, M[rank]]]
            if aug is not None:
                aug[r] = fld.sub[aug[r], fld.mul[f, aug[rank]]]
        rank += 1
        if rank == n_rows:
            break
    return rank, M, aug


def mat_inverse(a: PackedMatrix) -> PackedMatrix:
    n = a.n
    rank, _, inv = _eliminate(a.codes(), a.field, np.eye(n, dtype=np.int64))
    if rank < n:
        raise SingularMatrixError(f"matrix is singular (rank {rank} < {n})")
    return PackedMatrix.from_codes(inv, a.field)


def rank(a: PackedMatrix) -> int:
    return _eliminate(a.codes(), a.field)[0]


def rank_codes(codes: np.ndarray, fld: FieldSpec) -> int:
    return _eliminate(np.asarray(codes, dtype=np.int64), fld)[0]


def is_upper_triangular(a: PackedMatrix) -> bool:
    """True iff every entry below the diagonal vanishes.  Scans column by
    column from the left, each column from the bottom, stopping at the first
    nonzero entry."""
    c = a.codes()
    for j in range(a.n - 1):
        col = c[j + 1:, j]
        if col.any():
            return False
    return True


def jordan_type(u: PackedMatrix) -> list:
    """Jordan block sizes (descending) of a unipotent matrix."""
    fld = u.field
    n = u.n
    N = u.codes().copy()
    idx = np.arange(n)
    N[idx, idx] = fld.sub[N[idx, idx], 1]
    ranks = [n]
    P = PackedMatrix.from_codes(N, fld)
    Nm = P
    for _ in range(n):
        r = rank(Nm)
        ranks.append(r)
        if r == 0:
            break
        if r == ranks[-2]:
            raise NotUnipotentError("matrix is not unipotent")
        Nm = mat_mul(Nm, P)
    else:
        raise NotUnipotentError("matrix is not unipotent")
    # number of blocks of size >= j is ranks[j-1] - ranks[j]
    at_least = [ranks[j - 1] - ranks[j] for j in range(1, len(ranks))]
    blocks = []
    for j in range(len(at_least), 0, -1):
        exact = at_least[j - 1] - (at_least[j] if j < len(at_least) else 0)
        blocks.extend([j] * exact)
    return blocks


def format_partition(blocks) -> str:
    """7,6^2,5^3 style."""
    out = []
    for size in sorted(set(blocks), reverse=True):
        m = blocks.count(size)
        out.append(str(size) if m == 1 else f"{size}^{m}")
    return ",".join(out)


def frobenius_entrywise(a: PackedMatrix, e: int) -> PackedMatrix:
    """Raise every entry to the e-th power (e a power of p)."""
    p = a.field.p
    x = e
    while x % p == 0:
        x //= p
    if x != 1:
        raise FieldError(f"{e} is not a power of {p}")
    fmap = a.field.frobenius_map(e)
    return PackedMatrix.from_codes(fmap[a.codes()], a.field)


# -- batched kernel for the counting engine ----------------------------------

class BatchKernel:
    """Batched conjugation X -> L X R over GF(p^k) on float32 digit planes.

    Matrices are held as float arrays of shape (k, B, n, n) with entries in
    [0, p).  Over a prime field the product L X R is formed with two BLAS
    calls and a single reduction; its entries are at most n^2 (p-1)^3, and
    float32 is used only when that stays below 2^24 (float64 otherwise).
    Over GF(p^2) each product is reduced separately.
    """

    def __init__(self, fld: FieldSpec, n: int):
        self.field, self.n, self.p, self.k = fld, n, fld.p, fld.k
        bound = n * n * (fld.p - 1) ** 3 if fld.k == 1 else n * (fld.p - 1) ** 2 * (1 + 2 * fld.p)
        self.dtype = np.float32 if bound < 2 ** 24 else np.float64
        self.inv_p = 1.0 / fld.p
        self.shift = 0.5 / fld.p
        if bound * 2.0 ** -23 / fld.p >= 0.25 / fld.p:
            # the floor-based reduction needs some headroom; fall back to exact rint
            self.shift = None

    def planes(self, m) -> np.ndarray:
        if isinstance(m, PackedMatrix):
            return m.planes().astype(self.dtype)
        return np.asarray(m, dtype=self.dtype)

    def reduce(self, Y: np.ndarray) -> np.ndarray:
        """In-place reduction of nonnegative integral floats modulo p."""
        p = self.p
        if self.shift is None:
            np.subtract(Y, p * np.floor(np.rint(Y) / p), out=Y)
            return Y
        t = Y * self.inv_p
        t += self.shift
        np.floor(t, out=t)
        t *= p
        Y -= t
        return Y

    def _mul_right(self, X, R):
        """X (k,B,n,n) times R (k,n,n), unreduced for k = 1."""
        k, B, n, _ = X.shape
        if self.k == 1:
            return (X.reshape(B * n, n) @ R[0]).reshape(1, B, n, n)
        c0, c1 = CONWAY[self.p]
        x0 = X[0].reshape(B * n, n)
        x1 = X[1].reshape(B * n, n)
        hi = x1 @ R[1]
        lo = x0 @ R[0] + (self.p - c0) * hi
        mid = x0 @ R[1] + x1 @ R[0] + (self.p - c1) * hi
        out = np.stack([lo, mid]).reshape(2, B, n, n)
        return self.reduce(out)

    def _mul_left(self, L, X):
        if self.k == 1:
            return np.matmul(L[0], X[0])[None]
        c0, c1 = CONWAY[self.p]
        hi = np.matmul(L[1], X[1])
        lo = np.matmul(L[0], X[0]) + (self.p - c0) * hi
        mid = np.matmul(L[0], X[1]) + np.matmul(L[1], X[0]) + (self.p - c1) * hi
        return np.stack([lo, mid])

    def conjugate(self, L, X, R, reduce: bool = True) -> np.ndarray:
        """L X R for a batch X; L, R are digit planes (k, n, n)."""
        Y = self._mul_left(L, self._mul_right(X, R))
        return self.reduce(Y) if reduce else Y

    def zero_mod_p(self, Y: np.ndarray, flat_idx: np.ndarray) -> np.ndarray:
        """Boolean per batch entry: all listed (flattened) positions vanish mod p."""
        k, B, n, _ = Y.shape
        ok = np.ones(B, dtype=bool)
        for j in range(k):
            G = Y[j].reshape(B, n * n)[:, flat_idx]
            if self.shift is None:
                G = np.rint(G)
                ok &= ~np.any(G - self.p * np.floor(G / self.p), axis=1)
            else:
                t = G * self.inv_p
                r = t - np.floor(t + self.shift)
                ok &= ~np.any(np.abs(r) > self.shift, axis=1)
        return ok
