"""Counting Borel cosets fixed by a unipotent element, cell by cell.

The cosets of B_0^F in G^F are represented by v w'^{-1} with w' = wdot(w)
and v running over U_w^F = prod_{beta in Phi_w^+} X_beta^F.  The coset is
fixed by u iff w' (v^{-1} u v) w'^{-1} lies in B_0, and since B_0 is the
stabiliser of the height filtration of M this only depends on the root
permutation of w: Y = v^{-1} u v must map each basis vector v_gamma into the
span of the basis vectors of "twisted height" >= ht(w(gamma)) (u_i count as
height 0).  The fast path therefore tests a fixed set of matrix positions
for vanishing and never builds w'.  ``count_cell_reference`` implements the
definition literally and is used to cross-check.
"""
from __future__ import annotations

import hashlib
import itertools
import os
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .chevgroup import ChevalleyGroup, GroupElement, WordSpec, parse_word
from .gfp import BatchKernel, PackedMatrix, field as make_field, is_upper_triangular, jordan_type
from .gfp import NotUnipotentError, split_prime_power
from .weyl import (EnumerationCapError, WeylElement, enumerate_by_length, format_word,
                   inversion_set, parse_weyl_word, poincare)

BASIS_ORDER_VERSION = "height-desc-1"
THREADS_ENV = "CHEVGREEN_THREADS"


class CheckpointMismatch(RuntimeError):
    pass


class Interrupted(RuntimeError):
    """Raised by a progress callback to stop a run (the checkpoint stays valid)."""


@dataclass(frozen=True)
class CellResult:
    w: WeylElement
    size: int
    fixed: int
    scanned: int

    @property
    def done(self) -> bool:
        return self.scanned == self.size

    @property
    def status(self) -> str:
        return "done" if self.done else f"partial:{self.scanned}"

    def line(self) -> str:
        return f"w={format_word(self.w.word)} size={self.size} fixed={self.fixed} status={self.status}"


# -- group set-up ---------------------------------------------------------------

def make_group(label: str, q: int, twisted: bool = False) -> ChevalleyGroup:
    p, m = split_prime_power(q)
    if twisted:
        return ChevalleyGroup(label, make_field(q * q), twisted=True, q=q)
    return ChevalleyGroup(label, make_field(q))


def parameter_sets(group: ChevalleyGroup):
    """(split parameters in F_q, pair parameters in F_{q^2}) as field encodings."""
    fld = group.field
    q = group.frob.q
    return fld.subfield(q), list(range(fld.q))


@dataclass
class CellPlan:
    """Factorisation of U_w^F into levels; each level is one root (parameter
    in F_q) or a gamma-orbit pair (parameter t in F_{q^2}, factor
    x_beta(t) x_{beta-dagger}(t^q))."""
    w: WeylElement
    levels: list      # list of tuples of root indices
    pair: list        # per level: True for a pair
    check_idx: np.ndarray
    size: int

    @property
    def depth(self) -> int:
        return len(self.levels)


def twisted_heights(group: ChevalleyGroup, w: WeylElement) -> np.ndarray:
    """ht(w(gamma)) for each basis vector v_gamma of M, 0 for the u_i."""
    rs = group.rs
    out = np.zeros(group.n, dtype=np.int64)
    for m, (kind, k) in enumerate(group.basis.labels):
        if kind == "v":
            out[m] = rs.height[w.perm[k]]
    return out


def plan_cell(group: ChevalleyGroup, w: WeylElement) -> CellPlan:
    rs = group.rs
    inv = inversion_set(rs, w)
    q = group.frob.q
    levels, pair = [], []
    if group.twisted:
        gamma = rs.graph_automorphism
        if not np.array_equal(gamma[w.perm], w.perm[gamma]):
            raise ValueError(f"w={w.label} is not fixed by the graph automorphism")
        seen = set()
        for b in inv:
            if b in seen:
                continue
            bd = int(gamma[b])
            seen.update((b, bd))
            if bd == b:
                levels.append((b,))
                pair.append(False)
            else:
                levels.append((b, bd))
                pair.append(True)
    else:
        levels = [(b,) for b in inv]
        pair = [False] * len(inv)
    hts = twisted_heights(group, w)
    n = group.n
    a, b = np.nonzero(hts[:, None] < hts[None, :])
    idx = (a * n + b).astype(np.int64)
    return CellPlan(w, levels, pair, idx, q ** w.length)


class CellCounter:
    """Batched odometer over U_w^F with prefix caching."""

    def __init__(self, group: ChevalleyGroup, u: GroupElement, max_batch: int | None = None):
        self.group = group
        self.kernel = BatchKernel(group.field, group.n)
        self.u_planes = self.kernel.planes(u.matrix)
        n, k = group.n, group.field.k
        if max_batch is None:
            budget = 48 * 2 ** 20
            max_batch = max(1, budget // (k * n * n * np.dtype(self.kernel.dtype).itemsize * 4))
        self.max_batch = max_batch
        self.split_params, self.pair_params = parameter_sets(group)
        self._mats: dict = {}

    def level_params(self, is_pair: bool):
        return self.pair_params if is_pair else self.split_params

    def _factor(self, roots: tuple, t: int):
        """(L, R) planes with R = the level factor at parameter t, L = R^{-1}."""
        key = (roots, t)
        if key not in self._mats:
            g, fld = self.group, self.group.field
            if len(roots) == 1:
                R = g.x(roots[0], t)
                L = g.x(roots[0], int(fld.neg[t]))
            else:
                tq = fld.power(t, g.frob.q)
                R = g.x(roots[0], t) @ g.x(roots[1], tq)
                L = g.x(roots[1], int(fld.neg[tq])) @ g.x(roots[0], int(fld.neg[t]))
            self._mats[key] = (self.kernel.planes(L.matrix), self.kernel.planes(R.matrix))
        return self._mats[key]

    def prefix(self, plan: CellPlan, params: Iterable[int]) -> np.ndarray:
        X = self.u_planes[:, None].copy()
        for lev, t in enumerate(params):
            L, R = self._factor(plan.levels[lev], t)
            X = self.kernel.conjugate(L, X, R)
        return X

    def count(self, plan: CellPlan, X: np.ndarray | None = None, start: int = 0) -> int:
        """Number of parameter tuples (levels start..) whose conjugate passes."""
        if X is None:
            X = self.u_planes[:, None].copy()
        if start == plan.depth:
            return int(self.kernel.zero_mod_p(X, plan.check_idx).sum())
        return self._count(plan, X, start)

    def _count(self, plan: CellPlan, X: np.ndarray, level: int) -> int:
        roots = plan.levels[level]
        params = self.level_params(plan.pair[level])
        last = level == plan.depth - 1
        if last:
            total = 0
            for t in params:
                L, R = self._factor(roots, t)
                Y = self.kernel.conjugate(L, X, R, reduce=False)
                total += int(self.kernel.zero_mod_p(Y, plan.check_idx).sum())
            return total
        kids = [self.kernel.conjugate(*self._order(self._factor(roots, t), X)) for t in params]
        merged = np.concatenate(kids, axis=1) if len(kids) > 1 else kids[0]
        del kids
        total = 0
        B = merged.shape[1]
        for s in range(0, B, self.max_batch):
            total += self._count(plan, merged[:, s:s + self.max_batch], level + 1)
        return total

    @staticmethod
    def _order(LR, X):
        L, R = LR
        return L, X, R


def count_cell(group: ChevalleyGroup, u: GroupElement, w: WeylElement,
               counter: CellCounter | None = None) -> CellResult:
    """|Q_{1,w}(u)| by exhaustive enumeration of U_w^F."""
    counter = counter or CellCounter(group, u)
    plan = plan_cell(group, w)
    fixed = counter.count(plan)
    return CellResult(w, plan.size, fixed, plan.size)


def count_cell_reference(group: ChevalleyGroup, u: GroupElement, w: WeylElement) -> CellResult:
    """Literal version: for each v form g = v w'^{-1} and test g^{-1} u g upper triangular."""
    plan = plan_cell(group, w)
    wd, _ = group.fixed_wdot(w) if group.twisted else (group.wdot(w), None)
    wdinv = wd.inverse()
    fld = group.field
    choices = [group_level_params(group, is_pair) for is_pair in plan.pair]
    fixed = 0
    for params in itertools.product(*choices):
        v = group.identity()
        for roots, t in zip(plan.levels, params):
            if len(roots) == 1:
                v = v @ group.x(roots[0], t)
            else:
                v = v @ group.x(roots[0], t) @ group.x(roots[1], fld.power(t, group.frob.q))
        g = v @ wdinv
        z = g.inverse() @ u @ g
        if is_upper_triangular(z.matrix):
            fixed += 1
    return CellResult(w, plan.size, fixed, plan.size)


def group_level_params(group: ChevalleyGroup, is_pair: bool):
    split, pair = parameter_sets(group)
    return pair if is_pair else split


# -- jobs, checkpoints and aggregation ------------------------------------------

def auto_filter(u: WordSpec | str, rs) -> list:
    """Simple roots (0-based) in the maximal prefix of x-factors at simple roots."""
    spec = parse_word(u) if isinstance(u, str) else u
    out = []
    for f in spec.factors:
        if f.kind != "x" or sum(f.root) != 1 or min(f.root) < 0:
            break
        out.append(f.root.index(1))
    return out


def parse_filter(spec: str | None, u: WordSpec, rs) -> tuple:
    """'none' | 'auto' | comma-separated simple-root labels (1-based) or root
    coordinate vectors separated by ';'."""
    if spec is None or spec.strip().lower() in ("", "none"):
        return ()
    s = spec.strip()
    if s.lower() == "auto":
        return tuple(sorted(set(auto_filter(u, rs))))
    if "[" in s or ";" in s:
        out = []
        for part in s.split(";"):
            coords = [int(x) for x in part.strip().strip("[]").split(",")]
            out.append(rs.root_index(coords))
        return tuple(sorted(set(out)))
    return tuple(sorted(set(int(x) - 1 for x in s.replace(" ", "").split(",") if x)))


def filter_text(S) -> str:
    return "none" if not S else ",".join(str(a + 1) for a in S)


@dataclass
class CountJob:
    label: str
    q: int
    u: WordSpec
    maxlen: int
    twisted: bool = False
    filter: tuple = ()   # root indices that must stay positive
    threads: int = 1
    checkpoint: str | None = None
    chunk_leaves: int = 3 ** 9

    def fingerprint(self) -> str:
        key = "|".join([self.label, str(self.q), str(int(self.twisted)), self.u.text(),
                        filter_text(self.filter), BASIS_ORDER_VERSION])
        return hashlib.sha256(key.encode()).hexdigest()[:16]

    def header(self) -> str:
        return (f"job {self.fingerprint()} type={self.label} q={self.q} twist={int(self.twisted)} "
                f"maxlen={self.maxlen} filter={filter_text(self.filter)}")


@dataclass
class CountReport:
    job: CountJob
    cells: list
    exact: bool
    total_cosets: int

    @property
    def total(self) -> int:
        return sum(c.fixed for c in self.cells)

    @property
    def complete(self) -> bool:
        return all(c.done for c in self.cells)

    def by_length(self) -> dict:
        out: dict = {}
        for c in self.cells:
            s = out.setdefault(c.w.length, [0, 0, 0])
            s[0] += 1
            s[1] += c.size
            s[2] += c.fixed
        return dict(sorted(out.items()))

    def lines(self, per_cell: bool = False) -> list:
        j = self.job
        out = [f"type {'2' if j.twisted else ''}{j.label}", f"q {j.q}", f"u {j.u.text()}",
               f"maxlen {j.maxlen}", f"filter {filter_text(j.filter)}"]
        for length, (ncells, size, fixed) in self.by_length().items():
            out.append(f"length {length} cells={ncells} cosets={size} fixed={fixed}")
        if per_cell:
            out.extend(c.line() for c in self.cells)
        kind = "exact" if self.exact and self.complete else "lower-bound"
        out.append(f"total {self.total} ({kind})")
        return out


def read_checkpoint(path: str, job: CountJob) -> dict:
    """Latest recorded state per canonical word: word -> (fixed, scanned)."""
    state: dict = {}
    if not os.path.exists(path):
        return state
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        return state
    head = lines[0].split()
    if head[0] != "job" or head[1] != job.fingerprint():
        raise CheckpointMismatch(f"checkpoint {path} belongs to a different job ({' '.join(head[:2])})")
    for ln in lines[1:]:
        fields = dict(tok.split("=", 1) for tok in ln.split())
        word = parse_weyl_word(fields["w"])
        status = fields["status"]
        scanned = int(fields["size"]) if status == "done" else int(status.split(":")[1])
        state[word] = (int(fields["fixed"]), scanned)
    return state


class _CheckpointWriter:
    def __init__(self, path: str | None, job: CountJob):
        self.fh = None
        if path:
            fresh = not os.path.exists(path) or os.path.getsize(path) == 0
            self.fh = open(path, "a")
            if fresh:
                self.fh.write(job.header() + "\n")
                self.fh.flush()

    def write(self, cell: CellResult):
        if self.fh:
            self.fh.write(cell.line() + "\n")
            self.fh.flush()

    def close(self):
        if self.fh:
            self.fh.close()


def _odometer_params(choices, index: int):
    """Digits of an odometer index, most significant level first."""
    out = []
    for ch in reversed(choices):
        index, r = divmod(index, len(ch))
        out.append(ch[r])
    return out[::-1]


def _chunking(plan: CellPlan, counter: CellCounter, chunk_leaves: int):
    """Number of leading levels fixed per chunk and the resulting chunk count."""
    choices = [counter.level_params(pr) for pr in plan.pair]
    lead = 0
    inner = plan.size
    while lead < plan.depth and inner > chunk_leaves:
        inner //= len(choices[lead])
        lead += 1
    nchunks = plan.size // inner
    return choices, lead, nchunks, inner


def _run_chunk(counter: CellCounter, plan: CellPlan, choices, lead: int, chunk: int) -> int:
    params = _odometer_params(choices[:lead], chunk)
    X = counter.prefix(plan, params)
    return counter.count(plan, X, lead)


# process-pool worker state
_WORKER: dict = {}


def _worker_init(label, q, twisted, utext):
    g = make_group(label, q, twisted)
    u = g.evaluate(utext)
    _WORKER["group"] = g
    _WORKER["counter"] = CellCounter(g, u)


def _worker_task(args):
    word, lead, chunk = args
    g, counter = _WORKER["group"], _WORKER["counter"]
    w = g.rs.element(word)
    plan = plan_cell(g, w)
    choices = [counter.level_params(pr) for pr in plan.pair]
    return _run_chunk(counter, plan, choices, lead, chunk)


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def job_cells(job: CountJob, group: ChevalleyGroup, cap: int = 5_000_000) -> list:
    elems = enumerate_by_length(group.rs, job.maxlen, filter=job.filter or None, cap=cap)
    if job.twisted:
        gamma = group.rs.graph_automorphism
        elems = [w for w in elems if np.array_equal(gamma[w.perm], w.perm[gamma])]
    return elems


def check_unipotent(group: ChevalleyGroup, u: GroupElement):
    jordan_type(u.matrix)  # raises NotUnipotentError
    if not group.is_fixed(u):
        raise ValueError("u is not fixed by the Frobenius map")


def count_upto(job: CountJob, progress: Callable | None = None, group: ChevalleyGroup | None = None,
               cells: list | None = None) -> CountReport:
    """Sum of |Q_{1,w}(u)| over the (filtered) w with l(w) <= maxlen.

    Results are exact integers summed per cell, so they do not depend on the
    number of worker processes or on the chunking.  ``progress`` is called
    with each finished CellResult; it may raise ``Interrupted`` to stop.
    """
    group = group or make_group(job.label, job.q, job.twisted)
    u = group.evaluate(job.u)
    check_unipotent(group, u)
    elems = cells if cells is not None else job_cells(job, group)
    state = read_checkpoint(job.checkpoint, job) if job.checkpoint else {}
    writer = _CheckpointWriter(job.checkpoint, job)
    counter = CellCounter(group, u)
    results: list = [None] * len(elems)
    pool = None
    try:
        todo = []
        for k, w in enumerate(elems):
            plan = plan_cell(group, w)
            fixed, scanned = state.get(w.word, (0, 0))
            if scanned == plan.size:
                results[k] = CellResult(w, plan.size, fixed, scanned)
                if progress:
                    progress(results[k])
                continue
            todo.append((k, w, plan, fixed, scanned))
        threads = job.threads if job.threads else default_threads()
        if threads > 1 and todo:
            import multiprocessing as mp
            ctx = mp.get_context("fork")
            pool = ctx.Pool(threads, initializer=_worker_init,
                            initargs=(job.label, job.q, job.twisted, job.u.text()))
        for k, w, plan, fixed, scanned in todo:
            choices, lead, nchunks, inner = _chunking(plan, counter, job.chunk_leaves)
            first = scanned // inner
            fixed = fixed if first * inner == scanned else 0
            first = first if first * inner == scanned else 0
            chunks = range(first, nchunks)
            if pool is not None and len(chunks) > 1:
                it = pool.imap(_worker_task, [(w.word, lead, c) for c in chunks])
            else:
                it = (_run_chunk(counter, plan, choices, lead, c) for c in chunks)
            done_chunks = first
            last_write = time.monotonic()
            for val in it:
                fixed += val
                done_chunks += 1
                if done_chunks < nchunks and time.monotonic() - last_write > 30:
                    writer.write(CellResult(w, plan.size, fixed, done_chunks * inner))
                    last_write = time.monotonic()
            results[k] = CellResult(w, plan.size, fixed, plan.size)
            writer.write(results[k])
            if progress:
                progress(results[k])
    finally:
        if pool is not None:
            pool.terminate()
        writer.close()
    done = [r for r in results if r is not None]
    N = group.rs.positive_count
    exact = (not job.filter) and job.maxlen >= N
    total_cosets = sum(r.size for r in done)
    return CountReport(job, done, exact, total_cosets)


def full_coset_count(group: ChevalleyGroup, u: GroupElement | str, cap: int = 1_000_000) -> int:
    """Exact Q_1(u): every coset of B_0^F, for small split groups."""
    if group.twisted:
        raise ValueError("full_coset_count is for split groups")
    P = poincare(group.rs)
    total = P.coset_count(group.frob.q)
    if total > cap:
        raise EnumerationCapError(f"{total} cosets exceed the cap {cap}")
    if isinstance(u, str):
        u = group.evaluate(u)
    counter = CellCounter(group, u)
    out = 0
    for w in enumerate_by_length(group.rs, group.rs.positive_count):
        out += counter.count(plan_cell(group, w))
    return out


def coset_key(g: GroupElement) -> bytes:
    """Canonical form of the coset g B_0.

    B_0 is the stabiliser of the standard flag of M, so right multiplication
    by it performs column operations towards the right.  Each column is
    normalised at its lowest nonzero entry and then cleared from all later
    columns at that row; the result depends only on g B_0."""
    fld = g.field
    M = g.codes().copy()
    n = M.shape[0]
    for j in range(n):
        col = M[:, j]
        r = int(np.nonzero(col)[0][-1])
        col = fld.mul[fld.inv[col[r]], col]
        M[:, j] = col
        if j + 1 < n:
            row = M[r, j + 1:]
            M[:, j + 1:] = fld.sub[M[:, j + 1:], fld.mul[col[:, None], row[None, :]]]
    return M.astype(np.uint8).tobytes()


def _panel_steps(group: ChevalleyGroup):
    """For each panel type: (length increment, [(s, s^-1)]) with g s B_0 running
    over the chambers of the panel of g B_0 other than g B_0 itself.

    Split: one panel per simple root, s = x_i(t) n_i(1) with t in F_q.
    Twisted: one panel per gamma-orbit; a fixed node uses t in F_q, an
    orbit {i, j} of orthogonal roots uses x_i(t) x_j(t^q) n_i(1) n_j(1) with
    t in F_{q^2}."""
    fld = group.field
    q = group.frob.q
    rank = group.rs.rank
    if group.twisted:
        gamma = group.rs.graph_automorphism
        orbits = sorted({tuple(sorted((i, int(gamma[i])))) for i in range(rank)})
    else:
        orbits = [(i,) for i in range(rank)]
    out = []
    for orb in orbits:
        nodes = sorted(set(orb))
        n = group.identity()
        for i in nodes:
            n = n @ group.n_elem(i, 1)
        ninv = n.inverse()
        ts = fld.subfield(q) if len(nodes) == 1 else range(fld.q)
        steps = []
        for t in ts:
            x = group.x(nodes[0], t)
            if len(nodes) == 2:
                x = x @ group.x(nodes[1], fld.power(t, q))
            steps.append((x @ n, ninv @ x.inverse()))
        out.append((len(nodes), steps))
    return out


def fixed_chambers(group: ChevalleyGroup, u: GroupElement | str, cap: int = 200_000) -> list:
    """Exact Q_1(u) split by Bruhat length l(w), without enumerating cells.

    The cosets gB_0 fixed by F and u are the chambers of the building of G^F
    fixed by u.  A minimal gallery between two such chambers is unique given
    its type, so u fixes it too: the fixed chambers form a convex set
    containing B_0.  A breadth-first search across panels therefore meets all
    of them, first along minimal galleries, and summing the lengths of the
    panel types crossed gives l(w) for the cell B_0 w B_0 (in the twisted case
    l is the length in W, not in W^F).  Returns counts indexed by l(w)."""
    if isinstance(u, str):
        u = group.evaluate(u)
    if not is_upper_triangular(u.matrix):
        raise ValueError("u must lie in B_0")
    if not group.is_fixed(u):
        raise ValueError("u is not fixed by the Frobenius map")
    panels = _panel_steps(group)
    start = group.identity()
    seen = {coset_key(start)}
    level = [(start, start, 0)]
    counts: dict = {}
    while level:
        nxt = []
        for g, ginv, length in level:
            counts[length] = counts.get(length, 0) + 1
            for inc, steps in panels:
                for s, sinv in steps:
                    h, hinv = g @ s, sinv @ ginv
                    if not is_upper_triangular((hinv @ u @ h).matrix):
                        continue
                    key = coset_key(h)
                    if key in seen:
                        continue
                    seen.add(key)
                    nxt.append((h, hinv, length + inc))
                    if len(seen) > cap:
                        raise EnumerationCapError(f"more than {cap} fixed cosets")
        level = nxt
    top = max(counts)
    return [counts.get(k, 0) for k in range(top + 1)]


# -- tiny groups: complete census -------------------------------------------------

@dataclass
class UnipotentClass:
    representative: GroupElement
    word: WordSpec
    size: int
    centraliser_order: int
    jordan: list


@dataclass
class Census:
    group_order: int
    unipotent_count: int
    classes: list
    coset_count: int


def _u_elements(group: ChevalleyGroup):
    """All elements of U_0^F = prod_{beta > 0} X_beta as (params, element)."""
    rs = group.rs
    fld = group.field
    N = rs.positive_count
    items = [((), group.identity())]
    for b in range(N):
        nxt = []
        for params, g in items:
            for t in range(fld.q):
                nxt.append((params + (t,), g @ group.x(b, t) if t else g))
        items = nxt
    return items


def _is_unipotent(g: GroupElement) -> bool:
    """(g - 1)^n = 0, by repeated squaring over the prime field."""
    fld = g.field
    if fld.k != 1:
        try:
            jordan_type(g.matrix)
            return True
        except NotUnipotentError:
            return False
    n = g.matrix.n
    N = (g.codes() - np.eye(n, dtype=np.int64)) % fld.p
    e = 1
    while e < n:
        N = (N @ N) % fld.p
        e *= 2
    return not N.any()


def tiny_group_oracle(group: ChevalleyGroup, cap: int = 100_000) -> Census:
    """Enumerate G^F = U_w w'^{-1} B_0^F, find its unipotent classes and
    centraliser orders."""
    if group.twisted:
        raise ValueError("oracle is for split groups")
    rs = group.rs
    q = group.frob.q
    P = poincare(rs)
    order = P.group_order(q)
    if order > cap:
        raise EnumerationCapError(f"|G^F| = {order} exceeds the cap {cap}")
    fld = group.field
    U = _u_elements(group)
    torus = [g for _, g in group.split_torus(range(1, fld.q))]
    B = [h @ x for h in torus for _, x in U]
    elements = set()
    for w in enumerate_by_length(rs, rs.positive_count):
        wdinv = group.wdot(w).inverse()
        plan = plan_cell(group, w)
        choices = [range(fld.q)] * plan.depth
        for params in itertools.product(*choices):
            v = group.identity()
            for roots, t in zip(plan.levels, params):
                if t:
                    v = v @ group.x(roots[0], t)
            g = v @ wdinv
            for b in B:
                elements.add(g @ b)
    if len(elements) != order:
        raise RuntimeError(f"enumerated {len(elements)} elements, expected {order}")
    unip = [g for g in elements if _is_unipotent(g)]
    unip_set = set(unip)
    gens = []
    for i in range(rs.rank):
        for r in (i, i + rs.positive_count):
            x = group.x(r, 1)
            gens.append((x, x.inverse()))
    if fld.q > 2:
        for h in torus:
            gens.append((h, h.inverse()))
    # representative words: the U-element of each class with the fewest
    # nonzero parameters, ties broken lexicographically
    u_words = {}
    for params, g in sorted(U, key=lambda it: (sum(1 for t in it[0] if t), it[0])):
        u_words.setdefault(g, params)
    seen: dict = {}
    classes = []
    for g in sorted(unip_set, key=lambda e: (sum(1 for t in u_words.get(e, (9,) * 99) if t),
                                             u_words.get(e, (9,) * 99))):
        if g in seen:
            continue
        cid = len(classes)
        orbit = [g]
        seen[g] = cid
        k = 0
        while k < len(orbit):
            x = orbit[k]
            k += 1
            for a, ainv in gens:
                y = a @ x @ ainv
                if y not in seen:
                    seen[y] = cid
                    orbit.append(y)
        rep = min((e for e in orbit if e in u_words),
                  key=lambda e: (sum(1 for t in u_words[e] if t), u_words[e]))
        params = u_words[rep]
        factors = [f"x[{','.join(map(str, rs.roots[b]))}]({fld.format(t)})"
                   for b, t in enumerate(params) if t]
        word = parse_word("*".join(factors))
        classes.append(UnipotentClass(rep, word, len(orbit), order // len(orbit),
                                      jordan_type(rep.matrix)))
    return Census(order, len(unip_set), classes, P.coset_count(q))
