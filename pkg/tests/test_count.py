import os

import numpy as np
import pytest

from chevgreen.chevgroup import parse_word
from chevgreen.count import (CheckpointMismatch, CountJob, Interrupted, auto_filter, count_cell,
                             count_cell_reference, count_upto, coset_key, fixed_chambers,
                             full_coset_count, parse_filter, plan_cell, group_level_params,
                             read_checkpoint, tiny_group_oracle)
from chevgreen.gfp import NotUnipotentError
from chevgreen.weyl import enumerate_by_length

from conftest import group

F4_A1 = "x[1,0,0,0](1)*x[0,1,0,0](1)*x[0,1,1,0](1)*x[0,0,1,1](1)"
F4_A2 = "x[1,1,0,0](1)*x[0,1,2,0](1)*x[0,0,0,1](1)*x[0,0,1,1](1)"
G2_A1 = "x[1,1](1)*x[1,2](1)"  # |C(u)| = 96 in G2(2)
X18 = ("x[0,0,0,0,1,0](1)*x[0,0,0,1,0,0](1)*x[0,0,1,0,0,0](1)*x[1,0,0,0,0,0](1)"
       "*x[0,0,0,0,0,1](1)*x[1,1,1,1,1,1](1)")


def job(label, q, u, maxlen, **kw):
    return CountJob(label, q, parse_word(u), maxlen, **kw)


def test_identity_cell():
    g = group("F4", 3)
    u = g.evaluate(F4_A1)
    assert count_cell(g, u, g.rs.element(())).fixed == 1


def test_f4_a1_count():
    r = count_upto(job("F4", 3, F4_A1, 3), group=group("F4", 3))
    assert r.total == 19
    assert not r.exact
    assert r.lines()[-1] == "total 19 (lower-bound)"


def test_filter_agrees_f4():
    g = group("F4", 3)
    u = parse_word(F4_A1)
    S = parse_filter("auto", u, g.rs)
    assert S == (0, 1)
    a = count_upto(job("F4", 3, F4_A1, 3), group=g)
    b = count_upto(job("F4", 3, F4_A1, 3, filter=S), group=g)
    assert a.total == b.total == 19
    assert len(b.cells) < len(a.cells)


def test_auto_filter():
    rs = group("E6", 3).rs
    assert sorted(auto_filter(X18, rs)) == [0, 2, 3, 4, 5]
    assert auto_filter("x[1,1,1,1,1,1](1)*x[1,0,0,0,0,0](1)", rs) == []
    assert parse_filter("none", parse_word(X18), rs) == ()
    assert parse_filter("1,3", parse_word(X18), rs) == (0, 2)
    assert parse_filter("[0,0,0,0,1,0]", parse_word(X18), rs) == (4,)


@pytest.mark.parametrize("label,q,u,maxlen", [("G2", 2, G2_A1, 6), ("G2", 3, "x[1,0](1)*x[1,1](2)", 4),
                                              ("B3", 3, "x[1,0,0](1)*x[0,0,1](1)", 3),
                                              ("F4", 2, F4_A1, 3)])
def test_fast_counter_matches_reference(label, q, u, maxlen):
    g = group(label, q)
    x = g.evaluate(u)
    for w in enumerate_by_length(g.rs, maxlen):
        fast = count_cell(g, x, w)
        ref = count_cell_reference(g, x, w)
        assert fast.fixed == ref.fixed
        assert 0 <= fast.fixed <= fast.size == q ** w.length


def test_g2_full_cosets():
    g = group("G2", 2)
    assert full_coset_count(g, "") == 189
    assert full_coset_count(g, G2_A1) == 9


def test_monotone_bounds_g2():
    g = group("G2", 2)
    full = full_coset_count(g, G2_A1)
    totals = [count_upto(job("G2", 2, G2_A1, L), group=g).total for L in range(7)]
    assert totals == sorted(totals)
    assert totals[-1] == full
    r = count_upto(job("G2", 2, G2_A1, 6), group=g)
    assert r.exact and r.lines()[-1] == f"total {full} (exact)"


def test_conjugation_invariance_g2():
    g = group("G2", 2)
    u = g.evaluate(G2_A1)
    rng = np.random.default_rng(4)
    base = full_coset_count(g, u)
    for _ in range(5):
        h = g.identity()
        for r in rng.integers(0, g.rs.size, 8):
            h = h @ g.x(int(r), 1)
        v = h @ u @ h.inverse()
        assert full_coset_count(g, v) == base


def test_oracle_matches_cells():
    g = group("F4", 3)
    counts = fixed_chambers(g, F4_A2)
    assert sum(counts) == 112
    r = count_upto(job("F4", 3, F4_A2, len(counts) - 1), group=g)
    assert [r.by_length()[k][2] for k in range(len(counts))] == counts
    assert fixed_chambers(group("G2", 2), G2_A1) and sum(fixed_chambers(group("G2", 2), G2_A1)) == 9


def test_coset_key():
    g = group("G2", 3)
    b = g.x(0, 1) @ g.h_elem(1, 2) @ g.x(3, 2)
    n = g.n_elem(0, 1)
    assert coset_key(n) == coset_key(n @ b)
    assert coset_key(n) != coset_key(g.identity())


def test_not_unipotent_rejected():
    with pytest.raises(NotUnipotentError):
        count_upto(job("G2", 3, "h[1,0](2)", 1), group=group("G2", 3))


@pytest.mark.parametrize("threads", [1, 2, 8])
def test_thread_determinism(threads):
    g = group("F4", 3)
    base = count_upto(job("F4", 3, F4_A2, 5, chunk_leaves=9), group=g)
    r = count_upto(job("F4", 3, F4_A2, 5, threads=threads, chunk_leaves=9), group=g)
    assert r.lines(per_cell=True) == base.lines(per_cell=True)


def test_checkpoint_resume(tmp_path):
    g = group("F4", 3)
    path = str(tmp_path / "ck.txt")
    whole = count_upto(job("F4", 3, F4_A2, 6), group=g)
    seen = []

    def stop_after_five(cell):
        seen.append(cell)
        if len(seen) == 5:
            raise Interrupted("fault injection")

    with pytest.raises(Interrupted):
        count_upto(job("F4", 3, F4_A2, 6, checkpoint=path), progress=stop_after_five, group=g)
    state = read_checkpoint(path, job("F4", 3, F4_A2, 6))
    assert len(state) == 5
    resumed = count_upto(job("F4", 3, F4_A2, 6, checkpoint=path), group=g)
    assert resumed.lines(per_cell=True) == whole.lines(per_cell=True)
    with open(path) as fh:
        head = fh.readline().split()
    assert head[0] == "job" and "type=F4" in head and "q=3" in head
    with pytest.raises(CheckpointMismatch):
        count_upto(job("F4", 3, F4_A1, 6, checkpoint=path), group=g)


def test_partial_chunk_resume(tmp_path):
    """A partial:K line restarts the cell from the recorded chunk."""
    g = group("F4", 3)
    j = job("F4", 3, F4_A2, 7, chunk_leaves=9)
    whole = count_upto(j, group=g)
    cell = max(whole.cells, key=lambda c: c.size)
    path = tmp_path / "ck.txt"
    j2 = job("F4", 3, F4_A2, 7, chunk_leaves=9, checkpoint=str(path))
    path.write_text(j2.header() + "\n" + f"w={','.join(str(i + 1) for i in cell.w.word)} "
                    f"size={cell.size} fixed=0 status=partial:0\n")
    assert count_upto(j2, group=g).total == whole.total


def test_twisted_cells_fixed():
    """Every enumerated v in the 2E6(2) cells of length <= 2 is F-fixed."""
    import itertools
    g = group("E6", 2, True)
    gamma = g.rs.graph_automorphism
    fld = g.field
    n = 0
    for w in enumerate_by_length(g.rs, 4):
        if not np.array_equal(gamma[w.perm], w.perm[gamma]) or w.length > 4:
            continue
        plan = plan_cell(g, w)
        if plan.depth > 2:
            continue
        choices = [group_level_params(g, pr) for pr in plan.pair]
        for params in itertools.product(*choices):
            v = g.identity()
            for roots, t in zip(plan.levels, params):
                v = v @ g.x(roots[0], t)
                if len(roots) == 2:
                    v = v @ g.x(roots[1], fld.power(t, 2))
            assert g.is_fixed(v)
            n += 1
        assert plan.size == 2 ** w.length
    assert n > 0


def test_twisted_fast_matches_reference():
    g = group("E6", 2, True)
    u = g.evaluate("x[1,0,0,0,0,0](1)*x[0,0,0,0,0,1](1)*x[0,1,0,0,0,0](1)")
    gamma = g.rs.graph_automorphism
    for w in enumerate_by_length(g.rs, 4):
        if np.array_equal(gamma[w.perm], w.perm[gamma]):
            assert count_cell(g, u, w).fixed == count_cell_reference(g, u, w).fixed


def test_g2_census():
    c = tiny_group_oracle(group("G2", 2))
    assert c.group_order == 12096
    assert c.unipotent_count == 4096 == sum(k.size for k in c.classes)
    assert c.coset_count == 189
    orders = sorted(k.centraliser_order for k in c.classes if k.jordan == [4, 4, 3, 3])
    assert orders == [32, 48, 96]
    assert sum(c.group_order // k.centraliser_order for k in c.classes) == 4096


# fixed chambers of y46 (class E7(a5)) in E7(2) by Bruhat length, from the chamber search
E7_A5_Y46_Q2 = [1, 14, 108, 472, 1240, 2432, 3712, 4416, 4544, 3968, 2912, 2016, 1280, 832, 512,
                256, 128, 128]


def y46_word():
    from chevgreen.signs import bundled_class_data
    return bundled_class_data("E7-E7(a5)").element("y46").word


def test_e7_a5_counts_match_chamber_prefix():
    g = group("E7", 2)
    r = count_upto(job("E7", 2, y46_word(), 5), group=g)
    assert [r.by_length()[k][2] for k in range(6)] == E7_A5_Y46_Q2[:6]


@pytest.mark.extended
def test_e7_a5_q2_chambers_resolve_sign():
    from chevgreen import signs as sg
    by_len = fixed_chambers(group("E7", 2), y46_word(), cap=100_000)
    assert by_len == E7_A5_Y46_Q2
    cd = sg.bundled_class_data("E7-E7(a5)")
    res = sg.resolve([cd], [sg.parse_observation(f"E7(a5):(123)={sum(by_len)}")], 2)
    assert res.determined() == {"280_9": 1, "35_13": 1}
