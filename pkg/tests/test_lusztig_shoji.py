from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chevgreen.lusztig_shoji import (CharacterTableError, LSError, character_table,
                                     compute_character_table, compute_omega, evaluate_poly,
                                     format_poly, interpolate, lambda_from_class_data,
                                     parse_character_table, parse_poly, parse_springer_table,
                                     solve_instance, solve_symbolic, springer_table)
from chevgreen.weyl import poincare, root_system

# p_{E',E} for G2, transcribed row by row in the order of the Springer data.
G2_P3 = ["phi1,6", "phi1,3'", "phi1,3''", "phi2,2", "phi2,1", "phi1,0"], [
    ["1", "1", "1", "q^2+1", "q^4+1", "1"],
    ["0", "1", "0", "1", "1", "1"],
    ["0", "0", "1", "1", "1", "1"],
    ["0", "0", "0", "1", "1", "1"],
    ["0", "0", "0", "0", "1", "1"],
    ["0", "0", "0", "0", "0", "1"],
]
G2_GOOD = ["phi1,6", "phi1,3''", "phi2,2", "phi2,1", "phi1,3'", "phi1,0"], [
    ["1", "1", "q^2+1", "q^4+1", "q^2", "1"],
    ["0", "1", "1", "1", "0", "1"],
    ["0", "0", "1", "1", "1", "1"],
    ["0", "0", "0", "1", "0", "1"],
    ["0", "0", "0", "0", "1", "0"],
    ["0", "0", "0", "0", "0", "1"],
]
TABLES = {3: G2_P3, 2: G2_GOOD, 5: G2_GOOD}


def _swap(text, a, b):
    return (text.replace(f"char={a} ", "char=@ ").replace(f"char={b} ", f"char={a} ")
            .replace("char=@ ", f"char={b} "))


@pytest.mark.parametrize("p", [3, 2, 5])
@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_g2_tables(p, q):
    labels, rows = TABLES[p]
    ls = solve_instance("G2", p, q)
    assert ls.labels == labels
    for a, row in zip(labels, rows):
        assert ls.row(a) == [evaluate_poly(parse_poly(t), q) for t in row]


@pytest.mark.parametrize("p", [3, 2])
def test_g2_residual_zero(p):
    for q in (2, 3, 4, 5):
        spr = springer_table("G2", p)
        om = compute_omega(character_table("G2"), root_system("G2"), q, spr.d_map)
        ls = solve_instance("G2", p, q)
        assert all(x == 0 for row in ls.residual(om) for x in row)


@pytest.mark.parametrize("p", [3, 2])
def test_g2_symbolic(p):
    labels, rows = TABLES[p]
    sym = solve_symbolic("G2", p)
    assert sym.labels == labels
    for i, row in enumerate(rows):
        assert [c for c in sym.P[i]] == [parse_poly(t) for t in row]


def test_diagonal_and_triangular():
    ls = solve_instance("F4", 3, 3)
    n = len(ls.labels)
    pos = {c: k for k, c in enumerate(ls.labels)}
    for i in range(n):
        assert ls.P[i][i] == 1
        for j in range(n):
            if ls.P[i][j] and i != j:
                assert ls.d[ls.labels[i]] > ls.d[ls.labels[j]]
    # Lambda is block diagonal along unipotent classes
    for cls, chars in ls.blocks:
        for a in chars:
            for b in ls.labels:
                if b not in chars:
                    assert ls.Lambda[pos[a]][pos[b]] == 0


def test_ptilde_g2_good():
    for q in (2, 4, 5, 7):
        ls = solve_instance("G2", 2 if q % 2 == 0 else q, q)
        assert ls.p_tilde["phi2,1"] == 2 * q + 1
        assert ls.p_tilde["phi1,3'"] == q
        assert ls.p_tilde["phi1,6"] == evaluate_poly(list(poincare(root_system("G2")).coefficients), q)


def test_ptilde_f4_q3():
    pt = solve_instance("F4", 3, 3).p_tilde
    assert [pt[c] for c in ("phi12,4", "phi6,6''", "phi9,6'", "phi1,12'")] == [1498, 594, 963, 81]


def test_steinberg_entry():
    for label, q in [("G2", 4), ("F4", 3), ("F4", 2)]:
        rs = root_system(label)
        spr = springer_table(label, 3 if label == "F4" else 2)
        om = compute_omega(character_table(label), rs, q, spr.d_map)
        assert om.entry("phi1,0", "phi1,0", "tilde") == q ** (2 * rs.positive_count)
        n = len(om.labels)
        assert all(om.omega[i][j] == om.omega[j][i] for i in range(n) for j in range(n))


@pytest.mark.parametrize("pair", ["phi8,3", "phi2,4", "phi2,16"])
def test_invisible_springer_swaps(pair):
    text = springer_table("F4", 3).to_text()
    a, b = pair + "'", pair + "''"
    base = solve_instance("F4", 3, 3).p_tilde
    ls = solve_instance("F4", 3, 3, springer=parse_springer_table(_swap(text, a, b)))
    relabel = {a: b, b: a}
    assert {relabel.get(k, k): v for k, v in ls.p_tilde.items()} == base


@pytest.mark.parametrize("a,b", [("phi2,2", "phi2,1"), ("phi1,3''", "phi2,2")])
def test_wrong_springer_data_rejected(a, b):
    text = springer_table("G2", 2).to_text()
    with pytest.raises(LSError):
        solve_instance("G2", 2, 2, springer=parse_springer_table(_swap(text, a, b)))


def test_springer_table_checks():
    text = springer_table("G2", 2).to_text()
    with pytest.raises(ValueError):
        parse_springer_table(text.replace("d=1 class=G2(a1) localsys=r", "d=2 class=G2(a1) localsys=r"))
    with pytest.raises(ValueError):
        parse_springer_table(text.replace("localsys=r", "localsys=1"))
    with pytest.raises(ValueError):
        parse_springer_table(text + "row char=phi2,2 d=2 class=~A1 localsys=eps dimE=1\n")


@pytest.mark.parametrize("label", ["G2", "B3", "F4"])
def test_computed_table_matches_bundled(label):
    bundled = character_table(label)
    fresh = compute_character_table(root_system(label))
    fresh.validate()
    assert fresh.char_labels == bundled.char_labels
    assert fresh.class_sizes == bundled.class_sizes
    assert (fresh.values == bundled.values).all()


def test_character_table_rejects_bad_rows():
    text = character_table("G2").to_text()
    lines = text.splitlines()
    k = next(i for i, ln in enumerate(lines) if ln.startswith("char") and "phi2,1" in ln)
    parts = lines[k].split()
    parts[-1] = str(int(parts[-1]) + 1)
    lines[k] = " ".join(parts)
    with pytest.raises(CharacterTableError):
        parse_character_table("\n".join(lines)).validate()


def test_lambda_from_class_data():
    # G2(a1) in good characteristic: centralisers 6q^4, 2q^4, 3q^4
    q = 5
    G = poincare(root_system("G2")).group_order(q)
    reps = [6 * q ** 4, 2 * q ** 4, 3 * q ** 4]
    v, zero = lambda_from_class_data(reps, G, [1, 1, 1], [1, 1, 1])
    assert v == Fraction(G, q ** 4) and not zero
    v, zero = lambda_from_class_data(reps, G, [2, 0, -1], [1, 1, 1])
    assert v == 0 and zero
    v, zero = lambda_from_class_data([2, 2], 8, [1, -1], [1, 1], signs=(1, -1))
    assert zero
    v, zero = lambda_from_class_data([2, 2], 8, [1, -1], [1, -1], signs=(1, -1))
    assert v == -8 and not zero


def test_parse_poly():
    assert parse_poly("2q^12(q^2-1)") == [0] * 12 + [-2, 0, 2]
    assert parse_poly("30q^3+20q^2+6q+1") == [1, 6, 20, 30]
    assert parse_poly("q^4+1") == [1, 0, 0, 0, 1]
    assert format_poly(parse_poly("q^4-2q+1")) == "q^4-2q+1"


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=1, max_size=6))
def test_interpolation_roundtrip(coeffs):
    xs = list(range(2, 2 + len(coeffs)))
    ys = [evaluate_poly(coeffs, x) for x in xs]
    hold = len(coeffs) + 2
    got = interpolate(xs, ys, hold, evaluate_poly(coeffs, hold))
    trimmed = list(coeffs)
    while len(trimmed) > 1 and trimmed[-1] == 0:
        trimmed.pop()
    assert got == trimmed
