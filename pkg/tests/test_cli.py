import pytest

from chevgreen.cli import CASES, job_cost, main, workflow_case
from chevgreen.weyl import enumerate_by_length, root_system


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_rootsys(capsys):
    code, out = run(capsys, "rootsys", "--type", "E6", "--maxlen", "12", "--q", "3")
    assert code == 0
    assert "elements  8335" in out and "1569060811" in out
    code, out = run(capsys, "rootsys", "--type", "E6", "--maxlen", "12", "--filter", "5,4,3,1,6")
    assert "elements  47" in out and "4220491" in out


def test_rootsys_tsv(capsys):
    code, out = run(capsys, "rootsys", "--type", "G2", "--format", "tsv")
    assert "order\t12" in out and "degrees\t2,6" in out


@pytest.mark.parametrize("label,q,maxlen,flt", [("F4", 3, 9, ()), ("E6", 3, 12, (4, 3, 2, 0, 5)),
                                                ("E6", 2, 5, (0, 2))])
def test_dry_run_cost_is_enumeration_sum(label, q, maxlen, flt):
    rs = root_system(label)
    elems = enumerate_by_length(rs, maxlen, filter=flt or None)
    assert job_cost(label, q, maxlen, flt) == (len(elems), sum(q ** w.length for w in elems))


def test_count_command(capsys):
    code, out = run(capsys, "count", "--type", "F4", "--q", "3", "--maxlen", "3", "--u",
                    "x[1,0,0,0](1)*x[0,1,0,0](1)*x[0,1,1,0](1)*x[0,0,1,1](1)")
    assert code == 0 and "total 19" in out
    code, out = run(capsys, "count", "--type", "F4", "--q", "3", "--maxlen", "3", "--dry-run",
                    "--u", "x[1,0,0,0](1)")
    assert "cells  " in out and "cosets  526" in out


def test_count_bad_word(capsys):
    code = main(["count", "--type", "G2", "--q", "3", "--maxlen", "2", "--u", "x[1,1,1](1)"])
    assert code == 2
    assert "error" in capsys.readouterr().err


def test_liealg(capsys):
    code, out = run(capsys, "liealg", "verify", "--type", "G2")
    assert code == 0
    code, out = run(capsys, "liealg", "basis", "--type", "B2")
    assert code == 0 and "structure_constants ok" in out


def test_ls_solve(capsys):
    code, out = run(capsys, "ls-solve", "--type", "G2", "--p", "3", "--q", "2")
    assert code == 0 and "phi1,6  1  1  1  5  17  1" in out
    code, out = run(capsys, "ls-solve", "--type", "G2", "--p", "2", "--symbolic")
    assert "q^4+1" in out and "q^2+1" in out


def test_resolve_signs(capsys):
    code, out = run(capsys, "resolve-signs", "--class-data", "F4-F4(a1)", "--ptilde", "from-ls",
                    "--q", "3", "--observe", "F4(a1)=19", "--lift", "2")
    assert code == 0
    assert "delta_phi2,4' = +1" in out and "Q1 = 19" in out
    code, out = run(capsys, "resolve-signs", "--class-data", "F4-F4(a1)", "--ptilde", "from-ls",
                    "--q", "3", "--observe", "F4(a1)=20")
    assert code == 2 and "no sign vector" in out


def test_resolve_signs_file(capsys, tmp_path):
    f = tmp_path / "pt.txt"
    f.write_text("ptilde char=phi2,1 value=2q+1\nptilde char=phi1,3' value=q\n")
    code, out = run(capsys, "resolve-signs", "--class-data", "G2-G2(a1)", "--ptilde", str(f),
                    "--q", "2", "--observe", "G2(a1)=9")
    assert code == 0 and "delta_phi1,3' = +1" in out


def test_green(capsys):
    code, out = run(capsys, "green", "--type", "G2", "--p", "2", "--q", "2", "--w", "1,2",
                    "--default-sign", "1")
    assert code == 0 and "G2  1  1" in out and "1  1  63" in out
    code = main(["green", "--type", "G2", "--p", "2", "--q", "2"])
    assert code == 2


def test_bundle(capsys):
    code, out = run(capsys, "bundle", "--format", "tsv")
    assert code == 0 and "springer_G2_p3.txt\tSpringer correspondence" in out


def test_case_list(capsys):
    code, out = run(capsys, "case", "--list")
    assert code == 0
    assert all(cid in out for cid in CASES)


def test_case_f4_a1(capsys):
    code, out = run(capsys, "case", "F4-a1")
    assert code == 0
    assert "count u~ maxlen 3: 19 fixed cosets" in out
    assert "delta_phi2,4' = +1" in out


def test_case_dry_run():
    rep = workflow_case("F4-a3", dry_run=True)
    assert any("cosets=" in ln for ln in rep.lines)
    rs = root_system("F4")
    elems = enumerate_by_length(rs, 9)
    want = sum(3 ** w.length for w in elems)
    assert any(f"cosets={want}" in ln for ln in rep.lines)


def test_case_reported_only():
    rep = workflow_case("E8-b6-partial")
    text = "\n".join(rep.lines)
    assert "not reproducible at desk scale" in text
    assert rep.resolution.determined() == {"840_13": -1}


def test_unknown_case():
    with pytest.raises(KeyError):
        workflow_case("B2-nothing")


def test_chambers(capsys):
    code, out = run(capsys, "chambers", "--type", "F4", "--q", "3", "--u",
                    "x[1,0,0,0](1)*x[0,1,0,0](1)*x[0,1,1,0](1)*x[0,0,1,1](1)")
    assert code == 0 and "total  19 (exact)" in out and "length 3  6" in out
    code = main(["chambers", "--type", "G2", "--q", "3", "--u", "x[-1,0](1)"])
    assert code == 2
