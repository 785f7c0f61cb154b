import subprocess
import sys

import pytest

from halfint.cli import RunConfig, main, synth_eigenform
from halfint.forms import CoeffTable, check_welldefined
from halfint.shimura import EigenSystem, global_identity_check


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_field_info(capsys):
    code, out, _ = run(capsys, "field-info", "--field", "Q(sqrt{5})")
    assert code == 0
    assert "D_F=5" in out and "(3+sqrt5)/2" in out


def test_usage_errors(capsys):
    code, _, err = run(capsys, "field-info", "--field", "Q", "--bogus")
    assert code == 2 and err.count("\n") == 1
    assert run(capsys)[0] == 2
    assert run(capsys, "nosuch")[0] == 2
    assert run(capsys, "field-info", "--field", "Q(sqrt{3})")[0] == 2


@pytest.fixture(scope="module")
def synth_files(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    paths = synth_eigenform(RunConfig("Q(sqrt{5})", 17, 3000, str(d / "a")))
    return d, paths


def test_synth_reproducible(synth_files, tmp_path):
    d, paths = synth_files
    again = synth_eigenform(RunConfig("Q(sqrt{5})", 17, 3000, str(tmp_path / "a")))
    for p, q in zip(paths, again):
        assert p.read_bytes() == q.read_bytes()


def test_synth_table_checks(synth_files):
    _, (seed, eigen, tbl) = synth_files
    t = CoeffTable.read(tbl)
    sys_ = EigenSystem.read(eigen)
    assert sys_.max_abs() <= 2
    assert global_identity_check(t, sys_, 2.0).passed
    assert check_welldefined(t).max_violation < 1e-12


def test_lift_reproduces_table(synth_files, tmp_path, capsys):
    _, (seed, eigen, tbl) = synth_files
    out = tmp_path / "b.tbl"
    code, _, _ = run(capsys, "lift", "--seed", str(seed), "--eigen", str(eigen),
                     "--bound", "3000", "--out", str(out))
    assert code == 0
    assert out.read_bytes() == tbl.read_bytes()


def test_determine(synth_files, tmp_path, capsys):
    _, (_, _, tbl) = synth_files
    code, out, _ = run(capsys, "determine", "--f", str(tbl), "--g", str(tbl))
    assert code == 0 and "kappa=1\n" in out and "verdict: equal" in out
    t = CoeffTable.read(tbl)
    t.scaled(-2).write(tmp_path / "c.tbl")
    code, out, _ = run(capsys, "determine", "--f", str(tbl), "--g", str(tmp_path / "c.tbl"),
                       "--quiet")
    assert code == 0 and out.strip() == "kappa=-0.5 equal"


def test_report_and_quiet(synth_files, tmp_path, capsys):
    _, (_, _, tbl) = synth_files
    rep = tmp_path / "r.txt"
    code, out, _ = run(capsys, "rankin", "--f", str(tbl), "--checkpoints", "300,600,1200,2400",
                       "--quiet", "--report", str(rep))
    assert code == 0 and out.count("\n") == 1
    lines = rep.read_text().splitlines()
    assert lines[0] == "T\tS(T)\tS(T)/T" and len(lines) == 6


def test_scan(synth_files, capsys):
    _, (_, _, tbl) = synth_files
    code, out, _ = run(capsys, "scan", "--table", str(tbl), "--tmax", "3000")
    assert code == 0
    sups = [float(l.split("\t")[1]) for l in out.splitlines()[1:11]]
    assert all(0.5 <= s <= 1 for s in sups)


def test_theta_and_fe_check(tmp_path, capsys):
    th = tmp_path / "th.tbl"
    assert run(capsys, "theta", "--field", "Q", "--bound", "2000", "--out", str(th))[0] == 0
    code, out, _ = run(capsys, "fe-check", "--table", str(th), "--mirror", str(th),
                       "--grid", "0.3,0.5,0.7:0.5,2,5", "--quiet")
    assert code == 0 and "pass" in out
    bad = CoeffTable.read(th)
    bad.set_rep(bad.field.element(1), -2.0)
    bad.write(tmp_path / "bad.tbl")
    code, _, _ = run(capsys, "fe-check", "--table", str(th), "--mirror", str(tmp_path / "bad.tbl"),
                     "--grid", "0.7,0.3")
    assert code == 1


def test_lfun(tmp_path, capsys):
    th = tmp_path / "th.tbl"
    main(["theta", "--field", "Q(sqrt{5})", "--bound", "5000", "--out", str(th), "--quiet"])
    capsys.readouterr()
    code, out, _ = run(capsys, "lfun", "--table", str(th), "--s", "3,0.5", "--mirror", str(th))
    assert code == 0
    rows = dict(l.split("\t") for l in out.splitlines())
    assert set(rows) >= {"L", "tail", "Lambda_series", "Lambda"}
    assert run(capsys, "lfun", "--table", str(th), "--s", "0.5,0")[0] == 2


def test_small_commands(capsys):
    code, out, _ = run(capsys, "factor", "--field", "Q(sqrt{5})", "--elt", "6")
    assert code == 0 and "inert" in out
    code, out, _ = run(capsys, "chi", "--field", "Q", "--tau", "5", "--eta", "6", "--quiet")
    assert out.strip() == "chi=1"
    code, out, _ = run(capsys, "enumerate", "--field", "Q(sqrt{2})", "--bound", "10", "--quiet")
    assert out.strip() == "7 orbits of norm <= 10"


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "halfint.cli", "field-info", "--field", "Q",
                        "--quiet"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "Q D_F=1"
