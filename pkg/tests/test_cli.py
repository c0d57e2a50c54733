import subprocess
import sys

import pytest

from steinitz_measure.cli import run


def cli(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("argv, want", [
    (["st", "lcm", "12", "2^inf*3"], "2^inf*3"),
    (["st", "eval", "2^inf*3^1"], "2^inf*3"),
    (["st", "div", "2^inf*3^2", "12"], "2^inf*3"),
    (["st", "leq", "2^inf*3", "2^inf*3*5"], "true"),
    (["st", "connected", "2^inf*3", "2^inf*5"], "true q=3/5"),
    (["spec", "member", "5/4 * 2^inf", "S(3/2; 2^inf)"], "true"),
    (["spec", "equal", "S(inf; 2^inf)", "S(inf; 2^inf*3)"], "true"),
])
def test_examples(capsys, argv, want):
    code, out, _ = cli(capsys, *argv)
    assert code == 0 and out.strip() == want


def test_spec_equal_prints_witness(capsys):
    code, out, _ = cli(capsys, "spec", "equal", "S(1; 2^inf)", "S+(1; 2^inf)")
    assert code == 0 and out.strip() == "false witness=1/1 * 2^inf"
    code, out, _ = cli(capsys, "spec", "equal", "S(1; 2^inf)", "S(1; 3^inf)")
    assert code == 0 and out.strip() == "false"


def test_spec_canon(capsys):
    code, out, _ = cli(capsys, "spec", "canon", "S(3/2; 2^inf*3)")
    assert code == 0
    assert out.splitlines()[0] == "bounded class=2^inf r*=9/2 attained=true"


def test_chain_build_table(capsys):
    code, out, _ = cli(capsys, "chain", "build", "S(3/2; 5^inf)", "--depth", "3", "--b", "5^i")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "model S(3/2; 5^inf) b=5^i depth=3"
    assert lines[2].split() == ["1", "5", "7", "35", "7/5"]
    assert lines[3].split() == ["2", "25", "37", "185", "37/25"]


def test_chain_files(tmp_path, capsys):
    f = tmp_path / "a.chain"
    f.write_text("model S(1; 2^inf) b=2^i depth=4\n")
    g = tmp_path / "b.chain"
    g.write_text("model S(1; 2^inf) b=2^2i depth=4\n")
    code, out, _ = cli(capsys, "chain", "classify", str(f))
    assert code == 0 and out.strip() == "spectrum S(1/1; 2^inf)"
    code, out, _ = cli(capsys, "chain", "measure", str(f), "2:0110")
    assert code == 0 and out.splitlines()[0] == "mu = 1/2"
    code, out, _ = cli(capsys, "equiv", str(f), str(g), "--steps", "4")
    assert code == 0 and out.splitlines()[-1] == "alpha = 1/1"
    assert out.splitlines()[0].split() == ["step", "a_i", "b_i", "mu'(a_i)", "mu''(b_i)", "ratio"]


def test_classify_explicit_chain(tmp_path, capsys):
    f = tmp_path / "c.chain"
    f.write_text("chain unital=false st=2\nstage 1 standard=2\nstage 2 standard=3\nembed 1 0->{0},1->{1}\n")
    code, out, _ = cli(capsys, "chain", "classify", str(f))
    assert code == 0 and out.splitlines()[0] == "valid"
    assert "prefix facts only" in out


@pytest.mark.parametrize("argv", [
    ["st", "eval", "2^x"],
    ["spec", "member", "1", "S(1 2^inf)"],
    ["chain", "build", "S(1; 2^inf)", "--b", "2^q"],
])
def test_parse_errors_exit_2(capsys, argv):
    code, out, err = cli(capsys, *argv)
    assert code == 2 and out == ""
    assert err.startswith("error: parse error at position")


@pytest.mark.parametrize("argv", [
    ["st", "div", "2^3", "16"],
    ["st", "lcm", "2"],
    ["chain", "classify", "/nonexistent/file"],
    ["chain", "build", "S(1; 2^inf)", "--depth", "0"],
])
def test_domain_errors_exit_1(capsys, argv):
    code, _, err = cli(capsys, *argv)
    assert code == 1 and err.startswith("error: ")


def test_domain_error_on_invalid_chain(tmp_path, capsys):
    f = tmp_path / "bad.chain"
    f.write_text("chain unital=true\nstage 1 standard=2\nstage 2 standard=3\nembed 1 0->{0},1->{1}\n")
    code, _, err = cli(capsys, "chain", "classify", str(f))
    assert code == 1 and "invalid chain at stage 1" in err


def test_output_is_byte_identical_across_processes(tmp_path):
    f = tmp_path / "a.chain"
    f.write_text("model S(3/2; 5^inf) b=5^i depth=4\n")
    g = tmp_path / "b.chain"
    g.write_text("model S(3/2; 5^inf) b=5^2i depth=4\n")
    argv = [sys.executable, "-m", "steinitz_measure", "equiv", str(f), str(g), "--steps", "3"]
    runs = [subprocess.run(argv, capture_output=True, check=True).stdout for _ in range(2)]
    assert runs[0] == runs[1] and runs[0].endswith(b"alpha = 35/37\n")


def test_unknown_verb_exits_2():
    r = subprocess.run([sys.executable, "-m", "steinitz_measure", "frobnicate"], capture_output=True)
    assert r.returncode == 2
