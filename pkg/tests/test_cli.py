import subprocess
import sys

import pytest

from orrw.cli import main, parse_args
from orrw.fixtures import fixture_path


def path_of(name):
    return str(fixture_path(name))


def test_valid_simulate_config():
    a = parse_args(["simulate", "--graph", path_of("star3"), "--start", "0", "--delta", "2",
                    "--samples", "100000", "--seed", "7"])
    assert a.delta == 2.0 and a.samples == 100_000 and a.seed == 7


@pytest.mark.parametrize("argv", [
    ["alpha", "--graph", "star3", "--delta", "-1"],
    ["alpha", "--graph", "star3", "--delta", "0"],
    ["alpha", "--delta", "1"],
    ["sweep-alpha", "--graph", "star3", "--delta-grid", "1:0.1:5"],
    ["sweep-alpha", "--graph", "star3", "--delta-grid", "0.1:10"],
    ["alpha", "--graph", "star3", "--bogus"],
])
def test_rejected_arguments(argv):
    with pytest.raises(SystemExit) as exc:
        parse_args(argv)
    assert exc.value.code == 2


def test_missing_graph_file(capsys):
    assert main(["alpha", "--graph", "no/such/file.txt", "--start", "0"]) == 2
    assert "error" in capsys.readouterr().err


def test_alpha_output(capsys):
    assert main(["alpha", "--graph", path_of("star3"), "--start", "0", "--delta", "1"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert abs(float(out[0].split()[1]) - 0.346574) < 1e-6
    assert out[1].startswith("attained on {")


def test_rate_output(capsys):
    assert main(["rate", "--graph", "star3", "--delta", "2", "--nu", "0.5,0.45,0.05"]) == 0
    out = capsys.readouterr().out
    assert "I_delta" in out and "attained by" in out
    assert main(["rate", "--graph", "star3", "--nu", "0.4,0.3,0.3"]) == 0
    assert "I_delta inf" in capsys.readouterr().out


def test_sweep_alpha_csv(tmp_path):
    out = tmp_path / "a.csv"
    assert main(["sweep-alpha", "--graph", path_of("path4"), "--start", "1",
                 "--delta-grid", "0.1:10:50", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "delta,alpha_c"
    vals = [float(l.split(",")[1]) for l in lines[1:]]
    assert len(vals) == 50
    assert all(a > b for a, b in zip(vals, vals[1:]))


@pytest.mark.parametrize("cmd", [
    ["simulate", "--graph", "star3", "--delta", "2", "--samples", "2000", "--horizon", "15", "--seed", "4"],
    ["survival", "--graph", "path4", "--delta", "0.5", "--horizon", "60"],
    ["sweep-rate", "--graph", "star3", "--delta", "2", "--nu-grid", "0:0.5:11"],
])
def test_csv_is_byte_identical(tmp_path, cmd):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(cmd + ["--out", str(a)]) == 0
    assert main(cmd + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().count(",") > 0


def test_family_file(tmp_path, capsys):
    fam = tmp_path / "fam.txt"
    fam.write_text("# cover set only\n0-1\n")
    args = ["alpha", "--graph", "star3", "--delta", "1", "--family", str(fam)]
    assert main(args) == 0
    assert "alpha_c 0.346574" in capsys.readouterr().out
    fam.write_text("0-1 0-2\n")
    assert main(args) == 2
    capsys.readouterr()
    with pytest.warns(UserWarning):
        assert main(args + ["--close-family"]) == 0
    assert "alpha_c 0.000000" in capsys.readouterr().out


def test_help_lists_flags():
    text = subprocess.run([sys.executable, "-m", "orrw", "simulate", "--help"],
                          capture_output=True, text=True, check=True).stdout
    for flag in ("--graph", "--start", "--delta", "--family", "--samples", "--horizon",
                 "--seed", "--out", "--window"):
        assert flag in text
    text = subprocess.run([sys.executable, "-m", "orrw", "sweep-alpha", "--help"],
                          capture_output=True, text=True, check=True).stdout
    assert "--delta-grid" in text


def test_verify_exits_zero():
    r = subprocess.run([sys.executable, "-m", "orrw", "verify"], capture_output=True, text=True)
    assert r.returncode == 0, r.stdout
    assert "0 failed" in r.stdout
