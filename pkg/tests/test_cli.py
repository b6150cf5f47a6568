import shutil
import subprocess
import sys

import pytest

from asp.cli import main
from asp.sysid import CSV_FIELDS

HEADER = ",".join(CSV_FIELDS)


def test_run_writes_csv(tmp_path):
    out = tmp_path / "rls.csv"
    assert main(["run", "--alg", "rls", "--iters", "40", "--trials", "2", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").splitlines()
    assert lines[0] == HEADER and len(lines) == 41
    assert lines[1].startswith("1,")


def test_run_to_stdout(capsys):
    assert main(["run", "--alg", "wiener-ls", "--trials", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == HEADER and len(lines) == 2


def test_compare_merges_with_algorithm_column(capsys):
    assert main(["compare", "--algs", "lms,nlms,rls", "--iters", "10", "--trials", "1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "algorithm," + HEADER
    assert [ln.split(",")[0] for ln in lines[1:]] == ["lms"] * 10 + ["nlms"] * 10 + ["rls"] * 10


def test_floats_carry_17_significant_digits(capsys):
    main(["run", "--alg", "lms", "--iters", "3", "--trials", "1"])
    row = capsys.readouterr().out.splitlines()[2].split(",")
    assert float(repr(float(row[2]))) == float(row[2])
    assert format(float(row[2]), ".17g") == row[2]


@pytest.mark.parametrize("alg, n, expected", [("lms", 5, "11"), ("nlms", 5, "17"), ("kaczmarz", 7, "23")])
def test_ops(capsys, alg, n, expected):
    assert main(["ops", "--alg", alg, "--n", str(n)]) == 0
    assert capsys.readouterr().out.strip() == expected


@pytest.mark.parametrize("argv", [
    ["run", "--alg", "lms", "--n", "0"],
    ["run", "--alg", "lms", "--noise", "-1"],
    ["ops", "--alg", "wiener-ls", "--n", "5"],
    ["compare", "--algs", "lms,bogus"],
])
def test_configuration_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "configuration error" in capsys.readouterr().err


def test_argument_errors_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["run", "--alg", "not-an-algorithm"])
    assert info.value.code == 2


def test_numerical_failure_exits_3(capsys):
    assert main(["run", "--alg", "lms", "--mu", "1e100", "--iters", "50", "--trials", "1"]) == 3
    assert "numerical failure" in capsys.readouterr().err


def cli_command():
    exe = shutil.which("asp")
    return [exe] if exe else [sys.executable, "-m", "asp.cli"]


def test_compare_is_byte_identical_across_processes(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"out{i}.csv"
        subprocess.run(cli_command() + ["compare", "--algs", "lms,nlms,rls,kalman", "--iters", "50",
                                        "--trials", "4", "--seed", "7", "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and len(outs[0]) > 0
