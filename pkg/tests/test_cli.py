"""Golden-file tests for the command-line driver.

Set SPACETIME_REGEN_GOLDEN=1 to rewrite the golden files from the current
output (review the diff before committing).
"""
import os
import shlex
import subprocess
import sys
from pathlib import Path

import pytest

from spacetime.cli import main

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
DATA = HERE / "data"

CASES = {
    "eval": 'eval "(a<b)|(b<c)" --bind a=0 --bind b=1 --bind c=2',
    "eval_inf": 'eval "a & b" --bind a=inf --bind b=inf',
    "eval_unbound": 'eval "a < b" --bind a=0',
    "eval_parse_error": 'eval "a < b < c"',
    "check": 'check "a < b" --horizon 6',
    "check_net": "check --net comparator.net --horizon 4",
    "check_missing_file": "check --net missing.net",
    "check_both": 'check "a" --net comparator.net',
    "identities_one": "identities --horizon 5 --id 15",
    "identities_report": "identities --horizon 4 --id 35 --id 41",
    "identities_unknown": "identities --id 99",
    "completeness": "completeness --horizon 6",
    "table": 'table "a & b"',
    "table_delay": 'table "a + 1"',
    "canon": 'canon "((a + 2) < b) + 1"',
    "canon_net": "canon --net noncausal_looking.net",
    "synth": "synth example.table",
    "synth_invalid": "synth bad.table",
    "sort": "sort --spikes 3,1,inf,0,2",
    "sort_bad": "sort --spikes 3,x",
    "tnn_neuron": "tnn neuron --profile biexponential --weights 5 --threshold 4 --spikes 0",
    "tnn_neuron_oracle": "tnn neuron --profile step.profile --weights 2,1 --threshold 3 --spikes 0,1 --oracle",
    "tnn_neuron_never": "tnn neuron --profile biexponential --weights 1 --threshold 3 --spikes 0",
    "tnn_wta": "tnn wta --spikes 2,4,2,7",
    "allen_eval": "allen eval --relation meets --x 1,4 --y 4,6",
    "allen_eval_fails": "allen eval --relation before --x 0,5 --y 3,6",
    "allen_eval_degenerate": "allen eval --relation before --x 3,3 --y 4,6",
    "allen_expr": ('allen expr "(Ds < Rs) | (Rf < Df) | (Df < Bs)" --bind Ds=7:00 --bind Rs=7:10 '
                   "--bind Rf=8:00 --bind Df=8:10 --bind Bs=9:00"),
    "allen_implied": 'allen implied "(Ds < Rs) | (Rf < Df) | (Df < Bs)" --pair Ds,Df --horizon 5',
    "allen_implied_unsat": 'allen implied "(Xf < Ys) | (Yf < Xs)" --pair Xs,Ys --horizon 4',
    "allen_sat_unknown": 'allen sat "Xf < Ys" --interval Xs,Xf',
    "allen_sat": 'allen sat "(Xf < Ys) | (Xs & Yf)" --horizon 5 --interval Xs,Xf --interval Ys,Yf',
}


def run(argv, capsys):
    try:
        code = main(argv)
    except SystemExit as e:  # argparse usage errors and --version
        code = e.code
    out, err = capsys.readouterr()
    return code, out, err


def render(cmd, code, out, err):
    return f"$ spacetime {cmd}\n# exit {code}\n# stdout\n{out}# stderr\n{err}"


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name, capsys, monkeypatch):
    monkeypatch.chdir(DATA)
    cmd = CASES[name]
    got = render(cmd, *run(shlex.split(cmd), capsys))
    path = GOLDEN / f"{name}.txt"
    if os.environ.get("SPACETIME_REGEN_GOLDEN"):
        path.write_text(got)
    assert got == path.read_text()


def test_every_subcommand_has_a_golden_case():
    covered = {" ".join(c.split()[:2]) if c.split()[0] in ("tnn", "allen") else c.split()[0]
               for c in CASES.values()}
    assert covered >= {"eval", "check", "identities", "completeness", "table", "canon", "synth",
                       "sort", "tnn neuron", "tnn wta", "allen eval", "allen expr", "allen implied"}


@pytest.mark.parametrize("name, expected", [
    ("eval", 0), ("check", 0), ("synth_invalid", 1), ("allen_implied_unsat", 1),
    ("eval_parse_error", 2), ("check_missing_file", 2), ("sort_bad", 2),
])
def test_exit_codes(name, expected, capsys, monkeypatch):
    monkeypatch.chdir(DATA)
    code, out, err = run(shlex.split(CASES[name]), capsys)
    assert code == expected
    if expected == 2:
        assert err and not out


def test_usage_errors(capsys):
    assert run(["nosuch"], capsys)[0] == 2
    assert run(["eval"], capsys)[0] == 2
    assert run(["sort", "--spikes", "1", "--bogus"], capsys)[0] == 2
    code, out, _ = run(["--version"], capsys)
    assert code == 0 and out.startswith("spacetime ")


def test_rerun_is_byte_identical():
    cmd = [sys.executable, "-m", "spacetime", "check", "a & (b | c)", "--horizon", "9",
           "--seed", "3", "--jobs", "2"]
    first = subprocess.run(cmd, capture_output=True, cwd=DATA)
    second = subprocess.run(cmd, capture_output=True, cwd=DATA)
    assert first.returncode == second.returncode == 0
    assert first.stdout == second.stdout and first.stdout.startswith(b"causality PASS")


def test_jobs_do_not_change_output(capsys):
    a = run(["identities", "--horizon", "4", "--id", "42", "--jobs", "1"], capsys)
    b = run(["identities", "--horizon", "4", "--id", "42", "--jobs", "3"], capsys)
    assert a == b and a[0] == 0
