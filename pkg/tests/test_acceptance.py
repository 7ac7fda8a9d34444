"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (``pytest tests/test_acceptance.py -s``) or directly as a
script (``python tests/test_acceptance.py``), which exits non-zero if any
criterion fails.
"""
import contextlib
import io
import itertools
import os
import shlex
import subprocess
import sys
import warnings
from collections import Counter
from pathlib import Path

import numpy as np
import pytest

from spacetime.lattice import INF, INF_CODE, OpKind, binary
from spacetime.network import Builder, Delay, evaluate, evaluate_batch, random_network
from spacetime.verify import (TEMPORAL_XNOR, TEMPORAL_XOR, Horizon, check_causality,
                              check_spacetime, completeness_suite, identity_suite,
                              verify_identity)
from spacetime.syntax import parse_expr
from spacetime.forms import (build_table, enumerate_sequences, load_table, parse_sequence,
                             synthesize_canonical)
from spacetime.tnn import (NeuronSpec, build_neuron, build_sorter, build_synapse, build_wta,
                           evaluate_neuron, load_profile, microweight_gate, microweight_value,
                           neuron_oracle, steps_of)
from spacetime import allen
from spacetime.cli import main

HERE = Path(__file__).parent
GOLDEN, DATA = HERE / "golden", HERE / "data"


def dom(T):
    return list(range(T + 1)) + [INF]


def three_way(kind, a, b):
    """Operator oracle split on a<b, a=b, a>b (INF above all integers)."""
    if a is INF and b is INF:
        rel = "="
    elif a is INF:
        rel = ">"
    elif b is INF:
        rel = "<"
    else:
        rel = "<" if a < b else ("=" if a == b else ">")
    table = {  # (a<b, a=b, a>b)
        "min": (a, a, b), "max": (b, a, a), "lt": (a, INF, INF), "le": (a, a, INF),
        "gt": (INF, INF, a), "ge": (INF, a, a), "eq": (INF, a, INF), "ne": (a, INF, a),
        "xmin": (a, INF, b), "xmax": (b, INF, a),
    }
    return table[kind]["<=>".index(rel)]


def c1():
    bad = sum(binary(k, a, b) != three_way(k.value, a, b)
              for k in OpKind for a, b in itertools.product(dom(6), repeat=2))
    return bad == 0, f"{len(OpKind)} kinds x 64 pairs, mismatches={bad}"


REPORT_IDS = ["35", "36", "37", "38", "39", "41"]


def c2():
    h = Horizon(T=5)
    suite = identity_suite(h)
    mandatory = {i for i, m, _, _ in suite.entries if m}
    want = {str(n) for n in range(1, 35)} | {"40"}
    n42 = sum(1 for i in mandatory if i.startswith("42:"))
    failing = [i for i, m, r, _ in suite.entries if m and not (r and r.passed)]
    again = identity_suite(h, only=REPORT_IDS).lines()
    first = [ln for ln in suite.lines() if ln.endswith("[report]")]
    ok = suite.ok and want <= mandatory and n42 == 36 and again == first and not failing
    return ok, (f"mandatory={len(mandatory)} failing={failing} pair instances={n42} "
                f"report entries={len(first)} deterministic={again == first}")


def c3():
    suite = completeness_suite(Horizon(T=6))
    return suite.ok and len(suite.entries) == 8, f"derived operators: {sum(r.passed for _, _, r, _ in suite.entries)}/8"


THREE_VAR_ORDERS = [
    "a<b<c", "a<b=c|a<c=b", "a=b<c|b=a<c", "a=b=c", "a=c<b|c=a<b", "a<c<b", "b<a<c",
    "b<a=c|b<c=a", "b<c<a", "b=c<a|c=b<a", "c<a<b", "c<a=b|c<b=a", "c<b<a",
]


def c4():
    counts = [len(enumerate_sequences("abcd"[:n])) for n in range(1, 5)]
    got = {str(s) for s in enumerate_sequences("abc")}
    rows = [{str(parse_sequence(alt)) for alt in row.split("|")} for row in THREE_VAR_ORDERS]
    table_ok = all(len(r) == 1 for r in rows) and set().union(*rows) == got
    return counts == [1, 3, 13, 75] and table_ok, f"counts={counts} table rows match={table_ok}"


def c5():
    table = load_table("example")
    net = synthesize_canonical(table)
    column_ok = build_table(net) == table
    spots = [evaluate(net, {"a": 0, "b": 1, "c": 2}), evaluate(net, {"a": 5, "b": 1, "c": 1}),
             evaluate(net, {"a": 0, "b": 0, "c": 0})]
    st = check_spacetime(net, Horizon(T=6))
    ok = column_ok and spots == [[1], [5], [INF]] and st.passed
    return ok, f"column={column_ok} spots={[s[0] for s in spots]} spacetime={st.verdict}"


def c6(n_nets=60):
    rng = np.random.default_rng(6)
    failures = 0
    for _ in range(n_nets):
        net = random_network(rng, 3, 12)
        syn = synthesize_canonical(build_table(net))
        if not verify_identity(net, syn, Horizon(T=5)).passed:
            failures += 1
    return failures == 0, f"networks={n_nets} failures={failures}"


def c7():
    xor = check_spacetime(TEMPORAL_XOR, Horizon(T=6))
    net = parse_expr("xmin(x1, x2)")
    restricted = all(evaluate(net, {"x1": a, "x2": b}) == [TEMPORAL_XOR(a, b)]
                     for a, b in itertools.product((0, INF), repeat=2))
    xnor = check_causality(TEMPORAL_XNOR, Horizon(T=6))
    cx = xnor.counterexample
    all_inf = cx is not None and set(cx.binding.values()) == {INF}
    ok = xor.passed and restricted and not xnor.passed and all_inf
    return ok, f"xor={xor.verdict} xmin=table:{restricted} xnor={xnor.verdict} {cx}"


def _sorted_codes(X):
    return np.sort(X, axis=1)  # INF_CODE sorts last


def c8():
    s4 = build_sorter(4)
    X4 = Horizon(T=3).vectors(4)
    out4 = np.stack(evaluate_batch(s4, {n: X4[:, j] for j, n in enumerate(s4.inputs)}), axis=1)
    bad4 = int(np.any(out4 != _sorted_codes(X4), axis=1).sum())
    rng = np.random.default_rng(8)
    X8 = rng.integers(0, 40, size=(10_000, 8))
    X8[rng.random(X8.shape) < 0.2] = INF_CODE
    s8 = build_sorter(8)
    out8 = np.stack(evaluate_batch(s8, {n: X8[:, j] for j, n in enumerate(s8.inputs)}), axis=1)
    bad8 = int(np.any(out8 != _sorted_codes(X8), axis=1).sum())
    has_inf = bool((X8 == INF_CODE).any())
    return len(X4) == 625 and bad4 == bad8 == 0 and has_inf, f"n=4 625 vectors bad={bad4}; n=8 10000 vectors bad={bad8}"


def c9():
    profile = load_profile("biexponential")
    bad = total = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # unreachable thresholds warn by design
        for w in itertools.product(range(6), repeat=2):
            for th in range(1, 6):
                spec = NeuronSpec(w, profile, th)
                net = build_neuron(spec)
                for xs in itertools.product(dom(4), repeat=2):
                    total += 1
                    bad += evaluate_neuron(net, list(xs)) != neuron_oracle(list(xs), spec)
        single = [evaluate_neuron(build_neuron(NeuronSpec((5,), profile, th)), [x])
                  for th, x in [(4, 0), (5, 0), (4, 3)]]
    ok = bad == 0 and single == [2, INF, 5]
    return ok, f"grid={total} disagreements={bad} single-input={single}"


def c10():
    b = Builder()
    net = b.build([microweight_gate(b, b.input("x"), b.input("m"))])
    gate = lambda x, mu: evaluate(net, {"x": x, "m": microweight_value(mu)})[0]
    truth = {(x, mu): gate(x, mu) for x in dom(4) for mu in (0, 1)}
    gate_ok = all(v == (x if mu == 1 else INF) for (x, mu), v in truth.items())
    pulses = load_profile("pulses")
    syn = build_synapse(pulses)
    steps_ok = all(Counter(syn.effective_steps(w).ups) == Counter(steps_of(pulses, w).ups)
                   and Counter(syn.effective_steps(w).downs) == Counter(steps_of(pulses, w).downs)
                   for w in range(5))
    return gate_ok and steps_ok, f"gate table={gate_ok} synapse steps w=0..4={steps_ok}"


def c11():
    net = build_wta(4)
    X = Horizon(T=4).vectors(4)
    Z = np.stack(evaluate_batch(net, {n: X[:, j] for j, n in enumerate(net.inputs)}), axis=1)
    mn = X.min(axis=1, keepdims=True)
    winners = (X == mn) & (mn != INF_CODE)
    bad = int(np.any((Z != INF_CODE) != winners, axis=1).sum())
    bad += int(np.any((Z != INF_CODE) & (Z != X), axis=1).sum())
    tie = evaluate(net, dict(zip(net.inputs, [3] * 4))) == [3] * 4
    none = evaluate(net, dict(zip(net.inputs, [INF] * 4))) == [INF] * 4
    return len(X) == 1296 and bad == 0 and tie and none, f"vectors={len(X)} bad={bad} all-tie={tie} all-inf={none}"


ALLEN_ORACLE = {  # direct endpoint predicates on (xs, xf, ys, yf)
    "before": lambda xs, xf, ys, yf: xf < ys,
    "after": lambda xs, xf, ys, yf: yf < xs,
    "meets": lambda xs, xf, ys, yf: xf == ys,
    "met-by": lambda xs, xf, ys, yf: yf == xs,
    "overlaps": lambda xs, xf, ys, yf: xs < ys < xf < yf,
    "overlapped-by": lambda xs, xf, ys, yf: ys < xs < yf < xf,
    "starts": lambda xs, xf, ys, yf: xs == ys and xf < yf,
    "started-by": lambda xs, xf, ys, yf: xs == ys and yf < xf,
    "during": lambda xs, xf, ys, yf: ys < xs and xf < yf,
    "contains": lambda xs, xf, ys, yf: xs < ys and yf < xf,
    "finishes": lambda xs, xf, ys, yf: ys < xs and xf == yf,
    "finished-by": lambda xs, xf, ys, yf: xs < ys and xf == yf,
    "equals": lambda xs, xf, ys, yf: xs == ys and xf == yf,
}


def c12():
    intervals = [(s, f) for s in range(6) for f in range(s + 1, 6)]
    rels = list(allen.AllenRelation)
    bad = not_one = 0
    for X, Y in itertools.product(intervals, repeat=2):
        hits = 0
        for rel in rels:
            on = allen.eval_intervals(rel, X, Y) is not INF
            hits += on
            bad += on != ALLEN_ORACLE[rel.value](*X, *Y)
        not_one += hits != 1
    placements = len(intervals) ** 2
    net = parse_expr("(Ds < Rs) | (Rf < Df) | (Df < Bs)")
    binding, origin = allen.parse_clock({"Ds": "7:00", "Rs": "7:10", "Rf": "8:00", "Df": "8:10", "Bs": "9:00"})
    t = evaluate(net, binding)[0]
    clock = allen.format_clock(t, origin)
    ok = len(rels) == 13 and placements == 225 and bad == 0 and not_one == 0 and t == 70 and clock == "8:10"
    return ok, f"placements={placements} wrong={bad} not-exactly-one={not_one} dinner={t} ({clock})"


def c13(n_nets=100):
    rng = np.random.default_rng(13)
    failures, with_delays = [], 0
    for i in range(n_nets):
        q = int(rng.integers(1, 7))
        net = random_network(rng, q, int(rng.integers(q + 1, 31)), max_delay=3)
        with_delays += net.count(Delay) > 0
        if not check_spacetime(net, Horizon(T=4)).passed:
            failures.append(i)
    return not failures and with_delays > 0, f"networks={n_nets} with delays={with_delays} failures={failures}"


def _run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        try:
            code = main(argv)
        except SystemExit as e:
            code = e.code
    return code, out.getvalue(), err.getvalue()


def _golden_cases():
    for path in sorted(GOLDEN.glob("*.txt")):
        text = path.read_text()
        cmd = text.splitlines()[0].removeprefix("$ spacetime ")
        yield path.stem, cmd, text


def _render(cmd, code, out, err):
    return f"$ spacetime {cmd}\n# exit {code}\n# stdout\n{out}# stderr\n{err}"


SUBCOMMANDS = {"eval", "check", "identities", "completeness", "table", "canon", "synth", "sort",
               "tnn neuron", "tnn wta", "allen eval", "allen expr", "allen implied"}


def c14():
    cwd = os.getcwd()
    os.chdir(DATA)
    try:
        cases = list(_golden_cases())
        mismatched, codes, unstable = [], set(), []
        for name, cmd, want in cases:
            first = _run_cli(shlex.split(cmd))
            codes.add(first[0])
            if _render(cmd, *first) != want:
                mismatched.append(name)
            if _run_cli(shlex.split(cmd)) != first:
                unstable.append(name)
        proc_bad = []
        for name, cmd, want in cases[:: max(1, len(cases) // 4)]:
            runs = [subprocess.run([sys.executable, "-m", "spacetime", *shlex.split(cmd)],
                                   capture_output=True) for _ in range(2)]
            got = _render(cmd, runs[0].returncode, runs[0].stdout.decode(), runs[0].stderr.decode())
            if got != want or runs[0].stdout != runs[1].stdout or runs[0].stderr != runs[1].stderr:
                proc_bad.append(name)
    finally:
        os.chdir(cwd)
    covered = {" ".join(c.split()[:2]) if c.split()[0] in ("tnn", "allen") else c.split()[0]
               for _, c, _ in cases}
    ok = not mismatched and not unstable and not proc_bad and codes == {0, 1, 2} and SUBCOMMANDS <= covered
    return ok, (f"goldens={len(cases)} mismatched={mismatched} unstable={unstable} "
                f"subprocess={proc_bad} exit codes={sorted(codes)} missing={sorted(SUBCOMMANDS - covered)}")


CRITERIA = [c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12, c13, c14]


def report(n, fn):
    ok, detail = fn()
    return ok, f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}"


@pytest.mark.parametrize("n", range(1, len(CRITERIA) + 1))
def test_criterion(n, capsys):
    ok, line = report(n, CRITERIA[n - 1])
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = [report(n, fn) for n, fn in enumerate(CRITERIA, 1)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
