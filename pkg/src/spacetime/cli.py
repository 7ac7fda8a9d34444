"""Command-line driver.

Exit codes: 0 success or property holds, 1 property violated or unsat
(details on stdout), 2 usage, parse or file error (details on stderr).
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from . import __version__, allen, forms, tnn
from .lattice import INF, Order, format_time, parse_time
from .network import Delay, Network, evaluate
from .syntax import ParseError, format_expr, parse_expr, parse_netfile
from .verify import Horizon, check_causality, check_invariance, completeness_suite, identity_suite


class UsageError(Exception):
    pass


def _times(text: str) -> list:
    try:
        return [parse_time(t) for t in text.split(",")]
    except (ValueError, OverflowError) as e:
        raise UsageError(f"invalid time list {text!r}: {e}") from None


def _fmt_list(ts) -> str:
    return ",".join(format_time(t) for t in ts)


def _ints(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"invalid integer list {text!r}") from None


def _bindings(items) -> dict[str, str]:
    out = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep or not name:
            raise UsageError(f"binding must look like name=time, got {item!r}")
        out[name.strip()] = value.strip()
    return out


def _bind(net: Network, raw: dict[str, str]) -> dict:
    try:
        binding = {k: parse_time(v) for k, v in raw.items()}
    except (ValueError, OverflowError) as e:
        raise UsageError(str(e)) from None
    _complete(net, binding)
    return binding


def _complete(net, binding):
    missing = [n for n in net.inputs if n not in binding]
    extra = [n for n in binding if n not in net.inputs]
    if missing:
        raise UsageError(f"unbound inputs: {', '.join(missing)}")
    if extra:
        raise UsageError(f"unknown inputs: {', '.join(extra)}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _subject(args) -> Network:
    if args.net:
        if args.expr:
            raise UsageError("give either an expression or --net, not both")
        return parse_netfile(_read(args.net))
    if not args.expr:
        raise UsageError("an expression or --net FILE is required")
    return parse_expr(args.expr)


def _horizon(args, arity: int) -> Horizon:
    if args.horizon is None:
        return Horizon.default_for(arity, seed=args.seed)
    return Horizon(T=args.horizon, seed=args.seed)


# -- commands ----------------------------------------------------------------

def cmd_eval(args) -> int:
    net = parse_expr(args.expr)
    print(_fmt_list(evaluate(net, _bind(net, _bindings(args.bind)))))
    return 0


def cmd_check(args) -> int:
    net = _subject(args)
    h = _horizon(args, len(net.inputs))
    reports = [check_causality(net, h, args.jobs), check_invariance(net, h, args.jobs)]
    for r in reports:
        print(r.line())
    return 0 if all(r.passed for r in reports) else 1


def _suite(suite) -> int:
    for line in suite.lines():
        print(line)
    return 0 if suite.ok else 1


def cmd_identities(args) -> int:
    suite = identity_suite(Horizon(T=args.horizon, seed=args.seed), only=args.id, jobs=args.jobs)
    if not suite.entries:
        raise UsageError(f"no identity matches {', '.join(args.id)}")
    return _suite(suite)


def cmd_completeness(args) -> int:
    return _suite(completeness_suite(Horizon(T=args.horizon, seed=args.seed)))


def cmd_table(args) -> int:
    net = parse_expr(args.expr)
    if net.count(Delay):
        raise UsageError("expression has delays; 'canon' tabulates its delay-free residual")
    print(forms.format_table(forms.build_table(net)), end="")
    return 0


def cmd_canon(args) -> int:
    net = _subject(args)
    if len(net.outputs) != 1:
        raise UsageError("canon needs a single-output network")
    assignment, table, canonical = forms.canonicalize(net)
    for origin, k, name in assignment:
        if k:
            print(f"let {name} = {origin} + {k}")
    print(forms.format_table(table), end="")
    print(f"canonical {format_expr(canonical)}")
    return 0


def cmd_synth(args) -> int:
    table = forms.parse_table(_read(args.table_file))
    report = forms.validate_table(table)
    if not report.passed:
        cx = report.counterexample
        print(f"invalid {cx.reason}")
        return 1
    print(format_expr(forms.synthesize_canonical(table)))
    return 0


def cmd_sort(args) -> int:
    spikes = _times(args.spikes)
    n = len(spikes)
    width = max(2, 1 << (n - 1).bit_length())
    if width not in tnn.SORTER_WIDTHS:
        raise UsageError(f"at most {tnn.SORTER_WIDTHS[-1]} spikes can be sorted")
    net = tnn.build_sorter(width)
    out = evaluate(net, dict(zip(net.inputs, spikes + [INF] * (width - n))))
    print(_fmt_list(out[:n]))
    return 0


def _profile(ref: str) -> tnn.ResponseProfile:
    if not Path(ref).exists() and ref in ("biexponential", "pulses"):
        return tnn.load_profile(ref)
    return tnn.parse_profile(_read(ref))


def cmd_neuron(args) -> int:
    spec = tnn.NeuronSpec(tuple(_ints(args.weights)), _profile(args.profile), args.threshold)
    spikes = _times(args.spikes)
    if len(spikes) != spec.q:
        raise UsageError(f"{spec.q} weights but {len(spikes)} spike times")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        net = tnn.build_neuron(spec)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    z = tnn.evaluate_neuron(net, spikes)
    if not args.oracle:
        print(format_time(z))
        return 0
    ref = tnn.neuron_oracle(spikes, spec)
    print(f"network {format_time(z)}")
    print(f"oracle {format_time(ref)}")
    return 0 if z == ref else 1


def cmd_wta(args) -> int:
    spikes = _times(args.spikes)
    net = tnn.build_wta(len(spikes))
    print(_fmt_list(evaluate(net, dict(zip(net.inputs, spikes)))))
    return 0


def _interval(text: str) -> tuple:
    ts = _times(text)
    if len(ts) != 2:
        raise UsageError(f"an interval is 'start,finish', got {text!r}")
    return tuple(ts)


def cmd_allen_eval(args) -> int:
    z = allen.eval_intervals(args.relation, _interval(args.x), _interval(args.y))
    print(format_time(z))
    return 0 if z is not INF else 1


def cmd_allen_expr(args) -> int:
    net = parse_expr(args.expr)
    try:
        binding, origin = allen.parse_clock(_bindings(args.bind))
    except (ValueError, OverflowError) as e:
        raise UsageError(str(e)) from None
    _complete(net, binding)
    z = evaluate(net, binding)[0]
    print(format_time(z))
    if origin is not None:
        print(f"clock {allen.format_clock(z, origin)}")
    return 0 if z is not INF else 1


def _pairs(items):
    if items is None:
        return None
    return [tuple(_pair(i)) for i in items]


def _pair(text: str) -> list[str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise UsageError(f"expected 'name,name', got {text!r}")
    return parts


def cmd_allen_implied(args) -> int:
    net = parse_expr(args.expr)
    found = allen.strongest_implied(net, tuple(_pair(args.pair)), Horizon(T=args.horizon),
                                    _pairs(args.interval))
    if not found:
        print(f"unsat within horizon T={args.horizon}")
        return 1
    print(",".join(o.value for o in Order if o in found))
    return 0


def cmd_allen_sat(args) -> int:
    net = parse_expr(args.expr)
    witness = allen.satisfiable(net, Horizon(T=args.horizon), _pairs(args.interval))
    if witness is None:
        print(f"unsat within horizon T={args.horizon}")
        return 1
    print(",".join(f"{k}={format_time(v)}" for k, v in witness.items()))
    return 0


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    common.add_argument("--jobs", type=int, default=1, help="checker worker threads")

    p = argparse.ArgumentParser(prog="spacetime", description="Space-time algebra workbench.")
    p.add_argument("--version", action="version", version=f"spacetime {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("eval", parents=[common], help="evaluate an expression")
    s.add_argument("expr")
    s.add_argument("--bind", action="append", metavar="NAME=TIME")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("check", parents=[common], help="check causality and invariance")
    s.add_argument("expr", nargs="?")
    s.add_argument("--net", metavar="FILE")
    s.add_argument("--horizon", type=int)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("identities", parents=[common], help="run the identity suite")
    s.add_argument("--horizon", type=int, default=5)
    s.add_argument("--id", action="append", help="identity number or id (repeatable)")
    s.set_defaults(func=cmd_identities)

    s = sub.add_parser("completeness", parents=[common], help="check the {+1, <, &} constructions")
    s.add_argument("--horizon", type=int, default=6)
    s.set_defaults(func=cmd_completeness)

    s = sub.add_parser("table", parents=[common], help="sequence table of a delay-free expression")
    s.add_argument("expr")
    s.set_defaults(func=cmd_table)

    s = sub.add_parser("canon", parents=[common], help="canonical form of an expression")
    s.add_argument("expr", nargs="?")
    s.add_argument("--net", metavar="FILE")
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("synth", parents=[common], help="synthesize a sequence table file")
    s.add_argument("table_file")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("sort", parents=[common], help="bitonic sort of a spike volley")
    s.add_argument("--spikes", required=True)
    s.set_defaults(func=cmd_sort)

    t = sub.add_parser("tnn", help="temporal neural network blocks").add_subparsers(
        dest="block", required=True)
    s = t.add_parser("neuron", parents=[common], help="SRM0 neuron")
    s.add_argument("--profile", required=True, help="profile file or bundled name")
    s.add_argument("--weights", required=True)
    s.add_argument("--threshold", type=int, required=True)
    s.add_argument("--spikes", required=True)
    s.add_argument("--oracle", action="store_true", help="also run the integration oracle")
    s.set_defaults(func=cmd_neuron)
    s = t.add_parser("wta", parents=[common], help="winner-take-all")
    s.add_argument("--spikes", required=True)
    s.set_defaults(func=cmd_wta)

    a = sub.add_parser("allen", help="interval relations").add_subparsers(dest="mode", required=True)
    s = a.add_parser("eval", parents=[common], help="evaluate a relation on two intervals")
    s.add_argument("--relation", required=True, choices=[r.value for r in allen.AllenRelation])
    s.add_argument("--x", required=True, metavar="S,F")
    s.add_argument("--y", required=True, metavar="S,F")
    s.set_defaults(func=cmd_allen_eval)
    s = a.add_parser("expr", parents=[common], help="evaluate an event expression")
    s.add_argument("expr")
    s.add_argument("--bind", action="append", metavar="NAME=TIME")
    s.set_defaults(func=cmd_allen_expr)
    for name, func, help_ in (("implied", cmd_allen_implied, "strongest implied order"),
                              ("sat", cmd_allen_sat, "smallest satisfying binding")):
        s = a.add_parser(name, parents=[common], help=help_)
        s.add_argument("expr")
        if name == "implied":
            s.add_argument("--pair", required=True, metavar="U,V")
        s.add_argument("--horizon", type=int, default=5)
        s.add_argument("--interval", action="append", metavar="S,F",
                       help="endpoint constraint (default: inferred from Xs/Xf names)")
        s.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ParseError, KeyError, ValueError, OverflowError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else e
        print(f"spacetime: error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
