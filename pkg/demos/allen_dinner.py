"""Interval relations as race expressions.

Each of the thirteen interval relations is a small network over the four
endpoint times.  A scenario mixes events given as clock times.
"""
from spacetime import evaluate, format_expr, parse_expr
from spacetime.allen import (AllenRelation, encode, format_clock, parse_clock, satisfiable,
                             strongest_implied)
from spacetime.verify import Horizon


def main():
    X, Y = (1, 4), (2, 6)
    print(f"X={X} Y={Y}")
    for rel in AllenRelation:
        net = encode(rel)
        t = evaluate(net, {"Xs": X[0], "Xf": X[1], "Ys": Y[0], "Yf": Y[1]})[0]
        print(f"  {rel.value:14} {format_expr(net):40} -> {t}")

    # drive home (D), read mail (R), then bed (B)
    text = "(Ds < Rs) | (Rf < Df) | (Df < Bs)"
    net = parse_expr(text)
    clock = {"Ds": "7:00", "Rs": "7:10", "Rf": "8:00", "Df": "8:10", "Bs": "9:00"}
    binding, origin = parse_clock(clock)
    t = evaluate(net, binding)[0]
    print(f"\n{text}\n  with {clock}\n  -> {t} minutes after the first event, at {format_clock(t, origin)}")
    print("  witness:", satisfiable(net, Horizon(T=5)))
    rel = strongest_implied(net, ("Ds", "Df"), Horizon(T=5))
    print("  implied order of Ds and Df:", ",".join(sorted(o.value for o in rel)))


if __name__ == "__main__":
    main()
