"""Sequence tables and canonical forms.

Tabulate a delay-free expression over all orderings of its inputs, rebuild
it from the table, then canonicalize an expression that contains delays.
"""
from spacetime import evaluate, format_expr, parse_expr
from spacetime.forms import (build_table, canonicalize, format_table, load_table,
                             synthesize_canonical, validate_table)
from spacetime.verify import Horizon, verify_identity


def main():
    table = load_table("example")
    print("bundled sequence table:")
    print(format_table(table))
    net = synthesize_canonical(table)
    print("canonical form:", format_expr(net))
    for bind in ({"a": 0, "b": 1, "c": 2}, {"a": 5, "b": 1, "c": 1}, {"a": 0, "b": 0, "c": 0}):
        print(f"  {bind} -> {evaluate(net, bind)[0]}")

    # any delay-free expression round-trips through its table
    expr = parse_expr("(a < (b & c)) | xmax(b, c)")
    rebuilt = synthesize_canonical(build_table(expr))
    print("\nround trip of", format_expr(expr))
    print("  table valid:", validate_table(build_table(expr)).passed)
    print("  rebuilt:", format_expr(rebuilt))
    print("  equivalent on D(5):", verify_identity(expr, rebuilt, Horizon(T=5)).passed)

    # delays are pushed to the inputs and renamed, the rest is tabulated
    delayed = parse_expr("((a + 2) < b) + 1")
    asg, table, canon = canonicalize(delayed)
    print("\ncanonicalizing", format_expr(delayed))
    for origin, k, name in asg:
        print(f"  {name} = {origin} + {k}")
    print("  residual table:")
    print("   ", format_table(table).rstrip().replace("\n", "\n    "))
    print("  canonical:", format_expr(canon))


if __name__ == "__main__":
    main()
