import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spacetime.lattice import INF
from spacetime.network import Delay, evaluate, random_network
from spacetime.syntax import format_expr, parse_expr
from spacetime.verify import Horizon, check_spacetime, verify_identity
from spacetime.forms import (Implicant, build_table, canonicalize,
                             enumerate_sequences, format_table, fubini, implicant_consistent,
                             last_two_groups, load_table, merge_le, minterm_of, minterms,
                             parse_sequence, parse_table, synthesize_canonical, synthesize_standard,
                             table_from_outputs, validate_table)

THREE_VAR_ORDERS = [  # (sequence, equivalent renderings)
    "a<b<c", "a<b=c|a<c=b", "a=b<c|b=a<c", "a=b=c", "a=c<b|c=a<b", "a<c<b", "b<a<c",
    "b<a=c|b<c=a", "b<c<a", "b=c<a|c=b<a", "c<a<b", "c<a=b|c<b=a", "c<b<a",
]


def weak_orders_brute(n):
    """Count distinct dense rankings of n variables."""
    seen = set()
    for ranks in itertools.product(range(n), repeat=n):
        used = sorted(set(ranks))
        seen.add(tuple(used.index(r) for r in ranks))
    return len(seen)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_sequence_counts(n):
    seqs = enumerate_sequences("abcde"[:n])
    assert len(seqs) == fubini(n) == weak_orders_brute(n)
    assert len({str(s) for s in seqs}) == len(seqs)
    assert [str(s) for s in seqs] == sorted(str(s) for s in seqs)


def test_sequence_limits():
    with pytest.raises(ValueError):
        enumerate_sequences("abcdef")
    with pytest.raises(ValueError):
        enumerate_sequences("")


def test_two_variables():
    assert [str(s) for s in enumerate_sequences("ab")] == ["a<b", "a=b", "b<a"]


def test_three_variables_cover_all_orders():
    got = {str(s) for s in enumerate_sequences("abc")}
    canon = {str(parse_sequence(alt)) for row in THREE_VAR_ORDERS for alt in row.split("|")}
    assert got == canon and len(got) == 13
    for row in THREE_VAR_ORDERS:
        assert len({str(parse_sequence(alt)) for alt in row.split("|")}) == 1


def test_sequence_rendering():
    s = parse_sequence("c=b<a")
    assert str(s) == "b=c<a" and s.group_of("a") == 1
    assert s.times() == {"b": 0, "c": 0, "a": 1} and s.times(2)["a"] == 2
    with pytest.raises(ValueError):
        parse_sequence("a<a")


def test_build_table_min_and_lt():
    t = build_table(parse_expr("a & b"))
    assert t.column() == ["a", "a", "b"]
    t = build_table(parse_expr("a < b"))
    assert t.column() == ["a", "inf", "inf"]
    with pytest.raises(ValueError):
        build_table(parse_expr("a + 1"))


def test_build_table_representation_invariant():
    a = build_table(parse_expr("(a & b) & c"))
    b = build_table(parse_expr("c & (b & a)", inputs=["a", "b", "c"]))
    assert a == b


def example_table():
    return table_from_outputs("abc", {"a<b<c": "b", "b<a=c": "c", "b=c<a": "a", "c<a=b": "a"})


def test_bundled_table_matches():
    assert load_table("example") == example_table()


def test_validate_table():
    assert validate_table(example_table()).passed
    assert last_two_groups(example_table())
    bad = table_from_outputs("abc", {"a<b<c": "a"})
    rep = validate_table(bad)
    assert not rep.passed and not last_two_groups(bad)
    assert validate_table(table_from_outputs("abc", {})).passed


def test_validate_accepts_prefix_decided_rows():
    # outputs a whenever a is strictly first: causal though a is not last or next-to-last
    net = parse_expr("a < (b & c)")
    t = build_table(net)
    assert t.output_name(parse_sequence("a<b<c")) == "a"
    assert validate_table(t).passed and not last_two_groups(t)
    assert check_spacetime(net, Horizon(T=5)).passed


def test_minterms_match_examples():
    assert minterm_of(parse_sequence("b=c<a"), 1) == Implicant.of(("b", "==", "c"), ("b", "<", "a"),
                                                                  markers=[("a", 0)])
    assert minterm_of(parse_sequence("a<b<c"), 1) == Implicant.of(("a", "<", "b"), ("b", "<", "c"))
    assert minterm_of(parse_sequence("b<a=c"), 1) == Implicant.of(("b", "<", "a"), ("a", "==", "c"))
    with pytest.raises(ValueError):
        minterm_of(parse_sequence("a<b"), None)


def test_next_to_last_with_wide_last_group():
    # a < (b & c) at a=0, b=c=1 is 0; a plain chain would wait for b == c
    net = parse_expr("a < (b & c)")
    syn = synthesize_canonical(build_table(net))
    assert evaluate(syn, {"a": 0, "b": 1, "c": 1}) == [0]
    assert verify_identity(net, syn, Horizon(T=5)).passed


def test_canonical_example():
    net = synthesize_canonical(example_table())
    assert build_table(net) == example_table()
    assert evaluate(net, {"a": 0, "b": 1, "c": 2}) == [1]
    assert evaluate(net, {"a": 5, "b": 1, "c": 1}) == [5]
    assert evaluate(net, {"a": 0, "b": 0, "c": 0}) == [INF]
    std = synthesize_standard(minterms(example_table()), inputs="abc")
    assert format_expr(std) == format_expr(net)


def test_synthesize_rejects_invalid():
    with pytest.raises(ValueError):
        synthesize_canonical(table_from_outputs("abc", {"a<b<c": "a"}))
    with pytest.raises(ValueError):
        synthesize_standard([Implicant.of(("a", "<", "b"), ("b", "<", "a"))])


def test_empty_table_is_never():
    net = synthesize_canonical(table_from_outputs("ab", {}))
    assert all(evaluate(net, {"a": a, "b": b}) == [INF] for a, b in itertools.product([0, 1, INF], repeat=2))


@pytest.mark.parametrize("terms, ok", [
    ([("a", "<", "b"), ("b", "==", "d")], True),
    ([("a", "<", "b"), ("b", "<", "c"), ("c", "<", "a")], False),
    ([("a", "<", "b"), ("c", "<", "d")], True),
    ([("a", "==", "b"), ("b", "<", "a")], False),
    ([("a", "<=", "b"), ("b", "<=", "a")], True),
    ([("a", "<=", "b"), ("b", "<", "a")], False),
    ([(("a", 1), "<", ("a", 3))], True),
    ([(("a", 3), "<", ("a", 1))], False),
    ([(("a", 1), "==", ("a", 2))], False),
])
def test_implicant_consistency(terms, ok):
    assert implicant_consistent(Implicant.of(*terms)) == ok


def test_standard_form_example():
    imp = Implicant.of(("a", "<", "b"), ("b", "==", "d"))
    net = synthesize_standard([imp])
    assert format_expr(net) == "(a < b) | (b == d)"


def _and_all(imps, names, domain):
    net = synthesize_standard(imps, inputs=names)
    return [evaluate(net, dict(zip(names, xs)))[0] for xs in itertools.product(domain, repeat=len(names))]


def test_merge_le():
    merged = merge_le([Implicant.of(("a", "<", "b")), Implicant.of(("a", "==", "b"))])
    assert merged == [Implicant.of(("a", "<=", "b"))]
    pair = [Implicant.of(("a", "<", "b"), ("c", "<", "d")), Implicant.of(("a", "<", "b"), ("c", "==", "d"))]
    merged = merge_le(pair)
    assert merged == [Implicant.of(("a", "<", "b"), ("c", "<=", "d"))]
    D4 = [0, 1, 2, 3, 4, INF]
    assert _and_all(merged, "abcd", D4) == _and_all(pair, "abcd", D4)
    disjoint = [Implicant.of(("a", "<", "b")), Implicant.of(("c", "<", "d"))]
    assert merge_le(disjoint) == disjoint


def test_table_file_roundtrip():
    text = format_table(example_table())
    assert text.startswith("vars a b c\na<b<c -> b\n")
    assert parse_table(text) == example_table()
    assert parse_table("vars a b\n# note\nb<a -> b\n").output_name(parse_sequence("b<a")) == "b"


@pytest.mark.parametrize("text", [
    "a<b -> a",
    "vars a b\na<b -> c",
    "vars a b\na<b -> a\na<b -> inf",
    "vars a b\na<b a",
    "vars a b\na<c -> a",
])
def test_table_file_errors(text):
    with pytest.raises(ValueError):
        parse_table(text)


@pytest.mark.parametrize("text, expect", [
    ("a & b", None),
    ("(a + 1) & a", "a"),
    ("a < b", "a < b"),
    ("((a + 2) < b) + 1", "a + 3 < b + 1"),
])
def test_canonicalize_examples(text, expect):
    net = parse_expr(text)
    asg, table, canon = canonicalize(net)
    assert canon.inputs == net.inputs
    assert verify_identity(net, canon, Horizon(T=6)).passed
    if expect:
        assert format_expr(canon) == expect
    assert canon.count(Delay) <= sum(1 for _, k, _ in asg if k)


def test_canonicalize_arity_limit():
    with pytest.raises(ValueError):
        canonicalize(parse_expr("a & (a+1) & (a+2) & (a+3) & (a+4) & (a+5)"))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_roundtrip_property(seed):
    net = random_network(np.random.default_rng(seed), 3, 10)
    table = build_table(net)
    assert validate_table(table).passed
    if all(o is None for _, o in table.rows):
        return
    syn = synthesize_canonical(table)
    assert build_table(syn) == table
    assert verify_identity(net, syn, Horizon(T=4)).passed


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_canonicalize_property(seed):
    net = random_network(np.random.default_rng(seed), 2, 8, max_delay=2)
    try:
        _, _, canon = canonicalize(net)
    except ValueError:
        return  # too many expanded inputs
    assert verify_identity(net, canon, Horizon(T=6)).passed


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6))
def test_merge_le_preserves_semantics(seed):
    rng = np.random.default_rng(seed)
    net = random_network(rng, 3, 10)
    imps = minterms(build_table(net))
    if not imps:
        return
    D = [0, 1, 2, 3, INF]
    assert _and_all(merge_le(imps), "abc", D) == _and_all(imps, "abc", D)
