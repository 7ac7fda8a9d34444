"""Sequence tables and the canonical / standard forms built from them.

A *sequence* is a weak ordering of input variables (an ordered partition
into groups of simultaneous events).  A delay-free function is fully
described by the group (or ``inf``) it outputs for every sequence, which
is what a :class:`SequenceTable` records.  Implicants are max-combined
chains of ``<`` / ``==`` / ``<=`` terms over (variable, delay) operands;
a standard form is the min over implicants.
"""
from __future__ import annotations

import itertools
from importlib import resources
from dataclasses import dataclass, field
from typing import Iterable, Sequence as Seq

import numpy as np

from .lattice import INF, INF_CODE, OpKind
from .network import (Builder, Delay, DelayAssignment, Network, decompose, evaluate_batch,
                      never)
from .verify import CheckReport, Counterexample

__all__ = [
    "Sequence", "SequenceTable", "Operand", "Term", "Implicant", "NotSequenceDetermined",
    "MAX_TABLE_VARS", "enumerate_sequences", "parse_sequence", "build_table", "validate_table",
    "minterm_of", "minterms", "last_two_groups", "synthesize_canonical", "synthesize_standard", "canonicalize",
    "implicant_consistent", "merge_le", "simplify_delayed_relations", "parse_table",
    "format_table", "table_from_outputs", "fubini", "load_table",
]

MAX_TABLE_VARS = 5


class NotSequenceDetermined(ValueError):
    """The network's output depends on more than the ordering of its inputs."""


# -- sequences ---------------------------------------------------------------

@dataclass(frozen=True)
class Sequence:
    groups: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        groups = tuple(tuple(sorted(g)) for g in self.groups)
        if any(not g for g in groups):
            raise ValueError("sequence groups must be non-empty")
        flat = [v for g in groups for v in g]
        if len(set(flat)) != len(flat):
            raise ValueError("a variable may appear in only one group")
        object.__setattr__(self, "groups", groups)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(v for g in self.groups for v in g)

    def group_of(self, name: str) -> int:
        for i, g in enumerate(self.groups):
            if name in g:
                return i
        raise KeyError(name)

    def times(self, spread: int = 1) -> dict[str, int]:
        """Representative binding: group ``i`` occurs at ``spread * i``."""
        return {v: spread * i for i, g in enumerate(self.groups) for v in g}

    def __str__(self):
        return "<".join("=".join(g) for g in self.groups)


def parse_sequence(text: str) -> Sequence:
    """Parse ``a<b=c``; members of a group may appear in any order."""
    text = text.replace(" ", "")
    groups = [tuple(part.split("=")) for part in text.split("<")]
    if any(not name for g in groups for name in g):
        raise ValueError(f"malformed sequence {text!r}")
    return Sequence(tuple(groups))


def _ordered_partitions(items: tuple[str, ...]):
    if not items:
        yield ()
        return
    for r in range(1, len(items) + 1):
        for first in itertools.combinations(items, r):
            rest = tuple(x for x in items if x not in first)
            for tail in _ordered_partitions(rest):
                yield (first,) + tail


def enumerate_sequences(variables: Iterable[str]) -> list[Sequence]:
    """All weak orderings of ``variables``, sorted by their rendering."""
    variables = tuple(variables)
    if not 1 <= len(variables) <= MAX_TABLE_VARS:
        raise ValueError(f"sequence tables support 1..{MAX_TABLE_VARS} variables, got {len(variables)}")
    if len(set(variables)) != len(variables):
        raise ValueError("variable names must be distinct")
    seqs = {Sequence(p) for p in _ordered_partitions(variables)}
    return sorted(seqs, key=str)


def fubini(n: int) -> int:
    """Number of weak orderings of ``n`` items."""
    a = [1]
    for m in range(1, n + 1):
        a.append(sum(_binom(m, k) * a[m - k] for k in range(1, m + 1)))
    return a[n]


def _binom(n, k):
    from math import comb
    return comb(n, k)


# -- sequence tables ---------------------------------------------------------

@dataclass(frozen=True)
class SequenceTable:
    """One row per sequence; output is a group index or ``None`` for inf."""

    variables: tuple[str, ...]
    rows: tuple[tuple[Sequence, int | None], ...]

    def __post_init__(self):
        expected = enumerate_sequences(self.variables)
        seen = [s for s, _ in self.rows]
        if sorted(seen, key=str) != expected:
            raise ValueError("table rows must be exactly the sequences of its variables")
        for seq, out in self.rows:
            if out is not None and not 0 <= out < len(seq.groups):
                raise ValueError(f"row {seq}: output group {out} out of range")

    def output(self, seq: Sequence) -> int | None:
        for s, out in self.rows:
            if s == seq:
                return out
        raise KeyError(str(seq))

    def output_name(self, seq: Sequence) -> str:
        """Output rendered by the group's first member, or ``inf``."""
        out = self.output(seq)
        return "inf" if out is None else seq.groups[out][0]

    def column(self) -> list[str]:
        return [self.output_name(s) for s, _ in self.rows]

    def __eq__(self, other):
        if not isinstance(other, SequenceTable):
            return NotImplemented
        return set(self.variables) == set(other.variables) and \
            {(str(s), o) for s, o in self.rows} == {(str(s), o) for s, o in other.rows}

    def __hash__(self):
        return hash(frozenset((str(s), o) for s, o in self.rows))


def table_from_outputs(variables: Seq[str], outputs: dict) -> SequenceTable:
    """Table from ``{sequence text: output variable name or "inf"}``.

    Sequences not mentioned output inf.
    """
    variables = tuple(variables)
    given = {}
    for text, name in outputs.items():
        seq = parse_sequence(text)
        if seq.variables != frozenset(variables):
            raise ValueError(f"sequence {text!r} does not cover the variables {variables}")
        given[seq] = None if name in ("inf", None, INF) else seq.group_of(name)
    rows = tuple((s, given.get(s)) for s in enumerate_sequences(variables))
    return SequenceTable(variables, rows)


def build_table(net: Network) -> SequenceTable:
    """Tabulate a delay-free network over every sequence of its inputs."""
    if net.count(Delay):
        raise ValueError("build_table needs a delay-free network; decompose it first")
    seqs = enumerate_sequences(net.inputs)
    outs = []
    for spread in (1, 2):
        cols = {v: np.array([s.times(spread)[v] for s in seqs], dtype=np.int64) for v in net.inputs}
        outs.append(evaluate_batch(net, cols)[0])
    rows = []
    for seq, z1, z2 in zip(seqs, *outs):
        groups = []
        for z, spread in ((z1, 1), (z2, 2)):
            if z == INF_CODE:
                groups.append(None)
            elif z % spread or z // spread >= len(seq.groups):
                raise NotSequenceDetermined(f"row {seq}: output time {z} matches no group")
            else:
                groups.append(int(z // spread))
        if groups[0] != groups[1]:
            raise NotSequenceDetermined(
                f"row {seq}: output differs between representative assignments")
        rows.append((seq, groups[0]))
    return SequenceTable(tuple(net.inputs), tuple(rows))


def validate_table(table: SequenceTable) -> CheckReport:
    """Causality condition on a table: outputs must be decidable from a prefix.

    A row that outputs group ``i`` is decided at that group's time, so every
    row sharing the same groups ``0..i`` (with the remaining variables later,
    in any arrangement) must output group ``i`` too.  When ``i`` is the last
    or next-to-last group and the last group is a singleton, that row is the
    only one with its prefix.
    """
    for seq, out in table.rows:
        if out is None:
            continue
        prefix = seq.groups[:out + 1]
        for other, other_out in table.rows:
            if other.groups[:out + 1] != prefix or other == seq:
                continue
            if other_out != out:
                cx = Counterexample(
                    other.times(), other.times()[seq.groups[out][0]],
                    INF if other_out is None else other_out,
                    f"row {seq} outputs {seq.groups[out][0]} but row {other} "
                    f"with the same prefix outputs {table.output_name(other)}")
                return CheckReport(False, len(table.rows), cx, name="table")
    return CheckReport(True, len(table.rows), name="table")


def last_two_groups(table: SequenceTable) -> bool:
    """The weaker rule: every output is the last or next-to-last group."""
    return all(o is None or o >= len(s.groups) - 2 for s, o in table.rows)


# -- sequence table files ----------------------------------------------------

def parse_table(text: str) -> SequenceTable:
    """Parse ``vars a b c`` followed by ``a<b=c -> inf`` rows."""
    variables = None
    outputs = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("vars"):
            if variables is not None:
                raise ValueError(f"line {lineno}: duplicate vars header")
            variables = tuple(line.split()[1:])
            continue
        if variables is None:
            raise ValueError(f"line {lineno}: rows before the vars header")
        if "->" not in line:
            raise ValueError(f"line {lineno}: expected 'sequence -> output'")
        seq_text, out = (p.strip() for p in line.split("->", 1))
        seq = parse_sequence(seq_text)
        if str(seq) in {str(parse_sequence(k)) for k in outputs}:
            raise ValueError(f"line {lineno}: duplicate row {seq}")
        if out != "inf" and out not in seq.variables:
            raise ValueError(f"line {lineno}: output {out!r} is not a variable of the row")
        outputs[seq_text] = out
    if variables is None:
        raise ValueError("missing vars header")
    return table_from_outputs(variables, outputs)


def load_table(name: str) -> SequenceTable:
    """Load a bundled table, e.g. ``"example"``."""
    return parse_table(resources.files("spacetime.data").joinpath(f"{name}.table").read_text())


def format_table(table: SequenceTable) -> str:
    lines = ["vars " + " ".join(table.variables)]
    lines += [f"{s} -> {table.output_name(s)}" for s, _ in table.rows]
    return "\n".join(lines) + "\n"


# -- implicants --------------------------------------------------------------

Operand = tuple[str, int]  # (variable, delay)
_REL_KIND = {"<": OpKind.LT, "==": OpKind.EQ, "<=": OpKind.LE}


@dataclass(frozen=True)
class Term:
    left: Operand
    rel: str
    right: Operand

    def __post_init__(self):
        if self.rel not in _REL_KIND:
            raise ValueError(f"implicant relations are <, == and <=, got {self.rel!r}")

    def __str__(self):
        return f"({_fmt(self.left)} {self.rel} {_fmt(self.right)})"


def _fmt(op: Operand) -> str:
    v, k = op
    return v if k == 0 else f"{v} + {k}"


def _op(x) -> Operand:
    return (x, 0) if isinstance(x, str) else (x[0], int(x[1]))


@dataclass(frozen=True)
class Implicant:
    """Max over relational terms plus eventual-occurrence markers.

    A marker ``v`` stands for the trailing ``v < inf``, i.e. the bare
    operand: it is satisfied once ``v`` has occurred.
    """

    terms: tuple[Term, ...]
    markers: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        object.__setattr__(self, "markers", frozenset(_op(m) for m in self.markers))
        if not self.terms and not self.markers:
            raise ValueError("an implicant needs at least one term or marker")

    @classmethod
    def of(cls, *terms, markers=()) -> "Implicant":
        """Shorthand: ``Implicant.of(("a", "<", "b"), (("a", 3), "==", "c"))``."""
        return cls(tuple(Term(_op(l), r, _op(rr)) for l, r, rr in terms), frozenset(markers))

    def operands(self) -> set[Operand]:
        ops = set(self.markers)
        for t in self.terms:
            ops.update((t.left, t.right))
        return ops

    def variables(self) -> set[str]:
        return {v for v, _ in self.operands()}

    def build(self, b: Builder) -> int:
        def node(op):
            return b.delay(b.input(op[0]), op[1])

        parts = [b.binary(_REL_KIND[t.rel], node(t.left), node(t.right)) for t in self.terms]
        parts += [node(m) for m in sorted(self.markers)]
        return b.chain(OpKind.MAX, parts)

    def __str__(self):
        parts = [str(t) for t in self.terms] + [_fmt(m) for m in sorted(self.markers)]
        return " | ".join(parts)


def minterm_of(seq: Sequence, output: int | None) -> Implicant:
    """The implicant of one table row.

    Groups up to the output group are chained: consecutive groups are linked
    with ``<`` through their first members, members of a group with ``==``.
    Variables after the output group only need to occur later, so each gets
    ``out < v``.  If the output group is the last group and a singleton, an
    eventual-occurrence marker on the output variable is added (an ``==``
    term already forces its members to occur).  Rows with the same prefix
    yield the same implicant.
    """
    if output is None:
        raise ValueError(f"row {seq} outputs inf and has no minterm")
    terms = []
    for i, g in enumerate(seq.groups[:output + 1]):
        if i:
            terms.append(Term((seq.groups[i - 1][0], 0), "<", (g[0], 0)))
        terms += [Term((x, 0), "==", (y, 0)) for x, y in zip(g, g[1:])]
    rep = seq.groups[output][0]
    terms += [Term((rep, 0), "<", (v, 0)) for g in seq.groups[output + 1:] for v in g]
    last = output == len(seq.groups) - 1 and len(seq.groups[output]) == 1
    markers = frozenset({(rep, 0)}) if last else frozenset()
    return Implicant(tuple(terms), markers)


def minterms(table: SequenceTable) -> list[Implicant]:
    """Distinct implicants of the non-inf rows, in row order."""
    return list(dict.fromkeys(minterm_of(s, o) for s, o in table.rows if o is not None))


def implicant_consistent(imp: Implicant) -> bool:
    """True iff the terms admit a weak ordering of their operands.

    Operands of one variable with different delays are implicitly ordered
    by delay.
    """
    ops = sorted(imp.operands())
    parent = {o: o for o in ops}

    def find(o):
        while parent[o] != o:
            parent[o] = parent[parent[o]]
            o = parent[o]
        return o

    for t in imp.terms:
        if t.rel == "==":
            parent[find(t.left)] = find(t.right)
    edges = [(t.left, t.right, t.rel == "<") for t in imp.terms if t.rel != "=="]
    for (v, i), (w, j) in itertools.combinations(ops, 2):
        if v == w and i != j:
            edges.append(((v, min(i, j)), (v, max(i, j)), True))
    nodes = sorted({find(o) for o in ops})
    succ = {n: set() for n in nodes}
    for l, r, _ in edges:
        succ[find(l)].add(find(r))

    def reach(a):
        seen, stack = set(), [a]
        while stack:
            n = stack.pop()
            for m in succ[n]:
                if m not in seen:
                    seen.add(m)
                    stack.append(m)
        return seen

    closure = {n: reach(n) for n in nodes}
    for l, r, strict in edges:
        a, b = find(l), find(r)
        if strict and (a == b or a in closure[b]):
            return False
    return True


def synthesize_standard(imps: Seq[Implicant], inputs: Seq[str] | None = None) -> Network:
    """Min over implicants, each a max over its terms and markers."""
    if inputs is None:
        inputs = sorted({v for imp in imps for v in imp.variables()})
    if not imps:
        return never(inputs)
    b = Builder()
    outs = []
    for imp in imps:
        if not implicant_consistent(imp):
            raise ValueError(f"inconsistent implicant {imp} is constant inf; drop it instead")
        outs.append(imp.build(b))
    return b.build([b.chain(OpKind.MIN, outs)], inputs=inputs)


def synthesize_canonical(table: SequenceTable) -> Network:
    """Min of the minterms of every non-inf row."""
    report = validate_table(table)
    if not report.passed:
        raise ValueError(f"table fails the causality precondition: {report.counterexample.reason}")
    return synthesize_standard(minterms(table), inputs=table.variables)


def merge_le(imps: Seq[Implicant]) -> list[Implicant]:
    """Merge implicant pairs differing only in ``x < y`` vs ``x == y`` into ``x <= y``."""
    imps = list(imps)
    merged = True
    while merged:
        merged = False
        for i, j in itertools.combinations(range(len(imps)), 2):
            m = _merge_pair(imps[i], imps[j])
            if m is not None:
                imps[i] = m
                del imps[j]
                merged = True
                break
    return imps


def _merge_pair(p: Implicant, q: Implicant) -> Implicant | None:
    if p.markers != q.markers or len(p.terms) != len(q.terms):
        return None
    only_p = [t for t in p.terms if t not in q.terms]
    only_q = [t for t in q.terms if t not in p.terms]
    if len(only_p) != 1 or len(only_q) != 1:
        return None
    a, b = only_p[0], only_q[0]
    if {a.rel, b.rel} != {"<", "=="}:
        return None
    lt, eq = (a, b) if a.rel == "<" else (b, a)
    if (eq.left, eq.right) not in ((lt.left, lt.right), (lt.right, lt.left)):
        return None
    le = Term(lt.left, "<=", lt.right)
    return Implicant(tuple(le if t == a else t for t in p.terms), p.markers)


def simplify_delayed_relations(imps: Seq[Implicant], assignment: DelayAssignment) -> list[Implicant]:
    """Rewrite implicants over expanded inputs in terms of delayed originals.

    A relation between two delays of the same input is either decided by
    the delays alone or unsatisfiable.  Decided relations are replaced by an
    eventual-occurrence marker on their left operand (the term's value),
    unsatisfiable ones remove the whole implicant.
    """
    out = []
    for imp in imps:
        def origin(op):
            v, k = assignment.lookup(op[0])
            return v, k + op[1]

        terms, markers, dead = [], {origin(m) for m in imp.markers}, False
        for t in imp.terms:
            left, right = origin(t.left), origin(t.right)
            if left[0] != right[0]:
                terms.append(Term(left, t.rel, right))
                continue
            i, j = left[1], right[1]
            holds = {"<": i < j, "==": i == j, "<=": i <= j}[t.rel]
            if not holds:
                dead = True
                break
            markers.add(left)
        if dead:
            continue
        markers = {m for m in markers if not _dominated(m, terms, markers)}
        if not terms and not markers:
            continue
        out.append(Implicant(tuple(terms), frozenset(markers)))
    return out


def _dominated(m: Operand, terms, markers) -> bool:
    v, k = m
    if any(t.left[0] == v and t.left[1] >= k for t in terms):
        return True
    return any(w == v and j > k for w, j in markers)


def canonicalize(net: Network) -> tuple[DelayAssignment, SequenceTable, Network]:
    """Decompose, tabulate the residual, and rebuild as a min of implicants."""
    assignment, residual = decompose(net)
    if len(assignment) > MAX_TABLE_VARS:
        raise ValueError(f"{len(assignment)} expanded inputs exceed the table limit {MAX_TABLE_VARS}")
    table = build_table(residual)
    imps = [imp for imp in simplify_delayed_relations(minterms(table), assignment)
            if implicant_consistent(imp)]
    return assignment, table, synthesize_standard(imps, inputs=net.inputs)
