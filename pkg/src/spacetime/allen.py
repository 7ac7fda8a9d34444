"""Allen's interval relations as space-time networks over interval endpoints.

An interval ``X`` is the pair of events ``Xs`` (starts) and ``Xf``
(finishes).  Each relation is a max of relational terms, so it is
non-inf exactly when every term holds, at the time the last one is seen.
"""
from __future__ import annotations

import enum
import re
from typing import Mapping, Sequence

import numpy as np

from . import lattice
from .lattice import INF, INF_CODE, Order, Time
from .network import Network, evaluate, evaluate_batch
from .syntax import parse_expr
from .verify import Horizon

__all__ = ["AllenRelation", "ENDPOINTS", "encode", "expression", "eval_intervals", "holds",
           "satisfiable", "strongest_implied", "parse_clock", "format_clock", "MAX_ARITY",
           "interval_pairs"]

ENDPOINTS = ("Xs", "Xf", "Ys", "Yf")
MAX_ARITY = 6


class AllenRelation(enum.Enum):
    BEFORE = "before"
    AFTER = "after"
    MEETS = "meets"
    MET_BY = "met-by"
    OVERLAPS = "overlaps"
    OVERLAPPED_BY = "overlapped-by"
    STARTS = "starts"
    STARTED_BY = "started-by"
    DURING = "during"
    CONTAINS = "contains"
    FINISHES = "finishes"
    FINISHED_BY = "finished-by"
    EQUALS = "equals"

    @property
    def inverse(self) -> "AllenRelation":
        return _INVERSE[self]


_BASE = {
    AllenRelation.BEFORE: "Xf < Ys",
    AllenRelation.MEETS: "Xf == Ys",
    AllenRelation.OVERLAPS: "(Xs < Ys) | (Ys < Xf) | (Xf < Yf)",
    AllenRelation.STARTS: "(Xs == Ys) | (Xf < Yf)",
    AllenRelation.DURING: "(Ys < Xs) | (Xf < Yf)",
    AllenRelation.FINISHES: "(Ys < Xs) | (Xf == Yf)",
    AllenRelation.EQUALS: "(Xs == Ys) | (Xf == Yf)",
}
_PAIRS = [
    (AllenRelation.BEFORE, AllenRelation.AFTER),
    (AllenRelation.MEETS, AllenRelation.MET_BY),
    (AllenRelation.OVERLAPS, AllenRelation.OVERLAPPED_BY),
    (AllenRelation.STARTS, AllenRelation.STARTED_BY),
    (AllenRelation.DURING, AllenRelation.CONTAINS),
    (AllenRelation.FINISHES, AllenRelation.FINISHED_BY),
]
_INVERSE = {AllenRelation.EQUALS: AllenRelation.EQUALS}
for _r, _s in _PAIRS:
    _INVERSE[_r], _INVERSE[_s] = _s, _r


def _swap(text: str) -> str:
    return re.sub(r"\b([XY])([sf])\b", lambda m: ("Y" if m[1] == "X" else "X") + m[2], text)


def expression(rel: AllenRelation) -> str:
    """Infix text of the encoding; inverse relations swap X and Y."""
    if rel in _BASE:
        return _BASE[rel]
    return _swap(_BASE[rel.inverse])


def encode(rel: AllenRelation | str) -> Network:
    return parse_expr(expression(AllenRelation(rel)), inputs=ENDPOINTS)


def _check_interval(label, s: Time, f: Time):
    s, f = lattice.as_time(s), lattice.as_time(f)
    if s is INF and f is INF:
        return s, f
    if not s < f:
        raise ValueError(f"interval {label} needs start < finish, got ({lattice.format_time(s)}, "
                         f"{lattice.format_time(f)})")
    return s, f


def eval_intervals(rel: AllenRelation | str, X: Sequence[Time], Y: Sequence[Time]) -> Time:
    """Evaluate a relation on two intervals; non-inf iff it holds."""
    xs, xf = _check_interval("X", *X)
    ys, yf = _check_interval("Y", *Y)
    return evaluate(encode(rel), dict(zip(ENDPOINTS, (xs, xf, ys, yf))))[0]


def holds(rel: AllenRelation | str, X: Sequence[int], Y: Sequence[int]) -> bool:
    """Direct endpoint predicate for finite intervals (no networks involved)."""
    (xs, xf), (ys, yf) = X, Y
    rel = AllenRelation(rel)
    if rel not in _BASE:
        return holds(rel.inverse, Y, X)
    return {
        AllenRelation.BEFORE: xf < ys,
        AllenRelation.MEETS: xf == ys,
        AllenRelation.OVERLAPS: xs < ys < xf < yf,
        AllenRelation.STARTS: xs == ys and xf < yf,
        AllenRelation.DURING: ys < xs and xf < yf,
        AllenRelation.FINISHES: ys < xs and xf == yf,
        AllenRelation.EQUALS: xs == ys and xf == yf,
    }[rel]


# -- analysis ----------------------------------------------------------------

def interval_pairs(names: Sequence[str]) -> list[tuple[str, str]]:
    """Endpoint pairs implied by naming: ``<P>s`` with ``<P>f``."""
    return [(n, n[:-1] + "f") for n in names if n.endswith("s") and n[:-1] + "f" in names]


def _satisfying(net: Network, h: Horizon, intervals) -> np.ndarray:
    if intervals is None:
        intervals = interval_pairs(net.inputs)
    q = len(net.inputs)
    if q > MAX_ARITY:
        raise ValueError(f"arity {q} exceeds the limit of {MAX_ARITY}")
    if not h.exhaustive(q):
        raise ValueError(f"D({h.T})^{q} is too large to enumerate")
    index = {n: j for j, n in enumerate(net.inputs)}
    for pair in intervals:
        for name in pair:
            if name not in index:
                raise KeyError(f"unknown event {name!r}")
    X = h.vectors(q)
    keep = np.ones(len(X), dtype=bool)
    for s, f in intervals:
        a, b = X[:, index[s]], X[:, index[f]]
        keep &= (a < b) | ((a == INF_CODE) & (b == INF_CODE))
    X = X[keep]
    if not len(X):
        return X
    z = evaluate_batch(net, {n: X[:, j] for n, j in index.items()})[0]
    return X[z != INF_CODE]


def satisfiable(net: Network, h: Horizon = Horizon(T=5),
                intervals: Sequence[tuple[str, str]] | None = None) -> dict | None:
    """Lexicographically smallest satisfying binding, or None (unsat within D(T)).

    ``intervals`` lists (start, finish) event pairs that must be ordered
    start < finish (or both inf); by default they are inferred from the
    input names, and ``()`` disables them.
    """
    X = _satisfying(net, h, intervals)
    if not len(X):
        return None
    return dict(zip(net.inputs, lattice.decode(X[0])))


def strongest_implied(net: Network, pair: tuple[str, str], h: Horizon = Horizon(T=5),
                      intervals: Sequence[tuple[str, str]] | None = None) -> set[Order]:
    """Order classes between two events over every satisfying binding.

    A singleton is the strongest implied relation; empty means unsat
    within the horizon.
    """
    u, v = pair
    for name in pair:
        if name not in net.inputs:
            raise KeyError(f"unknown event {name!r}")
    X = _satisfying(net, h, intervals)
    a, b = X[:, net.inputs.index(u)], X[:, net.inputs.index(v)]
    found = set()
    if (a < b).any():
        found.add(Order.LT)
    if (a == b).any():
        found.add(Order.EQ)
    if (a > b).any():
        found.add(Order.GT)
    return found


# -- clock times -------------------------------------------------------------

_CLOCK = re.compile(r"^(\d{1,2}):(\d{2})$")


def parse_clock(values: Mapping[str, str]) -> tuple[dict, int | None]:
    """Bind times given as decimal, ``inf`` or ``H:MM``.

    When any clock time appears, every clock value is converted to minutes
    relative to the earliest one; returns the binding and that origin in
    minutes (None without clock times).
    """
    minutes = {}
    binding = {}
    for name, text in values.items():
        m = _CLOCK.match(text.strip())
        if m:
            hours, mins = int(m[1]), int(m[2])
            if mins >= 60:
                raise ValueError(f"invalid clock time {text!r}")
            minutes[name] = 60 * hours + mins
        else:
            binding[name] = lattice.parse_time(text)
    if not minutes:
        return binding, None
    origin = min(minutes.values())
    binding.update({n: m - origin for n, m in minutes.items()})
    return binding, origin


def format_clock(t: Time, origin: int) -> str:
    if t is INF:
        return "inf"
    total = origin + t
    return f"{total // 60}:{total % 60:02d}"
