"""Event times and the primitive operators of the space-time lattice.

A time is either a non-negative ``int`` or the lattice top :data:`INF`
("the event never occurs").  Scalar operators live here together with
array kernels used by the exhaustive checkers; the kernels encode ``INF``
as :data:`INF_CODE` internally and never leak that code to callers.
"""
from __future__ import annotations

import enum
from typing import Union

import numpy as np

__all__ = [
    "INF", "Infinity", "Time", "MAX_TIME", "INF_CODE", "OpKind", "Order",
    "TABLE", "as_time", "parse_time", "format_time", "delay", "binary",
    "order", "encode", "decode", "delay_array", "binary_array",
]

#: Largest representable finite time.
MAX_TIME = 2**62
#: Array encoding of INF; strictly greater than every finite time.
INF_CODE = np.iinfo(np.int64).max


class Infinity:
    """The lattice top.  A singleton; compares greater than every int."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "inf"

    __str__ = __repr__

    def __reduce__(self):
        return (Infinity, ())

    def __hash__(self):
        return hash("spacetime.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        if other is self or _is_int(other):
            return False
        return NotImplemented

    def __le__(self, other):
        if other is self:
            return True
        if _is_int(other):
            return False
        return NotImplemented

    def __gt__(self, other):
        if other is self:
            return False
        if _is_int(other):
            return True
        return NotImplemented

    def __ge__(self, other):
        if other is self or _is_int(other):
            return True
        return NotImplemented

    def __add__(self, other):
        if _is_int(other) and other >= 0:
            return self
        return NotImplemented

    __radd__ = __add__


INF = Infinity()
Time = Union[int, Infinity]


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) and not isinstance(x, bool)


def as_time(x) -> Time:
    """Validate ``x`` as a time and return it in canonical form."""
    if x is INF:
        return INF
    if not _is_int(x):
        raise TypeError(f"not a time: {x!r}")
    x = int(x)
    if x < 0:
        raise ValueError(f"times are non-negative, got {x}")
    if x > MAX_TIME:
        raise OverflowError(f"time {x} exceeds the maximum {MAX_TIME}")
    return x


def parse_time(text: str) -> Time:
    text = text.strip()
    if text == "inf":
        return INF
    if not text.isdigit():
        raise ValueError(f"invalid time {text!r}")
    return as_time(int(text))


def format_time(t: Time) -> str:
    return "inf" if t is INF else str(t)


class Order(enum.Enum):
    LT = "<"
    EQ = "="
    GT = ">"


def order(a: Time, b: Time) -> Order:
    """Three-way comparison of two times; ``INF`` equals itself."""
    if a is INF:
        return Order.EQ if b is INF else Order.GT
    if b is INF or a < b:
        return Order.LT
    return Order.EQ if a == b else Order.GT


class OpKind(enum.Enum):
    """The ten 2-ary operators.  Values are the network-file mnemonics."""

    MIN = "min"
    MAX = "max"
    XMIN = "xmin"
    XMAX = "xmax"
    LT = "lt"
    LE = "le"
    GT = "gt"
    GE = "ge"
    EQ = "eq"
    NE = "ne"

    @property
    def commutative(self) -> bool:
        return self in _COMMUTATIVE

    @property
    def relational(self) -> bool:
        return self in _RELATIONAL

    @property
    def symbol(self) -> str:
        return _SYMBOLS[self]


_COMMUTATIVE = frozenset({OpKind.MIN, OpKind.MAX, OpKind.XMIN, OpKind.XMAX, OpKind.EQ})
_RELATIONAL = frozenset({OpKind.LT, OpKind.LE, OpKind.GT, OpKind.GE, OpKind.EQ, OpKind.NE})
_SYMBOLS = {
    OpKind.MIN: "&", OpKind.MAX: "|", OpKind.XMIN: "xmin", OpKind.XMAX: "xmax",
    OpKind.LT: "<", OpKind.LE: "<=", OpKind.GT: ">", OpKind.GE: ">=",
    OpKind.EQ: "==", OpKind.NE: "!=",
}

# Output selector per ordering class: "a", "b" or None (INF).  At a = b the
# choice between a and b is immaterial; "a" is used.
TABLE: dict[OpKind, dict[Order, str | None]] = {
    OpKind.MIN: {Order.LT: "a", Order.EQ: "a", Order.GT: "b"},
    OpKind.LE: {Order.LT: "a", Order.EQ: "a", Order.GT: None},
    OpKind.NE: {Order.LT: "a", Order.EQ: None, Order.GT: "a"},
    OpKind.XMIN: {Order.LT: "a", Order.EQ: None, Order.GT: "b"},
    OpKind.LT: {Order.LT: "a", Order.EQ: None, Order.GT: None},
    OpKind.MAX: {Order.LT: "b", Order.EQ: "a", Order.GT: "a"},
    OpKind.XMAX: {Order.LT: "b", Order.EQ: None, Order.GT: "a"},
    OpKind.GE: {Order.LT: None, Order.EQ: "a", Order.GT: "a"},
    OpKind.EQ: {Order.LT: None, Order.EQ: "a", Order.GT: None},
    OpKind.GT: {Order.LT: None, Order.EQ: None, Order.GT: "a"},
}


def delay(a: Time, k: int) -> Time:
    """Add the constant ``k`` to ``a``; ``INF`` is absorbing."""
    k = as_time(k)
    if a is INF:
        return INF
    return as_time(a + k)


def binary(kind: OpKind, a: Time, b: Time) -> Time:
    pick = TABLE[kind][order(a, b)]
    if pick is None:
        return INF
    return a if pick == "a" else b


# -- array kernels -----------------------------------------------------------

def encode(values) -> np.ndarray:
    """Encode an iterable of times as an int64 array."""
    return np.array([INF_CODE if v is INF else as_time(v) for v in values], dtype=np.int64)


def decode(arr) -> list[Time]:
    return [INF if v == INF_CODE else int(v) for v in np.asarray(arr).tolist()]


def delay_array(a: np.ndarray, k: int) -> np.ndarray:
    k = as_time(k)
    finite = a != INF_CODE
    if k and finite.any() and int(a[finite].max()) > MAX_TIME - k:
        raise OverflowError(f"delay by {k} exceeds the maximum time {MAX_TIME}")
    return np.where(finite, a + k, INF_CODE)


def binary_array(kind: OpKind, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    row = TABLE[kind]
    pick = {"a": a, "b": b, None: INF_CODE}
    return np.select(
        [a < b, a == b],
        [pick[row[Order.LT]], pick[row[Order.EQ]]],
        default=pick[row[Order.GT]],
    )
