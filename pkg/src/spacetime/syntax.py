"""Text formats for networks: infix expressions and line-oriented net files.

Expression grammar, loosest binding first::

    expr  := and ('|' and)*
    and   := rel ('&' rel)*
    rel   := delay (RELOP delay)?          # non-associative
    delay := atom ('+' NAT)*
    atom  := NAME | '(' expr ')' | ('xmin' | 'xmax') '(' expr ',' expr ')'

Numbers only appear as delay amounts, so every parsed expression is a
network of primitives and therefore a space-time function.
"""
from __future__ import annotations

import re
from typing import Sequence

from .lattice import OpKind
from .network import Binary, Builder, Delay, Input, Network

__all__ = ["ParseError", "parse_expr", "format_expr", "parse_netfile", "format_netfile"]

RELOPS = {"<": OpKind.LT, "<=": OpKind.LE, ">": OpKind.GT, ">=": OpKind.GE,
          "==": OpKind.EQ, "!=": OpKind.NE}
FUNCS = {"xmin": OpKind.XMIN, "xmax": OpKind.XMAX}
RESERVED = {"inf", *FUNCS}

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<op><=|>=|==|!=|[<>&|+(),]))")


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        super().__init__(f"{message} at position {pos}" + (f": {text!r}" if text else ""))


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, builder: Builder):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.b = builder

    @property
    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None, kind=None):
        tok = self.tokens[self.i]
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = value if value is not None else kind
            got = tok[1] or "end of input"
            raise ParseError(f"expected {want!r}, found {got!r}", tok[2], self.text)
        self.i += 1
        return tok

    def parse(self) -> int:
        node = self.expr()
        tok = self.peek
        if tok[0] != "end":
            raise ParseError(f"unexpected {tok[1]!r}", tok[2], self.text)
        return node

    def expr(self):
        node = self.conj()
        while self.peek[1] == "|":
            self.take("|")
            node = self.b.max(node, self.conj())
        return node

    def conj(self):
        node = self.rel()
        while self.peek[1] == "&":
            self.take("&")
            node = self.b.min(node, self.rel())
        return node

    def rel(self):
        node = self.delay()
        if self.peek[1] in RELOPS:
            kind = RELOPS[self.take()[1]]
            node = self.b.binary(kind, node, self.delay())
            if self.peek[1] in RELOPS:
                raise ParseError("relational operators do not chain; add parentheses",
                                 self.peek[2], self.text)
        return node

    def delay(self):
        node = self.atom()
        while self.peek[1] == "+":
            self.take("+")
            node = self.b.delay(node, int(self.take(kind="num")[1]))
        return node

    def atom(self):
        kind, value, pos = self.peek
        if kind == "num":
            raise ParseError("numbers may only appear as delay amounts", pos, self.text)
        if kind == "name":
            self.take()
            if value in FUNCS:
                self.take("(")
                left = self.expr()
                self.take(",")
                right = self.expr()
                self.take(")")
                return self.b.binary(FUNCS[value], left, right)
            if value == "inf":
                raise ParseError("'inf' is only allowed in bindings", pos, self.text)
            return self.b.input(value)
        if value == "(":
            self.take("(")
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected {value or 'end of input'!r}", pos, self.text)


def parse_expr(text: str, inputs: Sequence[str] | None = None) -> Network:
    """Parse an infix expression into a single-output network.

    ``inputs`` declares the input order (and may add unused inputs); by
    default inputs are ordered by first occurrence.
    """
    b = Builder()
    out = _Parser(text, b).parse()
    return b.build([out], inputs=inputs)


# -- printing ----------------------------------------------------------------

_LEVEL = {OpKind.MAX: 1, OpKind.MIN: 2}


def _level(node) -> int:
    if isinstance(node, Binary):
        if node.kind in _LEVEL:
            return _LEVEL[node.kind]
        if node.kind in FUNCS.values():
            return 5
        return 3
    if isinstance(node, Delay):
        return 4
    return 5


def format_expr(net: Network) -> str:
    """Render a single-output network; inverse of :func:`parse_expr`."""
    if len(net.outputs) != 1:
        raise ValueError("format_expr needs a single-output network")
    nodes = net.nodes

    def wrap(i, ok):
        text = fmt(i)
        return text if ok else f"({text})"

    def fmt(i):
        node = nodes[i]
        if isinstance(node, Input):
            return node.name
        if isinstance(node, Delay):
            return f"{wrap(node.src, _level(nodes[node.src]) >= 4)} + {node.k}"
        kind = node.kind
        if kind in (OpKind.XMIN, OpKind.XMAX):
            return f"{kind.value}({fmt(node.left)}, {fmt(node.right)})"
        lnode, rnode = nodes[node.left], nodes[node.right]
        if kind in _LEVEL:
            level = _LEVEL[kind]
            left = wrap(node.left, _level(lnode) == level or _level(lnode) >= 4)
            right = wrap(node.right, _level(rnode) >= 4)
            return f"{left} {kind.symbol} {right}"
        left = wrap(node.left, _level(lnode) >= 4)
        right = wrap(node.right, _level(rnode) >= 4)
        return f"{left} {kind.symbol} {right}"

    return fmt(net.output)


# -- network files -----------------------------------------------------------

_OPS = {k.value: k for k in OpKind}


def parse_netfile(text: str) -> Network:
    """Parse the line-oriented network format.

    ::

        input a
        input b
        s = min a b
        t = delay s 1
        output t
    """
    b = Builder(share=False)
    ids: dict[str, int] = {}
    inputs: list[str] = []
    outputs: list[int] = []

    def ref(name, lineno):
        if name not in ids:
            raise ValueError(f"line {lineno}: unknown node {name!r}")
        return ids[name]

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "input" and len(words) == 2:
            name = words[1]
            if name in ids:
                raise ValueError(f"line {lineno}: {name!r} already defined")
            ids[name] = b.input(name)
            inputs.append(name)
        elif words[0] == "output" and len(words) == 2:
            outputs.append(ref(words[1], lineno))
        elif len(words) >= 3 and words[1] == "=":
            name, op, args = words[0], words[2], words[3:]
            if name in ids:
                raise ValueError(f"line {lineno}: {name!r} already defined")
            if op == "delay" and len(args) == 2:
                if not args[1].isdigit() or int(args[1]) < 1:
                    raise ValueError(f"line {lineno}: delay amount must be a positive integer")
                ids[name] = b.delay(ref(args[0], lineno), int(args[1]))
            elif op in _OPS and len(args) == 2:
                ids[name] = b.binary(_OPS[op], ref(args[0], lineno), ref(args[1], lineno))
            else:
                raise ValueError(f"line {lineno}: malformed node definition {line!r}")
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    if not outputs:
        raise ValueError("network file declares no output")
    return b.build(outputs, inputs=inputs)


def format_netfile(net: Network) -> str:
    lines = [f"input {name}" for name in net.inputs]
    names: dict[int, str] = {}
    for i, node in enumerate(net.nodes):
        if isinstance(node, Input):
            names[i] = node.name
        elif isinstance(node, Delay):
            names[i] = f"n{i}"
            lines.append(f"n{i} = delay {names[node.src]} {node.k}")
        else:
            names[i] = f"n{i}"
            lines.append(f"n{i} = {node.kind.value} {names[node.left]} {names[node.right]}")
    lines += [f"output {names[o]}" for o in net.outputs]
    return "\n".join(lines) + "\n"
