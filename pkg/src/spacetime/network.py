"""Feedforward space-time networks.

A :class:`Network` is an immutable DAG of :class:`Input`, :class:`Delay` and
:class:`Binary` nodes stored in topological order (a node only references
lower ids).  Networks are normally assembled with a :class:`Builder`, which
hash-conses identical nodes, so repeated subexpressions become fanout.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import lattice
from .lattice import OpKind, Time

__all__ = [
    "Input", "Delay", "Binary", "Node", "Network", "Builder", "DelayAssignment",
    "evaluate", "evaluate_batch", "to_tree", "defanout", "push_delays",
    "decompose", "resubstitute", "never", "random_network", "NodeBudgetError",
]

DEFAULT_NODE_BUDGET = 10**5


@dataclass(frozen=True)
class Input:
    name: str


@dataclass(frozen=True)
class Delay:
    src: int
    k: int


@dataclass(frozen=True)
class Binary:
    kind: OpKind
    left: int
    right: int


Node = Union[Input, Delay, Binary]


class NodeBudgetError(RuntimeError):
    """Raised when fanout replication would exceed the node budget."""


@dataclass(frozen=True)
class Network:
    nodes: tuple[Node, ...]
    outputs: tuple[int, ...]
    inputs: tuple[str, ...]

    def __post_init__(self):
        if not self.outputs:
            raise ValueError("a network needs at least one output")
        if len(set(self.inputs)) != len(self.inputs):
            raise ValueError(f"duplicate input names in {self.inputs}")
        declared = set(self.inputs)
        for i, node in enumerate(self.nodes):
            if isinstance(node, Input):
                if node.name not in declared:
                    raise ValueError(f"input node {node.name!r} is not a declared input")
            elif isinstance(node, Delay):
                if not 0 <= node.src < i:
                    raise ValueError(f"node {i}: source {node.src} breaks topological order")
                lattice.as_time(node.k)
            elif isinstance(node, Binary):
                if not (0 <= node.left < i and 0 <= node.right < i):
                    raise ValueError(f"node {i}: operands break topological order")
            else:
                raise TypeError(f"unknown node {node!r}")
        for o in self.outputs:
            if not 0 <= o < len(self.nodes):
                raise ValueError(f"output {o} is not a node id")

    @property
    def output(self) -> int:
        """The sole output id of a single-output network."""
        if len(self.outputs) != 1:
            raise ValueError(f"expected a single-output network, got {len(self.outputs)} outputs")
        return self.outputs[0]

    def consumers(self) -> list[int]:
        """Number of references to each node (outputs count as references)."""
        counts = [0] * len(self.nodes)
        for node in self.nodes:
            if isinstance(node, Delay):
                counts[node.src] += 1
            elif isinstance(node, Binary):
                counts[node.left] += 1
                counts[node.right] += 1
        for o in self.outputs:
            counts[o] += 1
        return counts

    def count(self, node_type) -> int:
        return sum(isinstance(n, node_type) for n in self.nodes)

    def kinds(self) -> set[OpKind]:
        return {n.kind for n in self.nodes if isinstance(n, Binary)}

    def select(self, index: int) -> "Network":
        """Single-output network computing output ``index``."""
        b = Builder(share=False)
        ids = b.copy_from(self)
        return b.build([ids[self.outputs[index]]], inputs=self.inputs)


class Builder:
    """Incremental network construction.

    With ``share=True`` structurally identical nodes are created once, which
    turns repeated subexpressions into fanout.  ``share=False`` keeps every
    node distinct (used when replicating for fanout removal).
    """

    def __init__(self, share: bool = True, budget: int | None = None):
        self.nodes: list[Node] = []
        self._index: dict[Node, int] = {}
        self._inputs: dict[str, int] = {}
        self.share = share
        self.budget = budget

    def _add(self, node: Node) -> int:
        if self.share and node in self._index:
            return self._index[node]
        if self.budget is not None and len(self.nodes) >= self.budget:
            raise NodeBudgetError(f"network exceeds the node budget of {self.budget}")
        self.nodes.append(node)
        self._index.setdefault(node, len(self.nodes) - 1)
        return len(self.nodes) - 1

    def input(self, name: str) -> int:
        # Input nodes are always shared: a name denotes one wire.
        if name not in self._inputs:
            self._inputs[name] = self._add(Input(name))
        return self._inputs[name]

    def delay(self, src: int, k: int) -> int:
        if k == 0:
            return src
        return self._add(Delay(src, lattice.as_time(k)))

    def binary(self, kind: OpKind, left: int, right: int) -> int:
        return self._add(Binary(kind, left, right))

    def min(self, a, b):
        return self.binary(OpKind.MIN, a, b)

    def max(self, a, b):
        return self.binary(OpKind.MAX, a, b)

    def lt(self, a, b):
        return self.binary(OpKind.LT, a, b)

    def reduce(self, kind: OpKind, ids: Sequence[int]) -> int:
        """Balanced reduction tree of an associative operator."""
        ids = list(ids)
        if not ids:
            raise ValueError("cannot reduce an empty operand list")
        while len(ids) > 1:
            pairs = [self.binary(kind, ids[i], ids[i + 1]) for i in range(0, len(ids) - 1, 2)]
            if len(ids) % 2:
                pairs.append(ids[-1])
            ids = pairs
        return ids[0]

    def chain(self, kind: OpKind, ids: Sequence[int]) -> int:
        """Left-nested reduction, ``((x0 op x1) op x2) ...``."""
        ids = list(ids)
        acc = ids[0]
        for i in ids[1:]:
            acc = self.binary(kind, acc, i)
        return acc

    def copy_from(self, net: Network, rename: Mapping[str, int] | None = None) -> list[int]:
        """Copy ``net`` into this builder; returns the new id of every node.

        ``rename`` maps input names to existing ids of this builder, which
        allows substituting subnetworks for inputs.
        """
        rename = rename or {}
        ids: list[int] = []
        for node in net.nodes:
            if isinstance(node, Input):
                ids.append(rename[node.name] if node.name in rename else self.input(node.name))
            elif isinstance(node, Delay):
                ids.append(self.delay(ids[node.src], node.k))
            else:
                ids.append(self.binary(node.kind, ids[node.left], ids[node.right]))
        return ids

    def build(self, outputs: Sequence[int], inputs: Iterable[str] | None = None) -> Network:
        """Prune unreachable nodes and freeze.

        ``inputs`` fixes the declared input order and may list names that
        no longer occur in the pruned graph.
        """
        outputs = list(outputs)
        live = set()
        stack = list(outputs)
        while stack:
            i = stack.pop()
            if i in live:
                continue
            live.add(i)
            node = self.nodes[i]
            if isinstance(node, Delay):
                stack.append(node.src)
            elif isinstance(node, Binary):
                stack.extend((node.left, node.right))
        remap: dict[int, int] = {}
        nodes: list[Node] = []
        for i in sorted(live):
            node = self.nodes[i]
            if isinstance(node, Delay):
                node = Delay(remap[node.src], node.k)
            elif isinstance(node, Binary):
                node = Binary(node.kind, remap[node.left], remap[node.right])
            remap[i] = len(nodes)
            nodes.append(node)
        used = [n.name for n in nodes if isinstance(n, Input)]
        if inputs is None:
            declared = sorted(set(used), key=used.index)
        else:
            declared = list(inputs)
            missing = [u for u in used if u not in declared]
            if missing:
                raise ValueError(f"inputs {missing} are used but not declared")
        return Network(tuple(nodes), tuple(remap[o] for o in outputs), tuple(declared))


def never(inputs: Sequence[str]) -> Network:
    """The always-INF network over ``inputs``: ``x < x`` on the first input."""
    if not inputs:
        raise ValueError("the always-INF network needs at least one input")
    b = Builder()
    x = b.input(inputs[0])
    return b.build([b.lt(x, x)], inputs=inputs)


# -- evaluation --------------------------------------------------------------

def evaluate(net: Network, binding: Mapping[str, Time]) -> list[Time]:
    """Evaluate every output under ``binding`` (one pass, topological order)."""
    missing = [name for name in net.inputs if name not in binding]
    if missing:
        raise KeyError(f"unbound inputs: {', '.join(missing)}")
    values: list[Time] = []
    for node in net.nodes:
        if isinstance(node, Input):
            values.append(lattice.as_time(binding[node.name]))
        elif isinstance(node, Delay):
            values.append(lattice.delay(values[node.src], node.k))
        else:
            values.append(lattice.binary(node.kind, values[node.left], values[node.right]))
    return [values[o] for o in net.outputs]


def evaluate_batch(net: Network, columns: Mapping[str, np.ndarray]) -> np.ndarray:
    """Vectorised evaluation over encoded time columns.

    Returns an ``(n_outputs, n_vectors)`` int64 array in the
    :func:`lattice.encode` representation.
    """
    missing = [name for name in net.inputs if name not in columns]
    if missing:
        raise KeyError(f"unbound inputs: {', '.join(missing)}")
    values: list[np.ndarray] = []
    for node in net.nodes:
        if isinstance(node, Input):
            values.append(np.asarray(columns[node.name], dtype=np.int64))
        elif isinstance(node, Delay):
            values.append(lattice.delay_array(values[node.src], node.k))
        else:
            values.append(lattice.binary_array(node.kind, values[node.left], values[node.right]))
    n = len(next(iter(columns.values()))) if columns else 1
    return np.stack([np.broadcast_to(values[o], (n,)) for o in net.outputs])


def to_tree(net: Network, index: int = 0):
    """Nested-tuple view of one output, independent of node ids.

    Inputs become their name, delays ``("delay", sub, k)`` and binary nodes
    ``(kind.value, left, right)``.
    """
    memo: dict[int, object] = {}

    def walk(i):
        if i not in memo:
            node = net.nodes[i]
            if isinstance(node, Input):
                memo[i] = node.name
            elif isinstance(node, Delay):
                memo[i] = ("delay", walk(node.src), node.k)
            else:
                memo[i] = (node.kind.value, walk(node.left), walk(node.right))
        return memo[i]

    return walk(net.outputs[index])


# -- structural transforms ---------------------------------------------------

def defanout(net: Network, budget: int = DEFAULT_NODE_BUDGET) -> Network:
    """Replicate shared subnetworks so only input nodes fan out."""
    b = Builder(share=False, budget=budget)

    def copy(i):
        node = net.nodes[i]
        if isinstance(node, Input):
            return b.input(node.name)
        if isinstance(node, Delay):
            return b.delay(copy(node.src), node.k)
        return b.binary(node.kind, copy(node.left), copy(node.right))

    return b.build([copy(net.output)], inputs=net.inputs)


def push_delays(net: Network) -> Network:
    """Move every delay onto a primary input, merging consecutive delays.

    Sound because every binary operator commutes with a uniform shift of
    both operands.
    """
    b = Builder(share=False)
    consumers = net.consumers()

    def copy(i, k):
        node = net.nodes[i]
        if isinstance(node, Input):
            return b.delay(b.input(node.name), k)
        if isinstance(node, Delay):
            return copy(node.src, k + node.k)
        return b.binary(node.kind, copy(node.left, k), copy(node.right, k))

    if any(c > 1 for i, c in enumerate(consumers) if not isinstance(net.nodes[i], Input)):
        raise ValueError("push_delays expects a fanout-free network; run defanout first")
    return b.build([copy(net.output, 0)], inputs=net.inputs)


@dataclass(frozen=True)
class DelayAssignment:
    """Expanded inputs of a decomposition: ``(origin, k, expanded_name)``."""

    entries: tuple[tuple[str, int, str], ...] = field(default_factory=tuple)

    def __post_init__(self):
        names = [e[2] for e in self.entries]
        pairs = [e[:2] for e in self.entries]
        if len(set(names)) != len(names) or len(set(pairs)) != len(pairs):
            raise ValueError("expanded inputs must be unique")

    def lookup(self, expanded: str) -> tuple[str, int]:
        for origin, k, name in self.entries:
            if name == expanded:
                return origin, k
        raise KeyError(f"unknown expanded input {expanded!r}")

    def name_of(self, origin: str, k: int) -> str:
        for o, kk, name in self.entries:
            if (o, kk) == (origin, k):
                return name
        raise KeyError(f"no expanded input for {origin}+{k}")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(e[2] for e in self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)


def _expanded_name(origin: str, k: int, taken: set[str]) -> str:
    if k == 0:
        return origin
    name = f"{origin}__d{k}"
    while name in taken:
        name += "_"
    return name


def decompose(net: Network, budget: int = DEFAULT_NODE_BUDGET) -> tuple[DelayAssignment, Network]:
    """Split ``net`` into delayed primary inputs and a delay-free residual."""
    pushed = push_delays(defanout(net, budget=budget))
    nodes = pushed.nodes

    def pair(i):
        node = nodes[i]
        if isinstance(node, Delay):
            return nodes[node.src].name, node.k
        if isinstance(node, Input):
            return node.name, 0
        return None

    refs = [pushed.output]
    refs += [j for n in nodes if isinstance(n, Binary) for j in (n.left, n.right)]
    pairs = {pair(i) for i in refs} - {None}
    order = {name: j for j, name in enumerate(net.inputs)}
    taken = set(net.inputs)
    entries = []
    for origin, k in sorted(pairs, key=lambda p: (order[p[0]], p[1])):
        name = _expanded_name(origin, k, taken)
        taken.add(name)
        entries.append((origin, k, name))
    assignment = DelayAssignment(tuple(entries))

    b = Builder(share=False)
    ids: list[int] = []
    for i, node in enumerate(nodes):
        if isinstance(node, Binary):
            ids.append(b.binary(node.kind, ids[node.left], ids[node.right]))
        elif isinstance(node, Delay) or isinstance(node, Input):
            ids.append(b.input(assignment.name_of(*pair(i))) if pair(i) in pairs else -1)
    return assignment, b.build([ids[pushed.output]], inputs=assignment.names)


def resubstitute(residual: Network, assignment: DelayAssignment,
                 inputs: Sequence[str] | None = None) -> Network:
    """Replace each expanded input by its delayed origin."""
    b = Builder()
    rename = {}
    for origin, k, name in assignment:
        rename[name] = b.delay(b.input(origin), k)
    ids = b.copy_from(residual, rename=rename)
    if inputs is None:
        inputs = list(dict.fromkeys(origin for origin, _, _ in assignment))
    return b.build([ids[o] for o in residual.outputs], inputs=inputs)


# -- random generation -------------------------------------------------------

def random_network(rng: np.random.Generator, n_inputs: int, n_nodes: int,
                   kinds: Sequence[OpKind] = tuple(OpKind), max_delay: int = 0,
                   delay_prob: float = 0.25, names: Sequence[str] | None = None) -> Network:
    """Random single-output feedforward network.

    ``n_nodes`` bounds the total node count (inputs included).  The last
    created node is the output; unused inputs stay declared.
    """
    if names is None:
        names = [chr(ord("a") + i) if n_inputs <= 26 else f"x{i}" for i in range(n_inputs)]
    names = list(names)[:n_inputs]
    b = Builder(share=False)
    pool = [b.input(name) for name in names]
    budget = max(n_nodes - len(pool), 1)
    kinds = list(kinds)
    for _ in range(budget):
        if max_delay > 0 and rng.random() < delay_prob:
            src = pool[int(rng.integers(len(pool)))]
            pool.append(b.delay(src, int(rng.integers(1, max_delay + 1))))
        else:
            kind = kinds[int(rng.integers(len(kinds)))]
            left = pool[int(rng.integers(len(pool)))]
            right = pool[int(rng.integers(len(pool)))]
            pool.append(b.binary(kind, left, right))
    return b.build([pool[-1]], inputs=names)
