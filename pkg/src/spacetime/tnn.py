"""Temporal neural network blocks built from space-time primitives.

Every builder returns an ordinary :class:`~spacetime.network.Network`;
configuration values (micro-weights, sorter padding) are supplied as
inputs that are bound to constants at evaluation time.  Each block has a
brute-force oracle that does not go through the network.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from . import lattice
from .lattice import INF, OpKind, Time
from .network import Builder, Network, evaluate

__all__ = [
    "ResponseProfile", "StepLists", "NeuronSpec", "Synapse", "PAD", "SORTER_WIDTHS",
    "steps_of", "build_sorter", "sort_nodes", "build_neuron", "build_neuron_from_steps",
    "neuron_oracle", "threshold_crossing", "evaluate_neuron", "microweight_gate",
    "microweight_value", "thermometer", "build_synapse", "build_wta", "parse_profile",
    "format_profile", "load_profile", "build_gated_neuron", "gated_binding",
    "REFERENCE_STEPS",
]

#: Reserved input bound to inf; pads sorters up to a power of two.
PAD = "_inf"
SORTER_WIDTHS = (2, 4, 8, 16, 32)


# -- response functions ------------------------------------------------------

@dataclass(frozen=True)
class ResponseProfile:
    """Tabulated ``rho(w, t)`` for ``w in 0..W`` and ``t in 0..t_max``.

    Amplitudes are held constant after ``t_max``.
    """

    table: np.ndarray  # shape (W + 1, t_max + 1), integer amplitude units

    def __post_init__(self):
        table = np.array(self.table, dtype=np.int64)
        if table.ndim != 2 or table.shape[0] < 1 or table.shape[1] < 1:
            raise ValueError("profile table must be a non-empty (W+1, t_max+1) array")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    @property
    def W(self) -> int:
        return self.table.shape[0] - 1

    @property
    def t_max(self) -> int:
        return self.table.shape[1] - 1

    def rho(self, w: int, t: int) -> int:
        if not 0 <= w <= self.W:
            raise ValueError(f"weight {w} outside 0..{self.W}")
        if t < 0:
            return 0
        return int(self.table[w, min(t, self.t_max)])

    def __eq__(self, other):
        return isinstance(other, ResponseProfile) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())


@dataclass(frozen=True)
class StepLists:
    ups: tuple[int, ...]
    downs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "ups", tuple(sorted(self.ups)))
        object.__setattr__(self, "downs", tuple(sorted(self.downs)))


def steps_of(profile: ResponseProfile, w: int) -> StepLists:
    """Unit up/down steps of ``rho(w, .)``: ``|s|`` copies of ``t`` per change ``s``."""
    row = [profile.rho(w, t) for t in range(profile.t_max + 1)]
    diffs = np.diff(row, prepend=0)
    ups, downs = [], []
    for t, s in enumerate(diffs.tolist()):
        (ups if s > 0 else downs).extend([t] * abs(s))
    return StepLists(tuple(ups), tuple(downs))


def parse_profile(text: str) -> ResponseProfile:
    """``W <w> TMAX <t>`` header, then ``rho <w> <t> <amplitude>`` lines."""
    table = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        if words[0] == "W":
            if len(words) != 4 or words[2] != "TMAX" or table is not None:
                raise ValueError(f"line {lineno}: expected 'W <w> TMAX <t>'")
            table = np.zeros((int(words[1]) + 1, int(words[3]) + 1), dtype=np.int64)
        elif words[0] == "rho" and len(words) == 4:
            if table is None:
                raise ValueError(f"line {lineno}: rho entry before the header")
            w, t, amp = (int(x) for x in words[1:])
            if not (0 <= w < table.shape[0] and 0 <= t < table.shape[1]):
                raise ValueError(f"line {lineno}: entry ({w}, {t}) outside the declared range")
            table[w, t] = amp
        else:
            raise ValueError(f"line {lineno}: cannot parse {line!r}")
    if table is None:
        raise ValueError("missing 'W <w> TMAX <t>' header")
    return ResponseProfile(table)


def format_profile(profile: ResponseProfile) -> str:
    lines = [f"W {profile.W} TMAX {profile.t_max}"]
    for w in range(profile.W + 1):
        lines += [f"rho {w} {t} {a}" for t, a in enumerate(profile.table[w].tolist()) if a]
    return "\n".join(lines) + "\n"


def load_profile(name: str) -> ResponseProfile:
    """Load a bundled profile: ``"biexponential"`` or ``"pulses"``."""
    text = resources.files("spacetime.data").joinpath(f"{name}.profile").read_text()
    return parse_profile(text)


# -- sorting -----------------------------------------------------------------

def sort_nodes(b: Builder, ids: Sequence[int], pad: int | None = None) -> list[int]:
    """Bitonic sorting network over existing nodes, ascending.

    The input list is padded with ``pad`` (an inf-valued node) to a power
    of two; padding sorts last and is dropped from the result.
    """
    ids = list(ids)
    n = len(ids)
    if n <= 1:
        return ids
    width = 1 << (n - 1).bit_length()
    if width > SORTER_WIDTHS[-1]:
        raise ValueError(f"sorter width {width} exceeds {SORTER_WIDTHS[-1]}")
    if width != n:
        if pad is None:
            raise ValueError("padding node required for non power-of-two sorts")
        ids += [pad] * (width - n)
    return _bitonic_sort(b, ids, True)[:n]


def _compare(b, x, y, ascending):
    lo, hi = b.binary(OpKind.MIN, x, y), b.binary(OpKind.MAX, x, y)
    return (lo, hi) if ascending else (hi, lo)


def _bitonic_merge(b, ids, ascending):
    n = len(ids)
    if n == 1:
        return ids
    k = n // 2
    ids = list(ids)
    for j in range(k):
        ids[j], ids[j + k] = _compare(b, ids[j], ids[j + k], ascending)
    return _bitonic_merge(b, ids[:k], ascending) + _bitonic_merge(b, ids[k:], ascending)


def _bitonic_sort(b, ids, ascending):
    n = len(ids)
    if n == 1:
        return list(ids)
    k = n // 2
    first = _bitonic_sort(b, ids[:k], True)
    second = _bitonic_sort(b, ids[k:], False)
    return _bitonic_merge(b, first + second, ascending)


def build_sorter(n: int) -> Network:
    """n-input bitonic sorter of min/max comparators; outputs ascending."""
    if n not in SORTER_WIDTHS:
        raise ValueError(f"sorter size must be one of {SORTER_WIDTHS}, got {n}")
    b = Builder(share=False)
    names = [f"x{i + 1}" for i in range(n)]
    outs = _bitonic_sort(b, [b.input(x) for x in names], True)
    return b.build(outs, inputs=names)


# -- neuron body -------------------------------------------------------------

@dataclass(frozen=True)
class NeuronSpec:
    weights: tuple[int, ...]
    profile: ResponseProfile
    threshold: int

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(int(w) for w in self.weights))
        if self.threshold < 1:
            raise ValueError("threshold must be at least 1")
        for w in self.weights:
            if not 0 <= w <= self.profile.W:
                raise ValueError(f"weight {w} outside 0..{self.profile.W}")

    @property
    def q(self) -> int:
        return len(self.weights)

    def input_names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.q)]


def build_neuron(spec: NeuronSpec) -> Network:
    """SRM0 neuron body: step fanout, two sorters and a threshold comparator row."""
    steps = [steps_of(spec.profile, w) for w in spec.weights]
    return build_neuron_from_steps(steps, spec.threshold, spec.input_names())


def build_neuron_from_steps(steps: Sequence[StepLists], threshold: int,
                            names: Sequence[str] | None = None) -> Network:
    names = list(names or [f"x{i + 1}" for i in range(len(steps))])
    b = Builder()
    pad = b.input(PAD)
    ups, downs = [], []
    for name, st in zip(names, steps):
        x = b.input(name)
        ups += [b.delay(x, t) for t in st.ups]
        downs += [b.delay(x, t) for t in st.downs]
    return _neuron_body(b, ups, downs, threshold, pad, [*names, PAD])


def _neuron_body(b, ups, downs, threshold, pad, inputs) -> Network:
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    if threshold > len(ups):
        warnings.warn(f"threshold {threshold} exceeds the {len(ups)} available up steps; "
                      "the neuron never fires", stacklevel=3)
        return b.build([b.lt(pad, pad)], inputs=inputs)
    u = sort_nodes(b, ups, pad)
    d = sort_nodes(b, downs, pad)
    candidates = []
    # candidate i: the (threshold+i)-th up step precedes the (i+1)-th down step
    for i in range(0, min(len(d), len(u) - threshold) + 1):
        up = u[threshold + i - 1]
        candidates.append(b.lt(up, d[i]) if i < len(d) else up)
    return b.build([b.reduce(OpKind.MIN, candidates)], inputs=inputs)


def evaluate_neuron(net: Network, spikes: Sequence[Time], fixed: dict | None = None) -> Time:
    """Evaluate a neuron-style network with its reserved inputs bound."""
    names = [n for n in net.inputs if n != PAD and n not in (fixed or {})]
    if len(names) != len(spikes):
        raise ValueError(f"expected {len(names)} spike times, got {len(spikes)}")
    binding = dict(zip(names, spikes))
    binding.update(fixed or {})
    if PAD in net.inputs:
        binding[PAD] = INF
    return evaluate(net, binding)[0]


def neuron_oracle(spikes: Sequence[Time], spec: NeuronSpec) -> Time:
    """First time the summed body potential reaches the threshold.

    Direct integration: ``P(t) = sum_i rho(w_i, t - x_i)`` over spiking
    inputs, scanned up to the last spike plus ``t_max``.
    """
    if len(spikes) != spec.q:
        raise ValueError(f"expected {spec.q} spike times, got {len(spikes)}")
    active = [(lattice.as_time(x), w) for x, w in zip(spikes, spec.weights) if x is not INF]
    if not active:
        return INF
    start = min(x for x, _ in active)
    stop = max(x for x, _ in active) + spec.profile.t_max
    for t in range(start, stop + 1):
        if sum(spec.profile.rho(w, t - x) for x, w in active) >= spec.threshold:
            return t
    return INF


def threshold_crossing(ups: Sequence[int], downs: Sequence[int], threshold: int) -> Time:
    """First time the count of up steps minus down steps reaches ``threshold``.

    All steps at one time are applied before the test.
    """
    times = sorted(set(ups) | set(downs))
    level = 0
    for t in times:
        level += sum(1 for u in ups if u == t) - sum(1 for d in downs if d == t)
        if level >= threshold:
            return t
    return INF


# -- micro-weights -----------------------------------------------------------

def microweight_value(mu: int) -> Time:
    """Configuration bit to spike time: 1 enables (inf), 0 blocks (0)."""
    if mu not in (0, 1):
        raise ValueError(f"micro-weight must be 0 or 1, got {mu!r}")
    return INF if mu else 0


def microweight_gate(b: Builder, x: int, m: int) -> int:
    """``x < m``: passes ``x`` when ``m`` is inf, blocks when ``m`` is 0."""
    return b.lt(x, m)


def thermometer(w: int, W: int) -> list[int]:
    if not 0 <= w <= W:
        raise ValueError(f"weight {w} outside 0..{W}")
    return [1] * w + [0] * (W - w)


@dataclass(frozen=True)
class Synapse:
    """Gated step fanout for one input; outputs are up lines then down lines."""

    network: Network
    n_up: int
    n_down: int
    mu_names: tuple[str, ...]
    input_name: str

    def binding(self, x: Time, w: int) -> dict:
        bits = thermometer(w, len(self.mu_names))
        return {self.input_name: x, **{m: microweight_value(bit) for m, bit in zip(self.mu_names, bits)}}

    def effective_steps(self, w: int, x: int = 0) -> StepLists:
        """Step times (relative to ``x``) that pass the gates at weight ``w``."""
        out = evaluate(self.network, self.binding(x, w))
        ups = [t - x for t in out[:self.n_up] if t is not INF]
        downs = [t - x for t in out[self.n_up:] if t is not INF]
        return StepLists(tuple(ups), tuple(downs))


def _components(profile: ResponseProfile) -> list[ResponseProfile]:
    comps = []
    for j in range(1, profile.W + 1):
        row = profile.table[j] - profile.table[j - 1]
        if not np.isin(row, (0, 1)).all():
            raise ValueError(f"component {j} of the profile is not a 0/1 unit response; "
                             "weights must add unit components monotonically")
        comps.append(ResponseProfile(np.stack([np.zeros_like(row), row])))
    return comps


def build_synapse(profile: ResponseProfile, name: str = "x") -> Synapse:
    """Micro-weight synapse: component ``j`` of the profile gated by ``mu_j``."""
    b = Builder()
    x = b.input(name)
    mu_names = tuple(f"mu{j}" for j in range(1, profile.W + 1))
    ups, downs = [], []
    for comp, mu in zip(_components(profile), mu_names):
        gated = microweight_gate(b, x, b.input(mu))
        st = steps_of(comp, 1)
        ups += [b.delay(gated, t) for t in st.ups]
        downs += [b.delay(gated, t) for t in st.downs]
    if not ups and not downs:
        raise ValueError("profile has no steps to gate")
    net = b.build(ups + downs, inputs=[name, *mu_names])
    return Synapse(net, len(ups), len(downs), mu_names, name)


def build_gated_neuron(profile: ResponseProfile, q: int, threshold: int) -> Network:
    """Neuron whose synapses are micro-weight gated; inputs ``x_i``, ``x_i_mu_j``, PAD."""
    b = Builder()
    pad = b.input(PAD)
    ups, downs, names = [], [], []
    for i in range(1, q + 1):
        syn = build_synapse(profile, f"x{i}")
        rename = {m: b.input(f"x{i}_{m}") for m in syn.mu_names}
        ids = b.copy_from(syn.network, rename=rename)
        outs = [ids[o] for o in syn.network.outputs]
        ups += outs[:syn.n_up]
        downs += outs[syn.n_up:]
        names += [f"x{i}", *[f"x{i}_{m}" for m in syn.mu_names]]
    return _neuron_body(b, ups, downs, threshold, pad, [*names, PAD])


def gated_binding(weights: Sequence[int], W: int) -> dict:
    """Micro-weight inputs of :func:`build_gated_neuron` for given weights."""
    fixed = {}
    for i, w in enumerate(weights, 1):
        for j, bit in enumerate(thermometer(w, W), 1):
            fixed[f"x{i}_mu{j}"] = microweight_value(bit)
    return fixed


# -- winner-take-all ---------------------------------------------------------

def build_wta(n: int) -> Network:
    """1-WTA: ``z_i = x_i < (min(x) + 1)``; ties for first all pass."""
    if n < 2:
        raise ValueError("WTA needs at least two inputs")
    b = Builder()
    names = [f"x{i + 1}" for i in range(n)]
    xs = [b.input(x) for x in names]
    inhibit = b.delay(b.reduce(OpKind.MIN, xs), 1)
    return b.build([b.lt(x, inhibit) for x in xs], inputs=names)


#: Step lists of the bundled biexponential profile at w=5 as originally
#: tabulated, with one cancelling up/down pair at t=5.  First differences
#: never produce such a pair; neurons built from either list agree.
REFERENCE_STEPS = StepLists(ups=(1, 1, 2, 2, 5), downs=(5, 7, 8, 10, 12))
