"""Transient-fault leaf analysis for combinational netlists.

A netlist is parsed in topological order, simulated golden and with a
single bit flipped on one net, and the fraction of input vectors whose
flip reaches a primary output is the derating factor of that net.
Campaigns are Monte Carlo with a counter-based RNG (bit-reproducible for
a given seed, batchable without changing results); an exhaustive
enumerator over all input vectors serves as the exact oracle for small
circuits. Raw per-net FIT rates weighted by derating give the transient
failure rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from . import rng
from .errors import InputError, NetlistParseError
from .reliability import Exponential, ReliabilityFunction, constant_one

__all__ = [
    "Gate",
    "Netlist",
    "SerParams",
    "InjectionResult",
    "parse_netlist",
    "evaluate",
    "inject_campaign",
    "exhaustive_derating",
    "transient_failure_rate",
    "exponential_reliability",
    "wilson_interval",
    "read_workload",
    "Z_95",
    "Z_99",
]

GATE_KINDS = ("AND", "OR", "NOT", "XOR", "NAND", "NOR", "BUF")
_UNARY = {"NOT", "BUF"}

# Normal quantiles for the Wilson score interval.
Z_95 = 1.959963984540054
Z_99 = 2.5758293035489004

# FIT is failures per 1e9 device-hours.
PER_HOUR_PER_FIT = 1e-9

_EXHAUSTIVE_MAX_INPUTS = 24


@dataclass(frozen=True)
class Gate:
    output: str
    kind: str
    inputs: tuple


@dataclass(frozen=True)
class Netlist:
    inputs: tuple
    gates: tuple
    outputs: tuple

    def nets(self) -> tuple:
        """All net names in definition order: primary inputs, then gate outputs."""
        return self.inputs + tuple(g.output for g in self.gates)


@dataclass(frozen=True)
class SerParams:
    fit_per_node: Mapping[str, float] = field(default_factory=dict)
    default_fit: float = 0.0

    def __post_init__(self):
        if self.default_fit < 0:
            raise ValueError(f"default FIT must be >= 0, got {self.default_fit!r}")
        for net, fit in self.fit_per_node.items():
            if fit < 0 or not math.isfinite(fit):
                raise ValueError(f"FIT for {net!r} must be >= 0, got {fit!r}")

    def fit_for(self, net: str) -> float:
        return self.fit_per_node.get(net, self.default_fit)


@dataclass(frozen=True)
class InjectionResult:
    node: str
    trials: int
    errors: int
    derating: float
    ci95_half_width: float


def parse_netlist(text: str) -> Netlist:
    """Parse the line-oriented netlist format.

    Lines: `INPUT <name>`, `GATE <out> <KIND> <in...>`, `OUTPUT <name>`;
    `#` starts a comment. Gates must appear after every net they read
    (topological order); violations are reported with line numbers.
    """
    inputs: list = []
    gates: list = []
    output_refs: list = []
    defined_at: dict = {}
    pending: dict = {}  # name -> lines that define it later

    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            tokens = line.split()
            name = tokens[1] if len(tokens) >= 2 else None
            if tokens[0] in ("INPUT", "GATE") and name is not None:
                pending.setdefault(name, []).append(lineno)

    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        if keyword == "INPUT":
            if len(tokens) != 2:
                raise NetlistParseError(f"line {lineno}: INPUT takes one net name")
            name = tokens[1]
            if name in defined_at:
                raise NetlistParseError(
                    f"line {lineno}: net {name!r} already defined on line {defined_at[name]}"
                )
            defined_at[name] = lineno
            inputs.append(name)
        elif keyword == "GATE":
            if len(tokens) < 4:
                raise NetlistParseError(f"line {lineno}: GATE needs output, kind, inputs")
            out, kind = tokens[1], tokens[2]
            ins = tuple(tokens[3:])
            if kind not in GATE_KINDS:
                raise NetlistParseError(f"line {lineno}: unknown gate kind {kind!r}")
            if kind in _UNARY and len(ins) != 1:
                raise NetlistParseError(f"line {lineno}: {kind} takes exactly one input")
            if kind not in _UNARY and len(ins) < 2:
                raise NetlistParseError(f"line {lineno}: {kind} needs at least two inputs")
            if out in defined_at:
                raise NetlistParseError(
                    f"line {lineno}: net {out!r} already defined on line {defined_at[out]}"
                )
            for src in ins:
                if src not in defined_at:
                    later = [l for l in pending.get(src, []) if l > lineno]
                    if later:
                        raise NetlistParseError(
                            f"line {lineno}: net {src!r} used before its definition "
                            f"on line {later[0]} (netlist must be in topological order)"
                        )
                    raise NetlistParseError(f"line {lineno}: undeclared net {src!r}")
            defined_at[out] = lineno
            gates.append(Gate(out, kind, ins))
        elif keyword == "OUTPUT":
            if len(tokens) != 2:
                raise NetlistParseError(f"line {lineno}: OUTPUT takes one net name")
            output_refs.append((tokens[1], lineno))
        else:
            raise NetlistParseError(f"line {lineno}: unknown directive {keyword!r}")

    outputs = []
    for name, lineno in output_refs:
        if name not in defined_at:
            raise NetlistParseError(f"line {lineno}: OUTPUT names undeclared net {name!r}")
        outputs.append(name)
    if not inputs:
        raise NetlistParseError("netlist declares no primary inputs")
    if not outputs:
        raise NetlistParseError("netlist declares no primary outputs")
    return Netlist(tuple(inputs), tuple(gates), tuple(outputs))


def _gate_value(kind: str, operands):
    acc = operands[0]
    if kind == "BUF":
        return acc
    if kind == "NOT":
        return acc ^ 1
    if kind in ("AND", "NAND"):
        for v in operands[1:]:
            acc = acc & v
        return acc ^ 1 if kind == "NAND" else acc
    if kind in ("OR", "NOR"):
        for v in operands[1:]:
            acc = acc | v
        return acc ^ 1 if kind == "NOR" else acc
    for v in operands[1:]:  # XOR
        acc = acc ^ v
    return acc


def _forward(netlist: Netlist, values: dict) -> dict:
    for gate in netlist.gates:
        values[gate.output] = _gate_value(gate.kind, [values[n] for n in gate.inputs])
    return values


def evaluate(netlist: Netlist, assignment: Mapping[str, int]) -> dict:
    """Golden single-vector simulation; returns {output net: bit}."""
    missing = [n for n in netlist.inputs if n not in assignment]
    if missing:
        raise ValueError(f"assignment missing input bits: {missing}")
    values = {}
    for name in netlist.inputs:
        bit = int(assignment[name])
        if bit not in (0, 1):
            raise ValueError(f"input {name!r} must be 0 or 1, got {assignment[name]!r}")
        values[name] = bit
    _forward(netlist, values)
    return {name: values[name] for name in netlist.outputs}


def _downstream_gates(netlist: Netlist, node: str) -> list:
    reached = {node}
    affected = []
    for gate in netlist.gates:
        if any(src in reached for src in gate.inputs):
            reached.add(gate.output)
            affected.append(gate)
    return affected


def _fault_error_mask(netlist: Netlist, golden: dict, node: str):
    """Per-vector flag: does flipping `node` change any primary output?"""
    faulty = {node: golden[node] ^ 1}
    for gate in _downstream_gates(netlist, node):
        ops = [faulty.get(n, golden[n]) for n in gate.inputs]
        faulty[gate.output] = _gate_value(gate.kind, ops)
    err = None
    for out in netlist.outputs:
        if out not in faulty:
            continue
        diff = faulty[out] != golden[out]
        err = diff if err is None else (err | diff)
    if err is None:
        return np.zeros_like(golden[node], dtype=bool)
    return err.astype(bool)


def _require_node(netlist: Netlist, node: str) -> None:
    if node not in netlist.nets():
        raise ValueError(f"unknown injection node {node!r}")


def inject_campaign(
    netlist: Netlist,
    node: str,
    trials: int,
    seed: int,
    workload: Optional[Sequence[Sequence[int]]] = None,
) -> InjectionResult:
    """Monte Carlo single-bit-flip campaign on one net.

    Each trial draws an input vector (uniform over all vectors, or
    uniformly from the explicit workload), flips the golden value on
    `node`, re-propagates only downstream gates, and counts an error when
    any primary output differs. Trial i depends only on (seed, i).
    """
    _require_node(netlist, node)
    if trials <= 0:
        raise ValueError(f"trials must be positive, got {trials!r}")
    n_in = len(netlist.inputs)
    values: dict = {}
    if workload is None:
        lanes = (n_in + 63) // 64
        words = rng.word_block(seed, 0, trials * lanes).reshape(trials, lanes)
        for j, name in enumerate(netlist.inputs):
            values[name] = ((words[:, j // 64] >> np.uint64(j % 64)) & np.uint64(1)).astype(np.uint8)
    else:
        vectors = list(workload)
        if not vectors:
            raise ValueError("explicit workload is empty")
        matrix = np.asarray(vectors, dtype=np.uint8)
        if matrix.ndim != 2 or matrix.shape[1] != n_in:
            raise ValueError(f"workload vectors must have width {n_in}")
        if matrix.max(initial=0) > 1:
            raise ValueError("workload vectors must be binary")
        u = rng.unit_halfopen_floats(seed, 0, trials)
        idx = (u * len(vectors)).astype(np.int64)
        for j, name in enumerate(netlist.inputs):
            values[name] = matrix[idx, j]
    _forward(netlist, values)
    err = _fault_error_mask(netlist, values, node)
    errors = int(err.sum())
    derating = errors / trials
    _, half = wilson_interval(errors, trials, Z_95)
    return InjectionResult(node, trials, errors, derating, half)


def exhaustive_derating(netlist: Netlist, node: str) -> float:
    """Exact visible-flip fraction over all 2^n input vectors (n <= 24)."""
    _require_node(netlist, node)
    n_in = len(netlist.inputs)
    if n_in > _EXHAUSTIVE_MAX_INPUTS:
        raise ValueError(f"exhaustive enumeration limited to {_EXHAUSTIVE_MAX_INPUTS} inputs, got {n_in}")
    count = 1 << n_in
    index = np.arange(count, dtype=np.uint32)
    values = {
        name: ((index >> np.uint32(j)) & np.uint32(1)).astype(np.uint8)
        for j, name in enumerate(netlist.inputs)
    }
    _forward(netlist, values)
    err = _fault_error_mask(netlist, values, node)
    return float(int(err.sum()) / count)


def wilson_interval(errors: int, trials: int, z: float):
    """Wilson score interval as (center, half_width), clipped to [0, 1]."""
    if trials <= 0:
        raise ValueError("trials must be positive")
    p = errors / trials
    z2n = z * z / trials
    denom = 1.0 + z2n
    center = (p + z2n / 2.0) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z2n / (4.0 * trials)) / denom
    return center, half


def transient_failure_rate(
    netlist: Netlist, ser: SerParams, deratings: Mapping[str, float]
) -> float:
    """Per-hour transient rate: sum of FIT * derating * 1e-9 over nets."""
    for net in ser.fit_per_node:
        if net not in netlist.nets():
            raise ValueError(f"FIT map names unknown net {net!r}")
    total_fit = 0.0
    for net in netlist.nets():
        fit = ser.fit_for(net)
        if fit == 0.0:
            continue
        if net not in deratings:
            raise ValueError(f"no derating for net {net!r} with nonzero FIT")
        d = deratings[net]
        if not 0.0 <= d <= 1.0:
            raise ValueError(f"derating for {net!r} out of [0,1]: {d!r}")
        total_fit += fit * d
    return total_fit * PER_HOUR_PER_FIT


def exponential_reliability(lam: float) -> ReliabilityFunction:
    """Memoryless survival for a per-hour upset rate; constant 1 when zero."""
    if lam < 0:
        raise ValueError(f"rate must be nonnegative, got {lam!r}")
    if lam == 0.0:
        return constant_one()
    return Exponential(lam)


def read_workload(fp, n_inputs: int) -> list:
    """Workload file: one binary vector per line, width = number of inputs."""
    vectors = []
    for lineno, raw in enumerate(fp, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if len(line) != n_inputs or any(c not in "01" for c in line):
            raise InputError(
                f"workload line {lineno}: expected {n_inputs} binary digits, got {line!r}"
            )
        vectors.append(tuple(int(c) for c in line))
    if not vectors:
        raise InputError("workload file contains no vectors")
    return vectors
