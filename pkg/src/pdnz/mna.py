"""Independent nodal-analysis oracle for RLC-branch netlists.

Deliberately structured nothing like the rational-function path: each branch
is stamped as a complex admittance 1/(R + jwL + 1/(jwC)) into the node
admittance matrix, a unit current is injected at the port, and the system is
solved by Gaussian elimination with partial pivoting.  Networks here have at
most a dozen nodes, so a dense solve is the whole story.  w = 0 is excluded
by precondition: every path to ground is capacitive and the impedance
diverges there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import Disconnected, SingularSystem


@dataclass(frozen=True)
class Netlist:
    """Flat circuit description: nodes 1..node_count, ground is node 0."""

    node_count: int
    elements: tuple  # (node_a, node_b, RlcBranch)
    port: int

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if self.node_count < 1:
            raise ValueError("need at least one node besides ground")
        if not 1 <= self.port <= self.node_count:
            raise ValueError(f"port {self.port} outside 1..{self.node_count}")
        for a, b, _ in self.elements:
            if a == b:
                raise ValueError(f"element connects node {a} to itself")
            for node in (a, b):
                if not 0 <= node <= self.node_count:
                    raise ValueError(f"node {node} outside 0..{self.node_count}")
        reached = {0}
        frontier = [0]
        adj = {}
        for a, b, _ in self.elements:
            adj.setdefault(a, set()).add(b)
            adj.setdefault(b, set()).add(a)
        while frontier:
            node = frontier.pop()
            for nxt in adj.get(node, ()):
                if nxt not in reached:
                    reached.add(nxt)
                    frontier.append(nxt)
        missing = set(range(self.node_count + 1)) - reached
        if missing:
            raise Disconnected(f"nodes {sorted(missing)} unreachable from ground")

    def _element_arrays(self):
        na = np.array([a for a, _, _ in self.elements], dtype=np.int64)
        nb = np.array([b for _, b, _ in self.elements], dtype=np.int64)
        r = np.array([br.r for _, _, br in self.elements])
        l = np.array([br.l for _, _, br in self.elements])
        c = np.array([br.c for _, _, br in self.elements])
        return na, nb, r, l, c


def oracle_sweep(netlist: Netlist, freqs, observe: int | None = None,
                 inject: int | None = None) -> np.ndarray:
    """Transfer impedance V(observe)/I(inject) over an array of frequencies."""
    freqs = np.asarray(freqs, dtype=float)
    if np.any(freqs <= 0):
        raise ValueError("frequencies must be positive")
    inject = netlist.port if inject is None else inject
    observe = netlist.port if observe is None else observe
    na, nb, r, l, c = netlist._element_arrays()
    values, status = _kernels.mna_solve(na, nb, r, l, c, netlist.node_count,
                                        inject, observe, 2.0 * math.pi * freqs)
    if status.any():
        raise SingularSystem(float(freqs[int(np.argmax(status))]))
    return values


def oracle_impedance(netlist: Netlist, freq_hz: float, debug: bool = False) -> complex:
    """Port impedance at one frequency.

    With debug=True the solve is repeated with the injected current doubled
    and the scaled voltages are compared, a cheap linearity self-check.
    """
    z = complex(oracle_sweep(netlist, np.array([freq_hz]))[0])
    if debug:
        v1 = node_voltages(netlist, freq_hz, current=1.0)
        v2 = node_voltages(netlist, freq_hz, current=2.0)
        if not np.allclose(v2, 2.0 * v1, rtol=1e-12, atol=0.0):
            raise AssertionError("linearity self-check failed")
    return z


def oracle_transfer_impedance(netlist: Netlist, inject: int, observe: int,
                              freq_hz: float) -> complex:
    """Impedance Z(observe <- inject) = V(observe) for unit current at inject."""
    return complex(oracle_sweep(netlist, np.array([freq_hz]),
                                observe=observe, inject=inject)[0])


def node_voltages(netlist: Netlist, freq_hz: float, current: float = 1.0) -> np.ndarray:
    """All node voltages for a current source of the given amplitude at the port."""
    arrays = netlist._element_arrays()
    w = np.array([2.0 * math.pi * freq_hz])
    out = np.empty(netlist.node_count, dtype=np.complex128)
    for node in range(1, netlist.node_count + 1):
        vals, status = _kernels.mna_solve(*arrays, netlist.node_count,
                                          netlist.port, node, w)
        if status.any():
            raise SingularSystem(freq_hz)
        out[node - 1] = vals[0] * current
    return out
