"""Frequency-domain nodal analysis, kept independent of the ABCD cascade.

Nothing here goes through :mod:`pifilter.network`; it reads the netlist and
builds a symmetric nodal admittance matrix from scratch so the two solvers can
check each other.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .netlist import Branch, Line, Netlist, Node, OpenStub, SeriesCap, ShuntLC

# |sin(theta)| below this and the line is split in two halves before stamping
_SPLIT_SIN = 1e-3
RESIDUAL_TOL = 1e-10


class MNAError(RuntimeError):
    pass


class SingularSystemError(MNAError):
    def __init__(self, nodes):
        self.nodes = list(nodes)
        super().__init__(f"singular nodal matrix; isolated or floating nodes: {', '.join(self.nodes)}")


@dataclass
class NodalSystem:
    nodes: dict  # name -> row index
    matrix: np.ndarray
    rhs: np.ndarray
    omega: float

    @property
    def names(self) -> list[str]:
        """One name per matrix row (aliases dropped)."""
        out = [""] * self.matrix.shape[0]
        for name, i in sorted(self.nodes.items(), key=lambda kv: "#" in kv[0]):
            if not out[i]:
                out[i] = name
        return out


class _Builder:
    def __init__(self, omega: float):
        self.omega = omega
        self.index: dict[str, int] = {}
        self.entries: dict[tuple[int, int], complex] = {}
        self.rhs: dict[int, complex] = {}
        self.grounded: set[str] = set()
        self.alias: dict[str, str] = {}
        self._fresh = 0

    def node(self, name: str) -> str:
        if name not in self.index:
            self.index[name] = len(self.index)
        return name

    def fresh(self, hint: str) -> str:
        self._fresh += 1
        return self.node(f"{hint}#{self._fresh}")

    def _add(self, i, j, y):
        self.entries[(i, j)] = self.entries.get((i, j), 0j) + y

    def shunt(self, n: str, y: complex):
        i = self.index[n]
        self._add(i, i, y)

    def between(self, n1: str, n2: str, y: complex):
        i, j = self.index[n1], self.index[n2]
        self._add(i, i, y)
        self._add(j, j, y)
        self._add(i, j, -y)
        self._add(j, i, -y)

    def twoport_y(self, n1: str, n2: str, y11, y12, y22):
        i, j = self.index[n1], self.index[n2]
        self._add(i, i, y11)
        self._add(j, j, y22)
        self._add(i, j, y12)
        self._add(j, i, y12)

    def line(self, n1: str, n2: str, z: float, theta: float, hint: str):
        s = np.sin(theta)
        if abs(s) < _SPLIT_SIN:
            if theta < _SPLIT_SIN:
                raise MNAError(f"line {hint!r} is electrically too short to stamp (theta={theta:g})")
            mid = self.fresh(hint)
            self.line(n1, mid, z, theta / 2, hint)
            self.line(mid, n2, z, theta / 2, hint)
            return
        y_self = np.cos(theta) / (1j * z * s)
        y_mut = -1.0 / (1j * z * s)
        self.twoport_y(n1, n2, y_self, y_mut, y_self)

    def inject(self, n: str, current: complex):
        i = self.index[self.alias.get(n, n)]
        self.rhs[i] = self.rhs.get(i, 0j) + current

    def build(self) -> NodalSystem:
        keep = [n for n in self.index if n not in self.grounded]
        new = {n: k for k, n in enumerate(keep)}
        remap = {self.index[n]: new[n] for n in keep}
        dim = len(keep)
        mat = np.zeros((dim, dim), dtype=complex)
        for (i, j), y in self.entries.items():
            if i in remap and j in remap:
                mat[remap[i], remap[j]] += y
        rhs = np.zeros(dim, dtype=complex)
        for i, cur in self.rhs.items():
            if i in remap:
                rhs[remap[i]] += cur
        if not np.array_equal(mat, mat.T):
            raise MNAError("admittance matrix lost symmetry during stamping")
        names = dict(new)
        for name, target in self.alias.items():
            if target in new:
                names[name] = new[target]
        return NodalSystem(names, mat, rhs, self.omega)


def _stamp_series(b: _Builder, el, cur: str, net: Netlist, hint: str, target=None) -> str:
    w = b.omega
    nxt = target or b.fresh(hint)
    if isinstance(el, Line):
        b.line(cur, nxt, el.z, w * el.length / net.velocity, el.name)
    elif isinstance(el, SeriesCap):
        b.between(cur, nxt, 1j * w * el.c)
    else:
        raise TypeError(el)
    return nxt


def _stamp_shunt(b: _Builder, el, cur: str, net: Netlist):
    w = b.omega
    if isinstance(el, OpenStub):
        far = b.fresh(el.name + ".open")
        b.line(cur, far, el.z, w * el.length / net.velocity, el.name)
    elif isinstance(el, ShuntLC):
        mid = b.fresh(el.name + ".mid")
        b.between(cur, mid, 1.0 / (1j * w * el.l))
        b.shunt(mid, 1j * w * el.c)
    elif isinstance(el, Branch):
        _stamp_branch(b, el, cur, net)
    else:
        raise TypeError(el)


def _stamp_branch(b: _Builder, br: Branch, tap: str, net: Netlist):
    cur = tap
    els = br.elements
    for k, el in enumerate(els):
        if isinstance(el, (Line, SeriesCap)):
            nxt = els[k + 1] if k + 1 < len(els) else None
            target = b.node(nxt.name) if isinstance(nxt, Node) else None
            cur = _stamp_series(b, el, cur, net, br.name, target)
        elif isinstance(el, Node):
            if el.name not in b.index:
                # node sits on an existing junction (tap or after a shunt)
                b.alias[el.name] = cur
            if el.cground:
                b.shunt(cur, 1j * b.omega * el.cground)
        else:
            _stamp_shunt(b, el, cur, net)
    if br.termination == "short":
        if cur == tap:
            raise MNAError(f"branch {br.name!r} shorts the feedline directly")
        b.grounded.add(cur)


def _stamp(net: Netlist, omega: float) -> tuple[_Builder, str, str]:
    if not omega > 0:
        raise ValueError("omega must be positive")
    b = _Builder(float(omega))
    port_in = b.node("port_in")
    cur = port_in
    for item in net.chain:
        if isinstance(item, (Line, SeriesCap)):
            cur = _stamp_series(b, item, cur, net, "j")
        else:
            _stamp_shunt(b, item, cur, net)
    b.alias["port_out"] = cur
    b.shunt(port_in, 1.0 / net.z_in)
    b.shunt(cur, 1.0 / net.z_out)
    return b, port_in, cur


def stamp_netlist(net: Netlist, omega: float, source_voltage: complex = 1.0) -> NodalSystem:
    """Nodal system driven by a voltage source of ``source_voltage`` behind ``z_in``.

    Row names: ``port_in``, ``port_out``, feedline junctions ``j#k``,
    branch-internal junctions, and user-declared nodes by their own names.
    """
    b, port_in, _ = _stamp(net, omega)
    b.inject(port_in, source_voltage / net.z_in)
    return b.build()


def solve_ac(system: NodalSystem) -> np.ndarray:
    a, rhs = system.matrix, system.rhs
    try:
        v = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        raise SingularSystemError(_null_nodes(system)) from None
    norm_b = np.linalg.norm(rhs)
    resid = np.linalg.norm(a @ v - rhs) / (norm_b if norm_b > 0 else 1.0)
    if not np.all(np.isfinite(v)) or resid > RESIDUAL_TOL:
        raise SingularSystemError(_null_nodes(system))
    return v


def _null_nodes(system: NodalSystem) -> list[str]:
    names = system.names
    empty = [names[i] for i in range(len(names)) if not np.any(system.matrix[i])]
    if empty:
        return empty
    _, _, vh = np.linalg.svd(system.matrix)
    null = np.abs(vh[-1])
    return [names[i] for i in np.flatnonzero(null > 0.1 * null.max())]


def s21_mna(net: Netlist, omega: float) -> complex:
    system = stamp_netlist(net, omega)
    v = solve_ac(system)
    return complex(2 * v[system.nodes["port_out"]] * np.sqrt(net.z_in / net.z_out))


def input_admittance_mna(net: Netlist, node: str, omega: float) -> complex:
    """Test-source admittance at ``node`` with both ports resistively terminated."""
    if node not in net.nodes():
        raise KeyError(f"unknown node {node!r}")
    b, _, _ = _stamp(net, omega)
    b.inject(node, 1.0)
    system = b.build()
    v = solve_ac(system)
    return complex(1.0 / v[system.nodes[node]])


def s21_mna_sweep(net: Netlist, freqs) -> np.ndarray:
    return np.array([s21_mna(net, 2 * np.pi * f) for f in np.asarray(freqs, dtype=float)])


def input_admittance_mna_sweep(net: Netlist, node: str, freqs) -> np.ndarray:
    return np.array([input_admittance_mna(net, node, 2 * np.pi * f) for f in np.asarray(freqs, dtype=float)])
