"""Environmental admittance at a qubit node and the Purcell-limited lifetime."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .intervals import intervals_where
from .netlist import Netlist
from .network import chain_of, load_admittance, safe_ratio

#: Re{Y_env} below this (S) is treated as exactly lossless and T_P is capped.
RE_Y_FLOOR = 1e-18


def env_admittance(net: Netlist, qubit_node: str, omega):
    """Admittance seen from ``qubit_node`` into the rest of the circuit.

    The junction itself is not part of the netlist; the node's own shunt
    capacitance is included (it only adds a susceptance). Both ports are
    terminated in their reference resistances.
    """
    i, j = net.locate_node(qubit_node)
    w = np.asarray(omega, dtype=float)
    shape = np.shape(w)
    branch = net.chain[i]

    left = chain_of(net.chain[:i], net, w)
    right = chain_of(net.chain[i + 1:], net, w)
    y_left, _ = safe_ratio(left.c * net.z_in + left.a, left.d * net.z_in + left.b)
    y_right, _ = safe_ratio(right.c * net.z_out + right.d, right.a * net.z_out + right.b)
    y_tap = y_left + y_right

    toward = chain_of(branch.elements[:j], net, w)
    y_toward, _ = safe_ratio(toward.c + toward.a * y_tap, toward.d + toward.b * y_tap)
    beyond = chain_of(branch.elements[j + 1:], net, w)
    y_beyond, _ = load_admittance(beyond, branch.termination)

    node = branch.elements[j]
    y = y_toward + y_beyond + 1j * w * node.cground
    return y if shape else complex(y)


def purcell_time(c_sigma: float, y_env):
    """``C_sigma / Re{Y_env}``, capped at ``C_sigma / RE_Y_FLOOR``."""
    if not c_sigma > 0:
        raise ValueError("c_sigma must be positive")
    g = np.maximum(np.real(y_env), RE_Y_FLOOR)
    t = c_sigma / g
    return float(t) if np.ndim(t) == 0 else t


@dataclass(frozen=True)
class PurcellCurve:
    frequency: np.ndarray
    env_admittance: np.ndarray
    t_p: np.ndarray
    capped: np.ndarray
    node: str = ""
    c_sigma: float = np.nan

    def max(self) -> tuple[float, float]:
        k = int(np.argmax(self.t_p))
        return float(self.frequency[k]), float(self.t_p[k])

    def at(self, freq: float) -> float:
        """T_P interpolated in log space at ``freq``."""
        return float(np.exp(np.interp(freq, self.frequency, np.log(self.t_p))))


def purcell_curve(net: Netlist, qubit_node: str, c_sigma: Optional[float], freqs) -> PurcellCurve:
    """T_P versus hypothetical qubit frequency over a grid (Hz)."""
    f = np.asarray(freqs, dtype=float)
    if f.ndim != 1 or np.any(f <= 0):
        raise ValueError("frequency grid must be 1-D and positive")
    if c_sigma is None:
        c_sigma = net.default_c_sigma(qubit_node)
    y = env_admittance(net, qubit_node, 2 * np.pi * f)
    return PurcellCurve(f, y, purcell_time(c_sigma, y), np.real(y) < RE_Y_FLOOR, qubit_node, c_sigma)


def protected_band(curve: PurcellCurve, threshold: float) -> list[tuple[float, float]]:
    """Frequency intervals with T_P at or above ``threshold`` seconds."""
    if len(curve.frequency) == 0:
        raise ValueError("empty curve")
    return intervals_where(curve.frequency, curve.t_p, threshold)
