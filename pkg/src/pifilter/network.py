"""Two-port composition of netlists and the quantities derived from it."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from .elements import (
    LineSpec,
    LumpedLC,
    TwoPort,
    abcd_series,
    abcd_shunt,
    abcd_tline,
    capacitor_impedance,
    identity,
    lc_shunt_admittance_flagged,
    open_stub_admittance_flagged,
    saturated_tan,
)
from .netlist import Branch, Line, Netlist, Node, OpenStub, SeriesCap, ShuntLC

# relative size of a denominator below which a ratio counts as a pole
POLE_RTOL = 1e-15


def cascade(parts: Sequence[TwoPort]) -> TwoPort:
    """Chain product, input side first."""
    if not parts:
        raise ValueError("cascade needs at least one two-port")
    return reduce(lambda x, y: x @ y, parts)


def safe_ratio(num, den):
    """``num / den`` with the denominator clamped away from zero; returns (value, flag)."""
    num = np.asarray(num, dtype=complex)
    den = np.asarray(den, dtype=complex)
    floor = POLE_RTOL * np.abs(num)
    flag = np.abs(den) <= floor
    phase = np.where(den == 0, 1.0, den / np.where(den == 0, 1.0, np.abs(den)))
    safe = np.where(flag, np.maximum(floor, 1e-300) * phase, den)
    val = num / safe
    if val.ndim == 0:
        return complex(val), bool(flag)
    return val, flag


def _line_spec(el, net: Netlist) -> LineSpec:
    return LineSpec(el.length, el.z, net.velocity)


def element_abcd(el, net: Netlist, omega) -> TwoPort:
    """Two-port of a single chain or branch element."""
    if isinstance(el, Line):
        return abcd_tline(_line_spec(el, net), omega)
    if isinstance(el, SeriesCap):
        return abcd_series(capacitor_impedance(el.c, omega))
    if isinstance(el, OpenStub):
        y, flag = open_stub_admittance_flagged(_line_spec(el, net), omega)
        return abcd_shunt(y, flag)
    if isinstance(el, ShuntLC):
        y, flag = lc_shunt_admittance_flagged(LumpedLC(el.l, el.c), omega)
        return abcd_shunt(y, flag)
    if isinstance(el, Node):
        return abcd_shunt(1j * np.asarray(omega, dtype=float) * el.cground)
    if isinstance(el, Branch):
        y, flag = branch_admittance_flagged(el, net, omega)
        return abcd_shunt(y, flag)
    raise TypeError(f"unsupported element {el!r}")


def chain_of(elements, net: Netlist, omega) -> TwoPort:
    shape = np.shape(omega)
    return reduce(lambda acc, el: acc @ element_abcd(el, net, omega), elements, identity(shape))


def load_admittance(tp: TwoPort, termination: str):
    """Admittance looking into port 1 with port 2 open or shorted."""
    if termination == "open":
        return safe_ratio(tp.c, tp.a)
    if termination == "short":
        return safe_ratio(tp.d, tp.b)
    raise ValueError(termination)


def branch_admittance_flagged(branch: Branch, net: Netlist, omega):
    tp = chain_of(branch.elements, net, omega)
    y, flag = load_admittance(tp, branch.termination)
    return y, np.logical_or(flag, tp.saturated)


def branch_admittance(branch: Branch, net: Netlist, omega):
    """Admittance a shunt branch presents at its tap."""
    return branch_admittance_flagged(branch, net, omega)[0]


def chain_abcd(net: Netlist, omega) -> TwoPort:
    return chain_of(net.chain, net, omega)


@dataclass(frozen=True)
class SParams:
    s11: np.ndarray
    s21: np.ndarray
    s12: np.ndarray
    s22: np.ndarray
    frequency: np.ndarray
    saturated: np.ndarray


def s_params(tp: TwoPort, z_in: float, z_out: float, frequency=np.nan, reciprocal: bool = True) -> SParams:
    """ABCD to S conversion with real reference impedances on each port.

    With ``reciprocal`` (every element here is), S12 is set to S21 instead of
    being scaled by ``ad - bc``: near stub poles the entries reach 1e10 and the
    computed determinant loses all precision.
    """
    if not (z_in > 0 and z_out > 0):
        raise ValueError("port impedances must be positive")
    a, b, c, d = tp.a, tp.b, tp.c, tp.d
    den = a * z_out + b + c * z_in * z_out + d * z_in
    root = np.sqrt(z_in * z_out)
    return SParams(
        s11=(a * z_out + b - c * z_in * z_out - d * z_in) / den,
        s21=2 * root / den,
        s12=2 * root / den if reciprocal else 2 * root * tp.det() / den,
        s22=(-a * z_out + b - c * z_in * z_out + d * z_in) / den,
        frequency=np.asarray(frequency, dtype=float),
        saturated=np.asarray(tp.saturated),
    )


def terminated_impedance(tp: TwoPort, z_load: Optional[complex]) -> complex:
    """Input impedance with port 2 loaded by ``z_load`` (``None`` = open)."""
    if z_load is None or (np.isscalar(z_load) and np.isinf(z_load)):
        return safe_ratio(tp.a, tp.c)[0]
    return safe_ratio(tp.a * z_load + tp.b, tp.c * z_load + tp.d)[0]


def effective_series_impedance(tp: TwoPort, z0: float):
    """Impedance of the series element that would give the same S21 between two
    ``z0`` ports. Diverges wherever the two-port blocks transmission."""
    a, b, c, d = tp.a, tp.b, tp.c, tp.d
    return z0 * (a + b / z0 + c * z0 + d) - 2 * z0


def pi_impedance_analytic(lplus: LineSpec, lminus: LineSpec, inline: LineSpec, z0: float, omega):
    """Closed-form input impedance of the two-stub filter loaded by ``z0``."""
    if len({s.char_impedance for s in (lplus, lminus, inline)}) != 1:
        raise ValueError("filter lines must share char_impedance")
    if len({s.phase_velocity for s in (lplus, lminus, inline)}) != 1:
        raise ValueError("filter lines must share phase_velocity")
    if not z0 > 0:
        raise ValueError("z0 must be positive")
    w = np.asarray(omega, dtype=float)
    ztl = inline.char_impedance
    r = z0 / ztl
    tb, _ = saturated_tan(inline.beta * w)
    tp, _ = saturated_tan(lplus.beta * w)
    tm, _ = saturated_tan(lminus.beta * w)
    num = r * (1 - tb * tm) + 1j * tb
    den = 1j * r * (tb * (1 - tp * tm) + (tp + tm)) + 1 - tb * tp
    return ztl * safe_ratio(num, den)[0]


def reversed_netlist(net: Netlist) -> Netlist:
    """The same circuit driven from the output port."""
    return Netlist(tuple(reversed(net.chain)), net.z_out, net.z_in, net.velocity, net.ztl)


def response_sweep(net: Netlist, freqs) -> SParams:
    """S-parameters of the netlist at every frequency (Hz) of an ascending grid."""
    f = np.asarray(freqs, dtype=float)
    if f.ndim != 1 or np.any(f <= 0) or np.any(np.diff(f) <= 0):
        raise ValueError("frequency grid must be positive and strictly ascending")
    tp = chain_abcd(net, 2 * np.pi * f)
    return s_params(tp, net.z_in, net.z_out, f)


def _parabolic_vertex(x0, x1, x2, y0, y1, y2):
    d01, d12 = x1 - x0, x2 - x1
    s0, s1 = (y1 - y0) / d01, (y2 - y1) / d12
    curv = (s1 - s0) / (x2 - x0)
    if curv == 0:
        return x1, y1
    # Newton form p(x) = y0 + s0 (x - x0) + curv (x - x0)(x - x1)
    xv = (x0 + x1) / 2 - s0 / (2 * curv)
    if not (x0 <= xv <= x2):
        return x1, y1
    yv = y0 + s0 * (xv - x0) + curv * (xv - x0) * (xv - x1)
    return xv, yv


def find_extrema(x, values, kind: str = "peak", saturated=None) -> list[tuple[float, float]]:
    """Strict local extrema of ``|values|`` with parabolic sub-grid refinement.

    Saturated samples (pole clips) are reported as peaks at their own abscissa,
    one per contiguous run.
    """
    if kind not in ("peak", "dip"):
        raise ValueError("kind must be 'peak' or 'dip'")
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(values))
    if len(x) < 3:
        raise ValueError("need at least 3 samples")
    sat = np.zeros(len(x), bool) if saturated is None else np.asarray(saturated, bool)
    s = y if kind == "peak" else -y
    out = []
    for i in range(1, len(x) - 1):
        if sat[i - 1] or sat[i] or sat[i + 1]:
            continue
        if s[i] > s[i - 1] and s[i] > s[i + 1]:
            xv, yv = _parabolic_vertex(x[i - 1], x[i], x[i + 1], y[i - 1], y[i], y[i + 1])
            out.append((float(xv), float(yv)))
    if kind == "peak" and sat.any():
        idx = np.flatnonzero(sat)
        runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
        for run in runs:
            k = run[np.argmax(y[run])]
            out.append((float(x[k]), float(y[k])))
        out.sort()
    return out
