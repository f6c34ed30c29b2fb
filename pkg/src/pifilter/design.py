"""Filter synthesis, lumped equivalents and single-parameter robustness sweeps."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import contourpy
import numpy as np

from .elements import LineSpec, LumpedLC
from .intervals import intervals_where, total_width
from .netlist import Line, Netlist, OpenStub, ShuntLC, format_element
from .purcell import purcell_curve


@dataclass(frozen=True)
class FilterDesign:
    """Two-stub filter. ``lplus`` (shorter, input side) resonates at ``f_hi``,
    ``lminus`` (longer, output side) at ``f_lo``."""

    lplus: float
    lminus: float
    inline: float
    z_tl: float
    v: float
    f_lo: float
    f_hi: float
    lumped: Optional[tuple[LumpedLC, LumpedLC]] = None

    @property
    def delta(self) -> float:
        return self.lminus - self.lplus

    def resonances(self) -> tuple[float, float]:
        """Quarter-wave frequencies (Hz) of the (minus, plus) stubs."""
        return self.v / (4 * self.lminus), self.v / (4 * self.lplus)

    def line_specs(self) -> tuple[LineSpec, LineSpec, LineSpec]:
        """(plus, minus, inline) in the order taken by the closed-form ABCD."""
        return tuple(LineSpec(x, self.z_tl, self.v) for x in (self.lplus, self.lminus, self.inline))

    def elements(self, lumped: bool = False, prefix: str = "filter") -> tuple:
        if lumped:
            lp, lm = self.lumped or (lumped_equivalent(self.lplus, self.z_tl, self.v),
                                     lumped_equivalent(self.lminus, self.z_tl, self.v))
            first = ShuntLC(lp.inductance, lp.capacitance, f"{prefix}.plus")
            last = ShuntLC(lm.inductance, lm.capacitance, f"{prefix}.minus")
        else:
            first = OpenStub(self.z_tl, self.lplus, f"{prefix}.plus")
            last = OpenStub(self.z_tl, self.lminus, f"{prefix}.minus")
        return first, Line(self.z_tl, self.inline, f"{prefix}.inline"), last


def synthesize(f_lo: float, f_hi: float, v: float, z_tl: float) -> FilterDesign:
    """Stub lengths from the quarter-wave condition; the in-line section is
    their mean so the two standing-wave patterns add constructively."""
    if not 0 < f_lo <= f_hi:
        raise ValueError("need 0 < f_lo <= f_hi")
    if not (v > 0 and z_tl > 0):
        raise ValueError("v and z_tl must be positive")
    lplus = v / (4 * f_hi)
    lminus = v / (4 * f_lo)
    return FilterDesign(lplus, lminus, 0.5 * (lplus + lminus), z_tl, v, f_lo, f_hi)


def lumped_equivalent(stub_length: float, z_tl: float, v: float) -> LumpedLC:
    """Series LC with the stub's quarter-wave resonance and reactance slope."""
    if not (stub_length > 0 and z_tl > 0 and v > 0):
        raise ValueError("inputs must be positive")
    w0 = 2 * np.pi * v / (4 * stub_length)
    ind = z_tl * stub_length / (2 * v)
    return LumpedLC(ind, 1.0 / (w0**2 * ind))


def multi_stub(bands: Sequence[tuple[float, float]], v: float, z_tl: float, prefix: str = "filter") -> tuple:
    """Stub chain covering several disjoint bands.

    Every distinct band edge gets one stub (a shared edge of touching bands
    gets a single stub). Stubs run from shortest to longest, and each in-line
    section is the mean of its two neighbours.
    """
    if not bands:
        return ()
    bands = [(float(lo), float(hi)) for lo, hi in bands]
    for lo, hi in bands:
        if not 0 < lo <= hi:
            raise ValueError(f"invalid band ({lo}, {hi})")
    for (lo1, hi1), (lo2, hi2) in zip(bands, bands[1:]):
        if lo2 < hi1:
            raise ValueError("bands must be disjoint and ascending")
    edges = sorted({e for band in bands for e in band}, reverse=True)
    lengths = [v / (4 * f) for f in edges]
    if len(lengths) == 1:
        lengths = lengths * 2
    out = []
    for k, length in enumerate(lengths):
        if k:
            mean = 0.5 * (lengths[k - 1] + length)
            out.append(Line(z_tl, mean, f"{prefix}.line{k}"))
        out.append(OpenStub(z_tl, length, f"{prefix}.stub{k + 1}"))
    return tuple(out)


def fragment_text(elements) -> str:
    return "".join(format_element(el) + "\n" for el in elements)


# --------------------------------------------------------------------------
# sweeps

Setter = Callable[[Netlist, float], Netlist]


def path_setter(path: str) -> Setter:
    def apply(net: Netlist, value: float) -> Netlist:
        return net.with_value(path, value)
    apply.label = path
    return apply


def stub_difference_setter(net: Netlist, plus: str = "filter.plus", minus: str = "filter.minus") -> Setter:
    """Sweep ``minus - plus`` around the current mean stub length."""
    mean = 0.5 * (net.get_value(plus) + net.get_value(minus))

    def apply(n: Netlist, delta: float) -> Netlist:
        if not 0 <= delta < 2 * mean:
            raise ValueError(f"stub difference {delta} out of range")
        return n.with_value(plus, mean - delta / 2).with_value(minus, mean + delta / 2)
    apply.label = f"delta({plus},{minus})"
    return apply


@dataclass(frozen=True)
class SweepMap:
    param: str
    values: np.ndarray
    frequency: np.ndarray
    t_p: np.ndarray  # shape (len(values), len(frequency))
    threshold: float
    contours: list  # (N, 2) arrays of (param value, frequency)

    def row(self, k: int) -> np.ndarray:
        return self.t_p[k]


def threshold_contours(values, freqs, t_p, threshold: float) -> list[np.ndarray]:
    """Iso-lines of ``log10(t_p)`` at the threshold, as (param, freq) vertices."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return []
    z = np.log10(np.asarray(t_p, dtype=float))
    gen = contourpy.contour_generator(np.asarray(freqs, dtype=float), values, z)
    return [seg[:, ::-1].copy() for seg in gen.lines(np.log10(threshold))]


def sweep_2d(net: Netlist, param: Union[str, Setter], values, freqs, qubit_node: str,
             c_sigma: Optional[float] = None, threshold: float = 1e-3) -> SweepMap:
    """T_P over (parameter value x frequency). ``param`` is a dotted netlist
    path or a setter ``(netlist, value) -> netlist``. With ``c_sigma`` unset it
    is taken from each modified netlist."""
    setter = path_setter(param) if isinstance(param, str) else param
    vals = np.asarray(values, dtype=float)
    f = np.asarray(freqs, dtype=float)
    if vals.ndim != 1 or len(vals) == 0:
        raise ValueError("values must be a nonempty 1-D sequence")
    rows = []
    for val in vals:
        rows.append(purcell_curve(setter(net, val), qubit_node, c_sigma, f).t_p)
    tp = np.vstack(rows)
    label = getattr(setter, "label", str(param))
    return SweepMap(label, vals, f, tp, threshold, threshold_contours(vals, f, tp, threshold))


def bandwidth_metric(freqs, t_p, threshold: float, center: Optional[float] = None) -> float:
    """Width (Hz) of the region with ``t_p >= threshold``.

    Without ``center`` this is the total measure over the grid; with it, the
    width of the single interval containing ``center`` (0 if unprotected).
    """
    ivs = intervals_where(freqs, t_p, threshold)
    if center is None:
        return total_width(ivs)
    for lo, hi in ivs:
        if lo <= center <= hi:
            return hi - lo
    return 0.0


def replace_filter(net: Netlist, design: FilterDesign, lumped: bool = False, prefix: str = "filter") -> Netlist:
    """Swap the ``prefix.plus / prefix.inline / prefix.minus`` elements for ``design``."""
    new = {el.name: el for el in design.elements(lumped, prefix)}
    chain = tuple(new.get(getattr(item, "name", None), item) for item in net.chain)
    missing = set(new) - {getattr(item, "name", None) for item in net.chain}
    if missing:
        raise KeyError(f"netlist has no elements {sorted(missing)}")
    return dataclasses.replace(net, chain=chain)
