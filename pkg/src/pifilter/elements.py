"""ABCD two-port matrices and shunt admittances for lossless circuit elements.

Every function accepts ``omega`` either as a scalar or as a numpy array of
angular frequencies; the returned :class:`TwoPort` entries broadcast the same
way, so a whole frequency sweep is a single call.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

ArrayLike = Union[float, complex, np.ndarray]

#: Magnitude at which ``tan`` is clipped near a quarter-wave pole.
POLE_LIMIT = 1e12


@dataclass(frozen=True)
class TwoPort:
    """ABCD transfer matrix ``[[a, b], [c, d]]`` at one or many frequencies.

    ``b`` is in ohms, ``c`` in siemens. ``saturated`` marks samples where a
    pole of some constituent element was clipped (see :data:`POLE_LIMIT`).
    """

    a: ArrayLike
    b: ArrayLike
    c: ArrayLike
    d: ArrayLike
    saturated: ArrayLike = False

    def __matmul__(self, other: "TwoPort") -> "TwoPort":
        return TwoPort(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            np.logical_or(self.saturated, other.saturated),
        )

    def det(self) -> ArrayLike:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        """Stack into shape ``(..., 2, 2)``."""
        a, b, c, d = np.broadcast_arrays(
            *(np.asarray(x, dtype=complex) for x in (self.a, self.b, self.c, self.d))
        )
        return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)

    def reversed(self) -> "TwoPort":
        """The same reciprocal network driven from the other side."""
        return TwoPort(self.d, self.b, self.c, self.a, self.saturated)


def identity(shape=()) -> TwoPort:
    one = np.ones(shape, dtype=complex) if shape else 1.0 + 0j
    zero = np.zeros(shape, dtype=complex) if shape else 0j
    return TwoPort(one, zero, zero, one, np.zeros(shape, dtype=bool) if shape else False)


@dataclass(frozen=True)
class LineSpec:
    """Lossless TEM line: physical length (m), impedance (ohm), phase velocity (m/s)."""

    length: float
    char_impedance: float
    phase_velocity: float

    def __post_init__(self):
        for name in ("char_impedance", "phase_velocity"):
            val = getattr(self, name)
            if not np.isfinite(val) or val <= 0:
                raise ValueError(f"{name} must be finite and positive, got {val!r}")
        if not np.isfinite(self.length) or self.length < 0:
            raise ValueError(f"length must be finite and non-negative, got {self.length!r}")

    @property
    def beta(self) -> float:
        """Delay per unit angular frequency, ``length / phase_velocity`` (s)."""
        return self.length / self.phase_velocity

    def electrical_length(self, omega: ArrayLike) -> ArrayLike:
        return self.beta * np.asarray(omega, dtype=float)

    def quarter_wave_frequency(self) -> float:
        """Cyclic frequency (Hz) at which an open stub of this line shorts its tap."""
        return self.phase_velocity / (4.0 * self.length)


@dataclass(frozen=True)
class LumpedLC:
    """Series LC branch to ground."""

    inductance: float
    capacitance: float

    def __post_init__(self):
        if not (self.inductance > 0 and self.capacitance > 0):
            raise ValueError("inductance and capacitance must be positive")

    @property
    def omega0(self) -> float:
        return 1.0 / np.sqrt(self.inductance * self.capacitance)

    @property
    def resonance_hz(self) -> float:
        return self.omega0 / (2 * np.pi)

    @property
    def char_impedance(self) -> float:
        return float(np.sqrt(self.inductance / self.capacitance))


def _check_omega(omega: ArrayLike, strict: bool = False) -> np.ndarray:
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise ValueError("omega must be finite")
    if np.any(w < 0) or (strict and np.any(w == 0)):
        raise ValueError("omega must be %s" % ("positive" if strict else "non-negative"))
    return w


def saturated_tan(theta: ArrayLike) -> tuple[ArrayLike, ArrayLike]:
    """``tan(theta)`` clipped to +/-POLE_LIMIT, plus a mask of clipped samples."""
    t = np.tan(theta)
    flag = np.abs(t) > POLE_LIMIT
    t = np.where(flag, np.sign(t) * POLE_LIMIT, t)
    if np.ndim(t) == 0:
        return float(t), bool(flag)
    return t, flag


def abcd_tline(spec: LineSpec, omega: ArrayLike) -> TwoPort:
    w = _check_omega(omega)
    theta = spec.beta * w
    cos, sin = np.cos(theta), np.sin(theta)
    z = spec.char_impedance
    sat = np.zeros(np.shape(w), dtype=bool) if np.ndim(w) else False
    return TwoPort(cos + 0j, 1j * z * sin, 1j * sin / z, cos + 0j, sat)


def abcd_series(impedance: ArrayLike, saturated: ArrayLike = False) -> TwoPort:
    z = np.asarray(impedance, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("series impedance must be finite")
    one = np.ones_like(z)
    if z.ndim == 0:
        z, one = complex(z), 1.0 + 0j
    return TwoPort(one, z, 0 * one, one, saturated)


def abcd_shunt(admittance: ArrayLike, saturated: ArrayLike = False) -> TwoPort:
    y = np.asarray(admittance, dtype=complex)
    if not np.all(np.isfinite(y)):
        raise ValueError("shunt admittance must be finite")
    one = np.ones_like(y)
    if y.ndim == 0:
        y, one = complex(y), 1.0 + 0j
    return TwoPort(one, 0 * one, y, one, saturated)


def capacitor_impedance(capacitance: float, omega: ArrayLike) -> ArrayLike:
    w = _check_omega(omega, strict=True)
    return 1.0 / (1j * w * capacitance)


def open_stub_admittance_flagged(spec: LineSpec, omega: ArrayLike):
    """Tap admittance of an open-ended stub and its pole-saturation mask."""
    w = _check_omega(omega)
    t, flag = saturated_tan(spec.beta * w)
    return 1j * t / spec.char_impedance, flag


def open_stub_admittance(spec: LineSpec, omega: ArrayLike) -> ArrayLike:
    """``i tan(beta*omega) / Z``; clipped at the quarter-wave pole."""
    return open_stub_admittance_flagged(spec, omega)[0]


def lc_shunt_admittance_flagged(lc: LumpedLC, omega: ArrayLike):
    w = _check_omega(omega, strict=True)
    reactance = w * lc.inductance - 1.0 / (w * lc.capacitance)
    # clip |Y| at the same normalized limit as a stub: POLE_LIMIT / sqrt(L/C)
    floor = lc.char_impedance / POLE_LIMIT
    flag = np.abs(reactance) < floor
    reactance = np.where(flag, np.where(reactance < 0, -floor, floor), reactance)
    y = 1.0 / (1j * reactance)
    if np.ndim(y) == 0:
        return complex(y), bool(flag)
    return y, flag


def lc_shunt_admittance(lc: LumpedLC, omega: ArrayLike) -> ArrayLike:
    return lc_shunt_admittance_flagged(lc, omega)[0]


def pi_filter_abcd(lplus: LineSpec, lminus: LineSpec, inline: LineSpec, omega: ArrayLike) -> TwoPort:
    """Closed-form ABCD of the two-stub filter.

    The ``lplus`` stub sits on the input side (its tangent enters ``d``), the
    ``lminus`` stub on the output side (enters ``a``). All three lines must
    share impedance and phase velocity.
    """
    specs = (lplus, lminus, inline)
    if len({s.char_impedance for s in specs}) != 1 or len({s.phase_velocity for s in specs}) != 1:
        raise ValueError("pi_filter_abcd requires a shared char_impedance and phase_velocity")
    w = _check_omega(omega)
    z = inline.char_impedance
    tp, fp = saturated_tan(lplus.beta * w)
    tm, fm = saturated_tan(lminus.beta * w)
    cb, sb = np.cos(inline.beta * w), np.sin(inline.beta * w)
    a = cb - sb * tm
    b = 1j * z * sb
    c = (1j / z) * (sb * (1 - tp * tm) + cb * (tp + tm))
    d = cb - sb * tp
    return TwoPort(a + 0j, b, c, d + 0j, np.logical_or(fp, fm))
