"""Minimal waveguide model of Purcell suppression by side-coupled stubs.

A qubit at ``x = 0`` emits into a semi-infinite waveguide; stubs attached at
``x = d1`` and ``x = d2`` reflect part of the right-moving photon back. The
emitted field interferes with the reflected one, and the decay rate scales
with ``|1 + L1|**2`` where ``L1`` is the total reflection seen from the qubit.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .intervals import intervals_where

#: |1 - r1 r2 exp(2ik(d2-d1))| below this is reported as a bound-state pole.
POLE_DENOMINATOR = 1e-14


@dataclass(frozen=True)
class StubScattering:
    r: np.ndarray
    t: np.ndarray
    model: str  # "tan" | "lorentzian"


def stub_rt_tan(length: float, v: float, omega) -> StubScattering:
    """Exact amplitudes of an open stub attached directly to a matched line."""
    if not (length > 0 and v > 0):
        raise ValueError("length and v must be positive")
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ValueError("omega must be non-negative")
    # 2 + i tan never vanishes for real omega; write it as (2 cos + i sin)/cos so
    # the quarter-wave point lands on r = -1 without overflow
    theta = length / v * w
    c, s = np.cos(theta), np.sin(theta)
    den = 2 * c + 1j * s
    return StubScattering(-1j * s / den, 2 * c / den, "tan")


def stub_rt_lorentzian(omega_j: float, kappa_j: float, omega) -> StubScattering:
    """Single-mode approximation with radiative linewidth ``kappa_j``."""
    if not kappa_j > 0:
        raise ValueError("kappa_j must be positive")
    delta = np.asarray(omega, dtype=float) - omega_j
    den = delta + 0.5j * kappa_j
    return StubScattering(-0.5j * kappa_j / den, delta / den, "lorentzian")


def kappa_from_coupling(j_coupling: float, v: float) -> float:
    if not (j_coupling >= 0 and v > 0):
        raise ValueError("coupling must be non-negative and v positive")
    return 2 * j_coupling**2 / v


def kappa_from_length(length: float, v: float) -> float:
    """Linewidth of a directly connected stub."""
    if not (length > 0 and v > 0):
        raise ValueError("length and v must be positive")
    return v / length


@dataclass(frozen=True)
class TanStub:
    """Directly connected stub inside the two-stub model.

    :func:`stub_rt_tan` is written for the circuit convention ``exp(+i w t)``;
    the path sum uses ``exp(-i w t)`` (right movers ``exp(+ikx)``), so the
    amplitudes are conjugated here. Near resonance they then coincide with
    the Lorentzian form.
    """

    length: float

    def scatter(self, v, omega) -> StubScattering:
        s = stub_rt_tan(self.length, v, omega)
        return StubScattering(np.conj(s.r), np.conj(s.t), "tan")

    def resonance(self, v) -> float:
        """Quarter-wave angular frequency."""
        return np.pi * v / (2 * self.length)


@dataclass(frozen=True)
class LorentzianStub:
    omega_j: float
    kappa_j: float

    def scatter(self, v, omega) -> StubScattering:
        return stub_rt_lorentzian(self.omega_j, self.kappa_j, omega)

    def resonance(self, v) -> float:
        return self.omega_j


Stub = Union[TanStub, LorentzianStub]


@dataclass(frozen=True)
class InterferenceConfig:
    """Qubit at the origin, up to two stubs at ascending positions."""

    g: float
    v: float
    stubs: Sequence[Stub] = ()
    positions: Sequence[float] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "stubs", tuple(self.stubs))
        object.__setattr__(self, "positions", tuple(float(d) for d in self.positions))
        if not self.v > 0:
            raise ValueError("v must be positive")
        if len(self.stubs) != len(self.positions):
            raise ValueError("need one position per stub")
        if len(self.stubs) > 2:
            raise ValueError("the closed form covers at most two stubs")
        if any(d < 0 for d in self.positions):
            raise ValueError("positions must be non-negative")
        if len(self.positions) == 2 and not self.positions[1] > self.positions[0]:
            raise ValueError("d2 must exceed d1")

    @property
    def gamma0(self) -> float:
        """Decay rate into the bare waveguide, ``|g|^2 / v``."""
        return abs(self.g) ** 2 / self.v


def total_reflection(cfg: InterferenceConfig, omega_q):
    """``L1`` seen from the qubit at ``omega_q``; returns (value, pole flag)."""
    w = np.asarray(omega_q, dtype=float)
    k = w / cfg.v
    zero = np.zeros_like(w, dtype=complex)
    if not cfg.stubs:
        l1, pole = zero, np.zeros_like(w, dtype=bool)
    elif len(cfg.stubs) == 1:
        r1 = cfg.stubs[0].scatter(cfg.v, w).r
        l1 = r1 * np.exp(2j * k * cfg.positions[0])
        pole = np.zeros_like(w, dtype=bool)
    else:
        s1 = cfg.stubs[0].scatter(cfg.v, w)
        r2 = cfg.stubs[1].scatter(cfg.v, w).r
        d1, d2 = cfg.positions
        den = 1 - s1.r * r2 * np.exp(2j * k * (d2 - d1))
        pole = np.abs(den) < POLE_DENOMINATOR
        l1 = s1.r * np.exp(2j * k * d1) + s1.t**2 * r2 * np.exp(2j * k * d2) / den
    if w.ndim == 0:
        return complex(l1), bool(pole)
    return l1, pole


def gamma_ratio(cfg: InterferenceConfig, omega_q):
    """``Gamma_P / Gamma_0 = |1 + L1|^2``; returns (ratio, pole flag)."""
    l1, pole = total_reflection(cfg, omega_q)
    ratio = np.abs(1 + l1) ** 2
    return (float(ratio), pole) if np.ndim(ratio) == 0 else (ratio, pole)


def gamma_p(cfg: InterferenceConfig, omega_q):
    """Purcell rate (same units as ``|g|^2 / v``); returns (rate, pole flag)."""
    ratio, pole = gamma_ratio(cfg, omega_q)
    return cfg.gamma0 * ratio, pole


def suppression_window(cfg: InterferenceConfig, freqs, factor: float) -> list[tuple[float, float]]:
    """Frequency intervals (Hz) where the rate is at most ``factor * Gamma_0``."""
    if not 0 < factor < 1:
        raise ValueError("factor must lie in (0, 1)")
    f = np.asarray(freqs, dtype=float)
    ratio, _ = gamma_ratio(cfg, 2 * np.pi * f)
    return intervals_where(f, ratio, factor, above=False)
