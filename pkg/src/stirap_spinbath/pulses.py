"""Pulse envelopes, mixing angle and adiabaticity diagnostics.

The Stokes/pump pair is the sech/tanh family

    omega_s(t) = omega0/sqrt(2) * sech(t/tau) * cos[pi/4 * (tanh(t/tau) + 1)]
    omega_p(t) = omega0/sqrt(2) * sech(t/tau) * sin[pi/4 * (tanh(t/tau) + 1)]

applied in the counterintuitive order (Stokes peaks first), so the mixing
angle theta = arctan(omega_p/omega_s) sweeps 0 -> pi/2 and the dark state
rotates from g1 to g2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .model import PulseParams

# |t/tau| beyond which cosh overflows float64; the envelopes are exactly 0 there.
SECH_CLAMP = 700.0

_SQRT2 = math.sqrt(2.0)
_QUARTER_PI = math.pi / 4.0


def _omega_s_scalar(t: float, omega0: float, tau: float) -> float:
    x = t / tau
    if abs(x) > SECH_CLAMP:
        return 0.0
    return omega0 / _SQRT2 / math.cosh(x) * math.cos(_QUARTER_PI * (math.tanh(x) + 1.0))


def _omega_p_scalar(t: float, omega0: float, tau: float) -> float:
    x = t / tau
    if abs(x) > SECH_CLAMP:
        return 0.0
    return omega0 / _SQRT2 / math.cosh(x) * math.sin(_QUARTER_PI * (math.tanh(x) + 1.0))


def omega_s(t: float, p: PulseParams) -> float:
    """Stokes amplitude (couples g2 <-> e); nonnegative, peaks before t = 0."""
    return _omega_s_scalar(t, p.omega0, p.tau)


def omega_p(t: float, p: PulseParams) -> float:
    """Pump amplitude (couples g1 <-> e); mirror image of the Stokes pulse."""
    return _omega_p_scalar(t, p.omega0, p.tau)


def mixing_angle(t: float, p: PulseParams) -> float:
    """theta(t) = pi/4 * (tanh(t/tau) + 1), the closed form of arctan(omega_p/omega_s).

    Computed from tanh directly so it stays total where both envelopes
    underflow to zero.
    """
    return _QUARTER_PI * (math.tanh(t / p.tau) + 1.0)


def adiabaticity_parameter(p: PulseParams) -> float:
    """1/(omega0*tau); adiabatic following requires this to be << 1."""
    return 1.0 / (p.omega0 * p.tau)


@dataclass(frozen=True)
class PulseSample:
    t: float
    omega_s: float
    omega_p: float
    theta: float


def sample(t: float, p: PulseParams) -> PulseSample:
    """Both envelopes plus the mixing angle at one instant."""
    return PulseSample(t, omega_s(t, p), omega_p(t, p), mixing_angle(t, p))
