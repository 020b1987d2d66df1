"""Closed-form spectral results used as residual-checked oracles.

Everything here is dependency-free arithmetic so the numerically assembled
Hamiltonians can be checked against it rather than the other way round.

One-excitation sector.  With leg couplings eta_m = sqrt(sum_k eta[k,m]^2)
and the normalized single-flip bath states |phi_m>, the static bath +
interaction operator restricted to the N = 1 sector, written in the ordered
basis (|e, all-down>, |phi_1>, |phi_2>), is

    [[0,       eta_1/2, eta_2/2],
     [eta_1/2, delta_e, 0      ],
     [eta_2/2, 0,       delta_e]].

Only the bright combination |B> = sin(chi)|phi_1> + cos(chi)|phi_2| with
chi = arctan(eta_1/eta_2) couples to |e, all-down>, with strength
g = sqrt(eta_1^2 + eta_2^2)/2, giving the eigenpairs

    E_pm   = (delta_e +- sqrt(eta_1^2 + eta_2^2 + delta_e^2)) / 2,
    Phi_pm = cos(phi_pm)|e, all-down> + sin(phi_pm)|B>,
    tan(phi_pm) = gamma +- sqrt(1 + gamma^2),
    gamma = delta_e / sqrt(eta_1^2 + eta_2^2).

The per-branch angles satisfy tan(phi_+)*tan(phi_-) = -1, i.e.
phi_+ = phi_- + pi/2, which makes Phi_+ and Phi_- orthonormal.  The
orthogonal dark combination |D> = cos(chi)|phi_1> - sin(chi)|phi_2> stays an
eigenstate with eigenvalue delta_e.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .model import RunConfig


def dark_state(theta: float) -> np.ndarray:
    """(cos(theta), -sin(theta), 0) in (g1, g2, e) ordering; unit norm."""
    if not 0.0 <= theta <= math.pi / 2:
        raise ValueError(f"mixing angle must lie in [0, pi/2], got {theta!r}")
    return np.array([math.cos(theta), -math.sin(theta), 0.0])


def lambda_eigenvalues(delta_s: float, omega_s: float, omega_p: float) -> np.ndarray:
    """Sorted instantaneous eigenvalues {lambda_-, 0, lambda_+} of the bare
    three-level Hamiltonian: 0 and (delta_s +- sqrt(delta_s^2 + 4(omega_s^2 + omega_p^2)))/2."""
    root = math.sqrt(delta_s**2 + 4.0 * (omega_s**2 + omega_p**2))
    return np.sort([0.0, 0.5 * (delta_s - root), 0.5 * (delta_s + root)])


def system_matrix(delta_s: float, omega_s: float, omega_p: float) -> np.ndarray:
    """The bare 3x3 rotating-frame system Hamiltonian in (g1, g2, e) ordering."""
    return np.array(
        [
            [0.0, 0.0, omega_p],
            [0.0, 0.0, omega_s],
            [omega_p, omega_s, delta_s],
        ]
    )


def leg_couplings(cfg: RunConfig) -> tuple[float, float]:
    """Effective leg couplings (eta_1, eta_2) felt by the one-excitation sector.

    For the canonical prefactor 1/2 these are the plain column norms of the
    coupling matrix (eta*sqrt(L) per leg in the homogeneous case); any other
    prefactor c rescales them by 2c so that the closed-form spectrum keeps
    matching the assembled Hamiltonian.
    """
    matrix = cfg.coupling_matrix()
    scale = 2.0 * cfg.coupling_prefactor
    eta1, eta2 = np.sqrt((matrix**2).sum(axis=0))
    return scale * float(eta1), scale * float(eta2)


@dataclass(frozen=True, eq=False)
class OneExcitationSystem:
    """Closed-form eigensystem of the one-excitation sector.

    Vectors are expressed in the ordered basis (|e, all-down>, |phi_1>, |phi_2>).
    """

    eta1: float
    eta2: float
    delta_e: float
    gamma: float
    chi: float
    phi_plus: float
    phi_minus: float
    e_plus: float
    e_minus: float
    phi_vec_plus: np.ndarray
    phi_vec_minus: np.ndarray
    dark_d: np.ndarray


def restricted_one_excitation_hamiltonian(eta1: float, eta2: float, delta_e: float) -> np.ndarray:
    """The 3x3 restriction of the static bath + interaction operator (see module docstring)."""
    return np.array(
        [
            [0.0, eta1 / 2.0, eta2 / 2.0],
            [eta1 / 2.0, delta_e, 0.0],
            [eta2 / 2.0, 0.0, delta_e],
        ]
    )


def one_excitation_eigensystem(eta1: float, eta2: float, delta_e: float) -> OneExcitationSystem:
    """Eigenvalues E_pm, branch angles and eigenvectors Phi_pm, |D>."""
    coupling_sq = eta1**2 + eta2**2
    if coupling_sq <= 0.0:
        raise ConfigError("one-excitation eigensystem is degenerate at zero coupling")
    total = math.sqrt(coupling_sq)
    gamma = delta_e / total
    chi = math.atan2(eta1, eta2)
    hyp = math.hypot(1.0, gamma)
    phi_plus = math.atan(gamma + hyp)
    phi_minus = math.atan(gamma - hyp)
    e_plus = 0.5 * (delta_e + math.sqrt(coupling_sq + delta_e**2))
    e_minus = 0.5 * (delta_e - math.sqrt(coupling_sq + delta_e**2))

    sin_chi, cos_chi = math.sin(chi), math.cos(chi)

    def branch_vector(phi: float) -> np.ndarray:
        return np.array([math.cos(phi), math.sin(phi) * sin_chi, math.sin(phi) * cos_chi])

    return OneExcitationSystem(
        eta1=eta1,
        eta2=eta2,
        delta_e=delta_e,
        gamma=gamma,
        chi=chi,
        phi_plus=phi_plus,
        phi_minus=phi_minus,
        e_plus=e_plus,
        e_minus=e_minus,
        phi_vec_plus=branch_vector(phi_plus),
        phi_vec_minus=branch_vector(phi_minus),
        dark_d=np.array([0.0, cos_chi, -sin_chi]),
    )


@dataclass(frozen=True)
class FirstOrderCoefficients:
    """Magnitudes of the first-order admixture of Phi_pm into the dressed
    ground states G_m = g_m (x) all-down + sum_a c_a^(m) Phi_a.

    Only magnitudes are reported: |c_a^(m)| = |cos(phi_a) * Omega_m / E_a|
    with Omega_1 = omega_p and Omega_2 = omega_s.  The overall sign of the
    correction is a convention choice that drops out of every observable
    used here.
    """

    c_plus_g1: float
    c_minus_g1: float
    c_plus_g2: float
    c_minus_g2: float

    @property
    def leakage(self) -> float:
        """Largest admixture magnitude, O(omega0 / sqrt(eta1^2 + eta2^2))."""
        return max(self.c_plus_g1, self.c_minus_g1, self.c_plus_g2, self.c_minus_g2)


def perturbed_ground_states(
    sys: OneExcitationSystem, omega_p: float, omega_s: float
) -> FirstOrderCoefficients:
    """First-order coefficients of the dressed ground states at frozen pulse
    amplitudes (omega_p, omega_s)."""
    if sys.e_plus == 0.0 or sys.e_minus == 0.0:
        raise ZeroDivisionError("one-excitation eigenvalue vanishes; first order is singular")
    cos_p = abs(math.cos(sys.phi_plus))
    cos_m = abs(math.cos(sys.phi_minus))
    return FirstOrderCoefficients(
        c_plus_g1=cos_p * abs(omega_p) / abs(sys.e_plus),
        c_minus_g1=cos_m * abs(omega_p) / abs(sys.e_minus),
        c_plus_g2=cos_p * abs(omega_s) / abs(sys.e_plus),
        c_minus_g2=cos_m * abs(omega_s) / abs(sys.e_minus),
    )


def zeno_ratio(cfg: RunConfig, at_peak: bool = False) -> float:
    """Freezing criterion sqrt(eta1^2 + eta2^2) / max(|delta_e|, drive scale).

    For homogeneous coupling with the canonical prefactor the numerator is
    eta*sqrt(2L).  Values >> 1 predict suppressed transfer (the bath acts as
    a continuous measurement of |e>), values << 1 unperturbed passage.  With
    ``at_peak`` the drive scale is the actual peak Rabi amplitude
    omega0/sqrt(2) instead of the raw scale omega0.
    """
    if not cfg.is_homogeneous:
        raise ConfigError("zeno_ratio is defined for homogeneous coupling")
    eta1, eta2 = leg_couplings(cfg)
    numerator = math.hypot(eta1, eta2)
    drive = cfg.pulse.omega0 / math.sqrt(2.0) if at_peak else cfg.pulse.omega0
    return numerator / max(abs(cfg.delta_e), drive)
