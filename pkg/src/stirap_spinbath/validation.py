"""Self-check suite backing the ``validate`` CLI command.

``quick`` runs the analytic residual checks: pulse identities, dark-state
nullity, kernel annihilation, number-operator conservation, the closed-form
one-excitation spectrum against dense diagonalization, and the agreement of
the collective build with the symmetric sector of the brute-force tensor
build.  ``full`` adds small propagation cross-checks (tensor versus
collective at L = 4, and step-halving convergence).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import pulses, spectral
from .hamiltonian import build_hamiltonian, number_operator
from .model import (
    ModelKind,
    PulseParams,
    RunConfig,
    collective_basis,
    tensor_basis,
)
from .propagator import evolve


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _fig3_pulse() -> PulseParams:
    return PulseParams(omega0=100.0, tau=0.1, t_window=1.0)


def _cfg(n_spins, coupling, kind, **overrides) -> RunConfig:
    defaults = dict(
        pulse=_fig3_pulse(),
        n_spins=n_spins,
        coupling=coupling,
        delta_s=1.0,
        delta_e=1.0,
        model_kind=kind,
        snapshot_count=0,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


def check_pulse_envelope_identity() -> CheckResult:
    p = _fig3_pulse()
    worst = 0.0
    for t in np.linspace(-p.t_window, p.t_window, 1000):
        lhs = pulses.omega_s(t, p) ** 2 + pulses.omega_p(t, p) ** 2
        x = t / p.tau
        rhs = p.omega0**2 / 2.0 / math.cosh(x) ** 2
        worst = max(worst, abs(lhs - rhs) / rhs)
    return CheckResult("pulse_envelope_identity", worst <= 1e-12, f"max rel err {worst:.2e}")


def check_pulse_edges_and_ordering() -> CheckResult:
    p = _fig3_pulse()
    ts = np.linspace(-p.t_window, p.t_window, 4001)
    s_vals = np.array([pulses.omega_s(t, p) for t in ts])
    p_vals = np.array([pulses.omega_p(t, p) for t in ts])
    edges_small = max(s_vals[0], s_vals[-1], p_vals[0], p_vals[-1]) < 1e-4 * p.omega0
    counterintuitive = ts[int(np.argmax(s_vals))] < ts[int(np.argmax(p_vals))]
    ok = bool(edges_small and counterintuitive)
    return CheckResult(
        "pulse_edges_and_ordering",
        ok,
        f"edge max {max(s_vals[0], s_vals[-1], p_vals[0], p_vals[-1]):.2e}, "
        f"argmax(omega_s) {'<' if counterintuitive else '>='} argmax(omega_p)",
    )


def check_mixing_angle() -> CheckResult:
    p = _fig3_pulse()
    worst = 0.0
    for t in (-2 * p.tau, -p.tau / 2, p.tau):
        ratio = pulses.omega_p(t, p) / pulses.omega_s(t, p)
        worst = max(worst, abs(math.tan(pulses.mixing_angle(t, p)) - ratio) / abs(ratio))
    return CheckResult("mixing_angle_ratio", worst <= 1e-12, f"max rel err {worst:.2e}")


def check_lambda_eigenvalues() -> CheckResult:
    worst = 0.0
    for delta_s, ws, wp in ((0.0, 50.0, 50.0), (1.0, 30.0, 5.0), (-3.0, 0.5, 70.0)):
        closed = spectral.lambda_eigenvalues(delta_s, ws, wp)
        dense = np.sort(np.linalg.eigvalsh(spectral.system_matrix(delta_s, ws, wp)))
        scale = max(1.0, float(np.max(np.abs(dense))))
        worst = max(worst, float(np.max(np.abs(closed - dense))) / scale)
    return CheckResult("lambda_eigenvalues", worst <= 1e-12, f"max rel err {worst:.2e}")


def check_dark_state_nullity() -> CheckResult:
    p = _fig3_pulse()
    worst = 0.0
    for t in np.linspace(-p.t_window, p.t_window, 100):
        h_s = spectral.system_matrix(1.0, pulses.omega_s(t, p), pulses.omega_p(t, p))
        residual = float(np.linalg.norm(h_s @ spectral.dark_state(pulses.mixing_angle(t, p))))
        worst = max(worst, residual)
    return CheckResult("dark_state_nullity", worst <= 1e-12 * p.omega0, f"max residual {worst:.2e}")


def check_kernel_annihilation() -> CheckResult:
    worst = 0.0
    for cfg in (
        _cfg(10, 3.0, ModelKind.COLLECTIVE),
        _cfg(6, 3.0, ModelKind.TENSOR),
    ):
        basis, h = build_hamiltonian(cfg)
        nb = basis.bath_dimension
        for c1, c2 in ((1.0, 0.0), (0.6, 0.8j), (1 / math.sqrt(2), -1 / math.sqrt(2))):
            vec = np.zeros(basis.dimension, dtype=np.complex128)
            vec[0] = c1
            vec[nb] = c2
            worst = max(worst, float(np.linalg.norm(h.h0.apply(vec))))
    return CheckResult("kernel_annihilation", worst == 0.0, f"max ||h0 psi|| = {worst:.1e}")


def check_number_conservation() -> CheckResult:
    ok = True
    details = []
    for cfg in (_cfg(8, 2.0, ModelKind.COLLECTIVE), _cfg(5, 2.0, ModelKind.TENSOR)):
        basis, h = build_hamiltonian(cfg)
        n_op = number_operator(basis).matrix
        comm = (h.h0.matrix @ n_op - n_op @ h.h0.matrix).tocoo()
        static_ok = comm.nnz == 0 or float(np.max(np.abs(comm.data))) == 0.0
        pulse_comm = (h.a_p.matrix @ n_op - n_op @ h.a_p.matrix).tocoo()
        pulse_breaks = pulse_comm.nnz > 0 and float(np.max(np.abs(pulse_comm.data))) > 0.0
        ok = ok and static_ok and pulse_breaks
        details.append(f"{cfg.model_kind.value}: [h0,N]=0 {static_ok}, [a_p,N]!=0 {pulse_breaks}")
    return CheckResult("number_conservation", ok, "; ".join(details))


def check_one_excitation_dimension() -> CheckResult:
    ok = True
    details = []
    for L in (4, 6, 8):
        basis = tensor_basis(L)
        diag = number_operator(basis).matrix.diagonal().real
        count = int(np.sum(np.abs(diag - 1.0) < 1e-12))
        ok = ok and count == 2 * L + 1
        details.append(f"L={L}: {count}")
    return CheckResult("one_excitation_dimension", ok, ", ".join(details) + " (expect 2L+1)")


def _one_excitation_block(cfg: RunConfig):
    """Dense N = 1 block of the static bath + interaction operator (the
    delta_s |e><e| part of h0 is subtracted out) plus the embeddings of
    |e, all-down>, |phi_1>, |phi_2> in block coordinates."""
    basis, h = build_hamiltonian(cfg)
    diag = number_operator(basis).matrix.diagonal().real
    sector = np.where(np.abs(diag - 1.0) < 1e-12)[0]
    block = h.h0.toarray()[np.ix_(sector, sector)]

    eta = cfg.coupling_matrix()
    norms = np.sqrt((eta**2).sum(axis=0))
    nb = basis.bath_dimension
    flat_e = 2 * nb + 0
    e_pos = int(np.searchsorted(sector, flat_e))
    block[e_pos, e_pos] -= cfg.delta_s
    vectors = {"e": np.zeros(len(sector), dtype=np.complex128)}
    vectors["e"][e_pos] = 1.0
    for leg, name in ((0, "phi1"), (1, "phi2")):
        vec = np.zeros(len(sector), dtype=np.complex128)
        for k in range(cfg.n_spins):
            flat = leg * nb + (1 << k)
            vec[np.searchsorted(sector, flat)] = eta[k, leg] / norms[leg]
        vectors[name] = vec
    return block, vectors


def check_spectral_residuals() -> CheckResult:
    ok = True
    details = []
    cases = [
        (4, 1.0, 0.7),
        (6, 2.5, 0.0),
        (8, 0.8, -1.3),
    ]
    for L, eta, delta_e in cases:
        cfg = _cfg(L, eta, ModelKind.TENSOR, delta_e=delta_e)
        eta1, eta2 = spectral.leg_couplings(cfg)
        system = spectral.one_excitation_eigensystem(eta1, eta2, delta_e)

        restricted = spectral.restricted_one_excitation_hamiltonian(eta1, eta2, delta_e)
        worst = 0.0
        for vec, value in (
            (system.phi_vec_plus, system.e_plus),
            (system.phi_vec_minus, system.e_minus),
            (system.dark_d, delta_e),
        ):
            worst = max(worst, float(np.linalg.norm(restricted @ vec - value * vec)) / (abs(value) + 1.0))
        ortho = abs(float(np.dot(system.phi_vec_plus, system.phi_vec_minus)))
        norms = max(abs(np.linalg.norm(system.phi_vec_plus) - 1), abs(np.linalg.norm(system.phi_vec_minus) - 1))
        trace_sum = abs(system.e_plus + system.e_minus - delta_e)
        trace_prod = abs(system.e_plus * system.e_minus + (eta1**2 + eta2**2) / 4.0)
        scale = (eta1**2 + eta2**2) / 4.0

        block, vectors = _one_excitation_block(cfg)
        embed = {
            "+": vectors["e"] * system.phi_vec_plus[0]
            + vectors["phi1"] * system.phi_vec_plus[1]
            + vectors["phi2"] * system.phi_vec_plus[2],
            "-": vectors["e"] * system.phi_vec_minus[0]
            + vectors["phi1"] * system.phi_vec_minus[1]
            + vectors["phi2"] * system.phi_vec_minus[2],
        }
        block_res = max(
            float(np.linalg.norm(block @ embed["+"] - system.e_plus * embed["+"])),
            float(np.linalg.norm(block @ embed["-"] - system.e_minus * embed["-"])),
        )
        eigs = np.sort(np.linalg.eigvalsh(block))
        eig_err = max(abs(eigs[0] - system.e_minus), abs(eigs[-1] - system.e_plus))

        case_ok = (
            worst <= 1e-12
            and ortho <= 1e-12
            and norms <= 1e-12
            and trace_sum <= 1e-12 * max(1.0, abs(delta_e))
            and trace_prod <= 1e-12 * max(1.0, scale)
            and block_res <= 1e-10
            and eig_err <= 1e-10
        )
        ok = ok and case_ok
        details.append(f"L={L}: restricted {worst:.1e}, block {block_res:.1e}, eig {eig_err:.1e}")
    return CheckResult("one_excitation_spectrum", ok, "; ".join(details))


def _symmetric_sector_map(L: int) -> np.ndarray:
    """Isometry from the collective basis into the tensor basis: the Dicke
    state with k up-spins maps to the normalized symmetric bitmask sum."""
    cb = collective_basis(L)
    tb = tensor_basis(L)
    masks = np.arange(tb.bath_dimension, dtype=np.uint64)
    pops = np.bitwise_count(masks).astype(np.int64)
    s = np.zeros((tb.dimension, cb.dimension))
    for k in range(cb.bath_dimension):
        members = np.where(pops == k)[0]
        weight = 1.0 / math.sqrt(len(members))
        for level in range(3):
            s[level * tb.bath_dimension + members, level * cb.bath_dimension + k] = weight
    return s


def check_sector_equivalence_static() -> CheckResult:
    L, eta = 4, 1.7
    cfg_c = _cfg(L, eta, ModelKind.COLLECTIVE)
    cfg_t = _cfg(L, eta, ModelKind.TENSOR)
    _, h_c = build_hamiltonian(cfg_c)
    _, h_t = build_hamiltonian(cfg_t)
    s = _symmetric_sector_map(L)
    worst = 0.0
    for part_t, part_c in ((h_t.h0, h_c.h0), (h_t.a_p, h_c.a_p), (h_t.a_s, h_c.a_s)):
        diff = part_t.toarray() @ s - s @ part_c.toarray()
        worst = max(worst, float(np.max(np.abs(diff))))
    return CheckResult("sector_intertwiner", worst <= 1e-12, f"max |H_t S - S H_c| = {worst:.1e}")


def check_propagation_equivalence() -> CheckResult:
    worst = 0.0
    for eta in (0.1, 3.0, 100.0):
        cfg_c = _cfg(4, eta, ModelKind.COLLECTIVE, snapshot_count=5)
        cfg_t = _cfg(4, eta, ModelKind.TENSOR, snapshot_count=5)
        res_c = evolve(cfg_c)
        res_t = evolve(cfg_t)
        fields = ("p_g1", "p_g2", "p_e", "purity", "jz_mean", "jz_var")
        worst = max(worst, max(abs(getattr(res_c, f) - getattr(res_t, f)) for f in fields))
        for snap_c, snap_t in zip(res_c.snapshots, res_t.snapshots):
            worst = max(worst, max(abs(getattr(snap_c, f) - getattr(snap_t, f)) for f in fields))
    return CheckResult("propagation_equivalence_L4", worst <= 1e-8, f"max |tensor - collective| = {worst:.2e}")


def check_step_halving() -> CheckResult:
    cfg = _cfg(10, 1.0, ModelKind.COLLECTIVE, steps=100_000)
    p_coarse = evolve(cfg).p_g2
    p_fine = evolve(replace(cfg, steps=200_000)).p_g2
    diff = abs(p_coarse - p_fine)
    return CheckResult("step_halving_convergence", diff < 1e-6, f"|P(dt) - P(dt/2)| = {diff:.2e}")


QUICK_CHECKS = (
    check_pulse_envelope_identity,
    check_pulse_edges_and_ordering,
    check_mixing_angle,
    check_lambda_eigenvalues,
    check_dark_state_nullity,
    check_kernel_annihilation,
    check_number_conservation,
    check_one_excitation_dimension,
    check_spectral_residuals,
    check_sector_equivalence_static,
)

FULL_CHECKS = QUICK_CHECKS + (
    check_propagation_equivalence,
    check_step_halving,
)


def run_validation(level: str = "quick") -> list[CheckResult]:
    if level not in ("quick", "full"):
        raise ValueError(f"validation level must be 'quick' or 'full', got {level!r}")
    checks = QUICK_CHECKS if level == "quick" else FULL_CHECKS
    return [check() for check in checks]
