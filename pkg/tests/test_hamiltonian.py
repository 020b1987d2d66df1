import math

import numpy as np
import pytest

from stirap_spinbath import pulses
from stirap_spinbath.errors import ConfigError
from stirap_spinbath.hamiltonian import (
    SparseHermitian,
    apply,
    build_hamiltonian,
    build_pulse_couplers,
    build_static_collective,
    build_tensor_full,
    number_operator,
)
from stirap_spinbath.model import (
    ModelKind,
    SystemLevel,
    collective_basis,
    initial_state,
    tensor_basis,
)
from stirap_spinbath import spectral
from stirap_spinbath.validation import _symmetric_sector_map
from conftest import fig3_config

G1, G2, E = SystemLevel.G1, SystemLevel.G2, SystemLevel.E


def _collective(L=10, eta=2.0, **over):
    cfg = fig3_config(n_spins=L, eta=eta, **over)
    basis = collective_basis(L)
    return cfg, basis, build_static_collective(cfg, basis)


def _tensor(L=4, eta=2.0, **over):
    cfg = fig3_config(n_spins=L, eta=eta, model_kind=ModelKind.TENSOR, **over)
    basis = tensor_basis(L)
    return cfg, basis, build_tensor_full(cfg, basis)


def test_collective_band_edge_element():
    # <g1, m=-j+1| H |e, m=-j> = c*eta*sqrt(L)
    cfg, basis, h0 = _collective(L=10, eta=2.0)
    dense = h0.toarray()
    row = basis.index_of(G1, -4.0)
    col = basis.index_of(E, -5.0)
    expected = cfg.coupling_prefactor * 2.0 * math.sqrt(10)
    assert dense[row, col] == pytest.approx(expected, rel=1e-15)
    assert dense[col, row] == pytest.approx(expected, rel=1e-15)


def test_collective_diagonals():
    cfg, basis, h0 = _collective(L=10, eta=2.0)
    dense = h0.toarray()
    assert dense[basis.index_of(G1, -5.0), basis.index_of(G1, -5.0)] == 0.0
    assert dense[basis.index_of(E, -5.0), basis.index_of(E, -5.0)] == cfg.delta_s
    # delta_e * (m + L/2) elsewhere on the diagonal
    assert dense[basis.index_of(G2, -3.0), basis.index_of(G2, -3.0)] == pytest.approx(2.0 * cfg.delta_e)


def test_collective_ladder_coefficients_full_band():
    L, eta = 6, 1.3
    cfg, basis, h0 = _collective(L=L, eta=eta)
    dense = h0.toarray()
    j = L / 2
    for k in range(1, L + 1):
        m = k - j
        expected = cfg.coupling_prefactor * eta * math.sqrt(j * (j + 1) - m * (m - 1))
        for lev in (G1, G2):
            assert dense[basis.index_of(E, m - 1), basis.index_of(lev, m)] == pytest.approx(
                expected, rel=1e-15
            )


def test_zero_coupling_is_block_diagonal_over_m():
    cfg, basis, h0 = _collective(L=5, eta=0.0)
    dense = h0.toarray()
    nb = basis.bath_dimension
    for i in range(basis.dimension):
        for k in range(basis.dimension):
            if dense[i, k] != 0.0:
                assert i % nb == k % nb  # same bath index
    # each m-block is the bare static system part shifted by delta_e * k
    for k in range(nb):
        block = dense[k::nb, k::nb]
        expected = np.diag([0.0, 0.0, cfg.delta_s]) + cfg.delta_e * k * np.eye(3)
        assert np.max(np.abs(block - expected)) == 0.0


def test_pulse_coupler_structure():
    basis = collective_basis(10)
    a_p, a_s = build_pulse_couplers(basis)
    assert a_p.nnz == 22 and a_s.nnz == 22
    assert np.all(a_p.matrix.data == 1.0)
    dense = a_p.toarray()
    # pump never touches g2
    g2_block = dense[11:22, :]
    assert not g2_block.any()
    # involution on the coupled pair: a_p^2 acts as identity on span{g1, e} x bath
    sq = dense @ dense
    for b in range(11):
        for idx in (basis.index_of(G1, b - 5.0), basis.index_of(E, b - 5.0)):
            assert sq[idx, idx] == 1.0
    assert np.count_nonzero(sq) == 22


def test_tensor_single_spin_flip_element():
    cfg, basis, h0 = _tensor(L=1, eta=3.0)
    dense = h0.toarray()
    row = basis.index_of(G1, 0b1)
    col = basis.index_of(E, 0b0)
    assert dense[row, col] == pytest.approx(cfg.coupling_prefactor * 3.0, rel=1e-15)


def test_tensor_inhomogeneous_entries(rng):
    L = 3
    eta = rng.normal(size=(L, 2))
    cfg = fig3_config(n_spins=L, eta=eta, model_kind=ModelKind.TENSOR)
    basis = tensor_basis(L)
    h0 = build_tensor_full(cfg, basis)
    dense = h0.toarray()
    for k in range(L):
        for leg, lev in ((0, G1), (1, G2)):
            row = basis.index_of(lev, 1 << k)
            col = basis.index_of(E, 0)
            assert dense[row, col] == pytest.approx(0.5 * eta[k, leg], rel=1e-14)


def test_build_kind_mismatch_errors():
    cfg_c = fig3_config(n_spins=4)
    cfg_t = fig3_config(n_spins=4, model_kind=ModelKind.TENSOR)
    with pytest.raises(ConfigError):
        build_static_collective(cfg_t, tensor_basis(4))
    with pytest.raises(ConfigError):
        build_tensor_full(cfg_c, collective_basis(4))
    with pytest.raises(ConfigError):
        build_static_collective(cfg_c, tensor_basis(4))


def test_hermiticity_is_structural(rng):
    for build in (_collective, _tensor):
        *_, h0 = build()
        defect = (h0.matrix - h0.matrix.getH()).tocoo()
        assert defect.nnz == 0 or np.max(np.abs(defect.data)) == 0.0
    eta = rng.normal(size=(5, 2))
    cfg = fig3_config(n_spins=5, eta=eta, model_kind=ModelKind.TENSOR)
    h0 = build_tensor_full(cfg, tensor_basis(5))
    defect = (h0.matrix - h0.matrix.getH()).tocoo()
    assert defect.nnz == 0 or np.max(np.abs(defect.data)) == 0.0


def test_sparse_hermitian_rejects_non_hermitian():
    with pytest.raises(ValueError):
        SparseHermitian.from_entries(2, [0], [1], [1.0])


def test_kernel_annihilation_exact(rng):
    for build in (lambda: _collective(L=10, eta=5.0), lambda: _tensor(L=5, eta=5.0)):
        _, basis, h0 = build()
        nb = basis.bath_dimension
        for _ in range(10):
            c = rng.normal(size=2) + 1j * rng.normal(size=2)
            c /= np.linalg.norm(c)
            vec = np.zeros(basis.dimension, dtype=complex)
            vec[0], vec[nb] = c
            assert np.linalg.norm(h0.apply(vec)) == 0.0


def test_number_operator_eigenvalues():
    basis = collective_basis(10)
    diag = number_operator(basis).matrix.diagonal().real
    assert diag[basis.index_of(G1, -5.0)] == 0.0
    assert diag[basis.index_of(E, -5.0)] == 1.0
    assert diag[basis.index_of(G2, -3.0)] == 2.0


def test_number_conservation_and_pulse_countercheck():
    for build in (_collective, _tensor):
        _, basis, h0 = build()
        n_op = number_operator(basis).matrix
        comm = (h0.matrix @ n_op - n_op @ h0.matrix).tocoo()
        assert comm.nnz == 0 or np.max(np.abs(comm.data)) == 0.0
        a_p, _ = build_pulse_couplers(basis)
        pulse_comm = (a_p.matrix @ n_op - n_op @ a_p.matrix).tocoo()
        assert pulse_comm.nnz > 0 and np.max(np.abs(pulse_comm.data)) > 0.0


@pytest.mark.parametrize("L", [2, 4, 6, 8])
def test_one_excitation_sector_dimension(L):
    basis = tensor_basis(L)
    diag = number_operator(basis).matrix.diagonal().real
    assert int(np.sum(diag == 1.0)) == 2 * L + 1


def test_one_excitation_block_matches_closed_form_eigenvalues():
    # dense diagonalization of the 2L+1 block as the oracle, L=4, eta=1, delta_e=0.7
    cfg, basis, h0 = _tensor(L=4, eta=1.0, delta_e=0.7)
    diag = number_operator(basis).matrix.diagonal().real
    sector = np.where(diag == 1.0)[0]
    block = h0.toarray()[np.ix_(sector, sector)].copy()
    e_pos = int(np.searchsorted(sector, basis.index_of(E, 0)))
    block[e_pos, e_pos] -= cfg.delta_s  # closed form describes the bath + interaction part
    eigs = np.sort(np.linalg.eigvalsh(block))
    # frozen from mpmath: (0.7 +- sqrt(8 + 0.49)) / 2
    assert eigs[0] == pytest.approx(-1.1068802284333465, abs=1e-12)
    assert eigs[-1] == pytest.approx(1.8068802284333465, abs=1e-12)
    eta1, eta2 = spectral.leg_couplings(cfg)
    system = spectral.one_excitation_eigensystem(eta1, eta2, cfg.delta_e)
    assert eigs[0] == pytest.approx(system.e_minus, abs=1e-12)
    assert eigs[-1] == pytest.approx(system.e_plus, abs=1e-12)
    # the 2L-1 middle eigenvalues all sit at delta_e
    assert np.allclose(eigs[1:-1], cfg.delta_e, atol=1e-12)


def test_collective_and_tensor_builds_agree_on_symmetric_sector():
    L, eta = 4, 1.7
    cfg_c = fig3_config(n_spins=L, eta=eta)
    cfg_t = fig3_config(n_spins=L, eta=eta, model_kind=ModelKind.TENSOR)
    _, h_c = build_hamiltonian(cfg_c)
    _, h_t = build_hamiltonian(cfg_t)
    s = _symmetric_sector_map(L)
    for part_t, part_c in ((h_t.h0, h_c.h0), (h_t.a_p, h_c.a_p), (h_t.a_s, h_c.a_s)):
        diff = part_t.toarray() @ s - s @ part_c.toarray()
        assert np.max(np.abs(diff)) < 1e-12


def test_apply_initial_state_weak_tail():
    cfg = fig3_config(n_spins=4, eta=0.0)
    basis, h = build_hamiltonian(cfg)
    psi = initial_state(basis)
    t = -cfg.pulse.t_window
    out = apply(h, t, psi)
    assert np.linalg.norm(out) <= pulses.omega_p(t, cfg.pulse) + 1e-15
    assert np.linalg.norm(out) < 1e-2


def test_apply_rayleigh_quotient_is_real(rng):
    cfg = fig3_config(n_spins=6, eta=3.0)
    basis, h = build_hamiltonian(cfg)
    for t in (-0.3, 0.0, 0.4):
        psi = rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension)
        psi /= np.linalg.norm(psi)
        value = np.vdot(psi, apply(h, t, psi))
        scale = np.linalg.norm(apply(h, t, psi))
        assert abs(value.imag) < 1e-12 * max(scale, 1.0)


def test_apply_dimension_mismatch():
    cfg = fig3_config(n_spins=4)
    _, h = build_hamiltonian(cfg)
    with pytest.raises(ValueError):
        apply(h, 0.0, np.zeros(7, dtype=complex))


def test_affine_assembly_matches_parts():
    cfg = fig3_config(n_spins=3, eta=1.5)
    basis, h = build_hamiltonian(cfg)
    t = -0.12
    dense = h.at(t).toarray()
    expected = (
        h.h0.toarray()
        + pulses.omega_p(t, cfg.pulse) * h.a_p.toarray()
        + pulses.omega_s(t, cfg.pulse) * h.a_s.toarray()
    )
    assert np.max(np.abs(dense - expected)) == 0.0
