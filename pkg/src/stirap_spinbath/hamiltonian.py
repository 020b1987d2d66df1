"""Rotating-frame Hamiltonian assembly in both bath representations.

The operator is affine in the two pulse envelopes,

    H(t) = h0 + omega_p(t) * a_p + omega_s(t) * a_s,

where h0 carries the static parts (system detuning delta_s * |e><e|, bath
detuning delta_e * sum_k (sigma_z + 1)/2, and the excitation-conserving
system-bath coupling) while a_p, a_s are the bare pump/Stokes couplers
|g_m><e| + h.c. acting as identity on the bath.  Keeping the pulse couplers
separate means time dependence costs two scalar multiplies per step instead
of a matrix rebuild.

Collective build (homogeneous coupling, j = L/2 sector):

    h0 = delta_s |e><e| + delta_e (J_z + L/2)
         + c*eta [ (|e><g1| + |e><g2|) (x) J-  +  h.c. ]

with J-|j,m> = sqrt(j(j+1) - m(m-1)) |j,m-1> and c the coupling prefactor.
Tensor build (per-spin couplings eta[k, m]):

    h0 = delta_s |e><e| + delta_e sum_k (sigma_z^k + 1)/2
         + sum_{m,k} c*eta[k,m] ( |g_m><e| (x) sigma_+^k  +  h.c. ).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import pulses
from .errors import ConfigError
from .model import (
    Basis,
    ModelKind,
    PulseParams,
    RunConfig,
    StateVector,
    SystemLevel,
    basis_for,
)


@dataclass(frozen=True, eq=False)
class SparseHermitian:
    """CSR-backed Hermitian operator; Hermiticity is validated at build time."""

    dimension: int
    matrix: sp.csr_matrix

    @classmethod
    def from_entries(cls, dimension: int, rows, cols, values) -> "SparseHermitian":
        matrix = sp.coo_matrix(
            (np.asarray(values, dtype=np.complex128), (rows, cols)),
            shape=(dimension, dimension),
        ).tocsr()
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        defect = (matrix - matrix.getH()).tocoo()
        if defect.nnz and np.max(np.abs(defect.data)) != 0.0:
            raise ValueError("operator entries are not Hermitian")
        return cls(dimension, matrix)

    @property
    def nnz(self) -> int:
        return int(self.matrix.nnz)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


@dataclass(frozen=True, eq=False)
class AffineHamiltonian:
    """H(t) = h0 + omega_p(t)*a_p + omega_s(t)*a_s over a fixed basis."""

    h0: SparseHermitian
    a_p: SparseHermitian
    a_s: SparseHermitian
    pulse: PulseParams

    @property
    def dimension(self) -> int:
        return self.h0.dimension

    def at(self, t: float) -> sp.csr_matrix:
        """The assembled sparse matrix H(t); intended for small-scale checks."""
        wp = pulses._omega_p_scalar(t, self.pulse.omega0, self.pulse.tau)
        ws = pulses._omega_s_scalar(t, self.pulse.omega0, self.pulse.tau)
        return (self.h0.matrix + wp * self.a_p.matrix + ws * self.a_s.matrix).tocsr()


def _diagonal_static_entries(cfg: RunConfig, basis: Basis):
    """delta_e * (excitation count) on every level plus delta_s on the e block."""
    nb = basis.bath_dimension
    exc = basis.bath_excitations()
    idx = np.arange(basis.dimension)
    vals = np.concatenate([cfg.delta_e * exc] * 3)
    vals[2 * nb :] += cfg.delta_s
    return idx, idx, vals


def build_static_collective(cfg: RunConfig, basis: Basis) -> SparseHermitian:
    """Static collective-model Hamiltonian on the j = L/2 ladder."""
    if cfg.model_kind is not ModelKind.COLLECTIVE or basis.kind is not ModelKind.COLLECTIVE:
        raise ConfigError("build_static_collective requires a collective configuration and basis")
    if not cfg.is_homogeneous:
        raise ConfigError("the collective model requires a homogeneous coupling")
    nb = basis.bath_dimension
    j = basis.j
    c_eta = cfg.coupling_prefactor * cfg.homogeneous_coupling()

    d_rows, d_cols, d_vals = _diagonal_static_entries(cfg, basis)
    rows, cols, vals = [d_rows], [d_cols], [d_vals.astype(np.complex128)]

    # |e><g_m| (x) J-  maps (g_m, k) -> (e, k-1); ladder coefficient at m = k - j.
    k = np.arange(1, nb)
    m = k - j
    ladder = (c_eta * np.sqrt(j * (j + 1) - m * (m - 1))).astype(np.complex128)
    e_row = 2 * nb + (k - 1)
    for lev in (SystemLevel.G1, SystemLevel.G2):
        g_col = int(lev) * nb + k
        rows.extend([e_row, g_col])
        cols.extend([g_col, e_row])
        vals.extend([ladder, ladder])

    return SparseHermitian.from_entries(
        basis.dimension, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    )


def build_tensor_full(cfg: RunConfig, basis: Basis) -> SparseHermitian:
    """Static tensor-model Hamiltonian over all 2**L spin configurations."""
    if cfg.model_kind is not ModelKind.TENSOR or basis.kind is not ModelKind.TENSOR:
        raise ConfigError("build_tensor_full requires a tensor configuration and basis")
    eta = cfg.coupling_matrix()
    L = cfg.n_spins
    nb = basis.bath_dimension
    c = cfg.coupling_prefactor

    rows, cols, vals = [], [], []
    d_rows, d_cols, d_vals = _diagonal_static_entries(cfg, basis)
    rows.append(d_rows)
    cols.append(d_cols)
    vals.append(d_vals)

    masks = np.arange(nb, dtype=np.int64)
    for k in range(L):
        bit = np.int64(1) << k
        low = masks[(masks & bit) == 0]
        high = low | bit
        e_col = 2 * nb + low
        for leg, lev in ((0, SystemLevel.G1), (1, SystemLevel.G2)):
            v = np.full(low.shape, c * eta[k, leg])
            g_row = int(lev) * nb + high
            rows.extend([g_row, e_col])
            cols.extend([e_col, g_row])
            vals.extend([v, v])

    return SparseHermitian.from_entries(
        basis.dimension, np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)
    )


def build_pulse_couplers(basis: Basis) -> tuple[SparseHermitian, SparseHermitian]:
    """a_p = (|g1><e| + h.c.) (x) 1_bath and a_s likewise with g2."""
    nb = basis.bath_dimension
    b = np.arange(nb)

    def coupler(level: SystemLevel) -> SparseHermitian:
        g = int(level) * nb + b
        e = 2 * nb + b
        return SparseHermitian.from_entries(
            basis.dimension,
            np.concatenate([g, e]),
            np.concatenate([e, g]),
            np.ones(2 * nb),
        )

    return coupler(SystemLevel.G1), coupler(SystemLevel.G2)


def number_operator(basis: Basis) -> SparseHermitian:
    """N = |e><e| + sum_k (sigma_z^k + 1)/2, diagonal in both representations."""
    exc = basis.bath_excitations()
    diag = np.concatenate([exc, exc, exc + 1.0]).astype(np.complex128)
    matrix = sp.diags(diag, format="csr")
    return SparseHermitian(basis.dimension, matrix)


def build_hamiltonian(cfg: RunConfig) -> tuple[Basis, AffineHamiltonian]:
    """Assemble basis, static part and pulse couplers for a configuration."""
    basis = basis_for(cfg)
    if cfg.model_kind is ModelKind.COLLECTIVE:
        h0 = build_static_collective(cfg, basis)
    else:
        h0 = build_tensor_full(cfg, basis)
    a_p, a_s = build_pulse_couplers(basis)
    return basis, AffineHamiltonian(h0, a_p, a_s, cfg.pulse)


def apply(h: AffineHamiltonian, t: float, psi) -> np.ndarray:
    """H(t) @ psi as a plain (generally unnormalized) amplitude vector."""
    vec = psi.amplitudes if isinstance(psi, StateVector) else np.asarray(psi, dtype=np.complex128)
    if vec.shape != (h.dimension,):
        raise ValueError(f"state has shape {vec.shape}, Hamiltonian dimension is {h.dimension}")
    wp = pulses._omega_p_scalar(t, h.pulse.omega0, h.pulse.tau)
    ws = pulses._omega_s_scalar(t, h.pulse.omega0, h.pulse.tau)
    return h.h0.apply(vec) + wp * h.a_p.apply(vec) + ws * h.a_s.apply(vec)
