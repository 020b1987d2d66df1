"""Parameter types, basis enumeration and state construction.

The simulated universe is a three-level system (two stable states g1, g2 and
an auxiliary excited state e) joined to a bath of L two-level spins.  Two
bath representations are supported:

* ``COLLECTIVE`` keeps only the maximal angular-momentum sector j = L/2 of
  the total spin, which is exact for homogeneous coupling starting from the
  all-down bath state.  Dimension 3*(L+1).
* ``TENSOR`` enumerates every spin configuration as a bitmask and serves as
  the brute-force cross-check for small L.  Dimension 3*2**L, capped at
  L = 14 to keep it desk-scale.

All types are immutable after construction and safe to share across
parallel workers.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ConfigError

TENSOR_MAX_SPINS = 14
STATE_NORM_TOL = 1e-9


class SystemLevel(enum.IntEnum):
    """The three atomic levels, in the fixed ordering used for indexing."""

    G1 = 0
    G2 = 1
    E = 2


class ModelKind(enum.Enum):
    COLLECTIVE = "collective"
    TENSOR = "tensor"


@dataclass(frozen=True)
class PulseParams:
    """Peak amplitude scale, width and half-window of the pulse pair.

    ``omega0`` and all other rates in this package are expressed in units of
    the inverse half-window 1/T; ``t_window`` defaults to 1 so that the
    dimensionless products T*omega0, T*delta, ... can be read directly off
    the configuration.
    """

    omega0: float
    tau: float
    t_window: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "tau", "t_window"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"pulse parameter {name} must be finite and positive, got {value!r}")


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Every physical and numerical parameter of one simulation run.

    ``coupling`` is either a single homogeneous rate eta or an (L, 2) matrix
    of per-spin, per-leg rates eta[k, m].  ``coupling_prefactor`` multiplies
    every system-bath coupling term; the default 1/2 makes the homogeneous
    collective interaction (eta/2) * (|e><g1| + |e><g2|) (x) J- + h.c.,
    the convention under which the closed-form one-excitation spectrum of
    :mod:`stirap_spinbath.spectral` holds verbatim.

    ``steps=None`` selects the automatic step rule of the propagator;
    explicit step counts must be at least 1000.
    """

    pulse: PulseParams
    n_spins: int
    coupling: float | np.ndarray
    delta_s: float = 0.0
    delta_e: float = 0.0
    coupling_prefactor: float = 0.5
    model_kind: ModelKind = ModelKind.COLLECTIVE
    steps: int | None = None
    snapshot_count: int = 201

    def __post_init__(self):
        if not isinstance(self.n_spins, (int, np.integer)) or isinstance(self.n_spins, bool):
            raise ConfigError(f"n_spins must be an integer, got {self.n_spins!r}")
        if self.n_spins < 1:
            raise ConfigError(f"n_spins must be positive, got {self.n_spins}")
        for name in ("delta_s", "delta_e", "coupling_prefactor"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
        if self.coupling_prefactor < 0:
            raise ConfigError("coupling_prefactor must be nonnegative")
        if not isinstance(self.model_kind, ModelKind):
            raise ConfigError(f"model_kind must be a ModelKind, got {self.model_kind!r}")

        if np.isscalar(self.coupling):
            if not math.isfinite(float(self.coupling)):
                raise ConfigError("coupling must be finite")
            object.__setattr__(self, "coupling", float(self.coupling))
        else:
            matrix = np.array(self.coupling, dtype=np.float64)
            if matrix.shape != (self.n_spins, 2):
                raise ConfigError(
                    f"coupling matrix must have shape ({self.n_spins}, 2), got {matrix.shape}"
                )
            if not np.all(np.isfinite(matrix)):
                raise ConfigError("coupling matrix must be finite")
            matrix.setflags(write=False)
            object.__setattr__(self, "coupling", matrix)

        if self.model_kind is ModelKind.COLLECTIVE and not self.is_homogeneous:
            raise ConfigError("the collective model requires a homogeneous (scalar) coupling")
        if self.model_kind is ModelKind.TENSOR and self.n_spins > TENSOR_MAX_SPINS:
            raise CapacityError(
                f"tensor model capped at L = {TENSOR_MAX_SPINS} "
                f"(requested L = {self.n_spins} would need dimension 3*2**{self.n_spins})"
            )

        if self.steps is not None:
            if not isinstance(self.steps, (int, np.integer)) or isinstance(self.steps, bool):
                raise ConfigError(f"steps must be an integer or None, got {self.steps!r}")
            if self.steps < 1000:
                raise ConfigError(f"explicit step counts must be >= 1000, got {self.steps}")
        if not isinstance(self.snapshot_count, (int, np.integer)) or self.snapshot_count < 0:
            raise ConfigError(f"snapshot_count must be a nonnegative integer, got {self.snapshot_count!r}")

    @property
    def is_homogeneous(self) -> bool:
        return np.isscalar(self.coupling)

    def homogeneous_coupling(self) -> float:
        if not self.is_homogeneous:
            raise ConfigError("configuration carries a per-spin coupling matrix")
        return float(self.coupling)

    def coupling_matrix(self) -> np.ndarray:
        """The (L, 2) coupling matrix, broadcasting a homogeneous scalar."""
        if self.is_homogeneous:
            return np.full((self.n_spins, 2), float(self.coupling))
        return self.coupling


@dataclass(frozen=True, eq=False)
class Basis:
    """Flat enumeration of the (level, bath) product space.

    Flat index = level * bath_dimension + bath_index.  The bath index is
    m + L/2 for the collective form (m the J_z quantum number of the j = L/2
    sector) and the spin bitmask for the tensor form (bit k set means spin k
    points up).
    """

    kind: ModelKind
    n_spins: int
    bath_dimension: int
    dimension: int

    @property
    def j(self) -> float:
        return self.n_spins / 2.0

    def m_values(self) -> np.ndarray:
        """J_z values per bath index (collective) or per bitmask (tensor)."""
        return self.bath_excitations() - self.j

    def bath_excitations(self) -> np.ndarray:
        """Number of up-spins per bath index, as float64."""
        if self.kind is ModelKind.COLLECTIVE:
            return np.arange(self.bath_dimension, dtype=np.float64)
        masks = np.arange(self.bath_dimension, dtype=np.uint64)
        return np.bitwise_count(masks).astype(np.float64)

    def index_of(self, level: SystemLevel, bath) -> int:
        """Flat index of (level, m) or (level, bitmask) depending on kind."""
        level = SystemLevel(level)
        if self.kind is ModelKind.COLLECTIVE:
            k = bath + self.j
            ki = int(round(k))
            if abs(k - ki) > 1e-12 or not 0 <= ki < self.bath_dimension:
                raise ValueError(f"m = {bath!r} is not in the j = {self.j} ladder")
            return int(level) * self.bath_dimension + ki
        mask = int(bath)
        if not 0 <= mask < self.bath_dimension:
            raise ValueError(f"bitmask {bath!r} out of range for L = {self.n_spins}")
        return int(level) * self.bath_dimension + mask

    def label_of(self, index: int):
        """Inverse of :meth:`index_of`; returns (level, m) or (level, bitmask)."""
        if not 0 <= index < self.dimension:
            raise ValueError(f"flat index {index} out of range 0..{self.dimension - 1}")
        level = SystemLevel(index // self.bath_dimension)
        b = index % self.bath_dimension
        if self.kind is ModelKind.COLLECTIVE:
            return level, b - self.j
        return level, b

    def level_of(self, index: int) -> SystemLevel:
        return self.label_of(index)[0]


def collective_basis(n_spins: int) -> Basis:
    """Basis of the j = L/2 sector: 3*(L+1) states, level-major ordering."""
    if not isinstance(n_spins, (int, np.integer)) or isinstance(n_spins, bool) or n_spins < 1:
        raise ConfigError(f"n_spins must be a positive integer, got {n_spins!r}")
    nb = int(n_spins) + 1
    return Basis(ModelKind.COLLECTIVE, int(n_spins), nb, 3 * nb)


def tensor_basis(n_spins: int) -> Basis:
    """Full tensor-product basis: 3*2**L states, bitmask bath ordering."""
    if not isinstance(n_spins, (int, np.integer)) or isinstance(n_spins, bool) or n_spins < 1:
        raise ConfigError(f"n_spins must be a positive integer, got {n_spins!r}")
    if n_spins > TENSOR_MAX_SPINS:
        raise CapacityError(f"tensor basis capped at L = {TENSOR_MAX_SPINS}, got L = {n_spins}")
    nb = 2 ** int(n_spins)
    return Basis(ModelKind.TENSOR, int(n_spins), nb, 3 * nb)


def basis_for(cfg: RunConfig) -> Basis:
    if cfg.model_kind is ModelKind.COLLECTIVE:
        return collective_basis(cfg.n_spins)
    return tensor_basis(cfg.n_spins)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Complex amplitude vector over a basis, unit norm at construction."""

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.array(self.amplitudes, dtype=np.complex128)
        if amp.shape != (self.basis.dimension,):
            raise ValueError(
                f"amplitude vector has shape {amp.shape}, basis dimension is {self.basis.dimension}"
            )
        norm_sq = float(np.vdot(amp, amp).real)
        if abs(norm_sq - 1.0) > STATE_NORM_TOL:
            raise ValueError(f"state not normalized: ||psi||^2 - 1 = {norm_sq - 1.0:.3e}")
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


def initial_state(basis: Basis) -> StateVector:
    """|g1> with the bath all down: (G1, m=-L/2) or (G1, bitmask 0)."""
    amp = np.zeros(basis.dimension, dtype=np.complex128)
    amp[0] = 1.0
    return StateVector(basis, amp)
