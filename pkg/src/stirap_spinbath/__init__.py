"""STIRAP population transfer in a three-level system coupled to a spin bath.

Library layout:

* :mod:`stirap_spinbath.model` - parameter types, bases, state vectors
* :mod:`stirap_spinbath.pulses` - sech/tanh envelopes and the mixing angle
* :mod:`stirap_spinbath.hamiltonian` - sparse affine Hamiltonians, both bath
  representations
* :mod:`stirap_spinbath.spectral` - closed-form spectral oracles
* :mod:`stirap_spinbath.propagator` - fixed-step RK4 evolution, observables
* :mod:`stirap_spinbath.sweep` - parameter sweeps, presets, CSV persistence
* :mod:`stirap_spinbath.plots` - figure rendering for sweep output
* :mod:`stirap_spinbath.validation` - the self-check suite behind
  ``stirap-spinbath validate``
"""

from .errors import CapacityError, ConfigError, IntegrationError, KneeNotFoundError
from .model import (
    Basis,
    ModelKind,
    PulseParams,
    RunConfig,
    StateVector,
    SystemLevel,
    basis_for,
    collective_basis,
    initial_state,
    tensor_basis,
)
from .propagator import RunResult, Snapshot, choose_steps, evolve, jz_statistics, norm_bound, purity, reduced_density
from .sweep import SweepRow, SweepSpec, knee, preset, read_csv, run_sweep, write_csv

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "CapacityError",
    "ConfigError",
    "IntegrationError",
    "KneeNotFoundError",
    "ModelKind",
    "PulseParams",
    "RunConfig",
    "RunResult",
    "Snapshot",
    "StateVector",
    "SweepRow",
    "SweepSpec",
    "SystemLevel",
    "basis_for",
    "choose_steps",
    "collective_basis",
    "evolve",
    "initial_state",
    "jz_statistics",
    "knee",
    "norm_bound",
    "preset",
    "purity",
    "read_csv",
    "reduced_density",
    "run_sweep",
    "tensor_basis",
    "write_csv",
    "__version__",
]
