import numpy as np
import pytest

from stirap_spinbath.model import ModelKind, PulseParams, RunConfig


def fig3_pulse():
    return PulseParams(omega0=100.0, tau=0.1, t_window=1.0)


def fig3_config(n_spins=10, eta=1.0, **overrides):
    """Configuration with the reference sweep parameters:
    T*omega0 = 100, tau/T = 0.1, T*delta_s = T*delta_e = 1."""
    defaults = dict(
        pulse=fig3_pulse(),
        n_spins=n_spins,
        coupling=eta,
        delta_s=1.0,
        delta_e=1.0,
        model_kind=ModelKind.COLLECTIVE,
        snapshot_count=0,
    )
    defaults.update(overrides)
    return RunConfig(**defaults)


def rk4_order_ratio():
    """Global-error ratio of p_g2 between step counts N and 2N against a
    16x-refined reference; classical RK4 should give ~2**4 = 16."""
    from stirap_spinbath.propagator import evolve

    cfg = fig3_config(eta=1.0)
    reference = evolve(fig3_config(eta=1.0, steps=32000)).p_g2
    err_coarse = abs(evolve(fig3_config(eta=1.0, steps=2000)).p_g2 - reference)
    err_fine = abs(evolve(fig3_config(eta=1.0, steps=4000)).p_g2 - reference)
    return err_coarse / err_fine


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
