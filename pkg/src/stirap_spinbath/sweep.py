"""Parameter sweeps over the bath coupling or detuning, knee extraction,
bundled presets and CSV persistence.

Grid points are independent tasks; a process pool of configurable width may
execute them, and rows are always assembled in grid order, so a sweep is
deterministic down to the output bytes regardless of worker count.  A grid
point whose integration fails is recorded as a ``status=failed`` row (result
fields NaN) and the sweep continues.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ConfigError, IntegrationError, KneeNotFoundError
from .model import ModelKind, PulseParams, RunConfig
from .propagator import RunResult, evolve

CSV_COLUMNS = (
    "eta", "L", "delta_s", "delta_e", "omega0", "tau", "prefactor",
    "p_g1", "p_g2", "p_e", "purity", "jz_mean", "jz_var", "norm_error", "status",
)

SWEEP_AXES = ("eta", "delta_e")
PRESET_NAMES = ("fig3a", "fig3b", "fig3c", "fig4", "fig5")

DEFAULT_GRID_START = 1e-2
DEFAULT_GRID_STOP = 1e3
DEFAULT_GRID_POINTS = 25


@dataclass(frozen=True, eq=False)
class SweepSpec:
    """One family of runs: a base configuration plus one swept parameter."""

    base: RunConfig
    axis: str = "eta"
    grid: tuple[float, ...] = ()
    rescale_reference: Optional[int] = None
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ConfigError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("sweep grid must be nonempty")
        if not all(math.isfinite(v) for v in grid):
            raise ConfigError("sweep grid values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        if self.rescale_reference is not None and (
            not isinstance(self.rescale_reference, (int, np.integer)) or self.rescale_reference < 1
        ):
            raise ConfigError(f"rescale_reference must be a positive integer, got {self.rescale_reference!r}")


@dataclass(frozen=True)
class SweepRow:
    """Configuration echo plus final observables for one grid point."""

    eta: float
    L: int
    delta_s: float
    delta_e: float
    omega0: float
    tau: float
    prefactor: float
    p_g1: float
    p_g2: float
    p_e: float
    purity: float
    jz_mean: float
    jz_var: float
    norm_error: float
    status: str


def log_grid(start: float, stop: float, points: int) -> tuple[float, ...]:
    if start <= 0 or stop <= 0:
        raise ConfigError("log grids require positive endpoints")
    return tuple(float(v) for v in np.geomspace(start, stop, points))


def linear_grid(start: float, stop: float, points: int) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(start, stop, points))


def default_eta_grid(points: int = DEFAULT_GRID_POINTS) -> tuple[float, ...]:
    """Log grid eta*T in [1e-2, 1e3]: brackets the weak-coupling plateau and
    the strong-coupling floor for every bundled preset."""
    return log_grid(DEFAULT_GRID_START, DEFAULT_GRID_STOP, points)


def effective_coupling(spec: SweepSpec, coupling, n_spins: int):
    """Coupling actually fed to the Hamiltonian: the nominal value rescaled by
    sqrt(L_ref / L) when a rescale reference is set."""
    if spec.rescale_reference is None:
        return coupling
    return coupling * math.sqrt(spec.rescale_reference / n_spins)


def point_config(spec: SweepSpec, value: float) -> RunConfig:
    """The run configuration for one grid value of the swept axis."""
    base = spec.base
    if spec.axis == "eta":
        coupling, delta_e = float(value), base.delta_e
    else:
        coupling, delta_e = base.coupling, float(value)
    coupling = effective_coupling(spec, coupling, base.n_spins)
    return replace(base, coupling=coupling, delta_e=delta_e)


def _nominal_eta(spec: SweepSpec, value: float) -> float:
    if spec.axis == "eta":
        return float(value)
    return float(spec.base.coupling) if spec.base.is_homogeneous else math.nan


def _row_from_result(spec: SweepSpec, value: float, result: Optional[RunResult]) -> SweepRow:
    base = spec.base
    nan = math.nan
    return SweepRow(
        eta=_nominal_eta(spec, value),
        L=base.n_spins,
        delta_s=base.delta_s,
        delta_e=float(value) if spec.axis == "delta_e" else base.delta_e,
        omega0=base.pulse.omega0,
        tau=base.pulse.tau,
        prefactor=base.coupling_prefactor,
        p_g1=result.p_g1 if result else nan,
        p_g2=result.p_g2 if result else nan,
        p_e=result.p_e if result else nan,
        purity=result.purity if result else nan,
        jz_mean=result.jz_mean if result else nan,
        jz_var=result.jz_var if result else nan,
        norm_error=result.norm_error if result else nan,
        status="ok" if result else "failed",
    )


def _run_point(task: tuple[SweepSpec, float]):
    spec, value = task
    try:
        return evolve(point_config(spec, value)), None
    except IntegrationError as exc:
        return None, str(exc)


def run_sweep(spec: SweepSpec, workers: int = 1) -> list[SweepRow]:
    """One evolve() per grid point; rows returned in grid order."""
    tasks = [(spec, value) for value in spec.grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_point, tasks))
    else:
        outcomes = [_run_point(task) for task in tasks]
    return [
        _row_from_result(spec, value, result)
        for value, (result, _err) in zip(spec.grid, outcomes)
    ]


def knee(rows: Sequence[SweepRow], threshold: float = 0.5) -> float:
    """Coupling at which the efficiency first falls through ``threshold``,
    log-linearly interpolated between the bracketing grid points."""
    points = [(r.eta, r.p_g2) for r in rows if r.status == "ok"]
    if len(points) < 2:
        raise KneeNotFoundError("need at least two successful rows")
    if points[0][1] < threshold:
        raise KneeNotFoundError(
            f"efficiency {points[0][1]:.4f} already below threshold {threshold} at the low end"
        )
    if points[-1][1] > threshold:
        raise KneeNotFoundError(
            f"efficiency {points[-1][1]:.4f} still above threshold {threshold} at the high end"
        )
    for (x0, p0), (x1, p1) in zip(points, points[1:]):
        if p1 < threshold:
            frac = (threshold - p0) / (p1 - p0)
            return float(math.exp(math.log(x0) + frac * (math.log(x1) - math.log(x0))))
    return float(points[-1][0])


def _preset_base(n_spins: int, delta_e: float) -> RunConfig:
    return RunConfig(
        pulse=PulseParams(omega0=100.0, tau=0.1, t_window=1.0),
        n_spins=n_spins,
        coupling=1.0,
        delta_s=1.0,
        delta_e=delta_e,
        model_kind=ModelKind.COLLECTIVE,
        snapshot_count=0,
    )


def preset(name: str, points: int = DEFAULT_GRID_POINTS) -> list[SweepSpec]:
    """Bundled sweep families.

    fig3a/fig3b/fig3c: efficiency / purity / J_z variance versus coupling for
    bath sizes L in {10, 20, 40} (same runs, different column of interest).
    fig4: same bath sizes with the coupling rescaled by sqrt(10/L), which
    collapses the three curves onto the L = 10 reference.
    fig5: L = 10 with bath detunings T*delta_e in {1, 50, 100, 500}.
    All use T*omega0 = 100, tau/T = 0.1, T*delta_s = 1 and a log coupling grid.
    """
    if name not in PRESET_NAMES:
        raise ConfigError(f"unknown preset {name!r}; choose from {PRESET_NAMES}")
    grid = default_eta_grid(points)
    if name == "fig5":
        return [
            SweepSpec(
                base=_preset_base(10, delta_e),
                axis="eta",
                grid=grid,
                output_path=f"fig5_dE{delta_e:g}.csv",
            )
            for delta_e in (1.0, 50.0, 100.0, 500.0)
        ]
    reference = 10 if name == "fig4" else None
    return [
        SweepSpec(
            base=_preset_base(n_spins, 1.0),
            axis="eta",
            grid=grid,
            rescale_reference=reference,
            output_path=f"{name}_L{n_spins}.csv",
        )
        for n_spins in (10, 20, 40)
    ]


def _format_number(value) -> str:
    return format(float(value), ".17g")


def write_csv(rows: Sequence[SweepRow], path) -> None:
    """Write rows with the fixed 15-column header; floats carry 17 significant
    digits so a read-back reproduces them bit-exactly."""
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                [
                    _format_number(row.eta),
                    str(int(row.L)),
                    _format_number(row.delta_s),
                    _format_number(row.delta_e),
                    _format_number(row.omega0),
                    _format_number(row.tau),
                    _format_number(row.prefactor),
                    _format_number(row.p_g1),
                    _format_number(row.p_g2),
                    _format_number(row.p_e),
                    _format_number(row.purity),
                    _format_number(row.jz_mean),
                    _format_number(row.jz_var),
                    _format_number(row.norm_error),
                    row.status,
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii", newline="")


def read_csv(path) -> list[SweepRow]:
    """Read back a file produced by :func:`write_csv`."""
    text = Path(path).read_text(encoding="ascii")
    lines = [line for line in text.split("\n") if line]
    header = tuple(lines[0].split(","))
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header in {path}: {header}")
    rows = []
    for line in lines[1:]:
        fields = line.split(",")
        rows.append(
            SweepRow(
                eta=float(fields[0]),
                L=int(fields[1]),
                delta_s=float(fields[2]),
                delta_e=float(fields[3]),
                omega0=float(fields[4]),
                tau=float(fields[5]),
                prefactor=float(fields[6]),
                p_g1=float(fields[7]),
                p_g2=float(fields[8]),
                p_e=float(fields[9]),
                purity=float(fields[10]),
                jz_mean=float(fields[11]),
                jz_var=float(fields[12]),
                norm_error=float(fields[13]),
                status=fields[14],
            )
        )
    return rows
