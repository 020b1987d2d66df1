import math

import pytest

from stirap_spinbath.errors import ConfigError, KneeNotFoundError
from stirap_spinbath.sweep import (
    CSV_COLUMNS,
    SweepRow,
    SweepSpec,
    default_eta_grid,
    effective_coupling,
    knee,
    log_grid,
    point_config,
    preset,
    read_csv,
    run_sweep,
    write_csv,
)
from conftest import fig3_config


def _rows(etas, ps):
    return [
        SweepRow(
            eta=eta, L=10, delta_s=1.0, delta_e=1.0, omega0=100.0, tau=0.1, prefactor=0.5,
            p_g1=1 - p, p_g2=p, p_e=0.0, purity=1.0, jz_mean=-5.0, jz_var=0.0,
            norm_error=1e-12, status="ok",
        )
        for eta, p in zip(etas, ps)
    ]


def _tiny_spec(**over):
    base = fig3_config(n_spins=2, eta=1.0, **over)
    grid = over.pop("grid", (0.5, 2.0, 8.0))
    return SweepSpec(base=base, axis="eta", grid=grid)


def test_spec_validation():
    base = fig3_config(n_spins=2)
    with pytest.raises(ConfigError):
        SweepSpec(base=base, axis="mass", grid=(1.0, 2.0))
    with pytest.raises(ConfigError):
        SweepSpec(base=base, axis="eta", grid=())
    with pytest.raises(ConfigError):
        SweepSpec(base=base, axis="eta", grid=(1.0, 1.0))
    with pytest.raises(ConfigError):
        SweepSpec(base=base, axis="eta", grid=(2.0, 1.0))
    with pytest.raises(ConfigError):
        SweepSpec(base=base, axis="eta", grid=(1.0, float("inf")))
    with pytest.raises(ConfigError):
        SweepSpec(base=base, axis="eta", grid=(1.0, 2.0), rescale_reference=0)
    with pytest.raises(ConfigError):
        log_grid(-1.0, 10.0, 5)


def test_default_grid_brackets_the_knee_region():
    grid = default_eta_grid()
    assert len(grid) == 25
    assert grid[0] == pytest.approx(1e-2, rel=1e-12)
    assert grid[-1] == pytest.approx(1e3, rel=1e-12)
    assert all(b > a for a, b in zip(grid, grid[1:]))


def test_knee_log_interpolation():
    rows = _rows([1.0, 2.0, 4.0, 8.0], [1.0, 0.9, 0.1, 0.0])
    # crossing between 2 and 4: frac = (0.5-0.9)/(0.1-0.9) = 0.5 -> 2*sqrt(2)
    assert knee(rows) == pytest.approx(2.8284271247461903, rel=1e-14)


def test_knee_threshold_variants():
    rows = _rows([1.0, 2.0, 4.0], [1.0, 0.5, 0.0])
    # first point at or above threshold, crossing interpolated from p=0.5 exactly
    assert knee(rows, threshold=0.5) == pytest.approx(4.0 * math.exp(0.0) * 0.5, rel=1.0)
    value = knee(rows, threshold=0.5)
    assert 2.0 <= value <= 4.0


def test_knee_errors():
    with pytest.raises(KneeNotFoundError):
        knee(_rows([1.0, 2.0], [0.4, 0.1]))  # already below at the low end
    with pytest.raises(KneeNotFoundError):
        knee(_rows([1.0, 2.0], [1.0, 0.9]))  # never crosses
    with pytest.raises(KneeNotFoundError):
        knee(_rows([1.0], [1.0]))


def test_knee_skips_failed_rows():
    rows = _rows([1.0, 2.0, 4.0, 8.0], [1.0, 0.9, 0.1, 0.0])
    rows[1] = SweepRow(**{**rows[1].__dict__, "status": "failed", "p_g2": float("nan")})
    value = knee(rows)
    # interpolates between 1 and 4 once the failed row is dropped
    assert 1.0 < value < 4.0


def test_effective_coupling_rescaling():
    spec = SweepSpec(base=fig3_config(n_spins=40), axis="eta", grid=(1.0,), rescale_reference=10)
    assert effective_coupling(spec, 2.0, 40) == pytest.approx(2.0 * math.sqrt(10 / 40), rel=1e-15)
    cfg = point_config(spec, 2.0)
    assert cfg.coupling == pytest.approx(1.0, rel=1e-15)  # sqrt(10/40) = 1/2
    plain = SweepSpec(base=fig3_config(n_spins=40), axis="eta", grid=(1.0,))
    assert point_config(plain, 2.0).coupling == 2.0


def test_point_config_delta_e_axis():
    spec = SweepSpec(base=fig3_config(n_spins=4, eta=3.0), axis="delta_e", grid=(0.5, 7.0))
    cfg = point_config(spec, 7.0)
    assert cfg.delta_e == 7.0
    assert cfg.coupling == 3.0


def test_preset_families():
    specs = preset("fig3a")
    assert [s.base.n_spins for s in specs] == [10, 20, 40]
    assert all(s.rescale_reference is None for s in specs)
    assert all(s.grid == default_eta_grid() for s in specs)
    assert [s.output_path for s in specs] == ["fig3a_L10.csv", "fig3a_L20.csv", "fig3a_L40.csv"]
    assert all(s.base.delta_s == 1.0 and s.base.delta_e == 1.0 for s in specs)
    assert all(s.base.pulse.omega0 == 100.0 and s.base.pulse.tau == 0.1 for s in specs)

    fig4 = preset("fig4")
    assert all(s.rescale_reference == 10 for s in fig4)

    fig5 = preset("fig5")
    assert [s.base.delta_e for s in fig5] == [1.0, 50.0, 100.0, 500.0]
    assert all(s.base.n_spins == 10 for s in fig5)

    for name in ("fig3b", "fig3c"):
        assert [s.base.n_spins for s in preset(name)] == [10, 20, 40]

    assert len(preset("fig3a", points=4)[0].grid) == 4

    with pytest.raises(ConfigError):
        preset("fig9")


def test_write_csv_contract(tmp_path):
    path = tmp_path / "empty.csv"
    write_csv([], path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"

    rows = _rows([1.0, 2.0], [0.75, 0.25])
    rows.append(
        SweepRow(
            eta=4.0, L=10, delta_s=1.0, delta_e=1.0, omega0=100.0, tau=0.1, prefactor=0.5,
            p_g1=float("nan"), p_g2=float("nan"), p_e=float("nan"), purity=float("nan"),
            jz_mean=float("nan"), jz_var=float("nan"), norm_error=float("nan"), status="failed",
        )
    )
    path = tmp_path / "rows.csv"
    write_csv(rows, path)
    text = path.read_text()
    lines = text.strip().split("\n")
    assert lines[0] == "eta,L,delta_s,delta_e,omega0,tau,prefactor,p_g1,p_g2,p_e,purity,jz_mean,jz_var,norm_error,status"
    assert len(lines) == 4
    assert lines[3].endswith("failed")
    assert "nan" in lines[3]

    # bit-exact round trip
    back = read_csv(path)
    for row, orig in zip(back, rows):
        for field in CSV_COLUMNS[:-1]:
            a, b = getattr(row, field), getattr(orig, field)
            assert (math.isnan(a) and math.isnan(b)) or a == b
        assert row.status == orig.status


def test_round_trip_preserves_awkward_floats(tmp_path):
    rows = _rows([0.1 + 0.2, 1e-300, 2.0 / 3.0][0:3], [0.3, 0.2, 0.1])
    # make grid strictly increasing but keep the awkward values in other fields
    rows = [
        SweepRow(**{**r.__dict__, "purity": v})
        for r, v in zip(_rows([1.0, 2.0, 3.0], [1.0, 0.5, 0.0]), [0.1 + 0.2, 2.0 / 3.0, 1e-300])
    ]
    path = tmp_path / "floats.csv"
    write_csv(rows, path)
    back = read_csv(path)
    assert [r.purity for r in back] == [0.1 + 0.2, 2.0 / 3.0, 1e-300]


def test_run_sweep_orders_rows_and_echoes_config():
    spec = _tiny_spec()
    rows = run_sweep(spec, workers=1)
    assert [r.eta for r in rows] == [0.5, 2.0, 8.0]
    assert all(r.L == 2 and r.omega0 == 100.0 and r.prefactor == 0.5 for r in rows)
    assert all(r.status == "ok" for r in rows)
    assert rows[0].p_g2 > 0.99  # weak coupling transfers


def test_run_sweep_determinism_across_workers(tmp_path):
    spec = _tiny_spec()
    paths = []
    for i, workers in enumerate((1, 2, 1)):
        rows = run_sweep(spec, workers=workers)
        path = tmp_path / f"sweep{i}.csv"
        write_csv(rows, path)
        paths.append(path.read_bytes())
    assert paths[0] == paths[1] == paths[2]


def test_run_sweep_continues_past_failed_points():
    # steps=2000 is fine for the weak point but unstable at eta=1000, where
    # dt times the one-excitation splitting exceeds the RK4 stability bound
    base = fig3_config(n_spins=10, eta=1.0, steps=2000)
    spec = SweepSpec(base=base, axis="eta", grid=(0.01, 1000.0))
    rows = run_sweep(spec)
    assert rows[0].status == "ok"
    assert rows[1].status == "failed"
    assert math.isnan(rows[1].p_g2)
    assert not math.isnan(rows[0].p_g2)


def test_read_csv_rejects_foreign_header(tmp_path):
    path = tmp_path / "foreign.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(ValueError):
        read_csv(path)


def test_write_csv_surfaces_path_on_failure(tmp_path):
    missing_dir = tmp_path / "nope" / "out.csv"
    with pytest.raises(OSError) as err:
        write_csv([], missing_dir)
    assert "nope" in str(err.value)
