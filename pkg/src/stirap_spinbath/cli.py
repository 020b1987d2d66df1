"""Command-line front end: single runs, sweeps, bundled presets with figure
rendering, and the self-validation suite.

Exit codes: 0 success, 1 validation or integration failure, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, IntegrationError
from .model import ModelKind, PulseParams, RunConfig
from .sweep import (
    PRESET_NAMES,
    SweepSpec,
    linear_grid,
    log_grid,
    preset,
    run_sweep,
    write_csv,
)

RESULT_FIELDS = ("p_g1", "p_g2", "p_e", "purity", "jz_mean", "jz_var", "norm_error")

CONFIG_KEYS = {
    "L", "eta", "eta_matrix", "omega0", "tau", "T",
    "delta_s", "delta_e", "steps", "coupling_prefactor", "model", "snapshots",
}
REQUIRED_KEYS = ("L", "omega0", "tau")


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Required keys: L, omega0, tau, and exactly one of eta / eta_matrix.
    Optional keys (defaults): T (1), delta_s (0), delta_e (0), steps ("auto"),
    coupling_prefactor (0.5), model ("collective"), snapshots (201).
    """
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    unknown = sorted(set(raw) - CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown config key: {unknown[0]!r}")
    missing = [key for key in REQUIRED_KEYS if key not in raw]
    if missing:
        raise ConfigError(f"missing required config key: {missing[0]!r}")
    if ("eta" in raw) == ("eta_matrix" in raw):
        raise ConfigError("exactly one of 'eta' and 'eta_matrix' must be given")

    def number(key, default=None):
        value = raw.get(key, default)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"config key {key!r} must be a number, got {value!r}")
        return float(value)

    n_spins = raw["L"]
    if not isinstance(n_spins, int) or isinstance(n_spins, bool):
        raise ConfigError(f"config key 'L' must be an integer, got {n_spins!r}")

    coupling = raw["eta"] if "eta" in raw else raw["eta_matrix"]
    if "eta" in raw:
        coupling = number("eta")

    steps = raw.get("steps", "auto")
    if steps == "auto":
        steps = None
    elif not isinstance(steps, int) or isinstance(steps, bool):
        raise ConfigError(f"config key 'steps' must be an integer or \"auto\", got {steps!r}")

    model = raw.get("model", "collective")
    try:
        kind = ModelKind(model)
    except ValueError:
        raise ConfigError(f"config key 'model' must be 'collective' or 'tensor', got {model!r}") from None

    snapshots = raw.get("snapshots", 201)
    if not isinstance(snapshots, int) or isinstance(snapshots, bool) or snapshots < 0:
        raise ConfigError(f"config key 'snapshots' must be a nonnegative integer, got {snapshots!r}")

    try:
        return RunConfig(
            pulse=PulseParams(omega0=number("omega0"), tau=number("tau"), t_window=number("T", 1.0)),
            n_spins=n_spins,
            coupling=coupling,
            delta_s=number("delta_s", 0.0),
            delta_e=number("delta_e", 0.0),
            coupling_prefactor=number("coupling_prefactor", 0.5),
            model_kind=kind,
            steps=steps,
            snapshot_count=snapshots,
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def _parse_grid(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 4 or parts[3] not in ("log", "lin"):
        raise argparse.ArgumentTypeError(
            f"grid must be start:stop:points:log|lin, got {text!r}"
        )
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc
    try:
        return log_grid(start, stop, points) if parts[3] == "log" else linear_grid(start, stop, points)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stirap-spinbath",
        description="STIRAP in contact with a spin bath: runs, sweeps, presets, validation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation from a JSON config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None, help="also write the key=value report here")

    p_sweep = sub.add_parser("sweep", help="sweep one parameter of a base config")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--axis", required=True, choices=["eta", "delta_e"])
    p_sweep.add_argument("--grid", required=True, type=_parse_grid, metavar="START:STOP:POINTS:log|lin")
    p_sweep.add_argument("--rescale-ref", type=int, default=None, metavar="L")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--workers", type=int, default=1)
    p_sweep.add_argument("--plot", action="store_true", help="also render a PNG next to the CSV")

    p_preset = sub.add_parser("preset", help="bundled sweep families with figure output")
    p_preset.add_argument("--name", required=True, choices=list(PRESET_NAMES))
    p_preset.add_argument("--out-dir", required=True)
    p_preset.add_argument("--workers", type=int, default=1)
    p_preset.add_argument("--points", type=int, default=25, help="points per coupling grid")
    p_preset.add_argument("--no-plot", action="store_true", help="skip the PNG report")

    p_val = sub.add_parser("validate", help="run the built-in oracle suite")
    p_val.add_argument("--level", choices=["quick", "full"], default="quick")

    return parser


def parse_args(argv=None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    from .propagator import evolve

    result = evolve(cfg)
    lines = [f"{name}={format(getattr(result, name), '.17g')}" for name in RESULT_FIELDS]
    report = "\n".join(lines)
    print(report)
    if args.out:
        Path(args.out).write_text(report + "\n", encoding="ascii")
    return 0


def _cmd_sweep(args) -> int:
    base = load_config(args.config)
    spec = SweepSpec(
        base=base,
        axis=args.axis,
        grid=args.grid,
        rescale_reference=args.rescale_ref,
        output_path=args.out,
    )
    rows = run_sweep(spec, workers=args.workers)
    write_csv(rows, args.out)
    if args.plot:
        from .plots import plot_curves

        png = Path(args.out).with_suffix(".png")
        plot_curves([(f"L={base.n_spins}", rows)], "p_g2", png)
        print(f"wrote {png}")
    failed = sum(row.status != "ok" for row in rows)
    print(f"wrote {args.out} ({len(rows)} rows, {failed} failed)")
    return 1 if failed else 0


def _cmd_preset(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = preset(args.name, points=args.points)
    failed = 0
    curves = []
    for spec in specs:
        rows = run_sweep(spec, workers=args.workers)
        path = out_dir / spec.output_path
        write_csv(rows, path)
        failed += sum(row.status != "ok" for row in rows)
        if args.name == "fig5":
            label = f"T delta_e = {spec.base.delta_e:g}"
        else:
            label = f"L={spec.base.n_spins}"
        curves.append((label, rows))
        print(f"wrote {path}")
    if not args.no_plot:
        from .plots import preset_figure

        png = out_dir / f"{args.name}.png"
        preset_figure(args.name, curves, png)
        print(f"wrote {png}")
    return 1 if failed else 0


def _cmd_validate(args) -> int:
    from .validation import run_validation

    results = run_validation(args.level)
    for check in results:
        print(f"{'PASS' if check.passed else 'FAIL'}  {check.name}: {check.detail}")
    n_failed = sum(not check.passed for check in results)
    print(f"{len(results) - n_failed}/{len(results)} checks passed")
    return 1 if n_failed else 0


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "preset":
            return _cmd_preset(args)
        return _cmd_validate(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except IntegrationError as exc:
        print(f"integration error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
