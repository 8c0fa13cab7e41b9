"""Command-line front end: one subcommand per experiment plus selftest.

Each experiment run writes one CSV (or JSON) result table per output table
and a sidecar JSON echoing the full configuration and the library version.
Floats are printed with 12 significant digits; runs are byte-for-byte
deterministic for a given config and seed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__, _kernels, experiments, pulses
from .config import (
    ConfigError,
    ExperimentConfig,
    EXPERIMENTS,
    emit_config,
    mhz_to_rad_per_us,
    ns_to_us,
    parse_config,
)
from .model import DriveParams, TwoQubitParams
from .selftest import run_selftest

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2

CONSERVATION_ATOL = 1e-8


class NumericalError(RuntimeError):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit code 1)."""

    def error(self, message):
        raise ConfigError([message])


def fmt_float(x: float) -> str:
    """Shortest representation capped at 12 significant digits."""
    s = repr(float(x))
    digits = sum(c.isdigit() for c in s.split("e")[0])
    if digits <= 12:
        return s
    return f"{x:.12g}"


def _write_table(path: Path, header: list[str], rows: list[tuple], fmt: str,
                 comments: list[str] | None = None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        for line in comments or []:
            buf.write(f"# {line}\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt_float(v) for v in row])
        path.write_text(buf.getvalue())
    else:
        payload = {"header": header, "rows": [[float(v) for v in row] for row in rows]}
        if comments:
            payload["comments"] = list(comments)
        _write_json(path, payload)


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")


def _check_conservation(result: experiments.SweepResult) -> None:
    for group in result.population_groups():
        total = sum(result.columns[name] for name in group)
        worst = float(np.max(np.abs(total - 1.0)))
        if worst > CONSERVATION_ATOL:
            raise NumericalError(
                f"population columns {group} sum to 1 +- {worst:.3e} (> {CONSERVATION_ATOL:.1e})"
            )


def _sidecar(out: Path, config: ExperimentConfig, extra: dict | None = None) -> None:
    payload = {
        "version": __version__,
        "config": emit_config(config),
        "kind": config.kind,
        "seed": config.seed,
    }
    if extra:
        payload.update(extra)
    _write_json(out, payload)


def _table_ext(fmt: str) -> str:
    return "csv" if fmt == "csv" else "json"


def _run_cci_dynamics(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    p = config.params
    drive = DriveParams.symmetric(mhz_to_rad_per_us(p["omega_mhz"]), p["phi"])
    t_ns = config.grids["t_ns"].values()
    result = experiments.run_cci_dynamics(drive, ns_to_us(t_ns), mode=p["mode"])
    _check_conservation(result)
    rows = [
        (t, row[1], row[2], row[3])
        for t, row in zip(t_ns, result.rows())
    ]
    table = out_dir / f"{config.output.basename}.{_table_ext(config.output.format)}"
    _write_table(table, ["t_ns", "P1", "P2", "P3"], rows, config.output.format)
    side = out_dir / f"{config.output.basename}_config.json"
    _sidecar(side, config, {"gauge_phi": result.metadata["gauge_phi"], "mode": p["mode"]})
    return [table, side]


def _run_spectrum(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    p = config.params
    omega = mhz_to_rad_per_us(p["omega_mhz"])
    phi = config.grids["phi"].values()
    if p["dt_ns"] > 0:
        t_grid = np.arange(p["samples"]) * ns_to_us(p["dt_ns"])
    else:
        t_grid = experiments.default_spectrum_grid(omega, n=p["samples"])
    detuning = None
    deltas = (p["delta1_mhz"], p["delta2_mhz"], p["delta3_mhz"])
    if any(d != 0.0 for d in deltas):
        detuning = tuple(mhz_to_rad_per_us(d) for d in deltas)
    result = experiments.run_spectrum(omega, phi, t_grid, detuning=detuning)
    rows = list(result.rows())
    table = out_dir / f"{config.output.basename}.{_table_ext(config.output.format)}"
    _write_table(table, ["phi", "freq_mhz", "magnitude"], rows, config.output.format)
    side = out_dir / f"{config.output.basename}_config.json"
    _sidecar(side, config, {
        "bin_width_mhz": result.metadata["bin_width"],
        "worst_peak_offset_bins": result.metadata["worst_peak_offset_bins"],
        "peaks_mhz": result.metadata["peaks"],
        "analytic_gaps_mhz": result.metadata["analytic_gaps"],
    })
    return [table, side]


def _run_chiral(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    p = config.params
    schedule = pulses.PulseSchedule.from_area(
        1.0, tau=1.0, phi=p["phi"],
        t_start=-p["window_tau"], t_end=p["window_tau"],
        dt=1.0 / p["steps_per_tau"],
    )
    a_grid = config.grids["a"].values()
    result = experiments.run_chiral_separation(
        schedule, a_grid, record_every=p["record_every"],
    )
    # output contract puts the time axis in the first column
    rows = [(t, a, l, r) for a, t, l, r in result.rows()]
    table = out_dir / f"{config.output.basename}.{_table_ext(config.output.format)}"
    _write_table(
        table, ["t_over_tau", "A", "P3_L", "P3_R"], rows, config.output.format,
        comments=[f"A_star = {fmt_float(result.metadata['a_star'])}"],
    )
    side = out_dir / f"{config.output.basename}_config.json"
    _sidecar(side, config, {k: result.metadata[k] for k in (
        "a_star", "contrast_at_a_star", "p3_left_at_a_star", "p3_right_at_a_star")})
    return [table, side]


def _run_entangle(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    p = config.params
    q = TwoQubitParams(mhz_to_rad_per_us(p["j_mhz"]), p["phi"])
    t_ns = config.grids["t_ns"].values()
    run = experiments.run_entanglement(q, ns_to_us(t_ns), psi0=p["psi0"])
    _check_conservation(run.sweep)
    rows = [
        (t,) + row[1:]
        for t, row in zip(t_ns, run.sweep.rows())
    ]
    table = out_dir / f"{config.output.basename}.{_table_ext(config.output.format)}"
    _write_table(table, ["t_ns", "P_gg", "P_ge", "P_eg", "P_ee"], rows, config.output.format)
    state = out_dir / f"{config.output.basename}_state.json"
    _write_json(state, {
        "t_entangle_ns": run.t_entangle * 1e3,
        "rho_real": [[float(v) for v in row] for row in run.rho.real],
        "rho_imag": [[float(v) for v in row] for row in run.rho.imag],
        "fidelity": run.fidelity,
        "target": run.target_label,
        "gate_distance": run.gate_distance,
        "basis": ["gg", "ge", "eg", "ee"],
    })
    side = out_dir / f"{config.output.basename}_config.json"
    _sidecar(side, config, {"t_entangle_ns": run.t_entangle * 1e3, "fidelity": run.fidelity})
    return [table, state, side]


def _run_coupling(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    p = config.params
    eff = experiments.effective_coupling(
        mhz_to_rad_per_us(p["g_a_mhz"]), mhz_to_rad_per_us(p["g_b_mhz"]),
        mhz_to_rad_per_us(p["delta_a_mhz"]), mhz_to_rad_per_us(p["delta_b_mhz"]),
    )
    to_mhz = 1.0 / (2.0 * np.pi)
    rows = [(
        p["g_a_mhz"], p["g_b_mhz"], p["delta_a_mhz"], p["delta_b_mhz"],
        eff.coupling * to_mhz, eff.shift_a * to_mhz, eff.shift_b * to_mhz,
    )]
    table = out_dir / f"{config.output.basename}.{_table_ext(config.output.format)}"
    _write_table(
        table,
        ["g_a_mhz", "g_b_mhz", "delta_a_mhz", "delta_b_mhz", "j_mhz", "shift_a_mhz", "shift_b_mhz"],
        rows, config.output.format,
    )
    side = out_dir / f"{config.output.basename}_config.json"
    _sidecar(side, config, {"j_mhz": eff.coupling * to_mhz})
    return [table, side]


def _run_fit(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    p = config.params
    src = Path(p["input_csv"])
    if not src.exists():
        raise ConfigError([f"experiment.input_csv: file not found: {src}"])
    with src.open() as fh:
        reader = csv.DictReader(row for row in fh if not row.startswith("#"))
        try:
            data = [(float(r[p["t_column"]]), float(r[p["p_column"]])) for r in reader]
        except (KeyError, TypeError):
            raise ConfigError([
                f"experiment.t_column/p_column: columns {p['t_column']!r}, "
                f"{p['p_column']!r} not found in {src}"
            ]) from None
    t = ns_to_us(np.array([d[0] for d in data]))
    series = np.array([d[1] for d in data])
    amp, j_fit, offset = experiments.fit_exchange(t, series)
    rows = [(amp, j_fit, j_fit / (2.0 * np.pi), offset)]
    table = out_dir / f"{config.output.basename}.{_table_ext(config.output.format)}"
    _write_table(table, ["amplitude", "j_rad_per_us", "j_mhz", "offset"], rows, config.output.format)
    side = out_dir / f"{config.output.basename}_config.json"
    _sidecar(side, config, {"j_mhz": j_fit / (2.0 * np.pi)})
    return [table, side]


_RUNNERS = {
    "cci-dynamics": _run_cci_dynamics,
    "spectrum": _run_spectrum,
    "chiral": _run_chiral,
    "entangle": _run_entangle,
    "coupling": _run_coupling,
    "fit": _run_fit,
}


def run(config: ExperimentConfig, out_dir: Path) -> list[Path]:
    """Execute a validated config, returning the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[config.kind](config, out_dir)


def _set_threads(n: int | None) -> None:
    if n is None or not _kernels.HAS_NUMBA:
        return
    import numba

    numba.set_num_threads(max(1, min(n, numba.config.NUMBA_NUM_THREADS)))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ccisim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ccisim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in EXPERIMENTS:
        p = sub.add_parser(kind, help=f"run the {kind} experiment")
        p.add_argument("--config", required=True, help="path to the INI config file")
        p.add_argument("--out", default=".", help="output directory (default: cwd)")
        p.add_argument("--threads", type=int, default=None, help="worker threads for the scan kernels")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p = sub.add_parser("selftest", help="run the numerical invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _set_threads(args.threads)
        if args.command == "selftest":
            return EXIT_OK if run_selftest(seed=args.seed) else EXIT_NUMERICAL
        cfg_path = Path(args.config)
        if not cfg_path.exists():
            raise ConfigError([f"config file not found: {cfg_path}"])
        config = parse_config(cfg_path.read_text(), kind=args.command)
        if args.seed is not None:
            config = ExperimentConfig(
                kind=config.kind, params=config.params, grids=config.grids,
                output=config.output, seed=args.seed,
            )
        paths = run(config, Path(args.out))
    except ConfigError as exc:
        for msg in exc.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, pulses.ConvergenceError, ArithmeticError, OSError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        # invalid parameter combinations surface as ValueError from the
        # experiment layer (Nyquist margin, flat fit input, ...)
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
