"""Command-line front end emitting the figure data as CSV files.

Subcommands
    dispersion   wavenumbers and modal energies vs mismatch (natural units)
    densities    |psi|^2 and relative population over a (delta, x) grid
    velocities   v_J, v_S(0), v_p(0) and the regime classification
    wavepacket   imaginary-barrier velocimetry sweep (TDSE runs)

Each command writes its CSVs plus a key=value manifest echoing every
resolved parameter and constant.  Data files are byte-deterministic
(12 significant digits, fixed row order, no timestamps); only the
manifest carries the wall-clock duration.

Exit codes: 0 success, 2 configuration error, 3 runtime invariant
violation (boundary contact, step underflow, barrier not cleared).
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .constants import HBAR, MEV
from .model import (
    ModelParams,
    buttiker_landauer_time,
    eq12_speed_ratio,
    modal_energies,
    relative_population,
    velocity_report,
    wavefunctions,
    wavenumbers,
)
from .oracles import BarrierSpec, transfer_matrix_transmission
from .tdse import (
    BarrierNotClearedError,
    BoundaryContactError,
    ConfigError,
    StepUnderflowError,
    default_sim_config,
    run_sweep,
)

EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_CONFIG_KEYS = ("mass", "energy", "barrier_width", "sigma", "dx",
                "rk4_tolerance")


def _fmt(value) -> str:
    """12-significant-digit formatting; round-trips doubles for diffs."""
    return f"{value:.12g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(c if isinstance(c, str) else _fmt(c)
                              for c in row) + "\n")


def _write_manifest(path: Path, command: str, params: dict, outputs,
                    duration: float):
    with open(path, "w", newline="\n") as fh:
        fh.write(f"command = {command}\n")
        fh.write(f"version = {__version__}\n")
        fh.write(f"constant_hbar = {HBAR!r}\n")
        fh.write(f"constant_mev = {MEV!r}\n")
        for key in sorted(params):
            fh.write(f"param_{key} = {params[key]}\n")
        for out in outputs:
            fh.write(f"output = {out.name}\n")
        fh.write(f"duration_s = {duration:.3f}\n")


def _delta_grid(args) -> np.ndarray:
    if not (np.isfinite(args.delta_min) and np.isfinite(args.delta_max)):
        raise ConfigError("delta range must be finite")
    if args.delta_steps < 2 or args.delta_min >= args.delta_max:
        raise ConfigError("need delta_min < delta_max and delta_steps >= 2")
    return np.linspace(args.delta_min, args.delta_max, args.delta_steps)


def cmd_dispersion(args) -> list[Path]:
    deltas = _delta_grid(args)
    rows = []
    for d in deltas:
        p = ModelParams.natural(d)
        kn = wavenumbers(p)
        en = modal_energies(p)
        rows.append((d, kn.branch.value,
                     kn.k1.real, kn.k1.imag, kn.k2.real, kn.k2.imag,
                     en.e1.real, en.e1.imag, en.e2.real, en.e2.imag))
    out = Path(args.out_dir) / "dispersion.csv"
    _write_csv(out, ["delta_over_hbar_j0", "branch",
                     "re_k1", "im_k1", "re_k2", "im_k2",
                     "re_e1", "im_e1", "re_e2", "im_e2"], rows)
    return [out]


def cmd_densities(args) -> list[Path]:
    deltas = _delta_grid(args)
    if args.x_max <= 0 or args.x_steps < 2:
        raise ConfigError("need x_max > 0 and x_steps >= 2")
    xs = np.linspace(0.0, args.x_max, args.x_steps)
    rows = []
    for d in deltas:
        p = ModelParams.natural(d)
        sample = wavefunctions(p, xs)
        pdown = relative_population(p, xs)
        for j, x in enumerate(xs):
            rows.append((d, x, sample.density_up[j], sample.density_down[j],
                         pdown[j]))
    out = Path(args.out_dir) / "densities.csv"
    _write_csv(out, ["delta_over_hbar_j0", "x_over_x0",
                     "density_up", "density_down", "p_down"], rows)
    return [out]


def cmd_velocities(args) -> list[Path]:
    deltas = _delta_grid(args)
    rows = []
    for d in deltas:
        p = ModelParams.natural(d)
        rep = velocity_report(p)
        cls = modal_energies(p).classification
        rows.append((d, rep.v_j, rep.v_s_at_0, rep.v_p_at_0, cls.value))
    out = Path(args.out_dir) / "velocities.csv"
    _write_csv(out, ["delta_over_hbar_j0", "v_j", "v_s_at_0", "v_p_at_0",
                     "classification"], rows)
    return [out]


def _load_config(path: str) -> dict:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, _, val = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} "
                              f"(allowed: {', '.join(_CONFIG_KEYS)})")
        try:
            values[key] = float(val.strip())
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad number {val.strip()!r}") \
                from exc
    return values


def cmd_wavepacket(args) -> list[Path]:
    overrides = _load_config(args.config) if args.config else {}
    try:
        fracs = [float(f) for f in args.v0i_over_e.split(",") if f.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --v0i-over-e list {args.v0i_over_e!r}") from exc
    if not fracs:
        raise ConfigError("--v0i-over-e list is empty")
    cfg = default_sim_config(**overrides)

    # sweep magnitudes |V0i|/E; the runs themselves use the loss sign
    loss_fracs = [-abs(f) for f in fracs]
    sweep, trajs = run_sweep(cfg, loss_fracs)
    if args.error_bars:
        half = replace(cfg, dx=cfg.dx / 2.0)
        sweep_h, _ = run_sweep(half, loss_fracs)
        v_err = 0.5 * np.abs(sweep.v_over_v0 - sweep_h.v_over_v0)
        t_err = 0.5 * np.abs(sweep.transmission - sweep_h.transmission)
    else:
        v_err = t_err = np.zeros_like(sweep.v_over_v0)

    rows = []
    for i, f in enumerate(sweep.v0i_over_e):
        v = sweep.v_over_v0[i] * cfg.v0
        spec = BarrierSpec(mass=cfg.mass, energy=cfg.energy,
                           potential=1j * f * cfg.energy,
                           width=cfg.barrier_width)
        _, _, t_ref = transfer_matrix_transmission(spec)
        rows.append((f, sweep.delta_x[i],
                     sweep.v_over_v0[i], v_err[i],
                     1.0 / sweep.v_over_v0[i],
                     1.0 / eq12_speed_ratio(f),
                     sweep.transmission[i], t_err[i], t_ref,
                     buttiker_landauer_time(cfg.barrier_width, v)))
    out_dir = Path(args.out_dir)
    sweep_csv = out_dir / "wavepacket_sweep.csv"
    _write_csv(sweep_csv,
               ["v0i_over_e", "delta_x_m",
                "v_over_v0", "v_over_v0_err",
                "v0_over_v", "eq12_v0_over_v",
                "transmission", "transmission_err", "tm_transmission",
                "bl_time_s"], rows)

    traj_rows = []
    for f in sweep.v0i_over_e:
        tr = trajs[f]
        for j in range(len(tr.times)):
            traj_rows.append((f, tr.times[j], tr.com[j], tr.norm[j],
                              tr.width[j]))
    traj_csv = out_dir / "wavepacket_trajectories.csv"
    _write_csv(traj_csv, ["v0i_over_e", "time_s", "com_m", "norm",
                          "width_m"], traj_rows)

    args._extra_params = {
        "broadening_pct": _fmt(sweep.broadening_pct),
        **{k: _fmt(getattr(cfg, k)) for k in
           ("mass", "energy", "barrier_width", "sigma", "grid_extent", "dx",
            "x_center", "total_time", "rk4_tolerance")},
    }
    return [sweep_csv, traj_csv]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="waveclock",
        description="Coupled-waveguide velocimetry and imaginary-barrier "
                    "wave-packet simulation (CSV emitters)")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out-dir", default=".",
                       help="output directory (created if missing)")

    def add_delta(p):
        p.add_argument("--delta-min", type=float, default=-5.0,
                       help="lower end of delta/(hbar J0) range")
        p.add_argument("--delta-max", type=float, default=5.0)
        p.add_argument("--delta-steps", type=int, default=500)

    p = sub.add_parser("dispersion",
                       help="wavenumbers and modal energies vs mismatch")
    add_common(p)
    add_delta(p)
    p.set_defaults(func=cmd_dispersion)

    p = sub.add_parser("densities",
                       help="densities and relative population on a grid")
    add_common(p)
    add_delta(p)
    p.add_argument("--x-max", type=float, default=10.0,
                   help="upper end of x/x0 range (from 0)")
    p.add_argument("--x-steps", type=int, default=500)
    p.set_defaults(func=cmd_densities)

    p = sub.add_parser("velocities", help="v_J, v_S(0), v_p(0) vs mismatch")
    add_common(p)
    add_delta(p)
    p.set_defaults(func=cmd_velocities)

    p = sub.add_parser("wavepacket",
                       help="imaginary-barrier TDSE sweep (slow)")
    add_common(p)
    p.add_argument("--config", default=None,
                   help="flat key=value file overriding physical parameters")
    p.add_argument("--v0i-over-e", default="0.25,0.5,1.0,1.5,2.0",
                   help="comma list of |V0i|/E sweep values (loss sign "
                        "applied internally)")
    p.add_argument("--error-bars", action="store_true",
                   help="re-run at dx/2 and report half the spread")
    p.set_defaults(func=cmd_wavepacket)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.perf_counter()
    try:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        outputs = args.func(args)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"waveclock: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (BoundaryContactError, StepUnderflowError,
            BarrierNotClearedError) as exc:
        print(f"waveclock: runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    duration = time.perf_counter() - t0
    params = {key.replace("_", "-"): val for key, val in vars(args).items()
              if key not in ("func", "command", "_extra_params")
              and val is not None}
    params.update(getattr(args, "_extra_params", {}))
    manifest = Path(args.out_dir) / f"{args.command}_manifest.txt"
    _write_manifest(manifest, args.command, params, outputs, duration)
    return 0


if __name__ == "__main__":
    sys.exit(main())
