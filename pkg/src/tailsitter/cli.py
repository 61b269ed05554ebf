"""Batch front end.

    sim run [CONFIG ...] [--preset NAME] [--out DIR] [--full-rate] [--sweep]
    sim polar check CSV
    sim polar optimum CSV [--lo DEG] [--hi DEG]

Exit codes: 0 pass, 1 acceptance failure, 2 config error, 3 runtime fault.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .aero import PolarError, load_polar_csv, optimal_aoa
from .config import PRESETS, ConfigError, RunConfig, load_config
from .sim import RunSummary, SimRecord, SimulationAbort, run

log = logging.getLogger("tailsitter")

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2, 3

CSV_COLUMNS = ("t", "u", "w", "theta", "q", "u_d", "w_d", "alpha_d", "theta_d", "q_d",
               "T", "tau", "T1", "T2", "eps", "L", "D", "alpha", "V", "V_lyap", "flags")
ATTITUDE_COLUMNS = ("t", "theta", "theta_d", "alpha", "alpha_d", "tau")
VELOCITY_COLUMNS = ("t", "u", "u_d", "w", "w_d", "T")


def _fmt(v) -> str:
    return str(v) if isinstance(v, int) else repr(float(v))


def records_to_csv(records, columns=CSV_COLUMNS, decimation: int = 1) -> str:
    lines = [",".join(columns)]
    for rec in records[::decimation]:
        lines.append(",".join(_fmt(getattr(rec, c)) for c in columns))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class Check:
    name: str
    ok: bool
    detail: str


def _band(name, value, band, scale=1.0, unit=""):
    lo, hi = band
    v = value * scale
    return Check(name, lo <= v <= hi, f"{v:.6g}{unit} in [{lo:g}, {hi:g}]{unit}")


def evaluate(summary: RunSummary, cfg: RunConfig) -> list[Check]:
    """Pass/fail checks behind the exit status."""
    k = cfg.check
    checks = [
        Check("attitude transient ends", summary.n_records == 0 or summary.transient_end is not None,
              f"|theta - theta_d| < {cfg.monitor.transient_band_deg:g} deg held from t={summary.transient_end}"),
        Check("lyapunov monitor after transient", summary.violations_after_transient == 0,
              f"{summary.violations_after_transient} violations (gate {cfg.monitor.attitude_threshold_deg:g} deg)"),
    ]
    if summary.n_records == 0:
        return checks
    if math.isfinite(k.u_error_max):
        checks.append(Check("final |u - u_d|", summary.final_u_error < k.u_error_max,
                            f"{summary.final_u_error:.6g} < {k.u_error_max:g}"))
    if math.isfinite(k.w_error_max):
        checks.append(Check("final |w - w_d|", summary.final_w_error < k.w_error_max,
                            f"{summary.final_w_error:.6g} < {k.w_error_max:g}"))
    if math.isfinite(k.theta_error_deg_max):
        err = math.degrees(summary.final_theta_error)
        checks.append(Check("final |theta - theta_d|", err < k.theta_error_deg_max,
                            f"{err:.6g} deg < {k.theta_error_deg_max:g} deg"))
    if math.isfinite(k.speed_max):
        checks.append(Check("final max(|u|, |w|)", summary.final_speed < k.speed_max,
                            f"{summary.final_speed:.6g} < {k.speed_max:g}"))
    if k.alpha_deg:
        checks.append(_band("final alpha", summary.final_alpha, k.alpha_deg, 180 / math.pi, " deg"))
    if k.theta_deg:
        checks.append(_band("final theta", summary.final_theta, k.theta_deg, 180 / math.pi, " deg"))
    if k.T_over_g:
        checks.append(_band("final T / g", summary.final_T, k.T_over_g, 1 / cfg.physical.g))
    checks.append(Check("|eps| <= 1", summary.max_abs_eps <= 1.0, f"max |eps| = {summary.max_abs_eps:.6g}"))
    return checks


def summary_text(summary: RunSummary, checks: list[Check]) -> str:
    lines = summary.lines() + [""]
    lines += [f"[{'PASS' if c.ok else 'FAIL'}] {c.name}: {c.detail}" for c in checks]
    lines.append(f"result = {'PASS' if all(c.ok for c in checks) else 'FAIL'}")
    return "\n".join(lines) + "\n"


def _write_atomic(files: dict[Path, str]):
    """Write every file to a temp name first, then rename them all into place."""
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
            staged.append((tmp, path))
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    except BaseException:
        for tmp, _ in staged:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def resolved_config_text(cfg: RunConfig) -> str:
    polar = cfg.aero.polar
    if polar not in ("default", "analytic"):
        p = Path(polar)
        if not p.is_absolute() and cfg.base_dir is not None:
            p = cfg.base_dir / p
        cfg = RunConfig(**{**cfg.__dict__})
        cfg.aero = type(cfg.aero)(**{**cfg.aero.__dict__, "polar": str(p.resolve())})
    return cfg.dumps()


def simulate(cfg: RunConfig) -> tuple[list[SimRecord], RunSummary]:
    aero = cfg.aero_model()
    provider = aero.provider
    if hasattr(provider, "covers"):
        lo, hi = cfg.aero.coverage_deg
        if not provider.covers(lo, hi):
            a0, a1 = provider.bounds_deg
            raise PolarError(f"polar covers [{a0:g}, {a1:g}] deg but aero.coverage_deg requires [{lo:g}, {hi:g}]")
    return run(cfg.sim_config(), cfg.controller_obj(aero), cfg.profile())


def run_scenario(cfg: RunConfig, out_dir: str | Path, full_rate: bool = False) -> int:
    """Simulate ``cfg`` and write its artifacts under ``out_dir``; returns the exit code."""
    out = Path(out_dir)
    try:
        records, summary = simulate(cfg)
    except PolarError as exc:
        log.error("polar error: %s", exc)
        return EXIT_CONFIG
    except SimulationAbort as exc:
        log.error("simulation aborted: %s (%d good records)", exc, len(exc.records))
        return EXIT_RUNTIME
    checks = evaluate(summary, cfg)
    dec = 1 if full_rate else cfg.output.decimation
    files = {
        out / "timeseries.csv": records_to_csv(records, CSV_COLUMNS, dec),
        out / "summary.txt": summary_text(summary, checks),
        out / "resolved_config.toml": resolved_config_text(cfg),
    }
    if cfg.output.plots:
        files[out / "plots" / "attitude.csv"] = records_to_csv(records, ATTITUDE_COLUMNS, dec)
        files[out / "plots" / "velocity.csv"] = records_to_csv(records, VELOCITY_COLUMNS, dec)
    try:
        _write_atomic(files)
    except OSError as exc:
        log.error("cannot write outputs to %s: %s", out, exc)
        return EXIT_RUNTIME
    for c in checks:
        log.info("[%s] %s: %s", "PASS" if c.ok else "FAIL", c.name, c.detail)
    return EXIT_PASS if all(c.ok for c in checks) else EXIT_FAIL


def _run_one(config_path, preset, out_dir, full_rate) -> int:
    try:
        cfg = load_config(config_path, preset=preset)
    except (ConfigError, PolarError) as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    return run_scenario(cfg, out_dir, full_rate)


def cmd_run(args) -> int:
    configs = args.config or [None]
    if configs == [None] and args.preset is None:
        log.error("config error: give a config file or --preset")
        return EXIT_CONFIG
    out = Path(args.out)
    if len(configs) == 1:
        return _run_one(configs[0], args.preset, out, args.full_rate)
    outs = [out / Path(c).stem for c in configs]
    if args.sweep:
        with ProcessPoolExecutor() as pool:
            codes = list(pool.map(_run_one, configs, [args.preset] * len(configs), outs,
                                  [args.full_rate] * len(configs)))
    else:
        codes = [_run_one(c, args.preset, o, args.full_rate) for c, o in zip(configs, outs)]
    return max(codes)


def cmd_polar_check(args) -> int:
    try:
        table = load_polar_csv(args.csv)
    except (PolarError, OSError) as exc:
        print(f"invalid: {exc}")
        return EXIT_CONFIG
    lo, hi = table.bounds_deg
    print(f"ok: {len(table.alpha_deg)} rows, alpha in [{lo:g}, {hi:g}] deg")
    if not table.covers(args.lo, args.hi):
        print(f"warning: does not cover [{args.lo:g}, {args.hi:g}] deg needed for transition runs")
    return EXIT_PASS


def cmd_polar_optimum(args) -> int:
    try:
        table = load_polar_csv(args.csv)
        lo, hi = table.bounds_deg
        a = optimal_aoa(table, (math.radians(max(lo, args.lo)), math.radians(min(hi, args.hi))),
                        args.resolution)
    except (PolarError, ValueError, OSError) as exc:
        print(f"error: {exc}")
        return EXIT_CONFIG
    cl, cd = table.coefficients(a)
    print(f"optimal alpha = {math.degrees(a):.4f} deg (C_L = {cl:.6g}, C_D = {cd:.6g}, L/D = {cl / cd:.6g})")
    return EXIT_PASS


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sim", description="Tail-sitter transition simulator")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one or more configs")
    p_run.add_argument("config", nargs="*", help="TOML config file(s); layered over --preset if given")
    p_run.add_argument("--preset", choices=PRESETS)
    p_run.add_argument("--out", default="out", help="output directory (default: ./out)")
    p_run.add_argument("--full-rate", action="store_true", help="log every step (no decimation)")
    p_run.add_argument("--sweep", action="store_true", help="run several configs in parallel")
    p_run.add_argument("--seedless-deterministic", action="store_true",
                       help="accepted for compatibility; runs are always deterministic")
    p_run.set_defaults(func=cmd_run)

    p_polar = sub.add_parser("polar", help="polar CSV utilities")
    psub = p_polar.add_subparsers(dest="polar_command", required=True)
    p_check = psub.add_parser("check", help="validate a polar CSV")
    p_check.add_argument("csv")
    p_check.add_argument("--lo", type=float, default=-10.0, help="required lower alpha coverage (deg)")
    p_check.add_argument("--hi", type=float, default=90.0, help="required upper alpha coverage (deg)")
    p_check.set_defaults(func=cmd_polar_check)
    p_opt = psub.add_parser("optimum", help="print the best-L/D angle of attack")
    p_opt.add_argument("csv")
    p_opt.add_argument("--lo", type=float, default=0.0, help="search lower bound (deg)")
    p_opt.add_argument("--hi", type=float, default=30.0, help="search upper bound (deg)")
    p_opt.add_argument("--resolution", type=float, default=0.01, help="grid step (deg)")
    p_opt.set_defaults(func=cmd_polar_optimum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
