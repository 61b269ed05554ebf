"""Monitor violations versus rate-filter time constant and attitude gate.

Prints one row per (preset, tau_f) with the count of Lyapunov-monitor
violations after the attitude transient for each gate width, plus the
largest per-step control rates.
"""
import argparse
import dataclasses
import math

from tailsitter.cli import simulate
from tailsitter.config import PRESETS, load_preset
from tailsitter.sim import lyapunov_monitor


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--tau-f", type=float, nargs="+", default=[0.05, 0.1, 0.15, 0.2, 0.3])
    ap.add_argument("--gates-deg", type=float, nargs="+", default=[0.1, 0.25, 0.5, 1.0, 5.0])
    ap.add_argument("--t-end", type=float, default=60.0)
    args = ap.parse_args(argv)

    head = " ".join(f"g={g:<5g}" for g in args.gates_deg)
    print(f"{'preset':16s} {'tau_f':>6s} {head}  {'dT/dt':>8s} {'dtau/dt':>8s}")
    for name in PRESETS:
        base = load_preset(name)
        for tf in args.tau_f:
            cfg = dataclasses.replace(
                base,
                controller=dataclasses.replace(base.controller, tau_f=tf),
                sim=dataclasses.replace(base.sim, t_end=args.t_end))
            records, summary = simulate(cfg)
            t_tr = summary.transient_end
            counts = []
            for g in args.gates_deg:
                rep = lyapunov_monitor(records, math.radians(g))
                counts.append(sum(1 for t in rep.times if t_tr is not None and t > t_tr))
            cells = " ".join(f"{c:<7d}" for c in counts)
            print(f"{name:16s} {tf:6.3f} {cells}  {summary.max_dT_rate:8.1f} {summary.max_dtau_rate:8.1f}")


if __name__ == "__main__":
    main()
