"""Run both shipped presets and write their artifacts under out/<preset>/."""
import argparse
import sys
import time
from pathlib import Path

from tailsitter.cli import run_scenario
from tailsitter.config import PRESETS, load_preset


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="out")
    ap.add_argument("--full-rate", action="store_true")
    args = ap.parse_args(argv)
    worst = 0
    for name in PRESETS:
        t0 = time.perf_counter()
        code = run_scenario(load_preset(name), Path(args.out) / name, args.full_rate)
        print(f"{name:16s} exit={code} ({time.perf_counter() - t0:.1f}s)")
        print((Path(args.out) / name / "summary.txt").read_text())
        worst = max(worst, code)
    return worst


if __name__ == "__main__":
    sys.exit(main())
