#!/usr/bin/env python3
"""Classify runs across a ladder of nonlinearity powers p.

Holds the canonical parameters (alpha=0.5, s=0.4, sigma=-0.25, N=1) fixed,
sweeps p, and writes one classified row per p as CSV. The forcing amplitude
controls where the finite-horizon blow-up/global transition sits; 0.4 places
it near the theoretical threshold p* = 7/3.
"""
import argparse
import sys

from fracsim import (
    ClassifyThresholds,
    DataSpec,
    GridSpec,
    SweepConfig,
    rows_to_csv,
    run_sweep,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=float, nargs="+",
                    default=[1.5, 1.8, 2.0, 2.2, 2.4, 2.7, 3.0, 4.0])
    ap.add_argument("--amplitude", type=float, default=0.4,
                    help="Gaussian forcing amplitude (u0 is zero)")
    ap.add_argument("--t-end", type=float, default=50.0)
    ap.add_argument("--steps", type=int, default=600)
    ap.add_argument("--points", type=int, default=1024)
    ap.add_argument("--half-width", type=float, default=50.0)
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args()

    config = SweepConfig(
        alpha=0.5,
        s=0.4,
        sigma=-0.25,
        dim=1,
        p_values=tuple(sorted(args.p)),
        u0=DataSpec(kind="zero"),
        w=DataSpec(kind="gaussian", amplitude=args.amplitude, width=1.0),
        grid=GridSpec(dim=1, points=args.points, half_width=args.half_width),
        t_end=args.t_end,
        steps=args.steps,
        grading=2.0,
        thresholds=ClassifyThresholds(u_max=1e8, ratio_max=10.0,
                                      t_end=args.t_end, beta=0.09375),
        q_report=4.0,
    )
    csv_text = rows_to_csv(run_sweep(config))
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(csv_text)
    else:
        sys.stdout.write(csv_text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
