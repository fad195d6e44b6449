#!/usr/bin/env python3
"""Measure the L^q norm scaling of the fundamental kernels.

Applies the Z and Y propagators to an exact grid delta over a time ladder,
fits log-log slopes of ||kernel(t)||_q, and compares them to the predicted
exponents -(N alpha / 2s)(1 - 1/q) and -(1 - alpha + (N alpha / 2s)(1 - 1/q)).
"""
import argparse
import sys

import numpy as np

from fracsim import GridSpec, apply_propagator, lq_norm
from fracsim.spectral import Field


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=0.4)
    ap.add_argument("--q", type=float, nargs="+", default=[1.0, 2.0])
    ap.add_argument("--points", type=int, default=32768)
    ap.add_argument("--half-width", type=float, default=100.0)
    ap.add_argument("--t-min", type=float, default=0.5)
    ap.add_argument("--t-max", type=float, default=8.0)
    ap.add_argument("--t-count", type=int, default=9)
    ap.add_argument("--out", default=None, help="CSV path (default stdout)")
    args = ap.parse_args()

    grid = GridSpec(dim=1, points=args.points, half_width=args.half_width)
    values = np.zeros(grid.shape)
    values[grid.points // 2] = 1.0 / grid.cell_volume
    delta = Field(grid, values)

    ts = np.geomspace(args.t_min, args.t_max, args.t_count)
    scale = args.alpha / (2.0 * args.s)  # N = 1
    lines = ["kind,q,t,norm,predicted_slope,fitted_slope"]
    for kind in ("Z", "Y"):
        for q in args.q:
            norms = np.array(
                [lq_norm(apply_propagator(kind, float(t), delta,
                                          args.alpha, args.s), q)
                 for t in ts]
            )
            decay = scale * (1.0 - 1.0 / q)
            predicted = -decay if kind == "Z" else -(1.0 - args.alpha + decay)
            fitted = float(np.polyfit(np.log(ts), np.log(norms), 1)[0])
            for t, n in zip(ts, norms):
                lines.append(
                    f"{kind},{q!r},{float(t)!r},{float(n)!r},"
                    f"{predicted!r},{fitted!r}"
                )
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
