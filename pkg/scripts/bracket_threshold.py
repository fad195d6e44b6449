#!/usr/bin/env python3
"""Bisect the empirical blow-up/global threshold in p and compare it to
the closed-form prediction p* = (N alpha - 2 s sigma)/(N alpha - 2 s (alpha + sigma)).
"""
import argparse
import json
import sys

from fracsim import (
    BracketingError,
    ClassifyThresholds,
    DataSpec,
    GridSpec,
    SweepConfig,
    bracket_pstar,
    p_star_exponent,
)


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=0.4)
    ap.add_argument("--sigma", type=float, default=-0.25)
    ap.add_argument("--amplitude", type=float, default=0.4)
    ap.add_argument("--p-lo", type=float, default=1.8)
    ap.add_argument("--p-hi", type=float, default=3.0)
    ap.add_argument("--tol-p", type=float, default=0.2)
    ap.add_argument("--t-end", type=float, default=50.0)
    ap.add_argument("--steps", type=int, default=600)
    args = ap.parse_args()

    config = SweepConfig(
        alpha=args.alpha,
        s=args.s,
        sigma=args.sigma,
        dim=1,
        p_values=(args.p_lo, args.p_hi),
        u0=DataSpec(kind="zero"),
        w=DataSpec(kind="gaussian", amplitude=args.amplitude, width=1.0),
        grid=GridSpec(dim=1, points=1024, half_width=50.0),
        t_end=args.t_end,
        steps=args.steps,
        grading=2.0,
        thresholds=ClassifyThresholds(u_max=1e8, ratio_max=10.0,
                                      t_end=args.t_end, beta=0.09375),
        q_report=4.0,
    )
    predicted = p_star_exponent(args.alpha, args.s, args.sigma, 1)
    try:
        result = bracket_pstar(config, args.tol_p)
    except BracketingError as exc:
        print(f"bracketing failed: {exc}", file=sys.stderr)
        return 2
    payload = {
        "p_lo": result.p_lo,
        "p_hi": result.p_hi,
        "midpoint": result.midpoint,
        "predicted_p_star": predicted,
        "undetermined": list(result.undetermined),
        "evaluations": [
            {"p": r.p, "classification": r.classification,
             "blowup_time_est": r.blowup_time_est, "note": r.note}
            for r in result.rows
        ],
    }
    print(json.dumps(payload, indent=2))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
