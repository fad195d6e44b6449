"""Command-line surface.

Subcommands: exponents, kernel, simulate, sweep, bracket, hypotheses,
selftest.  Exit codes: 0 success, 1 usage error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .criticality import critical_exponents, local_average_hypotheses
from .errors import BracketingError, DomainError, NumericalError, PreconditionError
from .harness import bracket_pstar, config_from_json, rows_to_csv, run_sweep
from .kernels import apply_propagator, profile
from .solver import ModelParams, integrate
from .spectral import GridSpec, gaussian_field, lq_norm

USAGE_ERROR = 1
NUMERICAL_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _json_default(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "__dataclass_fields__"):
        from dataclasses import asdict

        return asdict(obj)
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit_json(payload, out_path: str | None) -> None:
    text = json.dumps(payload, indent=2, default=_json_default, allow_nan=False)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_text(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_exponents(args) -> int:
    params = ModelParams(
        alpha=args.alpha, s=args.s, sigma=args.sigma, p=args.p, dim=args.N
    )
    rep = critical_exponents(params, q=args.q)
    from dataclasses import asdict

    payload = asdict(rep)
    payload = json.loads(
        json.dumps(payload, default=_json_default, allow_nan=False)
    )
    _emit_json(payload, args.out)
    return 0


def _cmd_kernel(args) -> int:
    if args.mode == "profile":
        radii = np.geomspace(args.r_min, args.r_max, args.points)
        prof = profile(args.kind, args.alpha, args.s, args.dim, radii)
        lines = ["r,value"]
        lines += [f"{float(r)!r},{float(v)!r}" for r, v in zip(prof.radii, prof.values)]
        _emit_text("\n".join(lines) + "\n", args.out)
        return 0
    # norms mode: ||Z(t)||_q (or Y) on the default grid for a time ladder,
    # with the predicted and fitted log-log slopes.
    kind = "Z" if args.kind == "F" else "Y"
    grid = GridSpec(dim=1, points=4096, half_width=50.0)
    delta_approx = gaussian_field(grid, 1.0, 0.05)
    mass = float(np.sum(delta_approx.values)) * grid.cell_volume
    delta_approx = gaussian_field(grid, 1.0 / mass, 0.05)
    t_values = np.geomspace(0.5, 8.0, args.points)
    lines = ["t,q,norm,predicted_slope,fitted_slope"]
    for q in args.q:
        norms = np.array(
            [
                lq_norm(
                    apply_propagator(kind, t, delta_approx, args.alpha, args.s), q
                )
                for t in t_values
            ]
        )
        scale = (args.dim * args.alpha / (2.0 * args.s)) * (1.0 - 1.0 / q)
        predicted = -scale if kind == "Z" else -(1.0 - args.alpha + scale)
        fitted = float(np.polyfit(np.log(t_values), np.log(norms), 1)[0])
        for t, n in zip(t_values, norms):
            lines.append(f"{float(t)!r},{float(q)!r},{float(n)!r},{predicted!r},{fitted!r}")
    _emit_text("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_simulate(args) -> int:
    config = config_from_json(args.config)
    if len(config.p_values) != 1:
        raise DomainError("simulate needs a config with a single p (or 'p' field)")
    params = config.model(config.p_values[0])
    result = integrate(
        params,
        config.grid,
        config.u0.build(config.grid),
        config.w.build(config.grid),
        config.mesh(),
        q_report=config.q_report,
        thresholds=config.thresholds,
        forcing_scheme=config.forcing_scheme,
    )
    beta = config.thresholds.beta
    lines = ["t,Lq_norm,Linf_norm,tbeta_Lq"]
    for t, lq, li in zip(result.t_nodes, result.lq_history, result.linf_history):
        tb = t**beta * lq if t > 0.0 else 0.0
        lines.append(f"{float(t)!r},{float(lq)!r},{float(li)!r},{float(tb)!r}")
    _emit_text("\n".join(lines) + "\n", args.out)
    print(f"classification: {result.classification}", file=sys.stderr)
    return 0


def _cmd_sweep(args) -> int:
    config = config_from_json(args.config)
    rows = run_sweep(config)
    _emit_text(rows_to_csv(rows), args.out)
    return 0


def _cmd_bracket(args) -> int:
    config = config_from_json(args.config)
    result = bracket_pstar(config, args.tol_p)
    payload = {
        "p_lo": result.p_lo,
        "p_hi": result.p_hi,
        "midpoint": result.midpoint,
        "undetermined": list(result.undetermined),
        "evaluations": [
            {"p": r.p, "classification": r.classification, "note": r.note}
            for r in result.rows
        ],
    }
    _emit_json(payload, args.out)
    return 0


def _cmd_hypotheses(args) -> int:
    with open(args.config) as fh:
        cfg = json.load(fh)
    if cfg.get("schema") != 1:
        raise DomainError(f"unsupported config schema {cfg.get('schema')!r}")
    config = config_from_json(args.config)
    if len(config.p_values) != 1:
        raise DomainError("hypotheses needs a config with a single p")
    params = config.model(config.p_values[0])
    hyp = cfg.get("hypotheses", {})
    zero = gaussian_field(config.grid, 0.0, 1.0)
    u0 = config.u0.build(config.grid) or zero
    w = config.w.build(config.grid) or zero
    rep = local_average_hypotheses(
        params,
        u0,
        w,
        q=float(hyp.get("q", config.q_report)),
        M=float(hyp.get("M", 1.0)),
        delta=float(hyp.get("delta", 1.0)),
        M_script=float(hyp.get("M_script", 1.0)),
        tail_norm_exponent=str(hyp.get("tail_norm_exponent", "q")),
    )
    from dataclasses import asdict

    payload = json.loads(
        json.dumps(asdict(rep), default=_json_default, allow_nan=False)
    )
    _emit_json(payload, args.out)
    return 0


def _cmd_selftest(args) -> int:
    from .selftest import run_selftest

    ok = run_selftest(verbose=True)
    return 0 if ok else NUMERICAL_ERROR


def build_parser() -> _Parser:
    parser = _Parser(prog="fracsim", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_exp = sub.add_parser("exponents", help="closed-form critical exponents")
    p_exp.add_argument("--alpha", type=float, required=True)
    p_exp.add_argument("--s", type=float, required=True)
    p_exp.add_argument("--sigma", type=float, required=True)
    p_exp.add_argument("--p", type=float, required=True)
    p_exp.add_argument("--N", type=int, required=True)
    p_exp.add_argument("--q", type=float, default=None)
    p_exp.add_argument("--out", default=None)
    p_exp.set_defaults(fn=_cmd_exponents)

    p_ker = sub.add_parser("kernel", help="kernel profiles and norm scaling")
    p_ker.add_argument("--mode", choices=("profile", "norms"), default="profile")
    p_ker.add_argument("--kind", choices=("F", "G"), default="F")
    p_ker.add_argument("--alpha", type=float, required=True)
    p_ker.add_argument("--s", type=float, required=True)
    p_ker.add_argument("--dim", type=int, default=1)
    p_ker.add_argument("--r-min", type=float, default=1e-3)
    p_ker.add_argument("--r-max", type=float, default=1e3)
    p_ker.add_argument("--points", type=int, default=32)
    p_ker.add_argument("--q", type=float, nargs="+", default=[1.0, 2.0])
    p_ker.add_argument("--out", default=None)
    p_ker.set_defaults(fn=_cmd_kernel)

    for name, fn in (
        ("simulate", _cmd_simulate),
        ("sweep", _cmd_sweep),
        ("hypotheses", _cmd_hypotheses),
    ):
        p_cmd = sub.add_parser(name)
        p_cmd.add_argument("--config", required=True)
        p_cmd.add_argument("--out", default=None)
        p_cmd.set_defaults(fn=fn)

    p_br = sub.add_parser("bracket", help="bisect the blow-up/global threshold")
    p_br.add_argument("--config", required=True)
    p_br.add_argument("--tol-p", type=float, default=0.2)
    p_br.add_argument("--out", default=None)
    p_br.set_defaults(fn=_cmd_bracket)

    p_self = sub.add_parser("selftest", help="golden-value and invariant checks")
    p_self.set_defaults(fn=_cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (DomainError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (NumericalError, BracketingError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return NUMERICAL_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
