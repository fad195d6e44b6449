"""Parameter sweeps, empirical threshold bracketing, and config plumbing.

A sweep runs one simulation per nonlinearity power p at fixed remaining
parameters, classifies each run (Global / BlowUp / Undetermined), and tags
every row with the closed-form exponents so the table can be read against
the predicted threshold p*.  `bracket_pstar` bisects on p between the
largest observed BlowUp and the smallest observed Global.

Configs are plain JSON (schema 1); CSV output uses a fixed column order and
repr-exact floats, so identical inputs give bit-identical files.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .criticality import beta_exponent, p_star_exponent
from .errors import BracketingError, DomainError
from .solver import (
    BLOWUP,
    GLOBAL,
    UNDETERMINED,
    ClassifyThresholds,
    ModelParams,
    SimResult,
    TimeMesh,
    integrate,
)
from .spectral import Field, GridSpec, gaussian_field, indicator_field

__all__ = [
    "DataSpec",
    "SweepConfig",
    "SweepRow",
    "BracketResult",
    "run_sweep",
    "bracket_pstar",
    "rows_to_csv",
    "config_from_dict",
    "config_from_json",
]

CSV_COLUMNS = (
    "p",
    "p_c",
    "p_star",
    "beta",
    "classification",
    "blowup_time_est",
    "decay_exponent",
    "r_squared",
    "note",
)


@dataclass(frozen=True)
class DataSpec:
    """Recipe for an initial-data or forcing profile on a grid."""

    kind: str  # "gaussian", "indicator", or "zero"
    amplitude: float = 0.0
    width: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("gaussian", "indicator", "zero"):
            raise DomainError(f"unknown data kind {self.kind!r}")
        if not np.isfinite(self.amplitude):
            raise DomainError("amplitude must be finite")
        if not self.width > 0.0:
            raise DomainError("width must be positive")

    def build(self, grid: GridSpec) -> Field | None:
        if self.kind == "zero":
            return None
        if self.kind == "gaussian":
            return gaussian_field(grid, self.amplitude, self.width)
        return indicator_field(grid, self.amplitude, self.width)


@dataclass(frozen=True)
class SweepConfig:
    alpha: float
    s: float
    sigma: float
    dim: int
    p_values: tuple[float, ...]
    u0: DataSpec
    w: DataSpec
    grid: GridSpec
    t_end: float
    steps: int
    grading: float = 2.0
    thresholds: ClassifyThresholds = field(default_factory=ClassifyThresholds)
    q_report: float = 4.0
    forcing_scheme: str = "fast"

    def __post_init__(self) -> None:
        p = tuple(float(x) for x in self.p_values)
        if any(x <= 1.0 for x in p):
            raise DomainError("all p values must exceed 1")
        if list(p) != sorted(p):
            raise DomainError("p_values must be sorted ascending")
        object.__setattr__(self, "p_values", p)
        if not (self.t_end > 0.0 and self.steps >= 2):
            raise DomainError("need t_end > 0 and steps >= 2")

    def model(self, p: float) -> ModelParams:
        return ModelParams(
            alpha=self.alpha, s=self.s, sigma=self.sigma, p=p, dim=self.dim
        )

    def mesh(self) -> TimeMesh:
        return TimeMesh.make(self.t_end, self.steps, self.grading)


@dataclass(frozen=True)
class SweepRow:
    p: float
    p_c: float
    p_star: float | None
    beta: float
    classification: str
    blowup_time_est: float | None
    decay_exponent: float | None
    r_squared: float | None
    note: str = ""


def _classify_p(config: SweepConfig, p: float) -> tuple[SweepRow, SimResult | None]:
    params = config.model(p)
    notes: list[str] = []
    w_field = config.w.build(config.grid)
    if w_field is not None:
        mass = float(np.sum(w_field.values)) * config.grid.cell_volume
        if mass <= 0.0:
            notes.append("forcing-mass-nonpositive")
    beta = beta_exponent(params, config.q_report).value
    try:
        result = integrate(
            params,
            config.grid,
            config.u0.build(config.grid),
            w_field,
            config.mesh(),
            q_report=config.q_report,
            thresholds=config.thresholds,
            forcing_scheme=config.forcing_scheme,
        )
    except Exception as exc:  # recorded, never aborts the sweep
        row = SweepRow(
            p=p,
            p_c=params.dim * (p - 1.0) / (2.0 * params.s),
            p_star=p_star_exponent(params.alpha, params.s, params.sigma, params.dim),
            beta=beta,
            classification="Failed",
            blowup_time_est=None,
            decay_exponent=None,
            r_squared=None,
            note="; ".join(notes + [f"{type(exc).__name__}: {exc}"]),
        )
        return row, None
    notes.extend(result.notes)
    row = SweepRow(
        p=p,
        p_c=params.dim * (p - 1.0) / (2.0 * params.s),
        p_star=p_star_exponent(params.alpha, params.s, params.sigma, params.dim),
        beta=beta,
        classification=result.classification,
        blowup_time_est=result.blowup_time_est,
        decay_exponent=result.decay_exponent,
        r_squared=result.decay_r_squared,
        note="; ".join(notes),
    )
    return row, result


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """One classified simulation per p, in p order, deterministically.

    FRACSIM_THREADS > 1 runs rows concurrently; collection order is still
    the p order.
    """
    ps = config.p_values
    if not ps:
        return []
    threads = max(1, int(os.environ.get("FRACSIM_THREADS", "1")))
    if threads == 1 or len(ps) == 1:
        return [_classify_p(config, p)[0] for p in ps]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return [row for row, _ in pool.map(lambda p: _classify_p(config, p), ps)]


@dataclass(frozen=True)
class BracketResult:
    p_lo: float  # largest p classified BlowUp
    p_hi: float  # smallest p classified Global
    undetermined: tuple[float, ...]
    rows: tuple[SweepRow, ...]

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.p_lo + self.p_hi)


def bracket_pstar(config: SweepConfig, tol_p: float) -> BracketResult:
    """Bisect on p between BlowUp and Global classifications.

    The initial p_values must straddle the threshold (at least one BlowUp
    below one Global).  Undetermined midpoints cannot shrink the bracket;
    the bisection then probes the quarter points instead, and gives up with
    the widened bracket (and the undetermined p list as diagnostics) if
    those are undetermined too.
    """
    if tol_p <= 0.0:
        raise DomainError("tol_p must be positive")
    rows: list[SweepRow] = []
    undetermined: list[float] = []

    def classify_at(p: float) -> str:
        row, _ = _classify_p(config, p)
        rows.append(row)
        if row.classification == UNDETERMINED:
            undetermined.append(p)
        return row.classification

    p_lo = p_hi = None
    for p in config.p_values:
        c = classify_at(p)
        if c == BLOWUP:
            if p_hi is not None and p > p_hi:
                raise BracketingError(
                    f"non-monotone classifications: BlowUp at p={p} above "
                    f"Global at p={p_hi}"
                )
            p_lo = p if p_lo is None else max(p_lo, p)
        elif c == GLOBAL:
            p_hi = p if p_hi is None else min(p_hi, p)
    if p_lo is None or p_hi is None or p_lo >= p_hi:
        raise BracketingError(
            "initial p_values do not straddle the threshold "
            f"(BlowUp up to {p_lo}, Global from {p_hi})"
        )

    while p_hi - p_lo > tol_p:
        moved = False
        for frac in (0.5, 0.25, 0.75):
            p_mid = p_lo + frac * (p_hi - p_lo)
            c = classify_at(p_mid)
            if c == BLOWUP:
                p_lo = p_mid
                moved = True
                break
            if c == GLOBAL:
                p_hi = p_mid
                moved = True
                break
        if not moved:
            break  # undetermined plateau: report the widened bracket honestly
    return BracketResult(
        p_lo=p_lo,
        p_hi=p_hi,
        undetermined=tuple(undetermined),
        rows=tuple(rows),
    )


# --------------------------------------------------------------------------
# serialization
# --------------------------------------------------------------------------


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def rows_to_csv(rows: list[SweepRow]) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(_cell(getattr(row, col)) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def config_from_dict(cfg: dict) -> SweepConfig:
    """Build a SweepConfig from a schema-1 JSON dict."""
    if cfg.get("schema") != 1:
        raise DomainError(f"unsupported config schema {cfg.get('schema')!r}")
    model = cfg["model"]
    grid_d = cfg.get("grid", {})
    grid = GridSpec(
        dim=int(model["dim"]),
        points=int(grid_d.get("points", 4096)),
        half_width=float(grid_d.get("half_width", 50.0)),
    )
    time_d = cfg.get("time", {})
    thr_d = cfg.get("classify", {})
    p_values = cfg.get("p_values")
    if p_values is None:
        p_values = [cfg["p"]]

    def data_spec(d: dict | None) -> DataSpec:
        if d is None:
            return DataSpec(kind="zero")
        return DataSpec(
            kind=d.get("kind", "zero"),
            amplitude=float(d.get("amplitude", 0.0)),
            width=float(d.get("width", 1.0)),
        )

    t_end = float(time_d.get("t_end", 50.0))
    thresholds = ClassifyThresholds(
        u_max=float(thr_d.get("u_max", 1e8)),
        ratio_max=float(thr_d.get("ratio_max", 10.0)),
        t_end=float(thr_d.get("t_end", t_end)),
        beta=float(thr_d.get("beta", 0.0)),
        monotone_slack=float(thr_d.get("monotone_slack", 0.01)),
    )
    return SweepConfig(
        alpha=float(model["alpha"]),
        s=float(model["s"]),
        sigma=float(model["sigma"]),
        dim=int(model["dim"]),
        p_values=tuple(float(x) for x in p_values),
        u0=data_spec(cfg.get("u0")),
        w=data_spec(cfg.get("w")),
        grid=grid,
        t_end=t_end,
        steps=int(time_d.get("steps", 600)),
        grading=float(time_d.get("grading", 2.0)),
        thresholds=thresholds,
        q_report=float(cfg.get("q_report", 4.0)),
        forcing_scheme=str(cfg.get("forcing_scheme", "fast")),
    )


def config_from_json(path: str | Path) -> SweepConfig:
    with open(path) as fh:
        return config_from_dict(json.load(fh))
