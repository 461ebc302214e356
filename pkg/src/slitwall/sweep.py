"""Visibility versus which-path accuracy across a family of wall states."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig, SweepDescriptor
from .dynamics import apply_slits, free_propagate
from .errors import SlitwallError
from .grid import Representation, moments
from .observables import (
    PathInferenceRule,
    classification_accuracy,
    kennard_audit,
    visibility,
)
from .states import build_state, support_width

SUPPORT_EPS_SWEEP = 0.01
CSV_HEADER = ("param", "sigma_Q", "delta_P_support", "visibility", "accuracy", "uncertainty_product", "status")


@dataclass(frozen=True)
class SweepRow:
    param: float
    sigma_q: float
    delta_p_support: float
    visibility: float
    accuracy: float
    uncertainty_product: float
    status: str = "ok"
    # the transposed width conventions, for transparency
    sigma_p: float = math.nan
    delta_q_support: float = math.nan
    kennard_satisfied: bool | None = None

    def csv_fields(self) -> list[str]:
        nums = (self.param, self.sigma_q, self.delta_p_support, self.visibility,
                self.accuracy, self.uncertainty_product)
        return [repr(float(v)) for v in nums] + [self.status]


@dataclass
class SweepResult:
    parameter: str
    rows: list[SweepRow] = field(default_factory=list)

    def scored_rows(self) -> list[SweepRow]:
        """Rows carrying a visibility and an accuracy (failed cells excluded)."""
        return [r for r in self.rows if math.isfinite(r.visibility) and math.isfinite(r.accuracy)]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in self.rows:
            writer.writerow(row.csv_fields())
        return buf.getvalue()


@dataclass(frozen=True)
class FrontierVerdict:
    compatible: bool
    witnesses: tuple[SweepRow, ...]
    v_min: float
    acc_min: float

    @property
    def label(self) -> str:
        return "compatible" if self.compatible else "incompatible"


def _slit_weights(config: ScenarioConfig) -> tuple[float, float]:
    psi = build_state(config.particle, config.grid)
    at_slits = free_propagate(psi.position(), config.mass_particle, config.tau)
    s1, s2 = apply_slits(at_slits, config.slits)
    return s1.norm_sq(), s2.norm_sq()


def _cell(config: ScenarioConfig, param: str, value: float, weights, seed) -> SweepRow:
    k = config.k
    wall = config.wall
    if param == "k":
        k = float(value)
    else:
        wall = wall.with_parameter(param, float(value))
    try:
        xi = build_state(wall, config.grid)
        report = visibility(xi, k)
        audit = kennard_audit(xi)
        _, sigma_q = moments(xi.position().normalized())
        delta_p = support_width(xi, SUPPORT_EPS_SWEEP, Representation.MOMENTUM)
        delta_q = support_width(xi, SUPPORT_EPS_SWEEP, Representation.POSITION)
        pivot = config.pivot
        if pivot is None:
            pivot = moments(xi.momentum())[0]
        rule = PathInferenceRule(pivot, report.k_applied)
        # every cell draws the same variates: common random numbers keep the
        # accuracy curve free of cell-to-cell sampling jitter
        rng = np.random.default_rng(seed)
        acc = classification_accuracy(xi, k, rule, rng, weights, config.samples)
    except SlitwallError as exc:
        nan = math.nan
        status = f"error: {type(exc).__name__}: {exc}"
        return SweepRow(float(value), nan, nan, nan, nan, nan, status)
    status = "ok" if audit.status == "ok" else audit.status
    return SweepRow(
        param=float(value),
        sigma_q=sigma_q,
        delta_p_support=delta_p,
        visibility=report.visibility,
        accuracy=acc,
        uncertainty_product=sigma_q * delta_p,
        status=status,
        sigma_p=audit.sigma_p,
        delta_q_support=delta_q,
        kennard_satisfied=audit.satisfied if audit.status == "ok" else None,
    )


def run_sweep(config: ScenarioConfig, sweep: SweepDescriptor | None = None, threads: int = 1) -> SweepResult:
    """Evaluate every point of the sweep; rows come back in parameter order.

    Failed cells are kept with an ``error: ...`` status instead of aborting
    the sweep. The result does not depend on ``threads``.
    """
    sweep = sweep or config.sweep
    if sweep is None:
        raise SlitwallError("no sweep descriptor given")
    if config.seed is None:
        raise SlitwallError("a seed is required for the Monte Carlo accuracy estimate")
    values = sweep.values()
    weights = _slit_weights(config)

    def work(v):
        return _cell(config, sweep.parameter, v, weights, config.seed)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, values))
    else:
        rows = [work(v) for v in values]
    return SweepResult(sweep.parameter, rows)


def incompatibility_frontier(result: SweepResult, v_min: float, acc_min: float) -> FrontierVerdict:
    """Is there a row with visibility >= v_min and accuracy >= acc_min at once?"""
    witnesses = tuple(
        r for r in result.scored_rows() if r.visibility >= v_min and r.accuracy >= acc_min
    )
    return FrontierVerdict(bool(witnesses), witnesses, v_min, acc_min)


def frontier_rows(result: SweepResult) -> list[tuple[float, float, float]]:
    """(visibility, accuracy, param) for scored rows, by increasing visibility."""
    rows = [(r.visibility, r.accuracy, r.param) for r in result.scored_rows()]
    return sorted(rows, key=lambda t: (t[0], -t[1]))


def frontier_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(("visibility", "accuracy", "param"))
    for v, a, p in frontier_rows(result):
        writer.writerow((repr(float(v)), repr(float(a)), repr(float(p))))
    return buf.getvalue()

