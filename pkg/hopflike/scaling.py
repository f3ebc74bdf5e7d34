import logging
import math
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .const import DEFAULT_WORKERS, MIN_SCALING_DECADES, MIN_SCALING_POINTS, SCHEMA_SCALING
from .hlb import ClassificationError, classify, coordinate_exponents, predicted_period, scaling_row
from .model import DiagramPoint, HLBReport, Policy, ScalingFit
from .poincare import sweep_diagram
from .pwsmodel import PWSystem

_LOGGER = logging.getLogger(__name__)


class ScalingError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


def log_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Slope, intercept and R^2 of log|y| against log|x|."""
    lx = np.log(np.abs(np.asarray(x, dtype=float)))
    ly = np.log(np.abs(np.asarray(y, dtype=float)))
    if lx.size < 2:
        raise ScalingError(f"Need at least two points for a log-log fit, got {lx.size}")
    slope, intercept = np.polyfit(lx, ly, 1)
    predicted = slope * lx + intercept
    total = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum((ly - predicted) ** 2)) / total if total > 0 else 1.0
    return float(slope), float(intercept), r2


def scaling_grid(report: HLBReport, mu_min: float, mu_max: float, n_points: int) -> list[float]:
    """Geometric grid of mu on the side of mu0 where the cycle lives."""
    if not 0 < mu_min < mu_max:
        raise ScalingError(f"Scaling grid needs 0 < mu_min < mu_max, got ({mu_min}, {mu_max})")
    if report.cycle_side == 0:
        raise ScalingError(f"{report.kind} at mu0={report.mu0} has no cycle to measure")
    decades = math.log10(mu_max / mu_min)
    if decades < MIN_SCALING_DECADES:
        _LOGGER.warning("Scaling grid spans %.2f decades, fewer than %s", decades, MIN_SCALING_DECADES)
    offsets = np.geomspace(mu_min, mu_max, n_points)
    return [report.mu0 + report.cycle_side * float(d) for d in offsets]


def _usable(points: Sequence[DiagramPoint]) -> list[DiagramPoint]:
    kept = []
    for point in points:
        if point.cycle is None:
            _LOGGER.warning("No cycle at mu=%s (%s), point dropped", point.mu, point.error or "no sign change")
            continue
        kept.append(point)
    if len(kept) < MIN_SCALING_POINTS:
        _LOGGER.warning("Only %s usable scaling points, fewer than %s", len(kept), MIN_SCALING_POINTS)
    if len(kept) < 2:
        raise ScalingError("Fewer than two cycles found on the scaling grid")
    return kept


def fit_scaling(
    sys: PWSystem,
    mu_min: float,
    mu_max: float,
    n_points: int = 12,
    *,
    report: HLBReport | None = None,
    workers: int = DEFAULT_WORKERS,
    policy: Policy | None = None,
) -> ScalingFit:
    """Measure how the cycle born at the bifurcation grows with |mu - mu0|.

    Amplitude is the cycle diameter; rows whose coordinates scale differently
    also get separate x and y fits and report the slower one. For rows with a
    finite limiting period the raw period slope is reported together with the
    slope of the correction |T - T_limit|.
    """
    report = report if report is not None else classify(sys, sys.mu)
    if not report.classified:
        raise ScalingError(f"Model '{sys.name}' is unclassified at mu0={report.mu0}")
    grid = scaling_grid(report, mu_min, mu_max, n_points)
    points = _usable(sweep_diagram(sys, grid, report=report, workers=workers, policy=policy))

    dmu = [abs(p.mu - report.mu0) for p in points]
    cycles = [p.cycle for p in points if p.cycle is not None]
    diameter = [c.extremes.amplitude for c in cycles]
    extent_x = [c.extremes.x_max - c.extremes.x_min for c in cycles]
    extent_y = [c.extremes.y_max - c.extremes.y_min for c in cycles]
    x_max = [c.extremes.x_max for c in cycles]
    period = [c.period for c in cycles]

    slope_x, _, _ = log_fit(dmu, extent_x)
    slope_y, _, _ = log_fit(dmu, extent_y)
    exp_x, exp_y = coordinate_exponents(report.kind)
    if exp_x != exp_y:
        slope_a, intercept_a, r2_a = log_fit(dmu, extent_y if exp_y < exp_x else extent_x)
    else:
        slope_a, intercept_a, r2_a = log_fit(dmu, diameter)
    slope_t, intercept_t, r2_t = log_fit(dmu, period)
    slope_xm = log_fit(dmu, x_max)[0] if all(v > 0 for v in x_max) else None

    a, b = scaling_row(report.kind)
    fit = ScalingFit(
        kind=report.kind,
        exponent_amplitude=slope_a,
        exponent_period=slope_t,
        exponent_x=slope_x,
        exponent_y=slope_y,
        exponent_x_max=slope_xm,
        intercept_amplitude=intercept_a,
        intercept_period=intercept_t,
        r2_amplitude=r2_a,
        r2_period=r2_t,
        expected=(float(a), float(b)),
        mu=[p.mu for p in points],
        amplitude=diameter,
        amplitude_x=extent_x,
        amplitude_y=extent_y,
        x_max=x_max,
        period=period,
    )
    if b == 0:
        _period_correction(fit, report, sys)
    _LOGGER.info(
        "%s scaling: a=%.4f (expected %s), b=%.4f (expected %s)", report.kind, slope_a, a, slope_t, b
    )
    return fit


def _period_correction(fit: ScalingFit, report: HLBReport, sys: PWSystem) -> None:
    try:
        limit = predicted_period(report, sys)
    except ClassificationError:
        _LOGGER.warning("No limiting period for %s, correction not fitted", report.kind)
        return
    fit.period_limit = limit
    nearest = min(range(len(fit.mu)), key=lambda k: abs(fit.mu[k] - report.mu0))
    fit.limit_error = abs(fit.period[nearest] - limit) / limit
    pairs = [(abs(m - report.mu0), abs(t - limit)) for m, t in zip(fit.mu, fit.period) if abs(t - limit) > 0]
    if len(pairs) < 2:
        return
    dmu, correction = zip(*pairs)
    fit.correction_exponent, _, fit.r2_correction = log_fit(dmu, correction)


def scaling_frame(fit: ScalingFit) -> pd.DataFrame:
    frame = pd.DataFrame(
        {
            "mu": fit.mu,
            "amplitude": fit.amplitude,
            "amplitude_x": fit.amplitude_x,
            "amplitude_y": fit.amplitude_y,
            "x_max": fit.x_max,
            "period": fit.period,
        }
    )
    frame.insert(0, "schema", SCHEMA_SCALING)
    return frame


def write_scaling_csv(fit: ScalingFit, path: str | Path) -> None:
    scaling_frame(fit).to_csv(path, index=False, float_format="%.12g")


def fit_summary(fit: ScalingFit) -> dict:
    summary = fit.model_dump(exclude={"mu", "amplitude", "amplitude_x", "amplitude_y", "x_max", "period"})
    summary["schema"] = SCHEMA_SCALING
    summary["points"] = len(fit.mu)
    return summary
