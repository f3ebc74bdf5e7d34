import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Sequence

import numpy as np
import pandas as pd

from .const import CYCLE_SCAN_DECADES, CYCLE_SCAN_POINTS, CYCLE_TOL, DEFAULT_WORKERS, SCHEMA_DIAGRAM
from .geometry import GeometryError, find_pseudo_equilibria, find_regular_equilibria
from .integrator import IntegrationError, NoReturnError, ReturnResult, Section, return_map
from .model import DiagramPoint, FixedPoint, HLBReport, Policy
from .pwsmodel import Filippov, PWSystem
from .returnmaps import ReturnMapError
from .roots import brent_root, sign_changes

_LOGGER = logging.getLogger(__name__)

DEFAULT_BRACKET = (1e-4, 0.5)
DEFAULT_BOX = (-1.0, 1.0, -1.0, 1.0)


class LimitCycleError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


class _Displacement:
    """Scaled displacement D(r) = (P(r) - r) / r with memoised returns."""

    def __init__(self, sys: PWSystem, mu: float, section: Section | None, policy: Policy | None):
        self.sys = sys
        self.mu = mu
        self.section = section
        self.policy = policy
        self.cache: dict[float, ReturnResult] = {}

    def result(self, r: float) -> ReturnResult:
        if r not in self.cache:
            self.cache[r] = return_map(self.sys, r, self.mu, policy=self.policy, section=self.section)
        return self.cache[r]

    def __call__(self, r: float) -> float:
        try:
            result = self.result(float(r))
        except NoReturnError:
            return float("nan")
        return (result.P - r) / r


def _scan_grid(bracket: Sequence[float] | None, seed: float | None) -> np.ndarray:
    if bracket is not None:
        lo, hi = float(bracket[0]), float(bracket[1])
    elif seed is not None and seed > 0:
        half = CYCLE_SCAN_DECADES / 2
        lo, hi = seed * 10**-half, seed * 10**half
    else:
        lo, hi = DEFAULT_BRACKET
    if not 0 < lo < hi:
        raise LimitCycleError(f"Cycle bracket must satisfy 0 < lo < hi, got ({lo}, {hi})")
    return np.geomspace(lo, hi, CYCLE_SCAN_POINTS)


def find_limit_cycle(
    sys: PWSystem,
    mu: float | None = None,
    bracket: Sequence[float] | None = None,
    tol: float = CYCLE_TOL,
    *,
    seed: float | None = None,
    section: Section | None = None,
    policy: Policy | None = None,
) -> FixedPoint | None:
    """Fixed point of the return map, or None when D keeps one sign on the scan.

    The scan runs on a geometric grid (``bracket`` or a window around ``seed``)
    and the bracket nearest the seed is polished with Brent's method.
    """
    mu = sys.mu if mu is None else float(mu)
    displacement = _Displacement(sys, mu, section, policy)
    grid = _scan_grid(bracket, seed)
    brackets = [(lo, hi) for lo, hi in sign_changes(displacement, grid)]
    if not brackets:
        _LOGGER.debug("No sign change of the displacement for mu=%s on [%.3g, %.3g]", mu, grid[0], grid[-1])
        return None
    centre = seed if seed else float(np.sqrt(grid[0] * grid[-1]))
    lo, hi = min(brackets, key=lambda b: abs(np.log(np.sqrt(b[0] * b[1]) / centre)))

    def strict(r: float) -> float:
        value = displacement(r)
        if not np.isfinite(value):
            raise LimitCycleError(f"Return map undefined at r={r:.6g} inside the bracket ({lo:.6g}, {hi:.6g})")
        return value

    r_star = brent_root(strict, lo, hi, xtol=max(tol * lo, 1e-15))
    at_star = displacement.result(r_star)
    h = 1e-4 * r_star
    try:
        multiplier = (displacement.result(r_star + h).P - displacement.result(r_star - h).P) / (2 * h)
    except NoReturnError as e:
        raise LimitCycleError(f"Return map undefined next to r*={r_star:.6g}") from e
    cycle = FixedPoint(
        r=r_star,
        residual=abs(at_star.P - r_star),
        multiplier=multiplier,
        period=at_star.T,
        extremes=at_star.extremes,
    )
    _LOGGER.debug("Limit cycle at mu=%s: r*=%.6g multiplier=%.6g period=%.6g", mu, r_star, multiplier, cycle.period)
    return cycle


def _predicted_seed(report: HLBReport | None, mu: float) -> float | None:
    if report is None:
        return None
    from .hlb import predicted_radius

    return predicted_radius(report, mu)


def diagram_point(
    sys: PWSystem,
    mu: float,
    *,
    report: HLBReport | None = None,
    search_box: Sequence[float] = DEFAULT_BOX,
    bracket: Sequence[float] | None = None,
    section: Section | None = None,
    policy: Policy | None = None,
    seed: float | None = None,
) -> DiagramPoint:
    """Stationary solutions and the local cycle at one mu; failures are recorded, not raised."""
    point = DiagramPoint(mu=mu)
    try:
        point.equilibria = find_regular_equilibria(sys, search_box, mu)
        if isinstance(sys.mechanism, Filippov):
            point.equilibria += find_pseudo_equilibria(sys, (search_box[2], search_box[3]), mu)
        seed = seed if seed is not None else _predicted_seed(report, mu)
        point.cycle = find_limit_cycle(sys, mu, bracket, seed=seed, section=section, policy=policy)
    except (LimitCycleError, IntegrationError, GeometryError, ReturnMapError) as e:
        _LOGGER.warning("Diagram point mu=%s failed: %s", mu, e)
        point.error = str(e)
    return point


def sweep_diagram(
    sys: PWSystem,
    mu_grid: Sequence[float],
    *,
    workers: int = DEFAULT_WORKERS,
    **options,
) -> list[DiagramPoint]:
    """Diagram points in grid order.

    With one worker the sweep runs in order and each cycle seeds the next;
    otherwise points run in a thread pool and seeds come from the report.
    """
    grid = [float(mu) for mu in mu_grid]
    if not grid:
        return []
    if workers <= 1:
        points: list[DiagramPoint] = []
        seed = None
        for mu in grid:
            point = diagram_point(sys, mu, seed=seed, **options)
            seed = point.cycle.r if point.cycle is not None else None
            points.append(point)
        return points
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda mu: diagram_point(sys, mu, **options), grid))


def _stability(flag: bool | None) -> str:
    if flag is None:
        return "unknown"
    return "stable" if flag else "unstable"


def diagram_frame(points: Sequence[DiagramPoint]) -> pd.DataFrame:
    rows = []
    for point in points:
        for index, eq in enumerate(point.equilibria):
            if not eq.admissible:
                continue
            rows.append({"mu": point.mu, "branch": f"{eq.kind}:{index}", "value": eq.x,
                         "stability": _stability(eq.stable)})
        if point.cycle is not None:
            extremes = point.cycle.extremes
            for name in ("x_min", "x_max", "y_min", "y_max"):
                rows.append({"mu": point.mu, "branch": f"cycle:{name}", "value": getattr(extremes, name),
                             "stability": _stability(point.cycle.stable)})
        if point.error is not None:
            rows.append({"mu": point.mu, "branch": "error", "value": float("nan"), "stability": point.error})
    frame = pd.DataFrame(rows, columns=["mu", "branch", "value", "stability"])
    frame.insert(0, "schema", SCHEMA_DIAGRAM)
    return frame


def write_diagram_csv(points: Sequence[DiagramPoint], path: str | Path) -> None:
    diagram_frame(points).to_csv(path, index=False, float_format="%.12g")
