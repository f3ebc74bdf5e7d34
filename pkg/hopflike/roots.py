"""Shared root-finding helpers: bracket scans, Brent polish and damped Newton."""

import logging
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.optimize import brentq

from .const import BRENT_XTOL, FD_STEP, NEWTON_MAX_ITER, NEWTON_TOL

_LOGGER = logging.getLogger(__name__)


class NewtonError(Exception):
    pass


def sign_changes(func: Callable[[float], float], grid: Sequence[float]) -> Iterator[tuple[float, float]]:
    """Yield consecutive grid intervals over which ``func`` changes sign.

    Points where ``func`` raises ``ArithmeticError``/``ValueError`` or is not finite break the scan.
    """
    previous: tuple[float, float] | None = None
    for point in grid:
        try:
            value = float(func(point))
        except (ArithmeticError, ValueError):
            previous = None
            continue
        if not np.isfinite(value):
            previous = None
            continue
        if value == 0.0:
            yield point, point
        elif previous is not None and previous[1] * value < 0:
            yield previous[0], point
        previous = (point, value)


def brent_root(func: Callable[[float], float], lo: float, hi: float, xtol: float = BRENT_XTOL) -> float:
    if lo == hi:
        return lo
    return float(brentq(func, lo, hi, xtol=xtol, maxiter=500))


def first_root(func: Callable[[float], float], grid: Sequence[float]) -> float | None:
    for lo, hi in sign_changes(func, grid):
        return brent_root(func, lo, hi)
    return None


def numeric_jacobian(func: Callable[[np.ndarray], np.ndarray], x: np.ndarray,
                     step: float = FD_STEP) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    columns = []
    for k in range(x.size):
        h = step * max(1.0, abs(x[k]))
        dx = np.zeros_like(x)
        dx[k] = h
        columns.append((np.asarray(func(x + dx)) - np.asarray(func(x - dx))) / (2 * h))
    return np.column_stack(columns)


def damped_newton(
    func: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    lower: Sequence[float] | None = None,
    upper: Sequence[float] | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = NEWTON_MAX_ITER,
) -> np.ndarray:
    """Newton iteration with a numerical Jacobian and step halving.

    Steps are halved until the residual norm decreases and the iterate stays
    strictly inside the optional box.
    """
    x = np.asarray(x0, dtype=float)
    lo = None if lower is None else np.asarray(lower, dtype=float)
    hi = None if upper is None else np.asarray(upper, dtype=float)
    residual = np.asarray(func(x), dtype=float)
    norm = float(np.linalg.norm(residual))
    for iteration in range(max_iter):
        if norm < tol:
            _LOGGER.debug("Newton converged after %s iterations", iteration)
            return x
        jac = numeric_jacobian(func, x)
        try:
            step = np.linalg.solve(jac, -residual)
        except np.linalg.LinAlgError as e:
            raise NewtonError(f"Singular Jacobian at {x}") from e
        damping = 1.0
        while damping > 1e-10:
            trial = x + damping * step
            inside = (lo is None or np.all(trial > lo)) and (hi is None or np.all(trial < hi))
            if inside:
                trial_residual = np.asarray(func(trial), dtype=float)
                trial_norm = float(np.linalg.norm(trial_residual))
                if np.isfinite(trial_norm) and trial_norm < norm:
                    x, residual, norm = trial, trial_residual, trial_norm
                    break
            damping *= 0.5
        else:
            raise NewtonError(f"Damped Newton stalled at {x} with residual {norm:.3e}")
    if norm < tol:
        return x
    raise NewtonError(f"Damped Newton did not converge in {max_iter} iterations (residual {norm:.3e})")
