import logging
from typing import Sequence

import numpy as np

from .const import EQ_TOL, FOLD_TOL
from .model import EigenData, Equilibrium, ManifoldPointClass, PointTag
from .pwsmodel import Delayed, Filippov, Hysteretic, PWSystem, SmoothPiece
from .roots import NewtonError, brent_root, damped_newton, numeric_jacobian, sign_changes

_LOGGER = logging.getLogger(__name__)

_DY = 1e-6


class GeometryError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


def _halves(sys: PWSystem) -> tuple[SmoothPiece, SmoothPiece]:
    mech = sys.mechanism
    if not isinstance(mech, (Filippov, Hysteretic, Delayed)):
        raise GeometryError(f"Switching-manifold geometry needs two half-systems, got {sys.tag}")
    return mech.left, mech.right


def _df_dy(piece: SmoothPiece, y: float, mu: float) -> float:
    return (piece.eval(0.0, y + _DY, mu)[0] - piece.eval(0.0, y - _DY, mu)[0]) / (2 * _DY)


def classify_boundary_point(sys: PWSystem, y: float, mu: float | None = None,
                            tol: float | None = None) -> ManifoldPointClass:
    """Classify (0, y) by the signs of the normal components f_L, f_R."""
    mu = sys.mu if mu is None else mu
    left, right = _halves(sys)
    f_l, g_l = left.eval(0.0, y, mu)
    f_r, g_r = right.eval(0.0, y, mu)
    slope_l = _df_dy(left, y, mu)
    slope_r = _df_dy(right, y, mu)

    def on_fold(f: float, slope: float) -> bool:
        limit = tol if tol is not None else FOLD_TOL * (1.0 + abs(slope))
        return abs(f) < limit

    fold_l = on_fold(f_l, slope_l)
    fold_r = on_fold(f_r, slope_r)
    result = dict(f_left=f_l, f_right=f_r)

    if fold_l and abs(g_l) < EQ_TOL:
        return ManifoldPointClass(tag=PointTag.BOUNDARY_EQUILIBRIUM_L, **result)
    if fold_r and abs(g_r) < EQ_TOL:
        return ManifoldPointClass(tag=PointTag.BOUNDARY_EQUILIBRIUM_R, **result)

    deg_l = fold_l and abs(slope_l) < EQ_TOL
    deg_r = fold_r and abs(slope_r) < EQ_TOL
    if deg_l or deg_r:
        return ManifoldPointClass(tag=PointTag.DEGENERATE, detail="non-quadratic tangency", **result)

    visible_l = slope_l * g_l < 0 if fold_l else None
    visible_r = slope_r * g_r > 0 if fold_r else None
    if fold_l and fold_r:
        return ManifoldPointClass(tag=PointTag.TWO_FOLD, visible_left=visible_l,
                                  visible_right=visible_r, **result)
    if fold_l:
        tag = PointTag.VISIBLE_FOLD_L if visible_l else PointTag.INVISIBLE_FOLD_L
        return ManifoldPointClass(tag=tag, visible_left=visible_l, **result)
    if fold_r:
        tag = PointTag.VISIBLE_FOLD_R if visible_r else PointTag.INVISIBLE_FOLD_R
        return ManifoldPointClass(tag=tag, visible_right=visible_r, **result)

    if f_l * f_r > 0:
        return ManifoldPointClass(tag=PointTag.CROSSING, **result)
    if f_l > 0:
        return ManifoldPointClass(tag=PointTag.ATTRACTING_SLIDING, **result)
    return ManifoldPointClass(tag=PointTag.REPELLING_SLIDING, **result)


def sliding_weight(sys: PWSystem, y: float, mu: float | None = None) -> float:
    """Convex weight s with (1 - s) f_L + s f_R = 0."""
    mu = sys.mu if mu is None else mu
    left, right = _halves(sys)
    f_l = left.eval(0.0, y, mu)[0]
    f_r = right.eval(0.0, y, mu)[0]
    if f_l == f_r:
        raise GeometryError(f"Sliding weight undefined at y={y}: f_L = f_R")
    return f_l / (f_l - f_r)


def sliding_field(sys: PWSystem, y: float, mu: float | None = None) -> float:
    mu = sys.mu if mu is None else mu
    left, right = _halves(sys)
    f_l, g_l = left.eval(0.0, y, mu)
    f_r, g_r = right.eval(0.0, y, mu)
    if f_l == f_r:
        raise GeometryError(f"Sliding field undefined at y={y}: f_L = f_R")
    return (f_l * g_r - f_r * g_l) / (f_l - f_r)


def sliding_velocity(sys: PWSystem, y: float, mu: float | None = None) -> tuple[float, float]:
    """(1 - s) F_L + s F_R at (0, y)."""
    mu = sys.mu if mu is None else mu
    left, right = _halves(sys)
    s = sliding_weight(sys, y, mu)
    fl = np.array(left.eval(0.0, y, mu))
    fr = np.array(right.eval(0.0, y, mu))
    v = (1 - s) * fl + s * fr
    return float(v[0]), float(v[1])


def find_pseudo_equilibria(sys: PWSystem, y_interval: tuple[float, float], mu: float | None = None,
                           n: int = 400) -> list[Equilibrium]:
    """Zeros of the sliding field on ``y_interval``, flagged admissible when on a sliding region."""
    mu = sys.mu if mu is None else mu
    left, right = _halves(sys)

    def numerator(y: float) -> float:
        f_l, g_l = left.eval(0.0, y, mu)
        f_r, g_r = right.eval(0.0, y, mu)
        return f_l * g_r - f_r * g_l

    found: list[Equilibrium] = []
    grid = np.linspace(y_interval[0], y_interval[1], n + 1)
    for lo, hi in sign_changes(numerator, grid):
        y = brent_root(numerator, lo, hi)
        if found and abs(found[-1].y - y) < 1e-9:
            continue
        f_l = left.eval(0.0, y, mu)[0]
        f_r = right.eval(0.0, y, mu)[0]
        if f_l == f_r:
            continue
        slope = (sliding_field(sys, y + _DY, mu) - sliding_field(sys, y - _DY, mu)) / (2 * _DY)
        found.append(
            Equilibrium(x=0.0, y=y, kind="pseudo", admissible=f_l * f_r < 0, stable=slope < 0,
                        hyperbolic=abs(slope) > EQ_TOL)
        )
    _LOGGER.debug("Found %s pseudo-equilibria on %s", len(found), y_interval)
    return found


def _piece_roots(piece: SmoothPiece, box: Sequence[float], mu: float, n: int) -> list[np.ndarray]:
    x_lo, x_hi, y_lo, y_hi = box

    def residual(p: np.ndarray) -> np.ndarray:
        return np.array(piece.eval(float(p[0]), float(p[1]), mu))

    roots: list[np.ndarray] = []
    for x0 in np.linspace(x_lo, x_hi, n):
        for y0 in np.linspace(y_lo, y_hi, n):
            try:
                root = damped_newton(residual, [x0, y0])
            except NewtonError:
                continue
            if not (x_lo - EQ_TOL <= root[0] <= x_hi + EQ_TOL and y_lo - EQ_TOL <= root[1] <= y_hi + EQ_TOL):
                continue
            if any(np.linalg.norm(root - known) < 1e-7 for known in roots):
                continue
            roots.append(root)
    return roots


def find_regular_equilibria(sys: PWSystem, search_box: Sequence[float], mu: float | None = None,
                            n: int = 7) -> list[Equilibrium]:
    """Newton-refined zeros of every piece inside ``search_box`` = (x_lo, x_hi, y_lo, y_hi)."""
    mu = sys.mu if mu is None else mu
    mech = sys.mechanism
    if isinstance(mech, (Filippov, Hysteretic, Delayed)):
        labelled = [(mech.left, "regular_L"), (mech.right, "regular_R")]
    else:
        labelled = [(piece, "regular") for piece in sys.pieces()]

    found: list[Equilibrium] = []
    for piece, kind in labelled:
        for root in _piece_roots(piece, search_box, mu, n):
            x, y = float(root[0]), float(root[1])
            jac = numeric_jacobian(lambda p: np.array(piece.eval(p[0], p[1], mu)), root)
            hyperbolic = abs(np.linalg.det(jac)) > EQ_TOL and abs(np.trace(jac)) > EQ_TOL
            eigen = EigenData.from_jacobian(jac)
            if kind == "regular_L":
                admissible = x < 0
            elif kind == "regular_R":
                admissible = x > 0
            else:
                admissible = True
            if abs(x) < EQ_TOL and kind != "regular":
                kind_out = "boundary"
            else:
                kind_out = kind
            found.append(
                Equilibrium(x=x, y=y, kind=kind_out, admissible=admissible, stable=eigen.stable,
                            eigen=eigen, hyperbolic=hyperbolic)
            )
    _LOGGER.debug("Found %s regular equilibria in %s", len(found), search_box)
    return found
