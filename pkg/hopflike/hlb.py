"""Coefficient engine and classifier for the Hopf and Hopf-like boundary bifurcations.

Every branch works on the family in a normalised orientation: the repelling
piece on the left, clockwise rotation and beta > 0. The transforms used to get
there are recorded on the report, and ``cycle_side``/``cycle_stable`` are
translated back to the caller's mu.
"""

import logging
import math
from fractions import Fraction
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.integrate import quad

from .const import (
    ALPHA_TOL,
    COEFF_MU_STEP,
    EQ_TOL,
    FOLD_TOL,
    IMPACT_PERIOD_POINTS,
    NODE_S_MAX,
    PERIOD_SEED_POINTS,
)
from .geometry import GeometryError, find_pseudo_equilibria
from .integrator import wrap_angle
from .model import ChecklistItem, Criticality, EigenData, HLBKind, HLBReport, TaylorTable
from .pwsmodel import (
    Delayed,
    Filippov,
    FourQuadrant,
    Hysteretic,
    Impact,
    Impulse,
    PWSystem,
    Smooth,
    SmoothPiece,
    SqrtContinuous,
    flip_mu_table,
    reflect_table,
    reverse_table,
    rotate_table,
)
from .returnmaps import (
    ReturnMapError,
    aux_rho,
    aux_rho_node,
    aux_shat,
    chi_focus,
    chi_fold,
    g_func,
    g_func_node,
    sigma_fold,
)
from .roots import NewtonError, damped_newton, first_root

_LOGGER = logging.getLogger(__name__)

_HALF = Fraction(1, 2)
_THIRD = Fraction(1, 3)
_ONE = Fraction(1)
_ZERO = Fraction(0)

SCALING_TABLE: dict[HLBKind, tuple[Fraction, Fraction]] = {
    HLBKind.HOPF: (_HALF, _ZERO),
    HLBKind.HLB1: (_ONE, _ZERO),
    HLBKind.HLB2: (_ONE, _ZERO),
    HLBKind.HLB3: (_ONE, _ZERO),
    HLBKind.HLB4: (_ONE, _ZERO),
    HLBKind.HLB5: (_ONE, _ZERO),
    HLBKind.HLB6: (_ONE, _ZERO),
    HLBKind.HLB7: (_HALF, _HALF),
    HLBKind.HLB8: (_ONE, _ZERO),
    HLBKind.HLB9: (_ONE, _ZERO),
    HLBKind.HLB10: (_HALF, _HALF),
    HLBKind.HLB11: (_ONE, _ZERO),
    HLBKind.HLB12: (_ONE, _ZERO),
    HLBKind.HLB13: (_ONE, _ZERO),
    HLBKind.HLB14: (_ONE, _ZERO),
    HLBKind.HLB15: (_ONE, _ONE),
    HLBKind.HLB16: (_ONE, _ONE),
    HLBKind.HLB17: (_THIRD, _THIRD),
    HLBKind.HLB18: (_HALF, _HALF),
    HLBKind.HLB19: (_ONE, _ONE),
    HLBKind.HLB20: (_ONE, _ZERO),
}

# (x extent, y extent) where the two coordinates scale differently
_COORDINATE_EXPONENTS: dict[HLBKind, tuple[Fraction, Fraction]] = {
    HLBKind.HOPF: (_HALF, _HALF),
    HLBKind.HLB7: (_ONE, _HALF),
    HLBKind.HLB10: (_ONE, _HALF),
    HLBKind.HLB17: (Fraction(2, 3), _THIRD),
    HLBKind.HLB18: (_ONE, _HALF),
}

_TWO_PIECE_PERIOD = (HLBKind.HLB1, HLBKind.HLB2, HLBKind.HLB4)
_IMPACT_KINDS = (HLBKind.HLB11, HLBKind.HLB12, HLBKind.HLB13)

OnsetQuantity = Literal["trace", "equilibrium", "four_quadrant"]


class ClassificationError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


def scaling_row(kind: HLBKind) -> tuple[Fraction, Fraction]:
    """Amplitude and period exponents (a, b) of the cycle born at the bifurcation."""
    try:
        return SCALING_TABLE[kind]
    except KeyError:
        raise ClassificationError(f"No scaling law for {kind}") from None


def coordinate_exponents(kind: HLBKind) -> tuple[Fraction, Fraction]:
    a, _ = scaling_row(kind)
    return _COORDINATE_EXPONENTS.get(kind, (a, a))


class _Frame:
    """Pieces of a family evaluated at mu0 + mu_sign * dmu after the recorded transforms."""

    def __init__(self, pieces: Sequence[SmoothPiece], mu0: float):
        self.pieces = list(pieces)
        self.mu0 = mu0
        self.ops: list[str] = []

    @property
    def mu_sign(self) -> float:
        return -1.0 if self.ops.count("flip_mu") % 2 else 1.0

    @property
    def reversed(self) -> bool:
        return self.ops.count("reverse") % 2 == 1

    def mu(self, dmu: float = 0.0) -> float:
        return self.mu0 + self.mu_sign * dmu

    def apply(self, op: Literal["rotate", "reflect", "reverse", "flip_mu"]) -> None:
        _LOGGER.debug("Normalisation step: %s", op)
        self.ops.append(op)

    def tables(self, dmu: float = 0.0) -> list[TaylorTable]:
        tables = [piece.taylor(self.mu(dmu)) for piece in self.pieces]
        for op in self.ops:
            match op:
                case "rotate":
                    tables = [rotate_table(t) for t in reversed(tables)]
                case "reflect":
                    tables = [reflect_table(t) for t in tables]
                case "reverse":
                    tables = [reverse_table(t) for t in tables]
                case "flip_mu":
                    tables = [flip_mu_table(t) for t in tables]
        return tables


def _d_dmu(quantity: Callable[[float], float], step: float = COEFF_MU_STEP) -> float:
    return (quantity(step) - quantity(-step)) / (2 * step)


def _small(value: float, scale: float = 1.0, tol: float = EQ_TOL) -> bool:
    return abs(value) < tol * scale


def _item(name: str, satisfied: bool, witness: float | None = None, required: bool = True) -> ChecklistItem:
    return ChecklistItem(name=name, satisfied=bool(satisfied), witness=witness, required=required)


def _passed(items: Sequence[ChecklistItem]) -> bool:
    return all(item.satisfied for item in items if item.required)


def _at_origin(t: TaylorTable) -> bool:
    return _small(t.a0, t.scale) and _small(t.b0, t.scale)


def _fixed(t: TaylorTable) -> bool:
    """The stationary point at the origin does not move with mu."""
    return _small(t.dmu(0, 0, "f"), t.scale) and _small(t.dmu(0, 0, "g"), t.scale)


def _beb_beta(t: TaylorTable) -> float:
    """Rate at which the piece's equilibrium crosses x = 0, up to the Jacobian determinant."""
    return t.dmu(0, 0, "f") * t.b2 - t.dmu(0, 0, "g") * t.a2


def _continuous(tl: TaylorTable, tr: TaylorTable) -> bool:
    scale = max(tl.scale, tr.scale)
    pairs = [(tl.d(0, j, c), tr.d(0, j, c)) for j in range(5) for c in ("f", "g")]
    pairs += [(tl.dmu(0, j, c), tr.dmu(0, j, c)) for j in range(2) for c in ("f", "g")]
    return all(_small(a - b, scale) for a, b in pairs)


def _focus_items(label: str, eig: EigenData, stability: Literal["stable", "unstable", "any"]) -> list[ChecklistItem]:
    items = [_item(f"{label} equilibrium is a focus", eig.kind == "focus", eig.omega)]
    if stability == "unstable":
        items.append(_item(f"{label} focus is unstable", eig.kind == "focus" and eig.lam > 0, eig.lam))
    elif stability == "stable":
        items.append(_item(f"{label} focus is stable", eig.kind == "focus" and eig.lam < 0, eig.lam))
    return items


def _failed(kind: HLBKind, frame: _Frame, items: list[ChecklistItem], mu0: float) -> HLBReport:
    return HLBReport(kind=kind, checklist=items, normalization=list(frame.ops), mu0=mu0)


def _finish(
    kind: HLBKind,
    frame: _Frame,
    items: list[ChecklistItem],
    *,
    alpha: float | None = None,
    beta: float | None = None,
    gamma: float | None = None,
    side: int = 1,
    stable: bool | None = None,
    scale: float = 1.0,
    period_limit: float | None = None,
    period_coefficient: float | None = None,
    period_parts: Sequence[float] = (),
    radius_coefficient: float | None = None,
    extras: dict[str, float] | None = None,
) -> HLBReport:
    a, b = scaling_row(kind)
    if alpha is not None and _small(alpha, scale, ALPHA_TOL):
        _LOGGER.warning("%s: |alpha| = %.3e below tolerance, criticality is degenerate", kind, abs(alpha))
        criticality = Criticality.DEGENERATE
        side, stable = 0, None
    else:
        if stable is not None and frame.reversed:
            stable = not stable
        if alpha is not None:
            criticality = Criticality.SUPERCRITICAL if alpha < 0 else Criticality.SUBCRITICAL
        else:
            criticality = Criticality.SUPERCRITICAL if stable else Criticality.SUBCRITICAL
    report = HLBReport(
        kind=kind,
        alpha=alpha,
        beta=beta,
        gamma=gamma,
        criticality=criticality,
        exponents=(float(a), float(b)),
        period_limit=period_limit,
        period_coefficient=period_coefficient,
        period_parts=list(period_parts),
        radius_coefficient=radius_coefficient,
        radius_exponent=float(a),
        cycle_side=int(frame.mu_sign * side),
        cycle_stable=stable,
        normalization=list(frame.ops),
        checklist=items,
        extras=extras or {},
        mu0=frame.mu0,
    )
    _LOGGER.debug("Classified %s: alpha=%s beta=%s side=%s", kind, alpha, beta, report.cycle_side)
    return report


def _orient_clockwise(frame: _Frame) -> None:
    if frame.tables()[0].a2 < 0:
        frame.apply("reflect")


def _positive_beta(frame: _Frame, beta: Callable[[], float]) -> float:
    value = beta()
    if value < 0:
        frame.apply("flip_mu")
        value = beta()
    return value


# -- Hopf -------------------------------------------------------------------


def hopf_coeffs(table: TaylorTable) -> tuple[float, float]:
    """(alpha, beta) for a smooth field with Jacobian [[0, -w], [w, 0]] at the origin."""
    scale = table.scale
    if not _at_origin(table):
        raise ClassificationError("Hopf coefficients need an equilibrium at the origin")
    if not (_small(table.a1, scale) and _small(table.b2, scale) and _small(table.a2 + table.b1, scale)):
        raise ClassificationError(f"Jacobian {table.jacobian.tolist()} is not in real Jordan form")
    omega = table.b1
    if _small(omega, scale):
        raise ClassificationError("Hopf coefficients need omega != 0")

    def f(i: int, j: int) -> float:
        return table.d(i, j, "f")

    def g(i: int, j: int) -> float:
        return table.d(i, j, "g")

    alpha = f(3, 0) + g(2, 1) + f(1, 2) + g(0, 3) + (
        f(1, 1) * (f(2, 0) + f(0, 2)) - f(2, 0) * g(2, 0) - g(1, 1) * (g(2, 0) + g(0, 2)) + f(0, 2) * g(0, 2)
    ) / omega
    beta = table.dmu(1, 0, "f") + table.dmu(0, 1, "g")
    return alpha, beta


def _classify_smooth(mech: Smooth, mu0: float) -> list[HLBReport]:
    frame = _Frame([mech.field], mu0)
    t = frame.tables()[0]
    scale = t.scale
    jordan = _small(t.a1, scale) and _small(t.b2, scale) and _small(t.a2 + t.b1, scale)
    items = [
        _item("equilibrium at the origin", _at_origin(t), abs(t.a0) + abs(t.b0)),
        _item("Jacobian in real Jordan form", jordan, abs(t.a1) + abs(t.b2) + abs(t.a2 + t.b1)),
        _item("omega != 0", not _small(t.b1, scale), t.b1),
    ]
    if not _passed(items):
        return [_failed(HLBKind.HOPF, frame, items, mu0)]
    _, beta = hopf_coeffs(t)
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return [_failed(HLBKind.HOPF, frame, items, mu0)]
    beta = _positive_beta(frame, lambda: hopf_coeffs(frame.tables()[0])[1])
    t = frame.tables()[0]
    alpha, _ = hopf_coeffs(t)
    return [
        _finish(
            HLBKind.HOPF, frame, items,
            alpha=alpha, beta=beta, side=1 if alpha < 0 else -1, stable=alpha < 0, scale=scale,
            period_limit=2 * math.pi / abs(t.b1),
            radius_coefficient=math.sqrt(8 * beta / abs(alpha)) if alpha else None,
            extras={"omega": t.b1},
        )
    ]


# -- Period systems for boundary equilibria ----------------------------------


def _half_term(lam: float, omega: float, node: bool, s: float, sign: float) -> float:
    """omega G(s; sign lam/omega)/(lam^2 + omega^2), or its node form with omega = i eta."""
    if node:
        return omega * g_func_node(s, sign * lam / omega) / (lam * lam - omega * omega)
    return omega * g_func(s, sign * lam / omega) / (lam * lam + omega * omega)


def _s_bounds(node: bool, long_half: bool) -> tuple[float, float]:
    if node:
        return 0.0, NODE_S_MAX
    return (math.pi, 2 * math.pi) if long_half else (0.0, math.pi)


def solve_period_system(extras: dict[str, float], seed: Sequence[float] | None = None) -> tuple[float, float] | None:
    """Leading-order times (T_L, T_R) spent on each side by the cycle of HLB 1, 2 or 4.

    ``extras`` carries the eigen data, weights and offset stored on the report;
    ``seed`` is an optional (T_L, T_R) guess, otherwise a grid of the admissible
    half-turn windows is searched for the best start.
    """
    lam_l, omega_l = extras["lambda_L"], extras["omega_L"]
    lam_r, omega_r = extras["lambda_R"], extras["omega_R"]
    node_r = bool(extras.get("right_node", 0.0))
    long_left = bool(extras.get("long_left", 1.0))
    w_l, w_r, offset = extras.get("weight_L", 1.0), extras.get("weight_R", 1.0), extras.get("offset", 0.0)

    def residual(s: np.ndarray) -> np.ndarray:
        sl, sr = float(s[0]), float(s[1])
        return np.array([
            w_l * _half_term(lam_l, omega_l, False, sl, -1) + w_r * _half_term(lam_r, omega_r, node_r, sr, 1) - offset,
            w_l * _half_term(lam_l, omega_l, False, sl, 1) + w_r * _half_term(lam_r, omega_r, node_r, sr, -1) + offset,
        ])

    lower_l, upper_l = _s_bounds(False, long_left)
    lower_r, upper_r = _s_bounds(node_r, not long_left)
    if seed is not None:
        starts = [np.array([seed[0] * omega_l, seed[1] * omega_r])]
    else:
        grid_l = np.linspace(lower_l, upper_l, PERIOD_SEED_POINTS + 2)[1:-1]
        grid_r = np.linspace(lower_r, upper_r, PERIOD_SEED_POINTS + 2)[1:-1]
        starts = [np.array([sl, sr]) for sl in grid_l for sr in grid_r]

    best, best_norm = None, math.inf
    for start in starts:
        if not (lower_l < start[0] < upper_l and lower_r < start[1] < upper_r):
            continue
        try:
            norm = float(np.linalg.norm(residual(start)))
        except (ReturnMapError, ArithmeticError):
            continue
        if np.isfinite(norm) and norm < best_norm:
            best, best_norm = start, norm
    if best is None:
        _LOGGER.warning("No admissible start for the period system")
        return None
    try:
        s = damped_newton(residual, best, lower=(lower_l, lower_r), upper=(upper_l, upper_r))
    except (NewtonError, ReturnMapError, ArithmeticError) as e:
        _LOGGER.warning("Period system did not converge: %s", e)
        return None
    return float(s[0] / omega_l), float(s[1] / omega_r)


def _two_piece_period(extras: dict[str, float]) -> tuple[float | None, list[float]]:
    times = solve_period_system(extras)
    if times is None:
        return None, []
    return times[0] + times[1], list(times)


def _eigen_extras(el: EigenData, er: EigenData) -> dict[str, float]:
    return {"lambda_L": el.lam, "omega_L": el.omega, "lambda_R": er.lam, "omega_R": er.omega}


# -- Filippov: both half-systems have an equilibrium at the origin -----------


def _continuous_beb(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    tl, tr = frame.tables()
    el, er = tl.eigen, tr.eigen
    if "degenerate" in (el.kind, er.kind) or (el.kind == er.kind == "node"):
        items.append(_item("a focus on at least one side", False))
        return _failed(HLBKind.HLB1, frame, items, frame.mu0)

    if el.kind == er.kind == "focus":
        kind = HLBKind.HLB1
        if el.stable and not er.stable:
            frame.apply("rotate")
    else:
        kind = HLBKind.HLB2
        if el.kind == "node":
            frame.apply("rotate")
        tl, tr = frame.tables()
        if tl.eigen.stable and not tr.eigen.stable:
            frame.apply("reverse")
    _orient_clockwise(frame)
    beta = _positive_beta(frame, lambda: _beb_beta(frame.tables()[0]))
    tl, tr = frame.tables()
    el, er = tl.eigen, tr.eigen
    scale = max(tl.scale, tr.scale)

    items += _focus_items("left", el, "unstable")
    if kind == HLBKind.HLB1:
        items += _focus_items("right", er, "stable")
    else:
        items.append(_item("right equilibrium is a stable node", er.kind == "node" and er.stable, er.lam + er.omega))
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return _failed(kind, frame, items, frame.mu0)

    extras = _eigen_extras(el, er)
    if kind == HLBKind.HLB1:
        alpha = el.lam / el.omega + er.lam / er.omega
        extras["long_left"] = 1.0 if alpha < 0 else 0.0
        period, parts = _two_piece_period(extras)
        return _finish(kind, frame, items, alpha=alpha, beta=beta, side=1 if alpha < 0 else -1,
                       stable=alpha < 0, scale=scale, period_limit=period, period_parts=parts, extras=extras)
    extras.update(right_node=1.0, long_left=1.0)
    period, parts = _two_piece_period(extras)
    return _finish(kind, frame, items, beta=beta, side=1, stable=True, scale=scale,
                   period_limit=period, period_parts=parts, extras=extras)


def _discontinuous_beb(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    tl, tr = frame.tables()
    if tl.eigen.stable and not tr.eigen.stable:
        frame.apply("rotate")
    _orient_clockwise(frame)
    _positive_beta(frame, lambda: _beb_beta(frame.tables()[0]))
    tl, tr = frame.tables()
    el, er = tl.eigen, tr.eigen
    scale = max(tl.scale, tr.scale)
    beta_l, beta_r = _beb_beta(tl), _beb_beta(tr)
    gamma = tl.a2 * tr.dmu(0, 0, "f") - tl.dmu(0, 0, "f") * tr.a2

    items += _focus_items("left", el, "unstable") + _focus_items("right", er, "stable")
    items += [
        _item("same rotation, a2L a2R > 0", tl.a2 * tr.a2 > 0, tl.a2 * tr.a2),
        _item("beta_L > 0", beta_l > EQ_TOL * scale, beta_l),
        _item("beta_R > 0", beta_r > EQ_TOL * scale, beta_r),
        _item("a2L gamma >= 0", tl.a2 * gamma >= -EQ_TOL * scale, tl.a2 * gamma),
    ]
    if not _passed(items):
        return _failed(HLBKind.HLB4, frame, items, frame.mu0)

    alpha = el.lam / el.omega + er.lam / er.omega
    extras = _eigen_extras(el, er)
    extras.update(
        beta_L=beta_l,
        beta_R=beta_r,
        weight_L=beta_l / tl.a2,
        weight_R=beta_r / tr.a2,
        offset=gamma / (tl.a2 * tr.a2),
        long_left=1.0 if alpha < 0 else 0.0,
    )
    period, parts = _two_piece_period(extras)
    return _finish(HLBKind.HLB4, frame, items, alpha=alpha, beta=beta_l, gamma=gamma,
                   side=1 if alpha < 0 else -1, stable=alpha < 0, scale=scale,
                   period_limit=period, period_parts=parts, extras=extras)


def _slipping_focus_focus(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    tl, tr = frame.tables()
    if tl.eigen.stable and not tr.eigen.stable:
        frame.apply("rotate")
    _orient_clockwise(frame)

    def beta_now() -> float:
        left, right = frame.tables()
        return -left.dmu(0, 0, "f") / left.a2 + right.dmu(0, 0, "f") / right.a2

    beta = _positive_beta(frame, beta_now)
    tl, tr = frame.tables()
    el, er = tl.eigen, tr.eigen
    scale = max(tl.scale, tr.scale)
    items += _focus_items("left", el, "unstable") + _focus_items("right", er, "stable")
    items += [
        _item("df_L/dy > 0", tl.a2 > 0, tl.a2),
        _item("df_R/dy > 0", tr.a2 > 0, tr.a2),
        _item("beta != 0", not _small(beta, scale), beta),
    ]
    if not _passed(items):
        return _failed(HLBKind.HLB5, frame, items, frame.mu0)
    alpha = el.lam / el.omega + er.lam / er.omega
    gamma = tl.a2 * tr.b2 - tr.a2 * tl.b2
    return _finish(HLBKind.HLB5, frame, items, alpha=alpha, beta=beta, gamma=gamma,
                   side=1 if alpha < 0 else -1, stable=alpha < 0, scale=scale,
                   period_limit=math.pi / el.omega + math.pi / er.omega,
                   period_parts=[math.pi / el.omega, math.pi / er.omega], extras=_eigen_extras(el, er))


def _focus_lambda(frame: _Frame, dmu: float) -> float:
    tl, tr = frame.tables(dmu)
    el, er = tl.eigen, tr.eigen
    if el.kind != "focus" or er.kind != "focus":
        raise ClassificationError("Lambda needs foci on both sides")
    return el.lam / el.omega + er.lam / er.omega


def _fixed_focus_focus(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    _orient_clockwise(frame)
    tl, tr = frame.tables()
    el, er = tl.eigen, tr.eigen
    scale = max(tl.scale, tr.scale)
    items += _focus_items("left", el, "any") + _focus_items("right", er, "any")
    items.append(_item("same rotation, a2L a2R > 0", tl.a2 * tr.a2 > 0, tl.a2 * tr.a2))
    if not _passed(items):
        return _failed(HLBKind.HLB8, frame, items, frame.mu0)
    lam0 = _focus_lambda(frame, 0.0)
    items.append(_item("Lambda(0) = 0", _small(lam0), lam0))
    beta = _positive_beta(frame, lambda: _d_dmu(lambda d: _focus_lambda(frame, d)))
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return _failed(HLBKind.HLB8, frame, items, frame.mu0)
    tl, tr = frame.tables()
    el, er = tl.eigen, tr.eigen
    alpha = chi_focus(tl) - chi_focus(tr)
    radius = beta * math.pi / (abs(alpha) * (math.exp(er.lam * math.pi / er.omega) + 1)) if alpha else None
    return _finish(HLBKind.HLB8, frame, items, alpha=alpha, beta=beta, side=1 if alpha < 0 else -1,
                   stable=alpha < 0, scale=scale, period_limit=math.pi / el.omega + math.pi / er.omega,
                   period_parts=[math.pi / el.omega, math.pi / er.omega], radius_coefficient=radius,
                   extras={**_eigen_extras(el, er), "Lambda0": lam0})


def _pseudo_equilibria_note(sys: PWSystem, mu0: float) -> ChecklistItem:
    count = 0
    try:
        for offset in (-1e-3, 1e-3):
            count += len(find_pseudo_equilibria(sys, (-0.1, 0.1), mu0 + offset))
    except GeometryError:
        pass
    return _item("no pseudo-equilibria near the bifurcation", count == 0, float(count), required=False)


def _both_equilibria(sys: PWSystem, mech: Filippov, mu0: float) -> HLBReport:
    frame = _Frame([mech.left, mech.right], mu0)
    tl, tr = frame.tables()
    items = [_item("left equilibrium at the origin", True), _item("right equilibrium at the origin", True)]
    if _fixed(tl) and _fixed(tr):
        items.append(_item("both equilibria fixed at the origin", True))
        return _fixed_focus_focus(frame, items)
    scale = max(tl.scale, tr.scale)
    if _small(_beb_beta(tl), scale) and _small(_beb_beta(tr), scale):
        items.append(_item("both equilibria slide along x = 0", True))
        return _slipping_focus_focus(frame, items)
    if _continuous(tl, tr):
        items.append(_item("continuous across x = 0", True))
        return _continuous_beb(frame, items)
    items.append(_pseudo_equilibria_note(sys, mu0))
    return _discontinuous_beb(frame, items)


# -- Filippov: one equilibrium at the origin ---------------------------------


def _focus_sliding(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    tl, tr = frame.tables()
    if tl.eigen.kind == "focus" and tl.eigen.lam < 0:
        frame.apply("reverse")
    beta = _positive_beta(frame, lambda: _beb_beta(frame.tables()[0]))
    tl, tr = frame.tables()
    el = tl.eigen
    scale = max(tl.scale, tr.scale)
    gamma = tl.a2 * tr.b0 - tl.b2 * tr.a0
    items += _focus_items("left", el, "unstable")
    items += [
        _item("f_R(0,0) < 0", tr.a0 < 0, tr.a0),
        _item("gamma < 0", gamma < 0, gamma),
        _item("beta != 0", not _small(beta, scale), beta),
    ]
    if not _passed(items):
        return _failed(HLBKind.HLB3, frame, items, frame.mu0)
    nu = el.lam / el.omega
    s_hat = aux_shat(nu)
    t_left = s_hat / el.omega
    a0r = tr.a0
    t_slide = a0r / gamma * math.log(1 - gamma * math.exp(nu * s_hat) * math.sin(s_hat) / (a0r * el.omega))
    return _finish(HLBKind.HLB3, frame, items, beta=beta, gamma=gamma, side=1, stable=True, scale=scale,
                   period_limit=t_left + t_slide, period_parts=[t_left, t_slide],
                   extras={"lambda_L": el.lam, "omega_L": el.omega, "a0R": a0r, "s_hat": s_hat})


def _slipping_focus_fold(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    beta = _positive_beta(frame, lambda: frame.tables()[1].dmu(0, 0, "f"))
    tl, tr = frame.tables()
    el = tl.eigen
    scale = max(tl.scale, tr.scale)
    items += _focus_items("left", el, "any")
    items += [
        _item("df_L/dy > 0", tl.a2 > 0, tl.a2),
        _item("df_R/dy > 0", tr.a2 > 0, tr.a2),
        _item("g_R(0,0) < 0", tr.b0 < 0, tr.b0),
        _item("beta != 0", not _small(beta, scale), beta),
    ]
    if not _passed(items):
        return _failed(HLBKind.HLB6, frame, items, frame.mu0)
    alpha = el.lam
    return _finish(HLBKind.HLB6, frame, items, alpha=alpha, beta=beta, side=1 if alpha < 0 else -1,
                   stable=alpha < 0, scale=scale, period_limit=math.pi / el.omega,
                   extras={"lambda_L": el.lam, "omega_L": el.omega})


def _fixed_focus_fold(frame: _Frame, items: list[ChecklistItem]) -> HLBReport:
    tl, tr = frame.tables()
    el = tl.eigen
    scale = max(tl.scale, tr.scale)
    gamma = tr.a2 * tr.b0
    items += _focus_items("left", el, "any")
    items += [
        _item("lambda_L(0) = 0", _small(el.lam, scale), el.lam),
        _item("same rotation, a2L a2R > 0", tl.a2 * tr.a2 > 0, tl.a2 * tr.a2),
        _item("gamma < 0", gamma < 0, gamma),
    ]
    if not _passed(items):
        return _failed(HLBKind.HLB9, frame, items, frame.mu0)

    def lam_left(dmu: float) -> float:
        return frame.tables(dmu)[0].eigen.lam

    beta = _positive_beta(frame, lambda: _d_dmu(lam_left))
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return _failed(HLBKind.HLB9, frame, items, frame.mu0)
    tl, tr = frame.tables()
    alpha = chi_focus(tl) - sigma_fold(tr, "right") / 3
    radius = beta * math.pi / (2 * abs(alpha) * el.omega) if alpha else None
    return _finish(HLBKind.HLB9, frame, items, alpha=alpha, beta=beta, gamma=gamma,
                   side=1 if alpha < 0 else -1, stable=alpha < 0, scale=scale,
                   period_limit=math.pi / el.omega, radius_coefficient=radius,
                   extras={"omega_L": el.omega, "sigma_R": sigma_fold(tr, "right")})


def _one_equilibrium(mech: Filippov, mu0: float, on_right: bool) -> HLBReport:
    frame = _Frame([mech.left, mech.right], mu0)
    if on_right:
        frame.apply("rotate")
    tl, tr = frame.tables()
    items = [_item("one equilibrium at the origin", True)]
    if not _small(tr.a0, tr.scale, FOLD_TOL):
        items.append(_item("other side has f(0,0) != 0", True, tr.a0))
        return _focus_sliding(frame, items)

    items.append(_item("other side has a fold at the origin", True, tr.a0))
    _orient_clockwise(frame)
    tl, _ = frame.tables()
    items.append(_item("equilibrium fixed at the origin", _fixed(tl), abs(tl.dmu(0, 0, "f")) + abs(tl.dmu(0, 0, "g"))))
    if not _passed(items):
        return _failed(HLBKind.UNCLASSIFIED, frame, items, mu0)
    tr = frame.tables()[1]
    if _small(tr.dmu(0, 0, "f"), tr.scale):
        return _fixed_focus_fold(frame, items)
    return _slipping_focus_fold(frame, items)


# -- Filippov: two folds -------------------------------------------------------


def _fold_lambda(frame: _Frame, dmu: float) -> float:
    tl, tr = frame.tables(dmu)
    return sigma_fold(tl, "left") - sigma_fold(tr, "right")


def _orient_two_fold(frame: _Frame) -> tuple[TaylorTable, TaylorTable]:
    _orient_clockwise(frame)
    tl, tr = frame.tables()
    if tl.b0 < 0 < tr.b0:
        frame.apply("rotate")
        tl, tr = frame.tables()
    return tl, tr


def _fold_items(tl: TaylorTable, tr: TaylorTable) -> list[ChecklistItem]:
    return [
        _item("df_L/dy > 0", tl.a2 > 0, tl.a2),
        _item("df_R/dy > 0", tr.a2 > 0, tr.a2),
        _item("g_L(0,0) > 0", tl.b0 > 0, tl.b0),
        _item("g_R(0,0) < 0", tr.b0 < 0, tr.b0),
    ]


def _two_fold(mech: Filippov, mu0: float) -> HLBReport:
    frame = _Frame([mech.left, mech.right], mu0)
    tl, tr = _orient_two_fold(frame)
    scale = max(tl.scale, tr.scale)
    items = [_item("folds of both sides at the origin", True)] + _fold_items(tl, tr)
    fixed = _small(tl.dmu(0, 0, "f"), scale) and _small(tr.dmu(0, 0, "f"), scale)
    kind = HLBKind.HLB10 if fixed else HLBKind.HLB7
    if not _passed(items):
        return _failed(kind, frame, items, mu0)
    g_factor = 2 / tl.b0 - 2 / tr.b0

    if not fixed:
        def beta_now() -> float:
            left, right = frame.tables()
            return right.dmu(0, 0, "f") / right.a2 - left.dmu(0, 0, "f") / left.a2

        beta = _positive_beta(frame, beta_now)
        items.append(_item("beta != 0", not _small(beta, scale), beta))
        if not _passed(items):
            return _failed(kind, frame, items, mu0)
        tl, tr = frame.tables()
        alpha = sigma_fold(tl, "left") - sigma_fold(tr, "right")
        root = math.sqrt(3 * beta / abs(alpha)) if alpha else None
        return _finish(kind, frame, items, alpha=alpha, beta=beta, side=1 if alpha < 0 else -1,
                       stable=alpha < 0, scale=scale,
                       period_coefficient=g_factor * root if root else None, radius_coefficient=root,
                       extras={"g_L": tl.b0, "g_R": tr.b0})

    lam0 = _fold_lambda(frame, 0.0)
    items.append(_item("Lambda(0) = 0", _small(lam0, scale), lam0))
    beta = _positive_beta(frame, lambda: _d_dmu(lambda d: _fold_lambda(frame, d)))
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return _failed(kind, frame, items, mu0)
    tl, tr = frame.tables()
    alpha = chi_fold(tl, "left") - chi_fold(tr, "right")
    root = math.sqrt(5 * beta / abs(alpha)) if alpha else None
    return _finish(kind, frame, items, alpha=alpha, beta=beta, side=1 if alpha < 0 else -1,
                   stable=alpha < 0, scale=scale,
                   period_coefficient=g_factor * root if root else None, radius_coefficient=root,
                   extras={"g_L": tl.b0, "g_R": tr.b0, "Lambda0": lam0})


def _classify_filippov(sys: PWSystem, mech: Filippov, mu0: float) -> list[HLBReport]:
    tl, tr = mech.left.taylor(mu0), mech.right.taylor(mu0)
    eq_l, eq_r = _at_origin(tl), _at_origin(tr)
    if eq_l and eq_r:
        return [_both_equilibria(sys, mech, mu0)]
    if eq_l or eq_r:
        return [_one_equilibrium(mech, mu0, on_right=eq_r)]
    if _small(tl.a0, tl.scale, FOLD_TOL) and _small(tr.a0, tr.scale, FOLD_TOL):
        return [_two_fold(mech, mu0)]
    return []


# -- Hysteresis and delay -------------------------------------------------------


def _classify_switching(mech: Hysteretic | Delayed, mu0: float) -> list[HLBReport]:
    delayed = isinstance(mech, Delayed)
    frame = _Frame([mech.left, mech.right], mu0)
    tl, tr = frame.tables()
    scale = max(tl.scale, tr.scale)

    if _small(tl.a0, scale, FOLD_TOL) and _small(tr.a0, scale, FOLD_TOL):
        kind = HLBKind.HLB18 if delayed else HLBKind.HLB17
        tl, tr = _orient_two_fold(frame)
        items = [
            _item("f_L(0,0) = f_R(0,0) = 0", True),
            _item("same rotation, a2L a2R > 0", tl.a2 * tr.a2 > 0, tl.a2 * tr.a2),
            _item("gamma_L > 0", tl.a2 * tl.b0 > 0, tl.a2 * tl.b0),
            _item("gamma_R < 0", tr.a2 * tr.b0 < 0, tr.a2 * tr.b0),
        ]
        if not _passed(items):
            return [_failed(kind, frame, items, mu0)]
        kappa = tl.b0 / tl.a2 - tr.b0 / tr.a2
        alpha = sigma_fold(tl, "left") - sigma_fold(tr, "right")
        g_factor = abs(2 / tl.b0 - 2 / tr.b0)
        if not alpha:
            coefficient, radius = None, None
        elif delayed:
            coefficient = g_factor * math.sqrt(3 * (tl.a2 + tr.a2) * kappa / (2 * abs(alpha)))
            radius = None
        else:
            coefficient = g_factor * (3 * kappa / abs(alpha)) ** (1 / 3)
            radius = math.sqrt(3 * kappa / abs(alpha))
        return [
            _finish(kind, frame, items, alpha=alpha, side=1 if alpha < 0 else 0,
                    stable=True if alpha < 0 else None, scale=scale, period_coefficient=coefficient,
                    radius_coefficient=radius, extras={"kappa": kappa, "b0L": tl.b0, "b0R": tr.b0})
        ]

    kind = HLBKind.HLB16 if delayed else HLBKind.HLB15
    a0l, a0r = tl.a0, tr.a0
    pseudo = tl.a0 * tr.b0 - tr.a0 * tl.b0
    items = [
        _item("f_R(0,0) < 0 < f_L(0,0)", a0r < 0 < a0l, min(a0l, -a0r)),
        _item("origin is a pseudo-equilibrium", _small(pseudo, scale), pseudo),
    ]
    if not _passed(items):
        return [_failed(kind, frame, items, mu0)]
    alpha = tl.a2 * tr.b0 + tl.a0 * tr.b2 - tr.a2 * tl.b0 - tr.a0 * tl.b2
    if delayed:
        coefficient = 2 - a0l / a0r - a0r / a0l
    else:
        coefficient = 2 / a0l - 2 / a0r
    return [
        _finish(kind, frame, items, alpha=alpha, side=1, stable=alpha < 0, scale=scale,
                period_coefficient=coefficient, extras={"a0L": a0l, "a0R": a0r})
    ]


# -- Impacting systems --------------------------------------------------------


def _impact_period(lam: float, omega: float, gamma: float, node: bool, bracket: tuple[float, float]) -> float | None:
    rho = aux_rho_node if node else aux_rho
    nu = lam / omega

    def h(period: float) -> float:
        s = omega * period
        return gamma * math.exp(2 * lam * period) * rho(s, -nu) - rho(s, nu)

    grid = np.linspace(bracket[0], bracket[1], IMPACT_PERIOD_POINTS)[1:-1]
    root = first_root(h, grid)
    if root is None:
        _LOGGER.warning("No root of the impacting period equation in (%.6g, %.6g)", *bracket)
    return root


def _classify_impact(mech: Impact, mu0: float) -> list[HLBReport]:
    frame = _Frame([mech.field], mu0)
    step = 1e-6
    t = frame.tables()[0]
    scale = t.scale
    eig = t.eigen
    det = float(np.linalg.det(t.jacobian))
    gamma = -(mech.reset(step, mu0) - mech.reset(-step, mu0)) / (2 * step)
    items = list(mech.well_posedness(mu0)) + [
        _item("g(0,0) = 0", _small(t.b0, scale), t.b0),
        _item("det DF > 0", det > 0, det),
        _item("gamma > 0", gamma > 0, gamma),
        _item("eigenvalues not degenerate", eig.kind != "degenerate", eig.omega),
    ]
    if not _passed(items):
        return [_failed(HLBKind.HLB11, frame, items, mu0)]
    items.append(_item("lambda ln(gamma) < 0", eig.lam * math.log(gamma) < 0, eig.lam * math.log(gamma)))
    beta = _positive_beta(frame, lambda: -frame.tables()[0].dmu(0, 0, "g") * frame.tables()[0].a2)
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    lam, omega = eig.lam, eig.omega
    extras = {"lambda": lam, "omega": omega, "gamma_reset": gamma}

    if eig.kind == "node":
        if not _passed(items):
            return [_failed(HLBKind.HLB13, frame, items, mu0)]
        period = _impact_period(lam, omega, gamma, True, (0.0, NODE_S_MAX / omega))
        return [_finish(HLBKind.HLB13, frame, items, beta=beta, gamma=gamma, side=-1, stable=lam < 0,
                        scale=scale, period_limit=period, extras=extras)]

    alpha = math.log(gamma) + lam * math.pi / omega
    kind = HLBKind.HLB11 if lam * alpha <= 0 else HLBKind.HLB12
    if not _passed(items):
        return [_failed(kind, frame, items, mu0)]
    if kind == HLBKind.HLB11:
        bracket, side = (math.pi / omega, 2 * math.pi / omega), 1
    else:
        bracket, side = (0.0, math.pi / omega), -1
    period = _impact_period(lam, omega, gamma, False, bracket)
    return [_finish(kind, frame, items, alpha=alpha, beta=beta, gamma=gamma, side=side, stable=alpha < 0,
                    scale=scale, period_limit=period, extras=extras)]


# -- Impulsive systems --------------------------------------------------------


def _impulse_lambda(mech: Impulse, frame: _Frame, dmu: float) -> float:
    t = frame.tables(dmu)[0]
    mu = frame.mu(dmu)
    step = 1e-6
    gamma = (mech.radius(step, mu) - mech.radius(-step, mu)) / (2 * step)
    phi = wrap_angle(mech.angle(0.0, mu))
    return math.log(gamma) + t.a1 / t.a2 * (phi + 1.5 * math.pi)


def impulse_alpha(mech: Impulse, table: TaylorTable, mu: float) -> float:
    """Criticality coefficient of an impulsive focus, with the polar integral done by quadrature."""
    lam, omega = table.a1, table.a2
    ratio = lam / omega
    h2, h1 = 1e-4, 1e-6
    gamma = (mech.radius(h1, mu) - mech.radius(-h1, mu)) / (2 * h1)
    r_yy = (mech.radius(h2, mu) - 2 * mech.radius(0.0, mu) + mech.radius(-h2, mu)) / (h2 * h2)
    theta_y = (mech.angle(h1, mu) - mech.angle(-h1, mu)) / (2 * h1)
    phi = wrap_angle(mech.angle(0.0, mu))
    a1, a2, a3 = table.a3, table.a4, table.a5
    b1, b2, b3 = table.b3, table.b4, table.b5

    def integrand(theta: float) -> float:
        c, s = math.cos(theta), math.sin(theta)
        big_f = a1 * c**3 + (a2 + b1) * c * c * s + (a3 + b2) * c * s * s + b3 * s**3
        big_g = b1 * c**3 + (b2 - a1) * c * c * s + (b3 - a2) * c * s * s - a3 * s**3
        return math.exp(-ratio * theta) * (big_f + ratio * big_g)

    integral, _ = quad(integrand, -1.5 * math.pi, phi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return r_yy / (2 * gamma) + ratio * theta_y + math.exp(-1.5 * math.pi * ratio) * integral / omega


def _classify_impulse(mech: Impulse, mu0: float) -> list[HLBReport]:
    frame = _Frame([mech.field], mu0)
    t = frame.tables()[0]
    scale = t.scale
    step = 1e-6
    gamma = (mech.radius(step, mu0) - mech.radius(-step, mu0)) / (2 * step)
    items = list(mech.well_posedness(mu0)) + [
        _item("equilibrium at the origin", _at_origin(t), abs(t.a0) + abs(t.b0)),
        _item("Jacobian [[lam, w], [-w, lam]]", _small(t.a1 - t.b2, scale) and _small(t.a2 + t.b1, scale),
              abs(t.a1 - t.b2) + abs(t.a2 + t.b1)),
        _item("clockwise rotation, w > 0", t.a2 > 0, t.a2),
        _item("gamma > 0", gamma > 0, gamma),
    ]
    if not _passed(items):
        return [_failed(HLBKind.HLB14, frame, items, mu0)]
    lam0 = _impulse_lambda(mech, frame, 0.0)
    items.append(_item("Lambda(0) = 0", _small(lam0), lam0))
    beta = _positive_beta(frame, lambda: _d_dmu(lambda d: _impulse_lambda(mech, frame, d)))
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return [_failed(HLBKind.HLB14, frame, items, mu0)]
    t = frame.tables()[0]
    alpha = impulse_alpha(mech, t, mu0)
    phi = wrap_angle(mech.angle(0.0, mu0))
    return [_finish(HLBKind.HLB14, frame, items, alpha=alpha, beta=beta, gamma=gamma,
                    side=1 if alpha < 0 else -1, stable=alpha < 0, scale=scale,
                    period_limit=(phi + 1.5 * math.pi) / t.a2,
                    extras={"lambda": t.a1, "omega": t.a2, "phi": phi, "Lambda0": lam0})]


# -- Four pieces ----------------------------------------------------------------


def _slopes(tables: Sequence[TaylorTable]) -> list[float]:
    return [t.b0 / t.a0 for t in tables]


def _quadrant_lambda(frame: _Frame, dmu: float) -> float:
    m1, m2, m3, m4 = _slopes(frame.tables(dmu))
    return m2 * m4 / (m1 * m3)


def four_quadrant_lambda(sys: PWSystem, mu: float | None = None) -> float:
    """Linear growth factor of one turn around the four-piece origin."""
    if not isinstance(sys.mechanism, FourQuadrant):
        raise ClassificationError("Lambda(mu) is defined for four-piece systems only")
    mu = sys.mu if mu is None else mu
    return _quadrant_lambda(_Frame(sys.pieces(), mu), 0.0)


def _xi(t: TaylorTable) -> float:
    f, g = t.a0, t.b0
    return ((g / f) * t.a2 - (t.a1 + t.b2) + (f / g) * t.b1) / f


def _classify_four_quadrant(mech: FourQuadrant, mu0: float) -> list[HLBReport]:
    frame = _Frame(list(mech.quadrants), mu0)
    items = list(mech.well_posedness(mu0))
    if not _passed(items):
        return [_failed(HLBKind.HLB19, frame, items, mu0)]
    lam0 = _quadrant_lambda(frame, 0.0)
    items.append(_item("Lambda(0) = 1", _small(lam0 - 1), lam0))
    beta = _positive_beta(frame, lambda: _d_dmu(lambda d: _quadrant_lambda(frame, d)))
    tables = frame.tables()
    scale = max(t.scale for t in tables)
    items.append(_item("beta != 0", not _small(beta, scale), beta))
    if not _passed(items):
        return [_failed(HLBKind.HLB19, frame, items, mu0)]
    m1, m2, m3, m4 = _slopes(tables)
    xi1, xi2, xi3, xi4 = (_xi(t) for t in tables)
    alpha = (xi1 - xi2) / m1 + (xi3 - xi4) / m4
    q1, q2, q3, q4 = tables
    bracket = -1 / q1.b0 + 1 / (q2.a0 * m1) - 1 / (q3.a0 * m4) + 1 / q4.b0
    coefficient = 2 * beta / abs(alpha) * bracket if alpha else None
    return [_finish(HLBKind.HLB19, frame, items, alpha=alpha, beta=beta, side=1 if alpha < 0 else -1,
                    stable=alpha < 0, scale=scale, period_coefficient=coefficient,
                    extras={"Lambda0": lam0, "m1": m1, "m2": m2, "m3": m3, "m4": m4})]


# -- Square-root continuous systems --------------------------------------------


def _classify_sqrt(mech: SqrtContinuous, mu0: float) -> list[HLBReport]:
    frame = _Frame([mech.left], mu0)
    t = frame.tables()[0]
    if t.eigen.kind == "focus" and t.eigen.lam < 0:
        frame.apply("reverse")
    row_f, row_g = (np.array(r, dtype=float) for r in mech.linear_coefficients(mu0))
    if frame.reversed:
        row_f, row_g = -row_f, -row_g

    def beta_of(f: np.ndarray, g: np.ndarray) -> float:
        return float(f[2] * g[1] - f[1] * g[2])

    if beta_of(row_f, row_g) < 0:
        frame.apply("flip_mu")
        row_f[2], row_g[2] = -row_f[2], -row_g[2]
    a1, a2, a3, a4 = row_f
    b1, b2, b3, b4 = row_g
    beta = beta_of(row_f, row_g)
    gamma = float(a4 * b2 - a2 * b4)
    t = frame.tables()[0]
    eig = t.eigen
    scale = t.scale
    items = list(mech.well_posedness(mu0)) + _focus_items("left", eig, "unstable") + [
        _item("right equilibrium is a node, a4 != 0", not _small(a4, scale), float(a4)),
        _item("a4 < 0", a4 < 0, float(a4)),
        _item("beta != 0", not _small(beta, scale), beta),
        _item("gamma > 0", gamma > 0, gamma),
    ]
    if not _passed(items):
        return [_failed(HLBKind.HLB20, frame, items, mu0)]
    nu = eig.lam / eig.omega
    s_hat = aux_shat(nu)
    kappa = abs(a4) / gamma
    t_left = s_hat / eig.omega
    # landing height on x = 0 per unit mu; sin(s_hat) < 0 for an unstable focus
    landing = math.exp(nu * s_hat) * abs(math.sin(s_hat)) / eig.omega
    argument = 1 + landing / kappa
    if not argument > 0 or not math.isfinite(argument):
        raise ClassificationError(f"HLB20 slow-flow time is undefined (log argument {argument:.6g})")
    t_right = kappa * math.log(argument)
    return [_finish(HLBKind.HLB20, frame, items, beta=beta, gamma=gamma, side=1, stable=True, scale=scale,
                    period_limit=t_left + t_right, period_parts=[t_left, t_right], radius_coefficient=landing,
                    extras={"lambda": eig.lam, "omega": eig.omega, "kappa": kappa, "s_hat": s_hat,
                            "landing": landing})]


# -- Entry points -------------------------------------------------------------


def _candidates(sys: PWSystem, mu0: float) -> list[HLBReport]:
    mech = sys.mechanism
    match mech:
        case Smooth():
            return _classify_smooth(mech, mu0)
        case Filippov():
            return _classify_filippov(sys, mech, mu0)
        case Impact():
            return _classify_impact(mech, mu0)
        case Impulse():
            return _classify_impulse(mech, mu0)
        case Hysteretic() | Delayed():
            return _classify_switching(mech, mu0)
        case FourQuadrant():
            return _classify_four_quadrant(mech, mu0)
        case SqrtContinuous():
            return _classify_sqrt(mech, mu0)
    raise ClassificationError(f"Unsupported mechanism {sys.tag}")


def classify(sys: PWSystem, mu0: float = 0.0) -> HLBReport:
    """Decide which bifurcation's hypotheses hold at (0, 0; mu0) and compute its coefficients.

    A failed hypothesis gives an ``unclassified`` report whose checklist shows
    every witness. More than one matching branch is an error.
    """
    if not sys.canonical:
        raise ClassificationError(f"Model '{sys.name}' is not in canonical coordinates; classify its canonical form")
    try:
        candidates = _candidates(sys, float(mu0))
    except ReturnMapError as e:
        raise ClassificationError(f"Coefficient evaluation failed for '{sys.name}': {e}") from e
    matches = [r for r in candidates if r.kind != HLBKind.UNCLASSIFIED and _passed(r.checklist)]
    if len(matches) > 1:
        raise ClassificationError(f"Model '{sys.name}' matches several branches: {[r.kind for r in matches]}")
    if matches:
        _LOGGER.info("Model '%s' at mu0=%s: %s (%s)", sys.name, mu0, matches[0].kind, matches[0].criticality)
        return matches[0]
    checklist = [item for r in candidates for item in r.checklist]
    if not candidates:
        checklist.append(_item("an equilibrium or fold of a piece at the origin", False))
    _LOGGER.info("Model '%s' at mu0=%s is unclassified", sys.name, mu0)
    return HLBReport(kind=HLBKind.UNCLASSIFIED, checklist=checklist, mu0=float(mu0))


def _normalised_mu(report: HLBReport, mu: float) -> float:
    sign = -1.0 if report.normalization.count("flip_mu") % 2 else 1.0
    return sign * (mu - report.mu0)


def predicted_radius(report: HLBReport, mu: float) -> float | None:
    """Leading-order size of the cycle on the return section, None on the side without a cycle.

    Without a closed form the scale |mu|^a is returned, which is enough to centre a scan.
    """
    if not report.classified or report.cycle_side == 0:
        return None
    offset = mu - report.mu0
    if offset == 0 or np.sign(offset) != report.cycle_side:
        return None
    size = abs(_normalised_mu(report, mu))
    exponent = report.radius_exponent or 1.0
    coefficient = report.radius_coefficient if report.radius_coefficient else 1.0
    return coefficient * size**exponent


def predicted_period(report: HLBReport, sys: PWSystem | None = None, mu: float | None = None) -> float:
    """Leading-order period of the cycle at ``mu``.

    Limits are returned as they are; power laws need ``mu``. When the implicit
    period system has no solution the period of the simulated cycle closest
    to the bifurcation is used, and it also seeds one more Newton attempt.
    """
    if not report.classified:
        raise ClassificationError("No period prediction for an unclassified report")
    if report.period_limit is not None:
        return report.period_limit
    if report.period_coefficient is not None:
        if mu is None:
            raise ClassificationError(f"{report.kind} period grows like |mu|^b; pass mu")
        _, b = scaling_row(report.kind)
        return report.period_coefficient * abs(mu - report.mu0) ** float(b)
    if sys is None:
        raise ClassificationError(f"No closed-form period for {report.kind}; pass the system to simulate")
    return _simulated_period(report, sys, mu)


def _simulated_period(report: HLBReport, sys: PWSystem, mu: float | None) -> float:
    from .poincare import find_limit_cycle

    if report.cycle_side == 0:
        raise ClassificationError(f"{report.kind} has no cycle to simulate")
    mu = report.mu0 + report.cycle_side * 1e-3 if mu is None else mu
    cycle = find_limit_cycle(sys, mu, seed=predicted_radius(report, mu))
    if cycle is None:
        raise ClassificationError(f"No simulated cycle for {report.kind} at mu={mu}")
    if report.kind in _TWO_PIECE_PERIOD:
        for fraction in np.linspace(0.1, 0.9, 9):
            times = solve_period_system(report.extras, seed=(fraction * cycle.period, (1 - fraction) * cycle.period))
            if times is not None:
                return times[0] + times[1]
    _LOGGER.warning("Using the simulated period %.6g at mu=%s", cycle.period, mu)
    return cycle.period


# -- Normal forms and onset scans -----------------------------------------------


def normal_form_two_fold(r: float, mu: float, alpha: float, beta: float) -> float:
    """Return map about a fixed invisible two-fold: r + (2 beta mu / 3) r^2 + (2 alpha / 15) r^4."""
    return r + 2 * beta * mu / 3 * r * r + 2 * alpha / 15 * r**4


def normal_form_hysteretic_two_fold(r: float, mu: float, alpha: float, kappa: float) -> float:
    """Return map about a two-fold under hysteresis: sqrt(r^2 + 4 kappa mu + (4 alpha / 3) r^3)."""
    value = r * r + 4 * kappa * mu + 4 * alpha / 3 * r**3
    if value < 0:
        raise ClassificationError(f"Hysteretic normal form undefined at r={r}, mu={mu}")
    return math.sqrt(value)


def onset_quantity(sys: PWSystem, mu: float, quantity: OnsetQuantity) -> float:
    match quantity:
        case "trace":
            t = sys.pieces()[0].taylor(mu)
            return t.a1 + t.b2
        case "equilibrium":
            t = sys.pieces()[0].taylor(mu)
            return float(np.linalg.solve(t.jacobian, [-t.a0, -t.b0])[0])
        case "four_quadrant":
            return four_quadrant_lambda(sys, mu) - 1
    raise ClassificationError(f"Unknown onset quantity '{quantity}'")


def scan_for_onset(
    sys: PWSystem,
    mu_grid: Sequence[float],
    quantity: OnsetQuantity | Callable[[float], float] = "equilibrium",
) -> float | None:
    """First sign change of a stability quantity along ``mu_grid``, refined with Brent's method."""
    func = quantity if callable(quantity) else lambda mu: onset_quantity(sys, mu, quantity)
    root = first_root(func, list(mu_grid))
    if root is None:
        _LOGGER.warning("No sign change of %s on the grid", quantity if isinstance(quantity, str) else "quantity")
    else:
        _LOGGER.debug("Onset located at mu=%.12g", root)
    return root
