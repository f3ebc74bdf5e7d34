"""Numerical checks of the analytic return maps against simulation.

Every check returns a ``LemmaCheck``; ``run_checks`` evaluates a selection in a
fixed order so the resulting table is reproducible.
"""

import logging
import math
from typing import Callable, Sequence

import numpy as np
import pandas as pd

from .const import LEMMA_ATOL, LEMMA_RTOL, LEMMA_SAMPLES, LEMMA_SEED, SCHEMA_LEMMAS
from .integrator import NoReturnError, Simulator
from .model import EventType, LemmaCheck, Monomial, Policy, TaylorTable
from .pwsmodel import PWSystem, Smooth, SmoothPiece
from .returnmaps import (
    ReturnMapError,
    affine_return,
    aux_rho,
    aux_rho_ds,
    aux_shat,
    chi_focus,
    chi_fold,
    p_focus_series,
    p_fold_series,
    sigma_fold,
)

_LOGGER = logging.getLogger(__name__)

_FOCUS_RADII = np.geomspace(1e-3, 1e-1, 9)
_FOLD_RADII = np.geomspace(1e-2, 1e-1, 7)
_SLOPE_TOL = 0.01


def _m(coeff: float, i: int = 0, j: int = 0) -> Monomial:
    return Monomial(coeff=coeff, i=i, j=j)


def focus_example() -> PWSystem:
    """x' = y - y^2, y' = -x."""
    field = SmoothPiece(label="focus", poly_f=[_m(1.0, j=1), _m(-1.0, j=2)], poly_g=[_m(-1.0, i=1)])
    return PWSystem(name="focus_example", mechanism=Smooth(field=field))


def fold_example() -> PWSystem:
    """x' = y - y^4, y' = -1."""
    field = SmoothPiece(label="fold", poly_f=[_m(1.0, j=1), _m(-1.0, j=4)], poly_g=[_m(-1.0)])
    return PWSystem(name="fold_example", mechanism=Smooth(field=field))


def affine_example(lam: float, omega: float, b0: float) -> PWSystem:
    """x' = lam x + omega y, y' = b0 - omega x + lam y."""
    field = SmoothPiece(
        label="affine",
        poly_f=[_m(lam, i=1), _m(omega, j=1)],
        poly_g=[_m(b0), _m(-omega, i=1), _m(lam, j=1)],
    )
    return PWSystem(name="affine_example", mechanism=Smooth(field=field))


def _table(sys: PWSystem) -> TaylorTable:
    return sys.pieces()[0].taylor(0.0)


def half_return(sys: PWSystem, r: float, policy: Policy | None = None, t_max: float = 50.0) -> tuple[float, float]:
    """(P, T) at the first crossing of x = 0 with x decreasing, starting from (0, r)."""
    policy = policy or Policy(rtol=LEMMA_RTOL, atol=LEMMA_ATOL)
    run = Simulator(sys, policy).execute(
        (0.0, r), t_max, stop_on=lambda e: e.type == EventType.SECTION and e.detail == "down"
    )
    if run.stop_event is None:
        raise NoReturnError(f"No half return from r={r:.6g} before t={t_max:g}")
    return run.stop_event.y, run.stop_event.time


def _fine(policy: Policy | None) -> Policy:
    """Short steps so a near-grazing crossing cannot be stepped over."""
    policy = policy or Policy(rtol=LEMMA_RTOL, atol=LEMMA_ATOL)
    return policy.model_copy(update={"max_step": min(policy.max_step, 2e-3)})


def _limit_at_zero(r: Sequence[float], values: Sequence[float]) -> float:
    """Intercept of a quadratic fit, the r -> 0 value of a smooth quantity."""
    return float(np.polyfit(np.asarray(r), np.asarray(values), 2)[-1])


def _relative(value: float, expected: float) -> float:
    return abs(value - expected) / max(abs(expected), 1e-300)


def _check(name: str, value: float, expected: float, tolerance: float, relative: bool = True,
           detail: str = "") -> LemmaCheck:
    error = _relative(value, expected) if relative else abs(value - expected)
    return LemmaCheck(name=name, passed=bool(error <= tolerance), value=value, expected=expected,
                      tolerance=tolerance, detail=detail)


# -- Auxiliary function -------------------------------------------------------


def check_rho_symmetry(policy: Policy | None = None) -> LemmaCheck:
    worst = 0.0
    for s in np.linspace(-7.0, 7.0, 29):
        for nu in (-0.8, -0.1, 0.3, 1.5):
            worst = max(worst, abs(aux_rho(-s, -nu) - aux_rho(s, nu)))
    return _check("rho_symmetry", worst, 0.0, 1e-12, relative=False)


def check_rho_derivative(policy: Policy | None = None) -> LemmaCheck:
    h = 1e-5
    worst = 0.0
    for s in np.linspace(0.3, 6.0, 12):
        for nu in (-0.5, 0.1, 0.7):
            numeric = (aux_rho(s + h, nu) - aux_rho(s - h, nu)) / (2 * h)
            exact = aux_rho_ds(s, nu)
            worst = max(worst, abs(numeric - exact) / max(abs(exact), 1.0))
    return _check("rho_derivative", worst, 0.0, 1e-7, relative=False)


def check_shat_identity(policy: Policy | None = None) -> LemmaCheck:
    worst = 0.0
    for nu in (0.05, 0.1, 0.5, 1.0, 2.0):
        s = aux_shat(nu)
        worst = max(worst, abs(aux_rho(s, -nu) - (1 + nu * nu) * math.sin(s) ** 2))
    return _check("shat_identity", worst, 0.0, 1e-9, relative=False)


# -- Focus --------------------------------------------------------------------


def _focus_returns(policy: Policy | None) -> list[float]:
    sys = focus_example()
    return [half_return(sys, float(r), policy)[0] for r in _FOCUS_RADII]


def check_focus_coefficient(policy: Policy | None = None) -> LemmaCheck:
    chi = chi_focus(_table(focus_example()))
    return _check("focus_coefficient", chi, 1.0 / 3.0, 1e-12)


def check_focus_slope(policy: Policy | None = None) -> LemmaCheck:
    chi = chi_focus(_table(focus_example()))
    returns = _focus_returns(policy)
    ratios = [math.sqrt(max(p + r, 0.0)) / r for p, r in zip(returns, _FOCUS_RADII)]
    slope = _limit_at_zero(_FOCUS_RADII, ratios)
    return _check("focus_slope", slope, math.sqrt(2 * chi), _SLOPE_TOL, detail="sqrt(P + r) against r")


def _remainder_bounded(name: str, radii: Sequence[float], errors: Sequence[float], order: int) -> LemmaCheck:
    ratios = [e / r ** (order + 1) for e, r in zip(errors, radii)]
    coarse = max(ratios[len(ratios) // 2:])
    finest = ratios[0]
    return LemmaCheck(name=name, passed=bool(np.isfinite(finest) and finest <= 10 * coarse + 1.0),
                      value=finest, expected=coarse,
                      detail=f"|P_series - P| / r^{order + 1} at the smallest and largest radii")


def check_focus_remainder(policy: Policy | None = None) -> LemmaCheck:
    table = _table(focus_example())
    returns = _focus_returns(policy)
    errors = [abs(p_focus_series(table, float(r))[0] - p) for p, r in zip(returns, _FOCUS_RADII)]
    return _remainder_bounded("focus_remainder", _FOCUS_RADII, errors, 2)


# -- Fold ---------------------------------------------------------------------


def _fold_returns(policy: Policy | None) -> list[float]:
    sys = fold_example()
    return [half_return(sys, float(r), policy)[0] for r in _FOLD_RADII]


def check_fold_coefficients(policy: Policy | None = None) -> LemmaCheck:
    table = _table(fold_example())
    sigma, chi = sigma_fold(table), chi_fold(table)
    return LemmaCheck(name="fold_coefficients", passed=abs(sigma) < 1e-12 and abs(chi - 3.0) < 1e-12,
                      value=chi, expected=3.0, tolerance=1e-12, detail=f"sigma={sigma:.3g}")


def check_fold_slope(policy: Policy | None = None) -> LemmaCheck:
    table = _table(fold_example())
    chi = chi_fold(table)
    returns = _fold_returns(policy)
    ratios = [max(p + r, 0.0) ** 0.25 / r for p, r in zip(returns, _FOLD_RADII)]
    slope = _limit_at_zero(_FOLD_RADII, ratios)
    return _check("fold_slope", slope, (2 * chi / 15) ** 0.25, _SLOPE_TOL, detail="(P + r)^(1/4) against r")


def check_fold_remainder(policy: Policy | None = None) -> LemmaCheck:
    table = _table(fold_example())
    returns = _fold_returns(policy)
    errors = [abs(p_fold_series(table, float(r))[0] - p) for p, r in zip(returns, _FOLD_RADII)]
    return _remainder_bounded("fold_remainder", _FOLD_RADII, errors, 4)


# -- Affine return ------------------------------------------------------------


def affine_samples(n: int = LEMMA_SAMPLES, seed: int = LEMMA_SEED) -> list[tuple[float, float, float, float]]:
    """Deterministic (lam, omega, b0, r) samples; Type II radii are shifted above r_hat."""
    rng = np.random.default_rng(seed)
    samples = []
    for _ in range(n):
        lam = float(rng.uniform(-0.5, 0.5))
        omega = float(rng.uniform(0.5, 2.0))
        b0 = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.2, 2.0))
        r = float(rng.uniform(0.05, 2.0))
        if b0 > 0 and lam < 0:
            nu = -lam / omega
            s = aux_shat(nu)
            r += -(b0 / omega) * math.exp(nu * s) * math.sin(s)
        samples.append((lam, omega, b0, r))
    return samples


def check_affine_derivative(policy: Policy | None = None) -> LemmaCheck:
    worst = 0.0
    for lam, omega, b0, r in affine_samples():
        h = 1e-5 * r
        upper = affine_return(lam, omega, b0, r + h).P
        lower = affine_return(lam, omega, b0, r - h).P
        centre = affine_return(lam, omega, b0, r)
        if upper is None or lower is None or centre.P is None or centre.T is None:
            return LemmaCheck(name="affine_derivative", passed=False, detail=f"undefined at r={r}")
        numeric = (upper - lower) / (2 * h)
        identity = r / centre.P * math.exp(2 * lam * centre.T)
        worst = max(worst, _relative(numeric, identity))
    return _check("affine_derivative", worst, 0.0, 1e-6, relative=False, detail="dP/dr = (r/P) exp(2 lam T)")


def check_affine_simulation(policy: Policy | None = None) -> LemmaCheck:
    worst = 0.0
    for lam, omega, b0, r in affine_samples()[:6]:
        result = affine_return(lam, omega, b0, r)
        p, _ = half_return(affine_example(lam, omega, b0), r, _fine(policy), t_max=4 * math.pi / omega)
        assert result.P is not None
        worst = max(worst, _relative(p, result.P))
    return _check("affine_simulation", worst, 0.0, 1e-6, relative=False)


def check_affine_r_hat(policy: Policy | None = None) -> LemmaCheck:
    """Zero of the simulated P^2, which is smooth in r through r_hat."""
    lam, omega, b0 = -0.2, 1.0, 1.0
    nu = -lam / omega
    s = aux_shat(nu)
    r_hat = -(b0 / omega) * math.exp(nu * s) * math.sin(s)
    sys = affine_example(lam, omega, b0)
    radii = r_hat * (1.0 + np.array([1e-4, 2e-4, 4e-4, 8e-4, 1.6e-3]))
    squares = [half_return(sys, float(r), _fine(policy), t_max=4 * math.pi / omega)[0] ** 2 for r in radii]
    a, b, c = np.polyfit(radii - r_hat, squares, 2)
    roots = [float(x.real) for x in np.roots([a, b, c]) if abs(x.imag) < 1e-12]
    if not roots:
        return LemmaCheck(name="affine_r_hat", passed=False, expected=r_hat, detail="no real zero of P^2")
    simulated = r_hat + min(roots, key=abs)
    return _check("affine_r_hat", simulated, r_hat, 1e-6)


CHECKS: dict[str, Callable[[Policy | None], LemmaCheck]] = {
    "rho_symmetry": check_rho_symmetry,
    "rho_derivative": check_rho_derivative,
    "shat_identity": check_shat_identity,
    "focus_coefficient": check_focus_coefficient,
    "focus_slope": check_focus_slope,
    "focus_remainder": check_focus_remainder,
    "fold_coefficients": check_fold_coefficients,
    "fold_slope": check_fold_slope,
    "fold_remainder": check_fold_remainder,
    "affine_derivative": check_affine_derivative,
    "affine_simulation": check_affine_simulation,
    "affine_r_hat": check_affine_r_hat,
}


def run_checks(names: Sequence[str] | None = None, policy: Policy | None = None) -> list[LemmaCheck]:
    selected = list(CHECKS) if not names else list(names)
    unknown = [name for name in selected if name not in CHECKS]
    if unknown:
        raise ReturnMapError(f"Unknown checks: {', '.join(unknown)}")
    results = []
    for name in selected:
        try:
            check = CHECKS[name](policy)
        except (ReturnMapError, NoReturnError) as err:
            check = LemmaCheck(name=name, passed=False, detail=str(err))
        _LOGGER.debug("%s: %s", name, "pass" if check.passed else "FAIL")
        results.append(check)
    return results


def checks_frame(checks: Sequence[LemmaCheck]) -> pd.DataFrame:
    frame = pd.DataFrame([c.model_dump() for c in checks],
                         columns=["name", "passed", "value", "expected", "tolerance", "detail"])
    frame.insert(0, "schema", SCHEMA_LEMMAS)
    return frame
