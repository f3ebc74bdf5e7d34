import logging
import math
from typing import Literal

from scipy.optimize import brentq

from .const import BRENT_XTOL, RHO_TOL
from .model import AffineReturnResult, TaylorTable

_LOGGER = logging.getLogger(__name__)

_POLE_TOL = 1e-8


class ReturnMapError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


def aux_rho(s: float, nu: float) -> float:
    return 1.0 - math.exp(nu * s) * (math.cos(s) - nu * math.sin(s))


def aux_rho_node(s: float, nu: float) -> float:
    return 1.0 - math.exp(nu * s) * (math.cosh(s) - nu * math.sinh(s))


def aux_rho_ds(s: float, nu: float) -> float:
    return (1.0 + nu * nu) * math.exp(nu * s) * math.sin(s)


def aux_shat(nu: float) -> float:
    """The unique zero of aux_rho(., nu) in (pi, 2 pi), nu > 0."""
    if nu <= 0:
        raise ReturnMapError(f"aux_shat needs nu > 0, got {nu}")
    root = brentq(aux_rho, math.pi, 2 * math.pi, args=(nu,), xtol=1e-15, maxiter=500)
    residual = aux_rho(root, nu)
    if abs(residual) > RHO_TOL * max(1.0, math.exp(nu * root)):
        _LOGGER.warning("aux_shat(%s) residual %.3e above tolerance", nu, residual)
    return float(root)


def g_func(s: float, nu: float) -> float:
    sin_s = math.sin(s)
    if abs(sin_s) < 1e-14:
        raise ReturnMapError(f"g_func has a pole at s = {s}")
    return math.exp(-nu * s) * aux_rho(s, nu) / sin_s


def g_func_node(s: float, nu: float) -> float:
    """Hyperbolic counterpart of g_func, obtained with omega = i eta."""
    if s == 0.0:
        raise ReturnMapError("g_func_node has a pole at s = 0")
    return math.exp(-nu * s) * aux_rho_node(s, nu) / math.sinh(s)


def _focus_parts(t: TaylorTable) -> tuple[float, float]:
    eig = t.eigen
    if eig.kind != "focus":
        raise ReturnMapError(f"Focus formulas need complex eigenvalues, got {eig.kind}")
    return eig.lam, eig.omega


def chi_focus(t: TaylorTable) -> float:
    """Second-order coefficient of the half-turn return map about a focus."""
    lam, omega = _focus_parts(t)
    a1, a2, b1, b2 = t.a1, t.a2, t.b1, t.b2
    if a2 == 0:
        raise ReturnMapError("chi_focus needs df/dy != 0")
    k1 = -a2 * (2 * a1 * b2 - 3 * a2 * b1 - b2**2)
    k2 = -a2 * b1 * (4 * a1 + b2) + a1 * b2 * (2 * a1 - b2)
    k3 = (b1 * (2 * a1**2 + 7 * a1 * b2 - 3 * a2 * b1) / 2
          - b2**2 * (2 * a1**2 - a1 * b2 + a2 * b1) / (2 * a2))
    l1 = -(a2**2) * (a1 + b2)
    l2 = a2 * (2 * a1**2 - a1 * b2 + 3 * a2 * b1)
    l3 = -a1 * (2 * a1**2 - 3 * a1 * b2 + b2**2) / 2 - a2 * b1 * (5 * a1 - b2) / 2
    numerator = (
        k1 * t.d(2, 0, "f") + k2 * t.d(1, 1, "f") + k3 * t.d(0, 2, "f")
        + l1 * t.d(2, 0, "g") + l2 * t.d(1, 1, "g") + l3 * t.d(0, 2, "g")
    )
    w2 = omega * omega
    l2_ = lam * lam
    return numerator / ((l2_ + w2) * (l2_ + 9 * w2))


def _fold_check(t: TaylorTable, side: Literal["left", "right"]) -> None:
    if t.a2 <= 0:
        raise ReturnMapError(f"Fold formulas need df/dy > 0, got {t.a2}")
    if side == "right" and t.b0 >= 0:
        raise ReturnMapError(f"Right-side fold needs g(0,0) < 0, got {t.b0}")
    if side == "left" and t.b0 <= 0:
        raise ReturnMapError(f"Left-side fold needs g(0,0) > 0, got {t.b0}")


def sigma_fold(t: TaylorTable, side: Literal["left", "right"] = "right") -> float:
    """First fold coefficient; ``side='left'`` evaluates the same formula on an invisible left fold."""
    _fold_check(t, side)
    return t.a1 / t.b0 + t.b2 / t.b0 - t.a5 / t.a2


def chi_fold(t: TaylorTable, side: Literal["left", "right"] = "right") -> float:
    sigma = sigma_fold(t, side)
    a1, a2, a5, b0, b2 = t.a1, t.a2, t.a5, t.b0, t.b2
    s = a1 + b2
    leading = (
        -a1 * s * (a1 + 2 * b2) / b0**3
        + s * (4 * a1 + 3 * b2) / b0**2 * sigma
        - 5 * s / b0 * sigma**2
        + 40.0 / 9.0 * sigma**3
    )
    bracket = (
        (a1 / b0 - a5 / a2) / b0 * t.d(1, 1, "f")
        - (2 * a1 / b0 + 2 * b2 / b0 - 5 * a5 / a2) / (6 * a2) * t.d(0, 3, "f")
        + a2 / b0**2 * (a1 / b0 + b2 / b0) * t.d(1, 0, "g")
        + (a1 / b0 - b2 / b0 - 2 * a5 / a2) / (2 * b0) * t.d(0, 2, "g")
        - a2 / b0**2 * t.d(2, 0, "f")
        + t.d(1, 2, "f") / (2 * b0)
        - t.d(0, 4, "f") / (8 * a2)
        - a2 / b0**2 * t.d(1, 1, "g")
        + t.d(0, 3, "g") / (2 * b0)
    )
    return leading + bracket


def p_focus_series(t: TaylorTable, r: float) -> tuple[float, float]:
    """Half-turn return (P, T) about a focus at the origin, through r^2."""
    if abs(t.a0) > 1e-12 or abs(t.b0) > 1e-12:
        raise ReturnMapError("Focus series needs an equilibrium at the origin")
    lam, omega = _focus_parts(t)
    growth = math.exp(lam * math.pi / omega)
    chi = chi_focus(t)
    return -growth * r + growth * (growth + 1) * chi * r * r, math.pi / omega


def p_fold_series(t: TaylorTable, r: float) -> tuple[float, float]:
    """Return (P, T) about an invisible fold in x > 0, through r^4 (time to first order)."""
    if abs(t.a0) > 1e-12:
        raise ReturnMapError("Fold series needs f(0,0) = 0")
    sigma = sigma_fold(t)
    chi = chi_fold(t)
    p = -r + 2 * sigma / 3 * r**2 - 4 * sigma**2 / 9 * r**3 + 2 * chi / 15 * r**4
    return p, -2.0 / t.b0 * r


def _affine_r(time: float, lam: float, omega: float, kappa: float) -> float:
    s = omega * time
    return -kappa * math.exp(-lam * time) * aux_rho(s, lam / omega) / math.sin(s)


def _approach(accept, anchor: float, direction: float, smallest: float) -> float | None:
    """Walk towards ``anchor`` until ``accept`` holds, returning the first accepted point."""
    delta = 1e-1
    while delta >= smallest:
        point = anchor + direction * delta
        if accept(point):
            return point
        delta *= 0.1
    return None


def affine_return(lam: float, omega: float, b0: float, r: float) -> AffineReturnResult:
    """Return map of an affine focus in x > 0 with the x-equation free of constants.

    Solves the implicit time equation in the bracket licensed by the sign of b0.
    """
    if r <= 0:
        raise ReturnMapError(f"affine_return needs r > 0, got {r}")
    if omega <= 0:
        raise ReturnMapError(f"affine_return needs omega > 0, got {omega}")
    if b0 == 0:
        raise ReturnMapError("b0 = 0: use the focus series instead")

    kappa = b0 * omega / (lam * lam + omega * omega)
    r_hat = None
    if b0 < 0:
        type_tag = "I"
        s_end = 0.0
    elif lam < 0:
        type_tag = "II"
        nu = -lam / omega
        s_end = aux_shat(nu)
        r_hat = -(b0 / omega) * math.exp(nu * s_end) * math.sin(s_end)
        if r < r_hat:
            raise ReturnMapError(f"P is undefined for r = {r} < r_hat = {r_hat}")
    else:
        type_tag = "III"
        s_end = aux_shat(lam / omega) if lam > 0 else 2 * math.pi - 1e-9

    def residual_s(s: float) -> float:
        return _affine_r(s / omega, lam, omega, kappa) - r

    # s = pi is the r -> infinity end of every bracket
    pole_side = -1.0 if b0 < 0 else 1.0
    s_pole = _approach(lambda s: residual_s(s) > 0, math.pi, pole_side, _POLE_TOL)
    if s_pole is None:
        growth = math.exp(lam * math.pi / omega)
        _LOGGER.debug("affine_return at r=%s uses the large-r limit", r)
        return AffineReturnResult(P=-growth * r, T=math.pi / omega, type_tag=type_tag,
                                  r_hat=r_hat, dP_dr=-growth)

    if type_tag == "I":
        s_small = _approach(lambda s: residual_s(s) < 0, 0.0, 1.0, 1e-15)
        if s_small is None:
            raise ReturnMapError(f"r = {r} is below the resolvable range")
        lo, hi = s_small, s_pole
    elif type_tag == "II" and residual_s(s_end) >= 0:
        lo = hi = s_end
    else:
        lo, hi = s_pole, s_end
    s = lo if lo == hi else float(brentq(residual_s, lo, hi, xtol=BRENT_XTOL, maxiter=500))

    time = s / omega
    p = kappa * math.exp(lam * time) * aux_rho(s, -lam / omega) / math.sin(s)
    dp_dr = r / p * math.exp(2 * lam * time) if p != 0 else None
    return AffineReturnResult(P=p, T=time, type_tag=type_tag, r_hat=r_hat, dP_dr=dp_dr)
