"""Worked examples in canonical coordinates.

Each entry builds a family with the switching manifold at x = 0 and the
bifurcation at mu = 0. The raw model parameter that mu stands for is kept in
``metadata["mu_to_param"]`` so results can be reported in the model's own units.
"""

import logging
import math
from typing import Any, Callable

import numpy as np
from pydantic import BaseModel, ConfigDict

from .hlb import scan_for_onset
from .model import HLBKind, Monomial, Published
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
)
from .roots import brent_root

_LOGGER = logging.getLogger(__name__)

Params = dict[str, Any]


class ZooError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


def _m(coeff: float, i: int = 0, j: int = 0, mu: int = 0, z: int = 0) -> Monomial:
    return Monomial(coeff=coeff, i=i, j=j, mu=mu, z=z)


def _poly(*terms: Monomial) -> list[Monomial]:
    return [t for t in terms if t.coeff != 0]


def _mapping(param: str, offset: float, scale: float = 1.0) -> dict[str, Any]:
    return {"param": param, "offset": offset, "scale": scale}


def _switched(params: Params, left: SmoothPiece, right: SmoothPiece) -> Hysteretic | Delayed:
    match params["mechanism"]:
        case "hysteretic":
            return Hysteretic(left=left, right=right)
        case "delayed":
            return Delayed(left=left, right=right)
    raise ZooError(f"mechanism must be 'hysteretic' or 'delayed', got '{params['mechanism']}'")


# -- Smooth -------------------------------------------------------------------


def _vdp(p: Params) -> PWSystem:
    field = SmoothPiece(label="field", poly_f=_poly(_m(1.0, j=1)),
                        poly_g=_poly(_m(-1.0, i=1), _m(1.0, j=1, mu=1), _m(-p["k2"], j=3)))
    return PWSystem(name="vdp", mechanism=Smooth(field=field),
                    notes="(x, y; mu) = (v, i; k1)", metadata={"mu_to_param": _mapping("k1", 0.0)})


# -- Boundary equilibria ------------------------------------------------------


def _mckean(p: Params) -> PWSystem:
    a, b, c = p["a"], p["b"], p["c"]
    onset = a / (2 * c) + a / 2
    kink = 0.5  # v = (a + 1)/2 in the shifted coordinate

    def right(x: float, y: float, mu: float) -> tuple[float, float]:
        v = x + a / 2
        q = v - a if x <= kink else 1 - v
        return q - (y + a / (2 * c)) + mu + onset, b * (x - c * y)

    g = _poly(_m(b, i=1), _m(-b * c, j=1))
    left = SmoothPiece(label="left", poly_f=_poly(_m(-1.0, i=1), _m(-1.0, j=1), _m(1.0, mu=1)), poly_g=g)
    right_piece = SmoothPiece(label="right", func=right,
                              poly_f=_poly(_m(1.0, i=1), _m(-1.0, j=1), _m(1.0, mu=1)), poly_g=g)
    return PWSystem(
        name="mckean",
        mechanism=Filippov(left=left, right=right_piece),
        notes="x = v - a/2, y = w - a/(2c), mu = I - I_onset; second kink at x = 1/2",
        metadata={"mu_to_param": _mapping("I", onset)},
    )


def _ocean(p: Params) -> PWSystem:
    a, d0 = p["A"], p["delta0"]
    g = _poly(_m(-d0, i=1), _m(d0, mu=1))
    left = SmoothPiece(label="left", poly_f=_poly(_m(1.0, j=1), _m(a - 1, i=1), _m(a, i=2)), poly_g=g)
    right = SmoothPiece(label="right", poly_f=_poly(_m(1.0, j=1), _m(-(1 + a), i=1), _m(-a, i=2)), poly_g=g)
    return PWSystem(name="ocean", mechanism=Filippov(left=left, right=right),
                    notes="x = ybar - 1, y = mubar - 1, mu = lambda - 1",
                    metadata={"mu_to_param": _mapping("lambda", 1.0)})


def _gause(p: Params) -> PWSystem:
    rc, r, h, k, delta, cap = p["Rc"], p["r"], p["h"], p["k"], p["delta"], p["K"]
    ratio = delta / k
    if not 0 < h * ratio < 1:
        raise ZooError(f"Gause onset needs 0 < h delta/k < 1, got {h * ratio}")
    b_onset = ratio / (rc * (1 - h * ratio))
    y_star = r * rc * (1 - rc / cap) / ratio

    def right(x: float, y: float, mu: float) -> tuple[float, float]:
        prey, predator, b = x + rc, y + y_star, b_onset + mu
        q = b * prey / (1 + b * h * prey)
        return r * prey * (1 - prey / cap) - q * predator, (k * q - delta) * predator

    # r X (1 - X/K) and -delta Y expanded about (Rc, y*)
    left = SmoothPiece(
        label="left",
        poly_f=_poly(_m(r * rc * (1 - rc / cap)), _m(r * (1 - 2 * rc / cap), i=1), _m(-r / cap, i=2)),
        poly_g=_poly(_m(-delta * y_star), _m(-delta, j=1)),
    )
    return PWSystem(
        name="gause",
        mechanism=Filippov(left=left, right=SmoothPiece(label="right", func=right)),
        notes="x = prey - Rc, y = predator - y*, mu = b - b_onset",
        metadata={"mu_to_param": _mapping("b", b_onset), "y_star": y_star},
    )


def _valve(p: Params) -> PWSystem:
    f = _poly(_m(1.0, j=1))
    left = SmoothPiece(label="left", poly_f=f, poly_g=_poly(_m(-1.0, i=1), _m(-1.0, mu=1), _m(-2 * p["h1"], j=1)))
    right = SmoothPiece(label="right", poly_f=f, poly_g=_poly(_m(-1.0, i=1), _m(-1.0, mu=1), _m(2 * p["h2"], j=1)))
    return PWSystem(name="valve", mechanism=Filippov(left=left, right=right), notes="x = voltage - a, mu = a",
                    metadata={"mu_to_param": _mapping("a", 0.0)})


# -- Slipping foci and folds ---------------------------------------------------


def _focus_piece(label: str, lam: float) -> SmoothPiece:
    return SmoothPiece(label=label, poly_f=_poly(_m(lam, i=1), _m(1.0, j=1)),
                       poly_g=_poly(_m(-1.0, i=1), _m(lam, j=1)))


def _slip_focus_focus(p: Params) -> PWSystem:
    lam_r = p["lamR"]
    right = SmoothPiece(label="right", poly_f=_poly(_m(lam_r, i=1), _m(1.0, j=1), _m(1.0, mu=1)),
                        poly_g=_poly(_m(-1.0, i=1), _m(lam_r, j=1), _m(lam_r, mu=1)))
    return PWSystem(name="slip_focus_focus", mechanism=Filippov(left=_focus_piece("left", p["lamL"]), right=right))


def _slip_focus_fold(p: Params) -> PWSystem:
    right = SmoothPiece(label="right", poly_f=_poly(_m(1.0, j=1), _m(1.0, mu=1)), poly_g=_poly(_m(-1.0)))
    return PWSystem(name="slip_focus_fold", mechanism=Filippov(left=_focus_piece("left", p["lamL"]), right=right))


def _pendulum(p: Params) -> PWSystem:
    a, kp, kd, th = p["a"], p["Kp"], p["Kd"], p["theta_star"]

    def accel(x: float, y: float, mu: float, controlled: bool) -> float:
        theta = x + th + mu * y
        return (a - kp) * theta - kd * y if controlled else a * theta

    def left(x: float, y: float, mu: float) -> tuple[float, float]:
        # x < -2 theta* is past the opposite threshold, where control is on again
        acc = accel(x, y, mu, controlled=x < -2 * th)
        return y - mu * acc, acc

    # theta = x + theta* + mu y, x' = y - mu theta'', y' = theta''
    left_piece = SmoothPiece(
        label="left",
        func=left,
        poly_f=_poly(_m(1.0, j=1), _m(-a, i=1, mu=1), _m(-a * th, mu=1), _m(-a, j=1, mu=2)),
        poly_g=_poly(_m(a, i=1), _m(a * th), _m(a, j=1, mu=1)),
    )
    c = a - kp
    right_piece = SmoothPiece(
        label="right",
        poly_f=_poly(_m(1.0, j=1), _m(-c, i=1, mu=1), _m(-c * th, mu=1), _m(-c, j=1, mu=2), _m(kd, j=1, mu=1)),
        poly_g=_poly(_m(c, i=1), _m(c * th), _m(c, j=1, mu=1), _m(-kd, j=1)),
    )
    return PWSystem(
        name="pendulum",
        mechanism=Filippov(left=left_piece, right=right_piece),
        notes="x = theta - theta* - b theta', y = theta', mu = b",
        metadata={"mu_to_param": _mapping("b", 0.0)},
    )


# -- Fixed foci and folds -------------------------------------------------------


def _bilinear_lambda(nu1: float, p: Params) -> float:
    lam_l = (nu1 - p["bL"]) / 2
    lam_r = (nu1 - p["bL"] - p["bR"]) / 2
    omega_l = math.sqrt(p["kL"] - lam_l**2)
    omega_r = math.sqrt(p["kL"] + p["kR"] - lam_r**2)
    return lam_l / omega_l + lam_r / omega_r


def _bilinear(p: Params) -> PWSystem:
    kl, kr, bl, br, nu2, x_hat = p["kL"], p["kR"], p["bL"], p["bR"], p["nu2"], p["x_hat"]
    if x_hat < 0:
        raise ZooError(f"x_hat must be non-negative, got {x_hat}")
    if x_hat == 0:
        nu1 = brent_root(lambda v: _bilinear_lambda(v, p), bl, bl + br)
    else:
        nu1 = bl
    f = _poly(_m(1.0, j=1))
    left = SmoothPiece(label="left", poly_f=f,
                       poly_g=_poly(_m(-kl, i=1), _m(nu1 - bl, j=1), _m(1.0, j=1, mu=1), _m(nu2, j=2)))
    right = SmoothPiece(
        label="right",
        poly_f=f,
        poly_g=_poly(_m(-kl - kr, i=1), _m(-kr * x_hat), _m(nu1 - bl - br, j=1), _m(1.0, j=1, mu=1), _m(nu2, j=2)),
    )
    return PWSystem(name="bilinear", mechanism=Filippov(left=left, right=right),
                    notes="mu = nu1 - nu1_onset", metadata={"mu_to_param": _mapping("nu1", nu1)})


def _fixed_two_fold(p: Params) -> PWSystem:
    left = SmoothPiece(label="left", poly_f=_poly(_m(1.0, i=1), _m(1.0, j=1)), poly_g=_poly(_m(1.0)))
    right = SmoothPiece(label="right", poly_f=_poly(_m(1.0, j=1)),
                        poly_g=_poly(_m(-1.0), _m(p["eta1"], i=1), _m(-1.0, j=1), _m(1.0, j=1, mu=1)))
    return PWSystem(name="fixed_two_fold", mechanism=Filippov(left=left, right=right), notes="mu = eta2 + 1",
                    metadata={"mu_to_param": _mapping("eta2", -1.0)})


# -- Impacts and impulses ---------------------------------------------------------


def _impact_osc(p: Params) -> PWSystem:
    delta, tau, r = p["delta"], p["tau"], p["r"]
    field = SmoothPiece(label="field", poly_f=_poly(_m(1.0, j=1)),
                        poly_g=_poly(_m(-delta, i=1), _m(-delta, mu=1), _m(tau, j=1)))
    return PWSystem(
        name="impact_osc",
        mechanism=Impact(field=field, reset=lambda y, mu: -r * y),
        notes="(x, y; mu) = (u - xi, v; xi)",
        metadata={"mu_to_param": _mapping("xi", 0.0)},
    )


def _lv_impulse(p: Params) -> PWSystem:
    field = SmoothPiece(label="field", poly_f=_poly(_m(1.0, j=1), _m(0.5, i=2), _m(-0.5, j=2)),
                        poly_g=_poly(_m(-1.0, i=1)))

    def radius(y: float, mu: float) -> float:
        nu = mu + 2
        return y * math.sqrt(1 - nu + nu * nu / 2)

    def angle(y: float, mu: float) -> float:
        return math.atan(2 / (mu + 2) - 1)

    return PWSystem(
        name="lv_impulse",
        mechanism=Impulse(field=field, radius=radius, angle=angle),
        notes="a = b = c = d = 1, x = X - Y, y = 2 - X - Y, mu = nu - 2",
        metadata={"mu_to_param": _mapping("nu", 2.0)},
    )


# -- Hysteresis and delay -----------------------------------------------------------


def _relay_observer(p: Params) -> PWSystem:
    tau, delta, b1, b2 = p["tau"], p["delta"], p["b1"], p["b2"]
    left = SmoothPiece(label="left", poly_f=_poly(_m(tau, i=1), _m(1.0, j=1), _m(b1)),
                       poly_g=_poly(_m(-delta, i=1), _m(b2)))
    right = SmoothPiece(label="right", poly_f=_poly(_m(tau, i=1), _m(1.0, j=1), _m(-b1)),
                        poly_g=_poly(_m(-delta, i=1), _m(-b2)))
    return PWSystem(name="relay_observer", mechanism=_switched(p, left, right),
                    notes="mu is the hysteresis width or lag")


def _forced_osc(p: Params) -> PWSystem:
    m, damping, k, force = p["m"], p["b"], p["k"], p["F"]
    if m <= 0:
        raise ZooError(f"Mass must be positive, got {m}")

    def piece(label: str, sign: float) -> SmoothPiece:
        return SmoothPiece(label=label, poly_f=_poly(_m(1.0, j=1)),
                           poly_g=_poly(_m(-k / m, i=1), _m(-damping / m, j=1), _m(sign * force / m)))

    return PWSystem(name="forced_osc", mechanism=_switched(p, piece("left", 1.0), piece("right", -1.0)),
                    notes="mu is the hysteresis width or lag")


# -- Four pieces ----------------------------------------------------------------------


def _wc_quadrants(p: Params, tau0: float) -> tuple[SmoothPiece, ...]:
    """Scaled-time pieces F1..F4 with tau = tau0 + mu; every entry is affine in tau."""
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]
    s = a - c

    def affine(const: float, slope: float, i: int = 0, j: int = 0) -> list[Monomial]:
        return _poly(_m(const + slope * tau0, i=i, j=j), _m(slope, i=i, j=j, mu=1))

    base_f = affine(c, -a, i=1) + affine(-c, c, j=1) + affine(-c * (b - d), -(a * d - b * c))
    base_g = affine(a, -a, i=1) + affine(-a, c, j=1) + affine(-a * (b - d), -(a * d - b * c))
    shifts = {
        "q1": (affine(-s * c, s), affine(-s * a, s)),
        "q2": (affine(-s * c, 0.0), affine(-s * a, 0.0)),
        "q3": ([], []),
        "q4": (affine(0.0, s), affine(0.0, s)),
    }
    return tuple(
        SmoothPiece(label=label, poly_f=base_f + extra_f, poly_g=base_g + extra_g)
        for label, (extra_f, extra_g) in shifts.items()
    )


def _wc_raw_quadrants(p: Params, tau0: float) -> tuple[SmoothPiece, ...]:
    """Unscaled-time field in the same axes; one piece per (H(y), H(x)) pair."""
    a, b, c, d = p["a"], p["b"], p["c"], p["d"]

    def make(h_u: float, h_v: float) -> Callable[[float, float, float], tuple[float, float]]:
        def field(x: float, y: float, mu: float) -> tuple[float, float]:
            v = (x - y - b + d) / (a - c)
            u = x + c * v + d
            du = -u + h_u
            dv = (-v + h_v) / (tau0 + mu)
            return du - c * dv, du - a * dv

        return field

    pairs = {"q1": (1.0, 1.0), "q2": (0.0, 1.0), "q3": (0.0, 0.0), "q4": (1.0, 0.0)}
    return tuple(SmoothPiece(label=label, func=make(*pair)) for label, pair in pairs.items())


def _wilson_cowan(p: Params) -> PWSystem:
    if p["a"] <= p["c"]:
        raise ZooError(f"Wilson-Cowan axes need a > c, got a={p['a']}, c={p['c']}")
    unfolded = PWSystem(name="wilson_cowan_tau", mechanism=FourQuadrant(quadrants=_wc_quadrants(p, 0.0)))
    lo, hi = p["tau_window"]
    tau_hb = scan_for_onset(unfolded, np.linspace(lo, hi, 61), quantity="four_quadrant")
    if tau_hb is None:
        raise ZooError(f"No Lambda = 1 crossing for tau in ({lo}, {hi})")
    _LOGGER.debug("Wilson-Cowan onset tau_HB=%.10f", tau_hb)
    form = p["form"]
    if form == "transformed":
        quadrants, canonical = _wc_quadrants(p, tau_hb), True
    elif form == "raw":
        quadrants, canonical = _wc_raw_quadrants(p, tau_hb), False
    else:
        raise ZooError(f"form must be 'transformed' or 'raw', got '{form}'")
    return PWSystem(
        name="wilson_cowan",
        mechanism=FourQuadrant(quadrants=quadrants),  # type: ignore[arg-type]
        canonical=canonical,
        notes="x = u - c v - d, y = u - a v - b, mu = tau - tau_HB",
        metadata={"mu_to_param": _mapping("tau", tau_hb), "form": form},
    )


# -- Square root -------------------------------------------------------------------------


def _sqrt_example(p: Params) -> PWSystem:
    lam, eta, nu = p["lam"], p["eta"], p["nu"]
    mechanism = SqrtContinuous(
        poly_f=_poly(_m(lam, i=1), _m(1.0, j=1), _m(eta, z=1)),
        poly_g=_poly(_m(-1.0, i=1), _m(lam, j=1), _m(-1.0, mu=1), _m(nu, z=1)),
    )
    return PWSystem(name="sqrt_example", mechanism=mechanism)


class ZooEntry(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    name: str
    builder: Callable[[Params], PWSystem]
    defaults: Params
    description: str
    published: list[Published]


def _pub(kind: HLBKind, source: str, **values: Any) -> Published:
    params = values.pop("params", {})
    return Published(kind=kind, source=source, params=params, **values)


def _impact_alpha(tau: float) -> float:
    return math.log(0.5) + math.pi * tau / math.sqrt(4 - tau * tau)


ZOO: dict[str, ZooEntry] = {
    entry.name: entry
    for entry in (
        ZooEntry(
            name="vdp", builder=_vdp, defaults={"k2": 1.0},
            description="van der Pol oscillator, smooth Hopf",
            published=[_pub(HLBKind.HOPF, "van der Pol oscillator", alpha=-6.0, beta=1.0, bifurcation_value=0.0)],
        ),
        ZooEntry(
            name="mckean", builder=_mckean, defaults={"a": 0.25, "b": 0.5, "c": 0.5},
            description="McKean neuron, boundary focus/focus",
            published=[_pub(HLBKind.HLB1, "McKean neuron", alpha=0.0913, bifurcation_value=0.375)],
        ),
        ZooEntry(
            name="ocean", builder=_ocean, defaults={"A": 1.1, "delta0": 0.01},
            description="reduced Stommel ocean circulation, boundary focus/node",
            published=[_pub(HLBKind.HLB2, "ocean circulation box model", bifurcation_value=1.0)],
        ),
        ZooEntry(
            name="gause", builder=_gause,
            defaults={"Rc": 16.0, "r": 1.0, "h": 1.0, "k": 0.45, "delta": 0.36, "K": 50.0},
            description="Gause predator-prey with a prey refuge, focus meets sliding",
            published=[_pub(HLBKind.HLB3, "Gause predator-prey", bifurcation_value=0.25)],
        ),
        ZooEntry(
            name="valve", builder=_valve, defaults={"h1": 0.6, "h2": 0.3},
            description="valve generator, discontinuous boundary focus/focus",
            published=[
                _pub(HLBKind.HLB4, "valve generator", alpha=0.3 / math.sqrt(1 - 0.09) - 0.6 / math.sqrt(1 - 0.36),
                     gamma=0.0, bifurcation_value=0.0)
            ],
        ),
        ZooEntry(
            name="slip_focus_focus", builder=_slip_focus_focus, defaults={"lamL": 0.1, "lamR": -0.5},
            description="two foci sliding along the manifold",
            published=[_pub(HLBKind.HLB5, "slipping foci example", alpha=-0.4, beta=1.0, bifurcation_value=0.0)],
        ),
        ZooEntry(
            name="slip_focus_fold", builder=_slip_focus_fold, defaults={"lamL": 1.0},
            description="focus and fold sliding along the manifold",
            published=[_pub(HLBKind.HLB6, "slipping focus/fold example", alpha=1.0, beta=1.0, bifurcation_value=0.0)],
        ),
        ZooEntry(
            name="pendulum", builder=_pendulum, defaults={"a": 0.5, "Kp": 1.0, "Kd": 1.0, "theta_star": 1.0},
            description="inverted pendulum under on/off PD control, slipping two-fold",
            published=[_pub(HLBKind.HLB7, "controlled pendulum", alpha=-2.0, beta=1.0, bifurcation_value=0.0)],
        ),
        ZooEntry(
            name="bilinear", builder=_bilinear,
            defaults={"kL": 1.0, "kR": 3.0, "bL": 0.5, "bR": 0.5, "nu2": 1.0, "x_hat": 0.0},
            description="bilinear oscillator, fixed focus/focus (x_hat = 0) or focus/fold (x_hat > 0)",
            published=[
                _pub(HLBKind.HLB8, "bilinear oscillator", alpha=-9 * 0.5 / (2 * (81 - 2 * 0.25)),
                     beta=162 / (36 - 0.25) ** 1.5, bifurcation_value=4 * 0.5 / 3),
                _pub(HLBKind.HLB9, "bilinear oscillator with prestress", alpha=-5 / 9, beta=0.5,
                     bifurcation_value=0.5, params={"x_hat": 0.1}),
            ],
        ),
        ZooEntry(
            name="fixed_two_fold", builder=_fixed_two_fold, defaults={"eta1": 1.0},
            description="fixed invisible two-fold",
            published=[_pub(HLBKind.HLB10, "fixed two-fold example", alpha=-1.0, beta=1.0, bifurcation_value=-1.0)],
        ),
        ZooEntry(
            name="impact_osc", builder=_impact_osc, defaults={"tau": 0.2, "delta": 1.0, "r": 0.5},
            description="linear impact oscillator with restitution r",
            published=[
                _pub(HLBKind.HLB11, "linear impact oscillator", alpha=_impact_alpha(0.2), beta=1.0, gamma=0.5,
                     bifurcation_value=0.0),
                _pub(HLBKind.HLB12, "linear impact oscillator", alpha=_impact_alpha(0.8), beta=1.0, gamma=0.5,
                     bifurcation_value=0.0, params={"tau": 0.8}),
                _pub(HLBKind.HLB13, "linear impact oscillator", beta=1.0, gamma=0.5, bifurcation_value=0.0,
                     params={"tau": 2.5}),
            ],
        ),
        ZooEntry(
            name="lv_impulse", builder=_lv_impulse, defaults={},
            description="Lotka-Volterra with impulsive prey restocking",
            published=[_pub(HLBKind.HLB14, "impulsive Lotka-Volterra", alpha=-1 / 6, beta=0.5, bifurcation_value=2.0)],
        ),
        ZooEntry(
            name="relay_observer", builder=_relay_observer,
            defaults={"tau": -0.5, "delta": 1.0, "b1": 1.0, "b2": 1.0, "mechanism": "hysteretic"},
            description="relay control in observer form with hysteresis or delay",
            published=[
                _pub(HLBKind.HLB15, "relay observer", alpha=-2.0, bifurcation_value=0.0),
                _pub(HLBKind.HLB16, "relay observer", alpha=-2.0, bifurcation_value=0.0,
                     params={"mechanism": "delayed"}),
            ],
        ),
        ZooEntry(
            name="forced_osc", builder=_forced_osc,
            defaults={"m": 1.0, "b": 0.5, "k": 1.0, "F": 1.0, "mechanism": "hysteretic"},
            description="linear oscillator with switched forcing, hysteresis or delay",
            published=[
                _pub(HLBKind.HLB17, "switched forcing", alpha=-1.0, bifurcation_value=0.0),
                _pub(HLBKind.HLB18, "switched forcing", alpha=-1.0, bifurcation_value=0.0,
                     params={"mechanism": "delayed"}),
            ],
        ),
        ZooEntry(
            name="wilson_cowan", builder=_wilson_cowan,
            defaults={"a": 2.0, "b": 0.05, "c": 0.25, "d": 0.3, "form": "transformed", "tau_window": (0.4, 0.7)},
            description="Wilson-Cowan rate model with Heaviside firing",
            published=[_pub(HLBKind.HLB19, "Wilson-Cowan network", alpha=-8.47, beta=9.53, bifurcation_value=0.5240)],
        ),
        ZooEntry(
            name="sqrt_example", builder=_sqrt_example, defaults={"lam": 0.5, "eta": -1.0, "nu": -1.0},
            description="square-root continuous system",
            published=[_pub(HLBKind.HLB20, "square-root example", beta=1.0, gamma=0.5, bifurcation_value=0.0)],
        ),
    )
}


def zoo_list() -> list[str]:
    return sorted(ZOO)


def _entry(name: str) -> ZooEntry:
    try:
        return ZOO[name]
    except KeyError:
        raise ZooError(f"Unknown zoo entry '{name}', expected one of {zoo_list()}") from None


def zoo_build(name: str, params: Params | None = None) -> PWSystem:
    """Build a zoo family; ``params`` overrides defaults, ``mu`` sets the starting parameter."""
    entry = _entry(name)
    overrides = dict(params or {})
    mu = float(overrides.pop("mu", 0.0))
    unknown = set(overrides) - set(entry.defaults)
    if unknown:
        raise ZooError(f"Unknown parameters {sorted(unknown)} for '{name}', expected {sorted(entry.defaults)}")
    merged = {**entry.defaults, **overrides}
    sys = entry.builder(merged)
    metadata = {**sys.metadata, "zoo": name, "params": merged, "provenance": [p.source for p in entry.published]}
    _LOGGER.debug("Built zoo entry '%s' with %s", name, merged)
    return sys.model_copy(update={"mu": mu, "metadata": metadata})


def published(name: str) -> list[Published]:
    return list(_entry(name).published)
