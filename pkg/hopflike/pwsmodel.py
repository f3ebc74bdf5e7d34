from __future__ import annotations

import logging
import math
from functools import cached_property
from typing import Annotated, Any, Callable, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .const import MACHINE_EPS, MAX_TAYLOR_ORDER, MECHANISMS
from .model import ChecklistItem, ModelDocument, Monomial, TaylorTable

_LOGGER = logging.getLogger(__name__)

FieldFunc = Callable[[float, float, float], tuple[float, float]]
SqrtFieldFunc = Callable[[float, float, float, float], tuple[float, float]]
ScalarLaw = Callable[[float, float], float]

# One-dimensional central-difference weights (offset, weight) per derivative order.
_CENTRAL: dict[int, tuple[tuple[int, float], ...]] = {
    0: ((0, 1.0),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


class ModelError(Exception):
    def __init__(self, message: str):
        _LOGGER.error(message)
        super().__init__(message)


def _poly_value(terms: list[Monomial], x: float, y: float, mu: float, z: float = 0.0) -> float:
    total = 0.0
    for term in terms:
        total += term.coeff * x**term.i * y**term.j * z**term.z * mu**term.mu
    return total


class SmoothPiece(BaseModel):
    """One smooth vector-field piece.

    ``func`` drives simulation; the polynomial terms give an exact Taylor table.
    A piece without ``func`` evaluates its polynomial.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    label: str = ""
    func: FieldFunc | None = None
    poly_f: list[Monomial] = Field(default_factory=list)
    poly_g: list[Monomial] = Field(default_factory=list)
    scale: float = 1.0

    @property
    def has_polynomial(self) -> bool:
        return self.func is None or bool(self.poly_f or self.poly_g)

    @property
    def degree(self) -> int:
        terms = self.poly_f + self.poly_g
        return max((t.i + t.j for t in terms), default=0)

    def eval(self, x: float, y: float, mu: float) -> tuple[float, float]:
        if self.func is not None:
            f, g = self.func(x, y, mu)
            return float(f), float(g)
        return _poly_value(self.poly_f, x, y, mu), _poly_value(self.poly_g, x, y, mu)

    def taylor(self, mu: float, order: int = MAX_TAYLOR_ORDER) -> TaylorTable:
        return extract_taylor(self, mu, order)


def _law(terms: list[Monomial]) -> ScalarLaw:
    """Polynomial in (y, mu) used for resets and impulse laws."""

    def law(y: float, mu: float) -> float:
        return _poly_value(terms, 0.0, y, mu)

    return law


class Smooth(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: Literal["smooth"] = "smooth"
    field: SmoothPiece

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        return []


class Filippov(BaseModel):
    model_config = ConfigDict(frozen=True)

    tag: Literal["filippov"] = "filippov"
    left: SmoothPiece
    right: SmoothPiece

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        return []


class Impact(BaseModel):
    """Orbits live in x <= 0; at x = 0 with y > 0 the reset y -> phi(y; mu) applies."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tag: Literal["impact"] = "impact"
    field: SmoothPiece
    reset: ScalarLaw

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        samples = [1e-3, 1e-2, 1e-1]
        worst = min(
            min(self.field.eval(0.0, y, mu)[0] * y, self.field.eval(0.0, -y, mu)[0] * -y)
            for y in samples
        )
        phi = self.reset(1e-2, mu)
        return [
            ChecklistItem(name="sgn f(0,y) = sgn y", satisfied=worst > 0, witness=worst),
            ChecklistItem(name="phi(0) = 0", satisfied=abs(self.reset(0.0, mu)) < 1e-12,
                          witness=self.reset(0.0, mu)),
            ChecklistItem(name="phi maps y > 0 to y < 0", satisfied=phi < 0, witness=phi),
        ]


class Impulse(BaseModel):
    """At the positive y-axis the state jumps to polar coordinates (R, Theta)."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tag: Literal["impulse"] = "impulse"
    field: SmoothPiece
    radius: ScalarLaw
    angle: ScalarLaw

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        r0 = self.radius(0.0, mu)
        return [ChecklistItem(name="R(0) = 0", satisfied=abs(r0) < 1e-12, witness=r0)]


class Hysteretic(BaseModel):
    """Left field until x = mu, right field until x = -mu."""

    model_config = ConfigDict(frozen=True)

    tag: Literal["hysteretic"] = "hysteretic"
    left: SmoothPiece
    right: SmoothPiece

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        return [ChecklistItem(name="offset mu >= 0", satisfied=mu >= 0, witness=mu)]


class Delayed(BaseModel):
    """Left field while x(t - mu) < 0, right field while x(t - mu) > 0."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tag: Literal["delayed"] = "delayed"
    left: SmoothPiece
    right: SmoothPiece
    history: Callable[[float], tuple[float, float]] | None = None

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        return [ChecklistItem(name="lag mu >= 0", satisfied=mu >= 0, witness=mu)]


class FourQuadrant(BaseModel):
    """Pieces F1..F4 on the quadrants, numbered clockwise from x > 0, y > 0."""

    model_config = ConfigDict(frozen=True)

    tag: Literal["four_quadrant"] = "four_quadrant"
    quadrants: tuple[SmoothPiece, SmoothPiece, SmoothPiece, SmoothPiece]

    def piece_at(self, x: float, y: float) -> int:
        if x >= 0:
            return 0 if y >= 0 else 1
        return 3 if y >= 0 else 2

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        f = [q.eval(0.0, 0.0, mu) for q in self.quadrants]
        signs = [(1, -1), (-1, -1), (-1, 1), (1, 1)]
        items = []
        for index, ((fj, gj), (sf, sg)) in enumerate(zip(f, signs), start=1):
            items.append(
                ChecklistItem(name=f"F{index} sign pattern", satisfied=fj * sf > 0 and gj * sg > 0,
                              witness=min(fj * sf, gj * sg))
            )
        return items


class SqrtContinuous(BaseModel):
    """F(x, y, S(x); mu) with S(x) = sqrt(x) for x >= 0 and S = 0 otherwise."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    tag: Literal["sqrt_continuous"] = "sqrt_continuous"
    func: SqrtFieldFunc | None = None
    poly_f: list[Monomial] = Field(default_factory=list)
    poly_g: list[Monomial] = Field(default_factory=list)

    def eval_z(self, x: float, y: float, z: float, mu: float) -> tuple[float, float]:
        if self.func is not None:
            f, g = self.func(x, y, z, mu)
            return float(f), float(g)
        return (
            _poly_value(self.poly_f, x, y, mu, z),
            _poly_value(self.poly_g, x, y, mu, z),
        )

    def eval(self, x: float, y: float, mu: float) -> tuple[float, float]:
        return self.eval_z(x, y, math.sqrt(x) if x > 0 else 0.0, mu)

    @cached_property
    def left(self) -> SmoothPiece:
        """The field with S = 0, which governs x < 0."""
        if self.func is None:
            return SmoothPiece(
                label="left",
                poly_f=[t for t in self.poly_f if t.z == 0],
                poly_g=[t for t in self.poly_g if t.z == 0],
            )
        func = self.func
        return SmoothPiece(label="left", func=lambda x, y, mu: func(x, y, 0.0, mu))

    def linear_coefficients(self, mu: float) -> tuple[np.ndarray, np.ndarray]:
        """Coefficients of (x, y, mu, z) in f and g at the origin."""
        if self.func is None:
            out = []
            for terms in (self.poly_f, self.poly_g):
                row = np.zeros(4)
                for t in terms:
                    key = (t.i, t.j, t.mu, t.z)
                    for index, unit in enumerate(((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))):
                        if key == unit:
                            row[index] += t.coeff
                out.append(row)
            return out[0], out[1]
        h = MACHINE_EPS ** (1.0 / 3.0)
        rows = np.zeros((2, 4))
        for index in range(4):
            step = np.zeros(4)
            step[index] = h
            plus = np.array(self.eval_z(step[0], step[1], step[3], mu + step[2]))
            minus = np.array(self.eval_z(-step[0], -step[1], -step[3], mu - step[2]))
            rows[:, index] = (plus - minus) / (2 * h)
        return rows[0], rows[1]

    def well_posedness(self, mu: float) -> list[ChecklistItem]:
        f0, g0 = self.eval_z(0.0, 0.0, 0.0, mu)
        return [ChecklistItem(name="F(0,0,0) = 0", satisfied=abs(f0) + abs(g0) < 1e-9,
                              witness=abs(f0) + abs(g0))]


Mechanism = Annotated[
    Smooth | Filippov | Impact | Impulse | Hysteretic | Delayed | FourQuadrant | SqrtContinuous,
    Field(discriminator="tag"),
]


class PWSystem(BaseModel):
    """A parametric piecewise-smooth planar system in canonical coordinates."""

    model_config = ConfigDict(frozen=True)

    name: str = "model"
    mechanism: Mechanism
    mu: float = 0.0
    canonical: bool = True
    notes: str = ""
    metadata: dict[str, Any] = Field(default_factory=dict)

    @property
    def tag(self) -> str:
        return self.mechanism.tag

    def with_mu(self, mu: float) -> PWSystem:
        return self.model_copy(update={"mu": float(mu)})

    def param_value(self, mu: float | None = None) -> float:
        """Raw model parameter matching ``mu`` (identity when no mapping is recorded)."""
        mu = self.mu if mu is None else mu
        mapping = self.metadata.get("mu_to_param")
        if not mapping:
            return mu
        return mapping["offset"] + mapping.get("scale", 1.0) * mu

    def pieces(self) -> list[SmoothPiece]:
        mech = self.mechanism
        if isinstance(mech, (Filippov, Hysteretic, Delayed)):
            return [mech.left, mech.right]
        if isinstance(mech, FourQuadrant):
            return list(mech.quadrants)
        if isinstance(mech, SqrtContinuous):
            return [mech.left]
        return [mech.field]


def _stencil(func: FieldFunc, orders: tuple[int, int, int], steps: tuple[float, float, float],
             mu: float) -> np.ndarray:
    i, j, m = orders
    hx, hy, hm = steps
    total = np.zeros(2)
    for p, wp in _CENTRAL[i]:
        for q, wq in _CENTRAL[j]:
            for s, ws in _CENTRAL[m]:
                value = np.asarray(func(p * hx, q * hy, mu + s * hm), dtype=float)
                if not np.all(np.isfinite(value)):
                    raise ModelError(
                        f"Non-finite field value at ({p * hx}, {q * hy}, {mu + s * hm})"
                    )
                total += wp * wq * ws * value
    return total / (hx**i * hy**j * hm**m)


def _richardson(func: FieldFunc, orders: tuple[int, int, int], h: float, mu: float) -> np.ndarray:
    i, j, m = orders
    if i + j + m == 0:
        return _stencil(func, orders, (1.0, 1.0, 1.0), mu)
    coarse = _stencil(func, orders, (h, h, h), mu)
    fine = _stencil(func, orders, (h / 2, h / 2, h / 2), mu)
    return (4.0 * fine - coarse) / 3.0


def _exact_table(piece: SmoothPiece, mu: float, order: int) -> TaylorTable:
    if piece.degree > MAX_TAYLOR_ORDER:
        raise ModelError(
            f"Piece {piece.label or '?'} has degree {piece.degree} > {MAX_TAYLOR_ORDER}; "
            "coefficient work needs degree <= 4"
        )
    table = TaylorTable(exact=True)
    for name, terms in (("f", piece.poly_f), ("g", piece.poly_g)):
        values = getattr(table, name)
        mu_values = getattr(table, f"{name}_mu")
        for t in terms:
            if t.z:
                raise ModelError("sqrt terms are not allowed in a smooth piece")
            if t.i + t.j > order:
                continue
            weight = math.factorial(t.i) * math.factorial(t.j) * t.coeff
            values[t.i][t.j] += weight * mu**t.mu
            if t.i + t.j <= 1 and t.mu >= 1:
                mu_values[t.i][t.j] += weight * t.mu * mu ** (t.mu - 1)
    return table


def extract_taylor(piece: SmoothPiece, mu: float, order: int = MAX_TAYLOR_ORDER) -> TaylorTable:
    """Partial derivatives of ``piece`` at the origin up to ``order``.

    Exact for polynomial pieces, otherwise central differences with one
    Richardson step and h_k = eps^(1/(k+2)) * scale.
    """
    if not 0 <= order <= MAX_TAYLOR_ORDER:
        raise ModelError(f"Taylor order must be in [0, {MAX_TAYLOR_ORDER}], got {order}")
    if piece.has_polynomial:
        return _exact_table(piece, mu, order)

    func = piece.func
    assert func is not None
    table = TaylorTable()
    for k in range(order + 1):
        h = MACHINE_EPS ** (1.0 / (k + 2)) * piece.scale
        for i in range(k + 1):
            j = k - i
            table.f[i][j], table.g[i][j] = _richardson(func, (i, j, 0), h, mu)
    for i, j in ((0, 0), (1, 0), (0, 1)):
        k = i + j + 1
        h = MACHINE_EPS ** (1.0 / (k + 2)) * piece.scale
        table.f_mu[i][j], table.g_mu[i][j] = _richardson(func, (i, j, 1), h, mu)
    _LOGGER.debug("Finite-difference table for %s at mu=%s", piece.label or "piece", mu)
    return table


def _transform(table: TaylorTable, f_factor: Callable[[int, int], float],
               g_factor: Callable[[int, int], float]) -> TaylorTable:
    def apply(values: list[list[float]], factor: Callable[[int, int], float]) -> list[list[float]]:
        return [[factor(i, j) * v for j, v in enumerate(row)] for i, row in enumerate(values)]

    return TaylorTable(
        f=apply(table.f, f_factor),
        g=apply(table.g, g_factor),
        f_mu=apply(table.f_mu, f_factor),
        g_mu=apply(table.g_mu, g_factor),
        exact=table.exact,
    )


def rotate_table(table: TaylorTable) -> TaylorTable:
    """F -> -F(-x, -y); the caller swaps the left and right pieces."""
    factor = lambda i, j: -((-1.0) ** (i + j))  # noqa: E731
    return _transform(table, factor, factor)


def reflect_table(table: TaylorTable) -> TaylorTable:
    """y -> -y: (f(x, -y), -g(x, -y))."""
    return _transform(table, lambda i, j: (-1.0) ** j, lambda i, j: -((-1.0) ** j))


def reverse_table(table: TaylorTable) -> TaylorTable:
    """Time reversal: F -> -F."""
    return _transform(table, lambda i, j: -1.0, lambda i, j: -1.0)


def mirror_table(table: TaylorTable) -> TaylorTable:
    """x -> -x: (-f(-x, y), g(-x, y))."""
    return _transform(table, lambda i, j: -((-1.0) ** i), lambda i, j: (-1.0) ** i)


def fold_frame_table(table: TaylorTable) -> TaylorTable:
    """Mirror plus time reversal: puts a left-side fold into the right-side fold frame."""
    return reverse_table(mirror_table(table))


def flip_mu_table(table: TaylorTable) -> TaylorTable:
    return table.model_copy(
        update={
            "f_mu": [[-v for v in row] for row in table.f_mu],
            "g_mu": [[-v for v in row] for row in table.g_mu],
        }
    )


_PIECE_LABELS: dict[str, tuple[str, ...]] = {
    "smooth": ("field",),
    "filippov": ("left", "right"),
    "impact": ("field",),
    "impulse": ("field",),
    "hysteretic": ("left", "right"),
    "delayed": ("left", "right"),
    "four_quadrant": ("q1", "q2", "q3", "q4"),
    "sqrt_continuous": ("field",),
}


def _piece(doc_pieces: dict[str, Any], label: str, allow_z: bool = False) -> SmoothPiece:
    try:
        doc = doc_pieces[label]
    except KeyError:
        raise ModelError(f"Missing piece '{label}'") from None
    if not allow_z and any(t.z for t in doc.f + doc.g):
        raise ModelError(f"Piece '{label}' uses sqrt terms outside sqrt_continuous")
    return SmoothPiece(label=label, poly_f=doc.f, poly_g=doc.g)


def load_model(document: str | dict[str, Any] | ModelDocument) -> PWSystem:
    """Build a PWSystem from a JSON document, a dict or a parsed ModelDocument."""
    try:
        if isinstance(document, ModelDocument):
            doc = document
        elif isinstance(document, str):
            doc = ModelDocument.model_validate_json(document)
        else:
            doc = ModelDocument.model_validate(document)
    except ValidationError as e:
        raise ModelError(f"Model document does not match the schema: {e}") from e

    if doc.zoo is not None:
        from .zoo import zoo_build

        return zoo_build(doc.zoo, doc.params)

    if doc.mechanism is None:
        raise ModelError("Model document is missing 'mechanism'")
    if doc.mechanism not in MECHANISMS:
        raise ModelError(f"Unknown mechanism '{doc.mechanism}'")

    pieces = {p.label: p for p in doc.pieces}
    expected = _PIECE_LABELS[doc.mechanism]
    unknown = set(pieces) - set(expected)
    if unknown:
        raise ModelError(f"Unexpected pieces {sorted(unknown)} for {doc.mechanism}")

    mechanism: Any
    match doc.mechanism:
        case "smooth":
            mechanism = Smooth(field=_piece(pieces, "field"))
        case "filippov":
            mechanism = Filippov(left=_piece(pieces, "left"), right=_piece(pieces, "right"))
        case "hysteretic":
            mechanism = Hysteretic(left=_piece(pieces, "left"), right=_piece(pieces, "right"))
        case "delayed":
            mechanism = Delayed(left=_piece(pieces, "left"), right=_piece(pieces, "right"))
        case "four_quadrant":
            mechanism = FourQuadrant(
                quadrants=tuple(_piece(pieces, label) for label in expected)  # type: ignore[arg-type]
            )
        case "impact":
            if doc.reset is None:
                raise ModelError("Impact model needs a 'reset' law")
            mechanism = Impact(field=_piece(pieces, "field"), reset=_law(doc.reset))
        case "impulse":
            if doc.radius is None or doc.angle is None:
                raise ModelError("Impulse model needs 'radius' and 'angle' laws")
            mechanism = Impulse(
                field=_piece(pieces, "field"), radius=_law(doc.radius), angle=_law(doc.angle)
            )
        case "sqrt_continuous":
            field = _piece(pieces, "field", allow_z=True)
            mechanism = SqrtContinuous(poly_f=field.poly_f, poly_g=field.poly_g)

    _LOGGER.debug("Loaded %s model '%s'", doc.mechanism, doc.name)
    return PWSystem(
        name=doc.name,
        mechanism=mechanism,
        mu=doc.params.get("mu", 0.0),
        notes=doc.notes,
        metadata={k: v for k, v in doc.params.items() if k != "mu"},
    )
