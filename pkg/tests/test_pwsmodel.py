import json

import pytest

from hopflike.model import Monomial, TaylorTable
from hopflike.pwsmodel import (
    Filippov,
    ModelError,
    PWSystem,
    Smooth,
    SmoothPiece,
    flip_mu_table,
    load_model,
    mirror_table,
    reflect_table,
    reverse_table,
    rotate_table,
)


def _sample_table() -> TaylorTable:
    return SmoothPiece(
        poly_f=[Monomial(coeff=0.3, i=1), Monomial(coeff=1.0, j=1), Monomial(coeff=-0.7, i=1, j=1),
                Monomial(coeff=0.2, j=3), Monomial(coeff=0.5, mu=1)],
        poly_g=[Monomial(coeff=-1.0, i=1), Monomial(coeff=0.4, j=2), Monomial(coeff=1.5, i=3),
                Monomial(coeff=2.0, j=1, mu=1)],
    ).taylor(0.0)


def test_load_model_from_document(vdp_document):
    sys = load_model(vdp_document)

    assert isinstance(sys.mechanism, Smooth)
    assert sys.name == "vdp_document"
    table = sys.pieces()[0].taylor(0.0)
    assert table.exact
    assert (table.a1, table.a2, table.b1, table.b2) == (0.0, 1.0, -1.0, 0.0)
    assert table.d(0, 3, "g") == -6.0
    assert table.dmu(0, 1, "g") == 1.0


def test_load_model_from_json_text(filippov_document):
    sys = load_model(json.dumps(filippov_document))

    assert isinstance(sys.mechanism, Filippov)
    assert sys.mechanism.left.eval(0.0, 2.0, 0.0) == (1.0, 0.0)
    assert sys.mechanism.right.eval(0.0, 2.0, 0.0) == (2.0, -1.0)


def test_load_model_from_zoo(mckean_document):
    sys = load_model(mckean_document)

    assert sys.name == "mckean"
    assert sys.mu == -0.001
    assert sys.metadata["zoo"] == "mckean"
    assert sys.param_value() == pytest.approx(0.374)


def test_load_model_rejects_invalid_document(invalid_document):
    with pytest.raises(ModelError):
        load_model(invalid_document)


@pytest.mark.parametrize(
    "document",
    [
        {"name": "x", "mechanism": "bouncing", "pieces": []},
        {"name": "x", "pieces": []},
        {"name": "x", "mechanism": "smooth", "pieces": [{"label": "left"}]},
        {"name": "x", "mechanism": "impact", "pieces": [{"label": "field", "f": [{"j": 1, "coeff": 1.0}]}]},
        {"name": "x", "mechanism": "filippov", "pieces": [{"label": "left", "f": [{"z": 1, "coeff": 1.0}]},
                                                          {"label": "right"}]},
    ],
)
def test_load_model_errors(document):
    with pytest.raises(ModelError):
        load_model(document)


def test_degree_cap():
    piece = SmoothPiece(poly_f=[Monomial(coeff=1.0, j=5)])
    with pytest.raises(ModelError):
        piece.taylor(0.0)


def test_finite_difference_table_matches_polynomial():
    func_piece = SmoothPiece(func=lambda x, y, mu: (y + x * x - 0.5 * x * y, -x + mu * y + y**3))
    table = func_piece.taylor(0.2)

    assert not table.exact
    assert table.a2 == pytest.approx(1.0, abs=1e-8)
    assert table.d(2, 0, "f") == pytest.approx(2.0, abs=1e-5)
    assert table.d(1, 1, "f") == pytest.approx(-0.5, abs=1e-5)
    assert table.b2 == pytest.approx(0.2, abs=1e-8)
    assert table.dmu(0, 1, "g") == pytest.approx(1.0, abs=1e-6)
    assert table.d(0, 3, "g") == pytest.approx(6.0, abs=1e-3)


def test_non_finite_field_is_reported():
    piece = SmoothPiece(func=lambda x, y, mu: (float("nan"), 0.0))
    with pytest.raises(ModelError):
        piece.taylor(0.0)


def test_aliases():
    table = _sample_table()
    assert table.a3 == 0.0
    assert table.a4 == -0.7
    assert table.b5 == pytest.approx(0.4)
    assert table.b3 == 0.0
    assert table.d(3, 0, "g") == pytest.approx(9.0)


@pytest.mark.parametrize("transform", [rotate_table, reflect_table, reverse_table, mirror_table, flip_mu_table])
def test_transforms_are_involutions(transform):
    table = _sample_table()
    assert transform(transform(table)).model_dump() == table.model_dump()


def test_rotate_table_against_rotated_field():
    table = _sample_table()
    rotated = rotate_table(table)
    # -F(-x, -y): odd-order partials keep their sign, even-order ones flip
    assert rotated.a0 == -table.a0
    assert rotated.a2 == table.a2
    assert rotated.a4 == -table.a4
    assert rotated.d(0, 3, "f") == table.d(0, 3, "f")


def test_reflect_and_reverse():
    table = _sample_table()
    reflected = reflect_table(table)
    assert reflected.a2 == -table.a2
    assert reflected.b1 == -table.b1
    reversed_ = reverse_table(table)
    assert reversed_.jacobian.tolist() == (-table.jacobian).tolist()
    assert flip_mu_table(table).dmu(0, 0, "f") == -0.5


def test_param_value_and_with_mu():
    sys = PWSystem(
        name="mapped",
        mechanism=Smooth(field=SmoothPiece(poly_f=[Monomial(coeff=1.0, j=1)], poly_g=[Monomial(coeff=-1.0, i=1)])),
        metadata={"mu_to_param": {"param": "k", "offset": 2.0, "scale": -0.5}},
    )
    assert sys.param_value(1.0) == 1.5
    moved = sys.with_mu(0.4)
    assert moved.mu == 0.4
    assert sys.mu == 0.0
    assert moved.tag == "smooth"
