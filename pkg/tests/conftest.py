import json
from pathlib import Path

import pytest

from hopflike.model import Monomial
from hopflike.pwsmodel import Filippov, PWSystem, Smooth, SmoothPiece


@pytest.fixture
def data_folder():
    return Path(__file__).parent.joinpath("test_data")


@pytest.fixture
def vdp_document(data_folder):
    with data_folder.joinpath("model_vdp.json").open() as f:
        return json.load(f)


@pytest.fixture
def filippov_document(data_folder):
    with data_folder.joinpath("model_filippov.json").open() as f:
        return json.load(f)


@pytest.fixture
def mckean_document(data_folder):
    with data_folder.joinpath("model_zoo_mckean.json").open() as f:
        return json.load(f)


@pytest.fixture
def invalid_document(data_folder):
    with data_folder.joinpath("model_invalid.json").open() as f:
        return json.load(f)


@pytest.fixture
def published_tolerances(data_folder):
    with data_folder.joinpath("published.json").open() as f:
        return json.load(f)


@pytest.fixture
def mckean_values(data_folder):
    with data_folder.joinpath("mckean_eigenvalues.json").open() as f:
        return json.load(f)


def piece(label: str, f: list[tuple[float, int, int]], g: list[tuple[float, int, int]]) -> SmoothPiece:
    """Polynomial piece from (coeff, i, j) triples."""
    return SmoothPiece(
        label=label,
        poly_f=[Monomial(coeff=c, i=i, j=j) for c, i, j in f],
        poly_g=[Monomial(coeff=c, i=i, j=j) for c, i, j in g],
    )


@pytest.fixture
def harmonic():
    return PWSystem(name="harmonic", mechanism=Smooth(field=piece("field", [(1.0, 0, 1)], [(-1.0, 1, 0)])))


@pytest.fixture
def sliding_system():
    """Left (1, 0), right (y, -1): attracting sliding for y < 0, invisible fold at the origin."""
    return PWSystem(
        name="sliding",
        mechanism=Filippov(left=piece("left", [(1.0, 0, 0)], []), right=piece("right", [(1.0, 0, 1)], [(-1.0, 0, 0)])),
    )


@pytest.fixture
def pseudo_system():
    """Left (1, -y), right (-1, -y): a stable pseudo-equilibrium at the origin."""
    return PWSystem(
        name="pseudo",
        mechanism=Filippov(
            left=piece("left", [(1.0, 0, 0)], [(-1.0, 0, 1)]),
            right=piece("right", [(-1.0, 0, 0)], [(-1.0, 0, 1)]),
        ),
    )


def reversed_piece(p: SmoothPiece) -> SmoothPiece:
    """The same piece with time running backwards."""
    func = p.func
    return p.model_copy(
        update={
            "func": None if func is None else (lambda x, y, mu: tuple(-v for v in func(x, y, mu))),
            "poly_f": [m.model_copy(update={"coeff": -m.coeff}) for m in p.poly_f],
            "poly_g": [m.model_copy(update={"coeff": -m.coeff}) for m in p.poly_g],
        }
    )


def reversed_system(sys: PWSystem) -> PWSystem:
    mech = sys.mechanism
    assert isinstance(mech, Filippov)
    return sys.model_copy(
        update={
            "name": f"{sys.name}_reversed",
            "mechanism": Filippov(left=reversed_piece(mech.left), right=reversed_piece(mech.right)),
        }
    )
