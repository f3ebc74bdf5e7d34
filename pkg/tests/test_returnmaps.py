import cmath
import math

import pytest
from scipy.optimize import bisect

from hopflike.model import Monomial
from hopflike.pwsmodel import SmoothPiece, fold_frame_table
from hopflike.returnmaps import (
    ReturnMapError,
    affine_return,
    aux_rho,
    aux_rho_ds,
    aux_rho_node,
    aux_shat,
    chi_focus,
    chi_fold,
    g_func,
    g_func_node,
    p_focus_series,
    p_fold_series,
    sigma_fold,
)


def _table(f, g):
    return SmoothPiece(
        poly_f=[Monomial(coeff=c, i=i, j=j) for c, i, j in f],
        poly_g=[Monomial(coeff=c, i=i, j=j) for c, i, j in g],
    ).taylor(0.0)


@pytest.fixture
def focus_table():
    return _table([(1.0, 0, 1), (-1.0, 0, 2)], [(-1.0, 1, 0)])


@pytest.fixture
def fold_table():
    return _table([(1.0, 0, 1), (-1.0, 0, 4)], [(-1.0, 0, 0)])


def test_aux_rho_values():
    assert aux_rho(0.0, 0.7) == 0.0
    assert aux_rho(math.pi, 0.0) == pytest.approx(2.0)


@pytest.mark.parametrize("s", [-5.0, -1.2, 0.4, 3.0, 6.1])
@pytest.mark.parametrize("nu", [-1.3, -0.2, 0.1, 0.9])
def test_aux_rho_symmetry(s, nu):
    assert aux_rho(-s, -nu) == pytest.approx(aux_rho(s, nu), abs=1e-12)


@pytest.mark.parametrize("s", [0.5, 2.0, 4.0, 5.5])
def test_aux_rho_derivative(s):
    h = 1e-6
    numeric = (aux_rho(s + h, 0.3) - aux_rho(s - h, 0.3)) / (2 * h)
    assert numeric == pytest.approx(aux_rho_ds(s, 0.3), rel=1e-7)


def test_aux_rho_node_positive_for_large_nu():
    for nu in (1.5, -2.0):
        for s in (-3.0, -0.5, 0.2, 1.0, 4.0):
            assert aux_rho_node(s, nu) > 0
    assert aux_rho_node(0.0, 3.0) == 0.0


@pytest.mark.parametrize("s, nu", [(0.3, 0.5), (1.7, -0.4), (2.5, 1.2)])
def test_aux_rho_node_matches_complex_continuation(s, nu):
    z = 1j * s
    w = -1j * nu
    continued = 1 - cmath.exp(w * z) * (cmath.cos(z) - w * cmath.sin(z))
    assert continued.real == pytest.approx(aux_rho_node(s, nu), abs=1e-12)
    assert continued.imag == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("nu", [1e-4, 1e-6, 1e-8])
def test_aux_shat_small_nu(nu):
    s = aux_shat(nu)
    assert abs(aux_rho(s, nu)) < 1e-12
    # 2 pi - s_hat ~ sqrt(4 pi nu)
    assert 2 * math.pi - s == pytest.approx(math.sqrt(4 * math.pi * nu), rel=2e-2)


def test_aux_shat():
    oracle = bisect(aux_rho, math.pi, 2 * math.pi, args=(0.5,), xtol=1e-13)
    assert aux_shat(0.5) == pytest.approx(oracle, abs=1e-11)
    assert math.pi < aux_shat(0.1) < 2 * math.pi
    assert abs(aux_rho(aux_shat(0.1), 0.1)) < 1e-12


def test_aux_shat_identity():
    for nu in (0.2, 1.0):
        s = aux_shat(nu)
        assert aux_rho(s, -nu) == pytest.approx((1 + nu * nu) * math.sin(s) ** 2, abs=1e-10)


def test_aux_shat_needs_positive_nu():
    with pytest.raises(ReturnMapError):
        aux_shat(0.0)


def test_g_func():
    assert g_func(math.pi / 2, 0.0) == pytest.approx(1.0)
    with pytest.raises(ReturnMapError):
        g_func(math.pi, 0.2)
    with pytest.raises(ReturnMapError):
        g_func_node(0.0, 0.2)


@pytest.mark.parametrize("s", [0.7, 2.2, 4.0])
def test_g_func_derivative_identity(s):
    nu, h = 0.35, 1e-6
    numeric = (g_func(s + h, nu) - g_func(s - h, nu)) / (2 * h)
    assert numeric == pytest.approx(aux_rho(s, -nu) / math.sin(s) ** 2, rel=1e-6)


def test_chi_focus(focus_table):
    assert chi_focus(focus_table) == pytest.approx(1 / 3, abs=1e-14)
    assert chi_focus(_table([(1.0, 0, 1)], [(-1.0, 1, 0)])) == 0.0


def test_chi_focus_needs_a_focus():
    with pytest.raises(ReturnMapError):
        chi_focus(_table([(1.0, 0, 1)], [(1.0, 1, 0)]))


def test_fold_coefficients(fold_table):
    assert sigma_fold(fold_table) == pytest.approx(0.0, abs=1e-14)
    assert chi_fold(fold_table) == pytest.approx(3.0, abs=1e-12)

    plain = _table([(1.0, 0, 1)], [(-1.0, 0, 0)])
    assert sigma_fold(plain) == 0.0
    assert chi_fold(plain) == 0.0


def test_fold_coefficients_of_left_piece():
    left = fold_frame_table(_table([(1.0, 1, 0), (1.0, 0, 1)], [(1.0, 0, 0)]))
    assert sigma_fold(left) == pytest.approx(1.0)
    assert chi_fold(left) == pytest.approx(22 / 9)


def test_fold_preconditions():
    with pytest.raises(ReturnMapError):
        sigma_fold(_table([(1.0, 0, 1)], [(1.0, 0, 0)]))
    with pytest.raises(ReturnMapError):
        sigma_fold(_table([(-1.0, 0, 1)], [(-1.0, 0, 0)]))


def test_series(focus_table, fold_table):
    p, t = p_focus_series(focus_table, 0.1)
    assert p == pytest.approx(-0.1 + 2 / 3 * 0.01)
    assert t == pytest.approx(math.pi)
    p, t = p_fold_series(fold_table, 0.1)
    assert p == pytest.approx(-0.09996)
    assert t == pytest.approx(0.2)
    assert p_focus_series(focus_table, 0.0)[0] == 0.0
    assert p_fold_series(fold_table, 0.0)[0] == 0.0


def test_affine_return_type_one_small_r():
    result = affine_return(-0.3, 1.0, -1.0, 1e-6)
    assert result.type_tag == "I"
    assert abs(result.T) < 1e-4
    assert abs(result.P) < 1e-4


def test_affine_return_type_three_limit():
    lam, omega, b0 = 0.2, 1.5, 0.8
    nu = lam / omega
    s = aux_shat(nu)
    result = affine_return(lam, omega, b0, 1e-8)
    assert result.type_tag == "III"
    assert result.P == pytest.approx(b0 / omega * math.exp(nu * s) * math.sin(s), rel=1e-4)


def test_affine_return_type_two_refuses_small_r():
    lam, omega, b0 = -0.2, 1.0, 1.0
    nu = -lam / omega
    s = aux_shat(nu)
    r_hat = -(b0 / omega) * math.exp(nu * s) * math.sin(s)
    result = affine_return(lam, omega, b0, 2 * r_hat)
    assert result.type_tag == "II"
    assert result.r_hat == pytest.approx(r_hat)
    with pytest.raises(ReturnMapError):
        affine_return(lam, omega, b0, 0.5 * r_hat)


def test_affine_return_large_r():
    lam, omega = 0.1, 2.0
    result = affine_return(lam, omega, -1.0, 1e4)
    assert result.T == pytest.approx(math.pi / omega, rel=1e-3)
    assert result.P / 1e4 == pytest.approx(-math.exp(lam * math.pi / omega), rel=1e-3)


@pytest.mark.parametrize("lam, omega, b0, r", [(-0.3, 1.0, -1.0, 0.4), (0.25, 0.8, 0.5, 0.7), (0.1, 1.3, -2.0, 1.5)])
def test_affine_return_derivative_identity(lam, omega, b0, r):
    h = 1e-5 * r
    numeric = (affine_return(lam, omega, b0, r + h).P - affine_return(lam, omega, b0, r - h).P) / (2 * h)
    result = affine_return(lam, omega, b0, r)
    assert numeric == pytest.approx(r / result.P * math.exp(2 * lam * result.T), rel=1e-6)
    assert result.dP_dr == pytest.approx(numeric, rel=1e-6)


def test_affine_return_preconditions():
    with pytest.raises(ReturnMapError):
        affine_return(0.1, 1.0, -1.0, 0.0)
    with pytest.raises(ReturnMapError):
        affine_return(0.1, 1.0, 0.0, 1.0)
    with pytest.raises(ReturnMapError):
        affine_return(0.1, -1.0, 1.0, 1.0)
