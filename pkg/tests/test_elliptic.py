import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hybridint.elliptic import complete_E, complete_K, incomplete_F, inverse_amplitude, jacobi_sn_cn_dn


def quad_F(phi, m):
    return quad(lambda t: 1.0 / math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, phi, epsabs=0.0, epsrel=1e-13)[0]


def quad_E(m):
    return quad(lambda t: math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, math.pi / 2, epsabs=0.0, epsrel=1e-13)[0]


def test_complete_integrals_at_zero():
    assert abs(complete_K(0.0) - math.pi / 2) < 1e-14
    assert abs(complete_E(0.0) - math.pi / 2) < 1e-14


@pytest.mark.parametrize("m", [0.05, 0.3, 0.5, 0.77, 0.95, 0.999])
def test_complete_integrals_match_quadrature(m):
    assert complete_K(m) == pytest.approx(quad_F(math.pi / 2, m), rel=1e-12)
    assert complete_E(m) == pytest.approx(quad_E(m), rel=1e-12)


def test_known_values():
    assert abs(complete_K(0.5) - 1.854074677301372) < 1e-14
    assert abs(complete_E(0.5) - 1.350643881047676) < 1e-14
    assert math.isfinite(complete_K(0.999)) and complete_K(0.999) > complete_K(0.5)


@pytest.mark.parametrize("m", [-0.1, 1.0, 1.5, float("nan")])
def test_parameter_out_of_range(m):
    with pytest.raises(ValueError):
        complete_K(m)
    with pytest.raises(ValueError):
        jacobi_sn_cn_dn(0.3, m)


@pytest.mark.parametrize("m", [0.1 * i for i in range(1, 10)])
def test_legendre_relation(m):
    K, E = complete_K(m), complete_E(m)
    Kc, Ec = complete_K(1 - m), complete_E(1 - m)
    assert abs(E * Kc + Ec * K - K * Kc - math.pi / 2) < 1e-12


def test_incomplete_F_examples():
    for m in (0.0, 0.4, 0.9):
        assert incomplete_F(0.0, m) == 0.0
    assert abs(incomplete_F(math.pi / 2, 0.5) - complete_K(0.5)) < 1e-14
    assert abs(incomplete_F(0.3, 0.25) - quad_F(0.3, 0.25)) < 1e-12
    assert incomplete_F(-0.3, 0.25) == pytest.approx(-incomplete_F(0.3, 0.25), abs=1e-16)
    with pytest.raises(ValueError):
        incomplete_F(2.0, 0.5)


def test_inverse_amplitude_extends_quasi_periodically():
    m = 0.6
    K = complete_K(m)
    assert inverse_amplitude(math.pi, m) == pytest.approx(2 * K, rel=1e-14)
    assert inverse_amplitude(math.pi + 0.4, m) == pytest.approx(2 * K + incomplete_F(0.4, m), rel=1e-14)


def test_sn_cn_dn_special_values():
    for u in (0.3, 1.2):
        sn, cn, dn = jacobi_sn_cn_dn(u, 0.0)
        assert abs(sn - math.sin(u)) < 1e-15 and abs(cn - math.cos(u)) < 1e-15 and dn == 1.0
    assert jacobi_sn_cn_dn(0.0, 0.7) == (0.0, 1.0, 1.0)
    sn, cn, _ = jacobi_sn_cn_dn(complete_K(0.7), 0.7)
    assert abs(sn - 1.0) < 1e-14 and abs(cn) < 1e-14


def test_sn_inverts_F():
    sn, _, _ = jacobi_sn_cn_dn(incomplete_F(0.4, 0.6), 0.6)
    assert abs(sn - math.sin(0.4)) < 1e-12


@settings(max_examples=1000, deadline=None)
@given(u=st.floats(-50, 50), m=st.floats(0.0, 0.999))
def test_pythagorean_identities(u, m):
    sn, cn, dn = jacobi_sn_cn_dn(u, m)
    assert abs(sn * sn + cn * cn - 1.0) < 1e-12
    assert abs(dn * dn + m * sn * sn - 1.0) < 1e-12


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-10, 10), m=st.floats(0.0, 0.99))
def test_periodicity(u, m):
    sn0, cn0, _ = jacobi_sn_cn_dn(u, m)
    sn1, cn1, _ = jacobi_sn_cn_dn(u + 4 * complete_K(m), m)
    assert abs(sn1 - sn0) < 1e-10 and abs(cn1 - cn0) < 1e-10


def sn_cn_by_quadrature(u, m):
    """Invert u = F(phi|m) for the amplitude with a root finder on the quadrature integral."""
    from scipy.optimize import brentq

    K = quad_F(math.pi / 2, m)
    n = math.floor(u / (2 * K) + 0.5)
    r = u - 2 * n * K  # r in [-K, K], am(u) = n pi + am(r)
    phi = brentq(lambda a: quad_F(a, m) - r, -math.pi / 2, math.pi / 2, xtol=1e-15)
    am = n * math.pi + phi
    return math.sin(am), math.cos(am)


def test_sn_cn_grid_against_quadrature():
    us = np.linspace(-3.0, 6.0, 5)
    ms = (0.1, 0.4, 0.7, 0.95)
    for u in us:
        for m in ms:
            sn, cn, _ = jacobi_sn_cn_dn(u, m)
            sq, cq = sn_cn_by_quadrature(u, m)
            assert abs(sn - sq) < 1e-10 and abs(cn - cq) < 1e-10, (u, m)


def test_agrees_with_scipy_ellipj():
    from scipy.special import ellipj, ellipk

    for u, m in [(0.7, 0.3), (2.5, 0.8), (-1.1, 0.55)]:
        ref = ellipj(u, m)[:3]
        assert np.allclose(jacobi_sn_cn_dn(u, m), ref, atol=1e-13)
        assert complete_K(m) == pytest.approx(ellipk(m), rel=1e-14)
