import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from edscatter.errors import SpectralCollisionError
from edscatter.reflectionless import (E_and_mu, build_model, jost, kernels,
                                      phase_factor, potential_derivatives,
                                      potentials, principal_mu, to_field,
                                      transmissions, transmissions_by_limit)

TWO_PI = 2.0 * math.pi


# closed forms for the two_simple pair, kept for cross-checking the engine
def _two_simple_q(x):
    u = np.arctanh(1.0 / 3.0 - 1j * np.exp(6.0 * x))
    return 18.0 / (3.0 * np.exp(6.0 * x) - 2j) * np.exp(2.0 * x - 4.0 * u)


def _two_simple_r(x):
    u = np.arctanh(1.0 / 3.0 - 1j * np.exp(6.0 * x))
    return 12.0 / (3.0 * np.exp(6.0 * x) + 4j) * np.exp(4.0 * x + 4.0 * u)


def _quad_complex(f, a, b, n=160):
    # fixed Gauss-Legendre; the integrands here are smooth and decay fast
    nodes, weights = np.polynomial.legendre.leggauss(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return half * sum(w * f(mid + half * t) for t, w in zip(nodes, weights))


# ------------------------------------------------------------------- constants

def test_mu_values(two_simple, six_simple, pair_jordan2, mixed_pair):
    for fx, expect in ((two_simple, TWO_PI - 2j * math.log(2.0)),
                       (six_simple, TWO_PI),
                       (pair_jordan2, 0.0),
                       (mixed_pair, -2j * math.log(2.0))):
        _, mu = E_and_mu(fx[2])
        assert abs(mu - expect) < 1e-12


def test_phase_factor_matches_mu(two_simple, mixed_pair):
    for fx in (two_simple, mixed_pair):
        model = fx[2]
        _, mu = E_and_mu(model)
        assert abs(phase_factor(model) - cmath.exp(0.5j * mu)) < 1e-12


def test_principal_mu_branch():
    # phase just under the cut keeps the 2 pi offset convention
    assert abs(principal_mu(-2.0) - (TWO_PI - 2j * math.log(2.0))) < 1e-12
    assert abs(principal_mu(1.0)) < 1e-14


# ------------------------------------------------------------------ potentials

def test_two_simple_potentials_closed_form(two_simple):
    model = two_simple[2]
    for x in np.linspace(-2.0, 2.0, 17):
        q, r = potentials(model, float(x))
        assert abs(q - _two_simple_q(x)) < 1e-12 * max(1.0, abs(q))
        assert abs(r - _two_simple_r(x)) < 1e-12 * max(1.0, abs(r))


def test_empty_model_is_free():
    model = build_model(*[__import__("edscatter").MatrixTriplet.empty()] * 2)
    assert potentials(model, 0.1) == (0.0, 0.0)
    _, mu = E_and_mu(model)
    assert mu == 0.0
    t, tbar = transmissions(model, 1.3)
    assert t == 1.0 and tbar == 1.0


def test_potential_derivatives_match_differences(pair_jordan2):
    model = pair_jordan2[2]
    h = 1e-4
    for x in (-0.8, 0.4, 1.3):
        q, r, dq, dr = potential_derivatives(model, x)
        q_fd = (potentials(model, x + h)[0] - potentials(model, x - h)[0]) / (2 * h)
        r_fd = (potentials(model, x + h)[1] - potentials(model, x - h)[1]) / (2 * h)
        assert abs(dq - q_fd) < 5e-7 * max(1.0, abs(dq))
        assert abs(dr - r_fd) < 5e-7 * max(1.0, abs(dr))


# --------------------------------------------------------------------- kernels

def test_two_simple_k2bar_closed_form(two_simple):
    model = two_simple[2]
    for x, y in ((0.0, 0.0), (0.0, 1.0), (1.0, 2.5), (-1.0, 0.0)):
        got = kernels(model, x, y).K2bar
        expect = -6.0 * np.exp(-x - y) / (3.0 + 4j * np.exp(-6.0 * x))
        assert abs(got - expect) < 1e-12


def test_kernels_require_wedge(two_simple):
    with pytest.raises(ValueError):
        kernels(two_simple[2], 1.0, 0.5)


def test_kernel_diagonals(two_simple, pair_jordan2):
    # diagonal values tie the kernels to q, r, E, mu
    for fx in (two_simple, pair_jordan2):
        model = fx[2]
        E, mu = E_and_mu(model)
        for x in (-0.5, 0.8):
            q, r = potentials(model, x)
            quad4 = kernels(model, x, x)
            ex = E(x)
            assert abs(quad4.K1 + 0.5 * cmath.exp(1j * mu) * q / ex ** 2) < 1e-10
            assert abs(quad4.K2bar + 0.5 * cmath.exp(-1j * mu) * r * ex ** 2) < 1e-10
            assert abs((quad4.K1bar - quad4.K2) - 0.25j * q * r) < 1e-10


def test_kernel_diagonal_sigma_integral(two_simple):
    # K1bar(x,x) is half the tail integral of sigma = -(i/2) q r' + (1/4) q^2 r^2
    model = two_simple[2]

    def sigma(t):
        q, r, _, dr = potential_derivatives(model, t)
        return -0.5j * q * dr + 0.25 * (q * r) ** 2

    for x in (-0.5, 0.7):
        # sigma falls off like exp(-6t), so the tail past 8 is below 1e-18
        expect = 0.5 * _quad_complex(sigma, x, 8.0)
        got = kernels(model, x, x).K1bar
        assert abs(got - expect) < 1e-8


def test_E_matches_quadrature(two_simple):
    model = two_simple[2]
    E, _ = E_and_mu(model)

    def qr(t):
        q, r = potentials(model, t)
        return q * r

    x = 0.5
    # q r decays like exp(6t) on the left, so starting at -8 loses < 1e-20
    expect = cmath.exp(0.5j * _quad_complex(qr, -8.0, x))
    assert abs(E(x) - expect) < 1e-8


# ----------------------------------------------------------------- scattering

def test_two_simple_transmission_rational(two_simple):
    model = two_simple[2]
    for zeta in (0.3, 1.0, 1.2 + 0.5j):
        lam = complex(zeta) ** 2
        t, tbar = transmissions(model, zeta)
        assert abs(t - (-0.5) * (lam + 2j) / (lam - 1j)) < 1e-13
        assert abs(tbar - (-2.0) * (lam - 1j) / (lam + 2j)) < 1e-13
        assert abs(t * tbar - 1.0) < 1e-13


def test_transmissions_agree_with_limit_route(two_simple, six_simple,
                                              pair_jordan2, mixed_pair):
    for fx in (two_simple, six_simple, pair_jordan2, mixed_pair):
        model = fx[2]
        for zeta in (0.8, 1.5):
            t, tbar = transmissions(model, zeta)
            t2, tbar2 = transmissions_by_limit(model, zeta)
            assert abs(t - t2) < 1e-7 * max(1.0, abs(t))
            assert abs(tbar - tbar2) < 1e-7 * max(1.0, abs(tbar))


def test_transmission_pole_collision(two_simple):
    model = two_simple[2]
    zeta = cmath.sqrt(1j)  # lambda = i sits on the plus spectrum
    with pytest.raises(SpectralCollisionError):
        transmissions(model, zeta)


# ------------------------------------------------------------------------ jost

def test_two_simple_jost_closed_form(two_simple):
    model = two_simple[2]
    for zeta in (0.6, 1.4):
        for x in (-0.5, 0.0, 1.2):
            lam = zeta * zeta
            e6 = np.exp(6.0 * x)
            u = np.arctanh(1.0 / 3.0 - 1j * e6)
            w1 = 4.0 * (lam - 1j) - 3j * e6 * (lam + 2j)
            w2 = -2.0 * (lam + 2j) - 3j * e6 * (lam - 1j)
            psi_ref = np.array([
                -9.0 * zeta * np.exp(1j * lam * x + 2 * x - 2 * u)
                / ((lam + 2j) * (2.0 + 3j * e6)),
                w1 * np.exp(1j * lam * x + 2 * u)
                / ((lam + 2j) * (-4.0 + 3j * e6)),
            ])
            psibar_ref = np.array([
                w2 * np.exp(-1j * lam * x - 2 * u)
                / ((lam - 1j) * (2.0 + 3j * e6)),
                6.0 * zeta * np.exp(-1j * lam * x + 4 * x + 2 * u)
                / ((lam - 1j) * (-4.0 + 3j * e6)),
            ])
            psi, psibar = jost(model, zeta, x)
            assert np.max(np.abs(psi - psi_ref)) < 1e-11
            assert np.max(np.abs(psibar - psibar_ref)) < 1e-11


def test_jost_asymptotics(pair_jordan2):
    model = pair_jordan2[2]
    zeta = 1.1
    lam = zeta * zeta
    psi, psibar = jost(model, zeta, 12.0)
    assert abs(psi[0]) < 1e-8
    assert abs(psi[1] - cmath.exp(1j * lam * 12.0)) < 1e-8
    assert abs(psibar[0] - cmath.exp(-1j * lam * 12.0)) < 1e-8
    assert abs(psibar[1]) < 1e-8


def test_jost_parity(two_simple, mixed_pair):
    # psi1 and psibar2 are odd in zeta; psi2 and psibar1 are even
    for fx in (two_simple, mixed_pair):
        model = fx[2]
        for zeta in (0.7, 1.3):
            for x in (-0.4, 0.9):
                p, pb = jost(model, zeta, x)
                m, mb = jost(model, -zeta, x)
                assert abs(m[0] + p[0]) < 1e-11
                assert abs(m[1] - p[1]) < 1e-11
                assert abs(mb[0] - pb[0]) < 1e-11
                assert abs(mb[1] + pb[1]) < 1e-11


# -------------------------------------------------------------------- sampling

def test_to_field_matches_pointwise(two_simple):
    model = two_simple[2]
    field = to_field(model)
    for x in (-3.3, -0.7, 0.45, 2.6):
        q, r = potentials(model, x)
        assert abs(field.q_at(x) - q) < 1e-9 * max(1.0, abs(q))
        assert abs(field.r_at(x) - r) < 1e-9 * max(1.0, abs(r))
        _, _, dq, dr = potential_derivatives(model, x)
        assert abs(field.dq_at(x) - dq) < 1e-8 * max(1.0, abs(dq))
