import cmath

import numpy as np
import pytest

from edscatter.akns import (JostEvaluation, akns_coefficients, map_jost,
                            map_scattering, to_akns)
from edscatter.direct import (field_invariants, integrate_jost,
                              scattering_coefficients)
from edscatter.errors import BranchPointError
from edscatter.reflectionless import to_field


@pytest.fixture(scope="module")
def field_two_simple(two_simple):
    return to_field(two_simple[2])


@pytest.fixture(scope="module")
def invariants(field_two_simple):
    return field_invariants(field_two_simple)


def test_uv_product_is_sigma(field_two_simple, invariants):
    akns = to_akns(field_two_simple, "uv", invariants=invariants)
    for x in np.linspace(-2.0, 2.0, 9):
        uv = akns.first(x) * akns.second(x)
        assert abs(uv - invariants.sigma(x)) < 1e-10 * max(1.0, abs(uv))


def test_ps_product_misses_sigma_by_derivative(field_two_simple, invariants):
    # p*s - sigma equals the exact derivative (i/2)(q r)', not zero
    akns = to_akns(field_two_simple, "ps", invariants=invariants)
    f = field_two_simple
    h = 1e-4
    for x in (-0.8, 0.3, 1.1):
        ps = akns.first(x) * akns.second(x)
        qr_prime = (f.q_at(x + h) * f.r_at(x + h)
                    - f.q_at(x - h) * f.r_at(x - h)) / (2 * h)
        assert abs(ps - invariants.sigma(x) - 0.5j * qr_prime) < 1e-6


def test_bad_flavor_rejected(field_two_simple):
    with pytest.raises(ValueError):
        to_akns(field_two_simple, "xy")


def test_scattering_dictionary_round_trip(field_two_simple, invariants):
    c = scattering_coefficients(field_two_simple, 1.2)
    for flavor in ("uv", "ps"):
        fwd = map_scattering(c, invariants.mu, flavor)
        back = map_scattering(fwd, invariants.mu, flavor, direction="from_akns")
        for name in ("zeta", "T", "Tbar", "R", "Rbar", "L", "Lbar"):
            assert abs(getattr(back, name) - getattr(c, name)) < 1e-12


def test_dictionary_matches_direct_akns_integration(field_two_simple, invariants):
    # route one: energy-dependent coefficients pushed through the dictionary;
    # route two: integrate the AKNS system itself
    zeta = 1.1
    c = scattering_coefficients(field_two_simple, zeta)
    for flavor in ("uv", "ps"):
        akns = to_akns(field_two_simple, flavor, invariants=invariants)
        direct = akns_coefficients(akns, zeta ** 2)
        via_map = map_scattering(c, invariants.mu, flavor)
        assert abs(direct.T - via_map.T) < 1e-6
        assert abs(direct.Tbar - via_map.Tbar) < 1e-6
        assert abs(direct.R - via_map.R) < 1e-6


def test_transmission_at_zero_energy_gives_phase(field_two_simple, invariants):
    # T of the uv picture at lam = 0 equals e^{i mu / 2}
    akns = to_akns(field_two_simple, "uv", invariants=invariants)
    c0 = akns_coefficients(akns, 0.0)
    assert abs(c0.T - cmath.exp(0.5j * invariants.mu)) < 1e-5


def test_map_jost_round_trip(field_two_simple, invariants):
    zeta, x = 0.9, 0.4
    vals = {}
    for kind in ("psi", "psibar", "phi", "phibar"):
        v = integrate_jost(field_two_simple, zeta, [x], kind=kind)[0]
        vals[kind] = (complex(v[0]), complex(v[1]))
    ev = JostEvaluation(zeta=zeta, x=x, **vals)
    for flavor in ("uv", "ps"):
        fwd = map_jost(ev, field_two_simple, flavor, invariants=invariants)
        back = map_jost(fwd, field_two_simple, flavor, direction="from_akns",
                        invariants=invariants)
        for kind in ("psi", "psibar", "phi", "phibar"):
            a = np.array(getattr(back, kind))
            b = np.array(getattr(ev, kind))
            assert np.max(np.abs(a - b)) < 1e-10


def test_jost_map_singular_at_zero(field_two_simple, invariants):
    ev = JostEvaluation(zeta=0.0, x=0.0, psi=(0, 1), psibar=(1, 0),
                        phi=(1, 0), phibar=(0, 1))
    with pytest.raises(BranchPointError):
        map_jost(ev, field_two_simple, "uv", invariants=invariants)


def test_coefficient_map_singular_at_zero(field_two_simple, invariants):
    c = scattering_coefficients(field_two_simple, 1.0)
    c0 = type(c)(zeta=0.0, T=c.T, Tbar=c.Tbar, R=c.R, Rbar=c.Rbar, L=c.L,
                 Lbar=c.Lbar)
    with pytest.raises(BranchPointError):
        map_scattering(c0, 0.0, "uv")
