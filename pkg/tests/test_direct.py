import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edscatter.direct import (field_invariants, integrate_jost,
                              locate_bound_states, scattering_coefficients,
                              wronskian)
from edscatter.fields import PotentialField
from edscatter.reflectionless import E_and_mu, to_field, transmissions


@pytest.fixture(scope="module")
def field_two_simple(two_simple):
    return to_field(two_simple[2])


def test_free_field_is_transparent():
    free = PotentialField.zero()
    c = scattering_coefficients(free, 1.2)
    assert abs(c.T - 1.0) < 1e-12
    assert abs(c.Tbar - 1.0) < 1e-12
    assert abs(c.R) < 1e-12 and abs(c.Rbar) < 1e-12
    assert abs(c.L) < 1e-12 and abs(c.Lbar) < 1e-12


def test_batch_matches_scalar(field_two_simple):
    zetas = [0.6, 1.4]
    batch = scattering_coefficients(field_two_simple, zetas)
    for z, c in zip(zetas, batch):
        single = scattering_coefficients(field_two_simple, z)
        assert abs(c.T - single.T) < 1e-9
        assert abs(c.R - single.R) < 1e-9


def test_two_simple_coefficients_match_engine(two_simple, field_two_simple):
    model = two_simple[2]
    for c in scattering_coefficients(field_two_simple, [0.5, 1.3]):
        t_ref, tbar_ref = transmissions(model, c.zeta)
        assert abs(c.T - t_ref) < 1e-7
        assert abs(c.Tbar - tbar_ref) < 1e-7
        # reflectionless data: both reflection coefficients vanish
        assert abs(c.R) < 1e-7 and abs(c.Rbar) < 1e-7
        assert c.unitarity_defect < 1e-7


def test_wronskian_helper():
    f = np.array([1.0 + 1j, 2.0])
    g = np.array([0.5, -1j])
    assert abs(wronskian(f, g) - ((1 + 1j) * (-1j) - 2.0 * 0.5)) < 1e-15
    stacked = wronskian(np.stack([f, f]), np.stack([g, 2 * g]))
    assert stacked.shape == (2,)
    assert abs(stacked[1] - 2 * stacked[0]) < 1e-15


def test_integrate_jost_validation(field_two_simple):
    with pytest.raises(ValueError):
        integrate_jost(field_two_simple, 1.0, [0.0], kind="nope")
    with pytest.raises(ValueError):
        integrate_jost(field_two_simple, 1.0, [1.0, 0.0])


def test_jost_matches_engine(two_simple, field_two_simple):
    from edscatter.reflectionless import jost

    model = two_simple[2]
    for zeta in (0.8, 1.5):
        vals = integrate_jost(field_two_simple, zeta, [-0.5, 0.7], kind="psi")
        for x, got in zip((-0.5, 0.7), vals):
            psi_ref, _ = jost(model, zeta, x)
            assert np.max(np.abs(got - psi_ref)) < 1e-7


def test_wronskian_constant_along_x(smooth_field):
    xs = np.linspace(smooth_field.x_min + 0.5, smooth_field.x_max - 0.5, 7)
    for zeta in (0.7, 1.6):
        phi = integrate_jost(smooth_field, zeta, xs, kind="phi")
        psi = integrate_jost(smooth_field, zeta, xs, kind="psi")
        w = wronskian(phi, psi)
        assert np.max(np.abs(w - w[0])) < 1e-8 * max(1.0, float(np.max(np.abs(w))))


@settings(max_examples=6, deadline=None)
@given(seed=st.integers(min_value=0, max_value=2 ** 16))
def test_unitarity_on_random_fields(smooth_field_factory, seed):
    field = smooth_field_factory(seed)
    for c in scattering_coefficients(field, [0.9, 1.4]):
        assert c.unitarity_defect < 1e-6


def test_locate_simple_bound_states(field_two_simple):
    plus = locate_bound_states(field_two_simple, side="plus")
    assert len(plus) == 1
    assert plus[0].multiplicity == 1
    assert abs(plus[0].lam - 1j) < 1e-3
    minus = locate_bound_states(field_two_simple, side="minus")
    assert len(minus) == 1
    assert abs(minus[0].lam - (-2j)) < 1e-3


def test_locate_double_pole(pair_jordan2):
    field = to_field(pair_jordan2[2])
    plus = locate_bound_states(field, side="plus")
    assert len(plus) == 1
    assert plus[0].multiplicity == 2
    assert abs(plus[0].lam - 1j) < 2e-3


def test_field_invariants_match_engine(two_simple, field_two_simple):
    model = two_simple[2]
    E_ref, mu_ref = E_and_mu(model)
    inv = field_invariants(field_two_simple)
    assert abs(inv.mu - mu_ref) < 1e-6
    for x in (-1.0, 0.3, 2.0):
        assert abs(inv.E(x) - E_ref(x)) < 1e-6
