import numpy as np
import pytest

from edscatter.fields import PotentialField, bump, cspline


def test_bump_support():
    x = np.array([-2.0, -1.0, 0.0, 0.5, 1.0, 3.0])
    v = bump(x)
    assert v[0] == v[1] == v[4] == v[5] == 0.0
    assert v[2] == pytest.approx(np.exp(-1.0))
    assert 0 < v[3] < v[2]


def test_bump_shifted():
    assert bump(2.0, center=2.0, radius=0.5) == pytest.approx(np.exp(-1.0))
    assert bump(2.6, center=2.0, radius=0.5) == 0.0


def test_cspline_complex_round_trip():
    x = np.linspace(0, 3, 80)
    y = np.exp(1j * x) * x
    sp = cspline(x, y)
    xf = np.linspace(0.1, 2.9, 113)
    assert np.max(np.abs(sp(xf) - np.exp(1j * xf) * xf)) < 1e-9


def test_field_from_callables_evaluates():
    f = PotentialField.from_callables(
        lambda x: np.sin(np.asarray(x)) + 0j,
        lambda x: np.cos(np.asarray(x)) + 0j,
        x_min=-3.0, x_max=3.0)
    assert f.q_at(0.5) == pytest.approx(np.sin(0.5))
    assert f.r_at(np.array([0.0, 1.0]))[1] == pytest.approx(np.cos(1.0))


def test_derivative_fallback_accuracy():
    # no analytic derivative given: 6th-order differences of smooth data
    f = PotentialField.from_callables(
        lambda x: np.exp(1j * np.asarray(x, dtype=float)),
        lambda x: np.asarray(x, dtype=float) ** 3 + 0j,
        x_min=-3.0, x_max=3.0)
    assert abs(f.dq_at(0.7) - 1j * np.exp(0.7j)) < 1e-10
    assert abs(f.dr_at(-1.2) - 3 * 1.44) < 1e-9


def test_from_samples_matches_callable():
    x = np.linspace(-4, 4, 401)
    q = np.tanh(x) * np.exp(-x * x) + 0j
    r = np.exp(-x * x / 2) * 1j
    f = PotentialField.from_samples(x, q, r)
    xf = np.linspace(-3.5, 3.5, 77)
    assert np.max(np.abs(f.q_at(xf) - np.tanh(xf) * np.exp(-xf * xf))) < 1e-9
    assert np.max(np.abs(f.r_at(xf) - 1j * np.exp(-xf * xf / 2))) < 1e-9


def test_from_samples_needs_enough_points():
    x = np.linspace(0, 1, 4)
    with pytest.raises(ValueError):
        PotentialField.from_samples(x, x + 0j, x + 0j)


def test_zero_field():
    f = PotentialField.zero()
    assert f.q_at(0.3) == 0 and f.r_at(-2.0) == 0
    assert f.dq_at(1.0) == 0
