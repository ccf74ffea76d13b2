import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edscatter.errors import SingularMatrixError
from edscatter.linalg import mat_exp, mat_inverse, solve_sylvester


def _random_matrix(rng, n):
    return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))


def test_mat_exp_jordan_block_exact():
    # exp of a Jordan block has the e^{lam} t^k/k! superdiagonals
    lam = 0.3 - 1.2j
    a = lam * np.eye(3) + np.eye(3, k=1)
    t = 0.7
    e = mat_exp(a, t)
    f = np.exp(lam * t)
    expected = f * np.array([[1, t, t * t / 2], [0, 1, t], [0, 0, 1]])
    assert np.max(np.abs(e - expected)) < 1e-13


def test_mat_exp_identity_at_zero():
    a = np.array([[2.0, 1.0], [0.5, -1.0]], dtype=complex)
    assert np.max(np.abs(mat_exp(a, 0.0) - np.eye(2))) == 0.0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 4))
def test_mat_exp_semigroup(seed, n):
    rng = np.random.default_rng(seed)
    a = _random_matrix(rng, n)
    s, t = rng.uniform(-0.8, 0.8, size=2)
    lhs = mat_exp(a, s + t)
    rhs = mat_exp(a, s) @ mat_exp(a, t)
    assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(lhs)))


def test_mat_inverse_singular_raises():
    a = np.array([[1.0, 2.0], [2.0, 4.0]], dtype=complex)
    with pytest.raises(SingularMatrixError):
        mat_inverse(a)


def test_mat_inverse_condition_attached():
    a = np.array([[1.0, 0.0], [0.0, 1e-6]], dtype=complex)
    inv, cond = mat_inverse(a)
    assert np.max(np.abs(inv @ a - np.eye(2))) < 1e-9
    assert 1e5 < cond < 1e7


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_sylvester_residual(seed, n, m):
    # i M Abar - i A M = B Cbar with spectra split by construction
    rng = np.random.default_rng(seed)
    a = _random_matrix(rng, n) + 2j * np.eye(n)
    abar = _random_matrix(rng, m) - 2j * np.eye(m)
    b = rng.normal(size=(n, 1)) + 1j * rng.normal(size=(n, 1))
    cbar = rng.normal(size=(1, m)) + 1j * rng.normal(size=(1, m))
    p = solve_sylvester(a, abar, b, cbar)
    res = 1j * p @ abar - 1j * a @ p - b @ cbar
    scale = max(1.0, np.max(np.abs(p)))
    assert np.max(np.abs(res)) < 1e-12 * scale
