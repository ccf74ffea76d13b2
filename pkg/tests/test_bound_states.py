import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edscatter.bound_states import (BoundStateSpec, MatrixTriplet,
                                    SpectralResidueData, assemble_triplet,
                                    norming_constants, principal_sqrt,
                                    triplet_to_states, validate_pair)
from edscatter.errors import (DimensionError, MergeError, PlacementError,
                              UnsupportedMultiplicityError)


# ----------------------------------------------------------------- square root

def test_principal_sqrt_quadrants():
    # upper half plane -> first quadrant, lower -> fourth
    z = principal_sqrt(2.0 + 1.0j)
    assert z.real > 0 and z.imag > 0
    z = principal_sqrt(2.0 - 1.0j)
    assert z.real > 0 and z.imag < 0
    assert abs(principal_sqrt(1j) ** 2 - 1j) < 1e-15
    assert abs(principal_sqrt(-2j) ** 2 + 2j) < 1e-15


@settings(max_examples=60, deadline=None)
@given(st.floats(-4, 4), st.floats(-4, 4))
def test_principal_sqrt_squares_back(re, im):
    lam = complex(re, im)
    z = principal_sqrt(lam)
    assert abs(z * z - lam) < 1e-12 * max(1.0, abs(lam))


# ------------------------------------------------------------ norming constants

def test_norming_simple_pole():
    # c_0 = -i t_1 gamma_0 / zeta
    zeta = principal_sqrt(1j)
    data = SpectralResidueData(zeta=zeta, residues=(0.5 + 0.2j,), dependency=(1.5,))
    (c0,) = norming_constants(data, "plus")
    assert abs(c0 - (-1j * (0.5 + 0.2j) * 1.5 / zeta)) < 1e-15


def test_norming_minus_side_negates_residues():
    zeta = principal_sqrt(-1j)
    data = SpectralResidueData(zeta=zeta, residues=(0.7,), dependency=(2.0,))
    (c0,) = norming_constants(data, "minus")
    assert abs(c0 - (-1j * (-0.7) * 2.0 / zeta)) < 1e-15


def test_norming_double_pole_reduces_to_simple_when_t2_zero():
    zeta = principal_sqrt(2j)
    double = SpectralResidueData(zeta=zeta, residues=(0.3, 0.0),
                                 dependency=(1.1, 0.4))
    simple = SpectralResidueData(zeta=zeta, residues=(0.3,), dependency=(1.1,))
    c = norming_constants(double, "plus")
    assert abs(c[1]) == 0.0
    assert abs(c[0] - norming_constants(simple, "plus")[0]) < 1e-15


def test_norming_triple_pole_terms():
    zeta = principal_sqrt(1j)
    lam = zeta * zeta
    g = (1.0, 0.25, -0.5)
    t = (0.2, -0.1, 0.05)
    c = norming_constants(SpectralResidueData(zeta, t, g), "plus")
    c2 = -1j * t[2] * g[0] / zeta
    c1 = -1j * t[1] * g[0] / zeta - 1j * t[2] / zeta * (g[1] - g[0] / (2 * lam))
    c0 = (-1j * t[0] * g[0] / zeta
          - 1j * t[1] / zeta * (g[1] - g[0] / (2 * lam))
          - 1j * t[2] / (2 * zeta) * (g[2] - g[1] / lam + 0.75 * g[0] / lam ** 2))
    assert abs(c[2] - c2) < 1e-15
    assert abs(c[1] - c1) < 1e-15
    assert abs(c[0] - c0) < 1e-15


def test_norming_multiplicity_cap():
    zeta = principal_sqrt(1j)
    data = SpectralResidueData(zeta, (1, 1, 1, 1), (1, 1, 1, 1))
    with pytest.raises(UnsupportedMultiplicityError):
        norming_constants(data, "plus")


def test_norming_wrong_half_plane():
    data = SpectralResidueData(principal_sqrt(-1j), (1.0,), (1.0,))
    with pytest.raises(PlacementError):
        norming_constants(data, "plus")


# ------------------------------------------------------------- triplet assembly

def test_assemble_jordan_pair_shape():
    spec = BoundStateSpec(1j, 2, (2.0, 3.0), side="plus")
    t = assemble_triplet([spec])
    assert np.allclose(t.A, [[1j, 1.0], [0.0, 1j]])
    assert np.allclose(t.B.ravel(), [0.0, 1.0])
    assert np.allclose(t.C.ravel(), [3.0, 2.0])  # c_1, c_0


def test_assemble_sorts_blocks():
    s1 = BoundStateSpec(2j, 1, (5.0,), side="plus")
    s2 = BoundStateSpec(1j, 1, (4.0,), side="plus")
    t = assemble_triplet([s2, s1])
    assert np.allclose(np.diag(t.A), [1j, 2j])
    t2 = assemble_triplet([s1, s2])
    assert np.allclose(t.A, t2.A) and np.allclose(t.C, t2.C)


def test_assemble_rejects_duplicates():
    s = BoundStateSpec(1j, 1, (1.0,), side="plus")
    with pytest.raises(MergeError):
        assemble_triplet([s, s])


def test_assemble_side_mismatch():
    s = BoundStateSpec(-1j, 1, (1.0,), side="minus")
    with pytest.raises(PlacementError):
        assemble_triplet([s], side="plus")


def test_states_round_trip():
    specs = [BoundStateSpec(1j, 2, (2.0 + 1j, 3.0), side="plus"),
             BoundStateSpec(0.5 + 2j, 1, (-1.0,), side="plus")]
    t = assemble_triplet(specs)
    back = triplet_to_states(t)
    assert len(back) == 2
    assert back[0].lam == 1j and back[0].norming == (2.0 + 1j, 3.0)
    assert back[1].lam == 0.5 + 2j and back[1].multiplicity == 1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_assemble_round_trip_random(seed):
    rng = np.random.default_rng(seed)
    count = rng.integers(1, 4)
    lams = []
    specs = []
    for _ in range(count):
        lam = complex(rng.uniform(-2, 2), rng.uniform(0.3, 3))
        if any(abs(lam - v) < 1e-6 for v in lams):
            continue
        lams.append(lam)
        m = int(rng.integers(1, 4))
        norming = tuple(complex(rng.normal(), rng.normal()) for _ in range(m))
        specs.append(BoundStateSpec(lam, m, norming, side="plus"))
    t = assemble_triplet(specs)
    back = triplet_to_states(t)
    expected = sorted(specs, key=lambda s: (s.lam.real, s.lam.imag))
    assert [s.lam for s in back] == [s.lam for s in expected]
    assert [s.norming for s in back] == [s.norming for s in expected]


# ------------------------------------------------------------------ validation

def test_validate_pair_clean(two_simple):
    plus, minus, _ = two_simple
    diag = validate_pair(plus, minus)
    assert diag.ok and not diag.warnings
    assert diag.equal_sizes


def test_validate_pair_size_warning(unequal_pair):
    plus, minus = unequal_pair
    diag = validate_pair(plus, minus)
    assert diag.ok  # spectra are fine, only the sizes disagree
    assert not diag.equal_sizes
    assert any("sizes differ" in w for w in diag.warnings)


def test_validate_pair_bad_spectrum():
    plus = MatrixTriplet(np.array([[-1j]]), np.array([[1.0]]), np.array([[1.0]]))
    minus = MatrixTriplet.empty()
    diag = validate_pair(plus, minus)
    assert not diag.ok
    assert any("upper half" in w for w in diag.warnings)


def test_empty_triplet_properties():
    t = MatrixTriplet.empty()
    assert t.is_empty and t.size == 0
    assert t.eigenvalues().size == 0


def test_triplet_dimension_check():
    with pytest.raises(DimensionError):
        MatrixTriplet(np.eye(2, dtype=complex), np.ones((1, 1), dtype=complex),
                      np.ones((1, 2), dtype=complex))
