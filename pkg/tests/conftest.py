import numpy as np
import pytest

from edscatter.bound_states import MatrixTriplet
from edscatter.fields import PotentialField, bump
from edscatter.reflectionless import build_model


def _triplet(a, b, c):
    return MatrixTriplet(np.array(a, dtype=np.complex128),
                         np.array(b, dtype=np.complex128).reshape(-1, 1),
                         np.array(c, dtype=np.complex128).reshape(1, -1))


@pytest.fixture(scope="session")
def two_simple():
    """One simple pole on each side."""
    plus = _triplet([[1j]], [1.0], [2.0])
    minus = _triplet([[-2j]], [1.0], [3.0])
    return plus, minus, build_model(plus, minus)


@pytest.fixture(scope="session")
def six_simple():
    """Three simple poles per side, mirrored."""
    plus = _triplet(np.diag([1j, 2j, 3j]), [1, 1, 1], [1, 1, 1])
    minus = _triplet(np.diag([-1j, -2j, -3j]), [1, 1, 1], [1, 1, 1])
    return plus, minus, build_model(plus, minus)


@pytest.fixture(scope="session")
def pair_jordan2():
    """A double pole on each side (2x2 Jordan blocks)."""
    plus = _triplet([[1j, 1.0], [0.0, 1j]], [0.0, 1.0], [3.0, 2.0])
    minus = _triplet([[-1j, 1.0], [0.0, -1j]], [0.0, 1.0], [2.0, 3.0])
    return plus, minus, build_model(plus, minus)


@pytest.fixture(scope="session")
def mixed_pair():
    """Jordan block on the plus side, two simple poles on the minus side."""
    plus = _triplet([[1j, 1.0], [0.0, 1j]], [0.0, 1.0], [3.0, 2.0])
    minus = _triplet(np.diag([-1j, -2j]), [1.0, 1.0], [1.0, 4.0])
    return plus, minus, build_model(plus, minus)


@pytest.fixture(scope="session")
def unequal_pair():
    """Size-(3, 2) Jordan pair; r grows to the left by construction."""
    plus = _triplet([[1j, 1, 0], [0, 1j, 1], [0, 0, 1j]], [0, 0, 1], [1, 1, 1])
    minus = _triplet([[-1j, 1], [0, -1j]], [0, 1], [1, 1])
    return plus, minus


def make_smooth_field(seed: int, x_min=-6.0, x_max=6.0):
    """Random smooth compactly supported (q, r) built from a few bumps."""
    rng = np.random.default_rng(seed)
    terms = []
    for _ in range(3):
        center = rng.uniform(-2.0, 2.0, size=2)
        width = rng.uniform(0.8, 1.8, size=2)
        amp = rng.uniform(0.2, 0.9, size=2) * np.exp(2j * np.pi * rng.uniform(size=2))
        terms.append((center, width, amp))

    def q_at(x):
        return sum(a[0] * bump((np.asarray(x) - c[0]) / w[0]) for c, w, a in terms)

    def r_at(x):
        return sum(a[1] * bump((np.asarray(x) - c[1]) / w[1]) for c, w, a in terms)

    return PotentialField.from_callables(q_at, r_at, x_min=x_min, x_max=x_max)


@pytest.fixture(scope="session")
def smooth_field():
    return make_smooth_field(7)


@pytest.fixture(scope="session")
def smooth_field_factory():
    return make_smooth_field
