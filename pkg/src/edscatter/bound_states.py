"""Bound-state data: norming constants, matrix triplets and their validation.

A bound state is a pole of a transmission coefficient, at ``lambda_j`` in the
upper half plane ("plus" side, poles of T) or in the lower half plane
("minus" side, poles of Tbar), with a multiplicity and one norming constant
per multiplicity order.  The whole collection for one side packs into a
matrix triplet (A, B, C): A block-diagonal with one Jordan block per pole,
B the stacked (0, ..., 0, 1) columns, C the norming constants in descending
order per block.  Triplets in that special form are unique up to block
permutation, so a canonical block order (sorted by real part, then imaginary
part of the pole) makes assembly reproducible.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    MergeError,
    PlacementError,
    UnsupportedMultiplicityError,
)
from .linalg import _jordan_blocks, as_cmatrix, require_square

SIDES = ("plus", "minus")


def principal_sqrt(lam: complex) -> complex:
    """Principal square root: upper-half-plane lambda lands in the first
    quadrant, lower-half-plane lambda in the fourth."""
    return complex(cmath.sqrt(complex(lam)))


def _check_side(side: str) -> str:
    if side not in SIDES:
        raise ValueError(f"side must be one of {SIDES}, got {side!r}")
    return side


# =============================================================================
# Domain types
# =============================================================================

@dataclass(frozen=True)
class BoundStateSpec:
    """One bound-state pole with its norming constants.

    ``norming`` lists c_0, ..., c_{m-1} in ascending order; its length must
    equal ``multiplicity``.
    """

    lam: complex
    multiplicity: int
    norming: tuple[complex, ...]
    side: str = "plus"

    def __post_init__(self):
        _check_side(self.side)
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "norming", tuple(complex(c) for c in self.norming))
        if self.multiplicity < 1:
            raise ValueError(f"multiplicity must be positive, got {self.multiplicity}")
        if len(self.norming) != self.multiplicity:
            raise DimensionError(
                f"need {self.multiplicity} norming constants, got {len(self.norming)}"
            )
        im = self.lam.imag
        if self.side == "plus" and im <= 0:
            raise PlacementError(f"plus-side pole must lie in the upper half plane, got {self.lam}")
        if self.side == "minus" and im >= 0:
            raise PlacementError(f"minus-side pole must lie in the lower half plane, got {self.lam}")

    @property
    def zeta(self) -> complex:
        return principal_sqrt(self.lam)


@dataclass(frozen=True)
class SpectralResidueData:
    """Laurent residues and dependency constants at one bound-state pole.

    ``zeta`` is the principal square root of the pole location.  ``residues``
    holds t_1, ..., t_m from the transmission-coefficient expansion and
    ``dependency`` holds gamma_0, ..., gamma_{m-1} linking the two Jost
    solutions and their lambda derivatives at the pole.
    """

    zeta: complex
    residues: tuple[complex, ...]
    dependency: tuple[complex, ...]

    def __post_init__(self):
        object.__setattr__(self, "zeta", complex(self.zeta))
        object.__setattr__(self, "residues", tuple(complex(t) for t in self.residues))
        object.__setattr__(self, "dependency", tuple(complex(g) for g in self.dependency))
        if len(self.residues) != len(self.dependency):
            raise DimensionError(
                f"residue count {len(self.residues)} != dependency-constant count "
                f"{len(self.dependency)}"
            )
        if not self.residues:
            raise DimensionError("need at least one residue")

    @property
    def lam(self) -> complex:
        return self.zeta**2

    @property
    def multiplicity(self) -> int:
        return len(self.residues)


@dataclass(frozen=True, eq=False)
class MatrixTriplet:
    """Triplet (A, B, C): N x N matrix, N x 1 column, 1 x N row."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        a = require_square(as_cmatrix(self.A, "A"), "A")
        b = as_cmatrix(self.B, "B")
        c = as_cmatrix(self.C, "C")
        n = a.shape[0]
        if b.shape != (n, 1):
            raise DimensionError(f"B must be {n}x1, got {b.shape}")
        if c.shape != (1, n):
            raise DimensionError(f"C must be 1x{n}, got {c.shape}")
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "B", b)
        object.__setattr__(self, "C", c)

    @classmethod
    def empty(cls) -> "MatrixTriplet":
        z = np.zeros((0, 0), dtype=np.complex128)
        return cls(z, z.reshape(0, 1), z.reshape(1, 0))

    @property
    def size(self) -> int:
        return self.A.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.size == 0

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvals(self.A) if self.size else np.zeros(0, dtype=np.complex128)


# =============================================================================
# Norming constants from residues and dependency constants
# =============================================================================

def norming_constants(data: SpectralResidueData, side: str = "plus") -> list[complex]:
    """Build the norming constants c_0, ..., c_{m-1} at one pole.

    Explicit formulas exist for multiplicities one to three.  The minus side
    uses the same formulas after negating every residue (the sign map that
    turns the plus-side construction into the minus-side one); the caller
    supplies the minus-side zeta (fourth quadrant) and the barred residues
    and dependency constants directly.

    Raises
    ------
    UnsupportedMultiplicityError
        For multiplicity four or higher; supply norming constants directly in
        a ``BoundStateSpec`` instead.
    PlacementError
        If zeta**2 does not lie in the half plane matching ``side``.
    """
    _check_side(side)
    m = data.multiplicity
    if m > 3:
        raise UnsupportedMultiplicityError(
            f"explicit norming-constant formulas stop at multiplicity 3, got {m}"
        )
    zeta = data.zeta
    lam = data.lam
    if side == "plus" and lam.imag <= 0:
        raise PlacementError(f"plus-side data must have lambda in the upper half plane, got {lam}")
    if side == "minus" and lam.imag >= 0:
        raise PlacementError(f"minus-side data must have lambda in the lower half plane, got {lam}")
    sign = 1.0 if side == "plus" else -1.0
    t = [sign * tk for tk in data.residues]  # t_1..t_m with the minus-side sign map applied
    g = list(data.dependency)  # gamma_0..gamma_{m-1}

    if m == 1:
        return [-1j * t[0] * g[0] / zeta]
    if m == 2:
        c1 = -1j * t[1] * g[0] / zeta
        c0 = -1j * t[0] * g[0] / zeta - (1j * t[1] / zeta) * (g[1] - g[0] / (2 * lam))
        return [c0, c1]
    c2 = -1j * t[2] * g[0] / zeta
    c1 = -1j * t[1] * g[0] / zeta - (1j * t[2] / zeta) * (g[1] - g[0] / (2 * lam))
    c0 = (
        -1j * t[0] * g[0] / zeta
        - (1j * t[1] / zeta) * (g[1] - g[0] / (2 * lam))
        - (1j * t[2] / (2 * zeta)) * (g[2] - g[1] / lam + 3 * g[0] / (4 * lam**2))
    )
    return [c0, c1, c2]


# =============================================================================
# Triplet assembly and disassembly
# =============================================================================

def assemble_triplet(states: list[BoundStateSpec], side: str = "plus") -> MatrixTriplet:
    """Stack bound-state specs into the special-form triplet (A, B, C).

    Blocks are sorted by (Re lam, Im lam) so the result is independent of the
    input order.  Every spec must carry the requested side, and poles must be
    pairwise distinct (one spec per pole).
    """
    _check_side(side)
    for s in states:
        if s.side != side:
            raise PlacementError(f"state at {s.lam} has side {s.side!r}, expected {side!r}")
    lams = [s.lam for s in states]
    if len(set(lams)) != len(lams):
        raise MergeError("duplicate poles; merge bound states at the same lambda first")
    ordered = sorted(states, key=lambda s: (s.lam.real, s.lam.imag))
    total = sum(s.multiplicity for s in ordered)
    a = np.zeros((total, total), dtype=np.complex128)
    b = np.zeros((total, 1), dtype=np.complex128)
    c = np.zeros((1, total), dtype=np.complex128)
    pos = 0
    for s in ordered:
        m = s.multiplicity
        blk = slice(pos, pos + m)
        a[blk, blk] = s.lam * np.eye(m) + np.eye(m, k=1)
        b[pos + m - 1, 0] = 1.0
        c[0, blk] = list(reversed(s.norming))  # c_{m-1}, ..., c_0
        pos += m
    return MatrixTriplet(a, b, c)


def triplet_to_states(triplet: MatrixTriplet, side: str = "plus") -> list[BoundStateSpec]:
    """Read (lambda, multiplicity, norming constants) back off a special-form
    triplet.  Inverse of ``assemble_triplet`` up to block order."""
    _check_side(side)
    blocks = _jordan_blocks(triplet.A)
    if blocks is None:
        raise DimensionError("triplet A is not in Jordan canonical form")
    states = []
    for start, stop in blocks:
        m = stop - start
        expected_b = np.zeros(m)
        expected_b[-1] = 1.0
        if not np.array_equal(triplet.B[start:stop, 0], expected_b):
            raise DimensionError("triplet B does not follow the (0, ..., 0, 1) block pattern")
        norming = tuple(reversed(triplet.C[0, start:stop].tolist()))
        states.append(
            BoundStateSpec(
                lam=complex(triplet.A[start, start]),
                multiplicity=m,
                norming=norming,
                side=side,
            )
        )
    return sorted(states, key=lambda s: (s.lam.real, s.lam.imag))


# =============================================================================
# Pair validation
# =============================================================================

@dataclass(frozen=True)
class PairDiagnostics:
    """Outcome of validating a (plus, minus) triplet pair."""

    size_plus: int
    size_minus: int
    plus_spectrum_ok: bool
    minus_spectrum_ok: bool
    plus_special_form: bool
    minus_special_form: bool
    equal_sizes: bool
    warnings: tuple[str, ...] = field(default_factory=tuple)

    @property
    def ok(self) -> bool:
        return self.plus_spectrum_ok and self.minus_spectrum_ok


def _special_form_ok(triplet: MatrixTriplet) -> bool:
    blocks = _jordan_blocks(triplet.A)
    if blocks is None:
        return False
    pos_eigs = [triplet.A[s, s] for s, _ in blocks]
    if len(set(pos_eigs)) != len(pos_eigs):
        return False
    for start, stop in blocks:
        col = triplet.B[start:stop, 0]
        expected = np.zeros(stop - start)
        expected[-1] = 1.0
        if not np.array_equal(col, expected):
            return False
    return True


def validate_pair(
    plus: MatrixTriplet,
    minus: MatrixTriplet,
    require_equal_sizes: bool = True,
) -> PairDiagnostics:
    """Diagnose a triplet pair: spectral placement, special-form conformance
    and the equal-size constraint.

    Unequal sizes are legal input for the solver, but then the two potentials
    cannot both decay at both ends, so with ``require_equal_sizes`` a warning
    is attached rather than an error raised.
    """
    warnings: list[str] = []
    plus_spec = bool(np.all(plus.eigenvalues().imag > 0)) if plus.size else True
    minus_spec = bool(np.all(minus.eigenvalues().imag < 0)) if minus.size else True
    if not plus_spec:
        warnings.append("plus triplet has eigenvalues outside the upper half plane")
    if not minus_spec:
        warnings.append("minus triplet has eigenvalues outside the lower half plane")
    plus_form = _special_form_ok(plus)
    minus_form = _special_form_ok(minus)
    if not plus_form:
        warnings.append("plus triplet is not in the canonical Jordan special form")
    if not minus_form:
        warnings.append("minus triplet is not in the canonical Jordan special form")
    equal = plus.size == minus.size
    if require_equal_sizes and not equal:
        warnings.append(
            f"triplet sizes differ ({plus.size} vs {minus.size}): the reconstructed "
            "potentials cannot both be Schwartz class; one of them grows at an end"
        )
    return PairDiagnostics(
        size_plus=plus.size,
        size_minus=minus.size,
        plus_spectrum_ok=plus_spec,
        minus_spectrum_ok=minus_spec,
        plus_special_form=plus_form,
        minus_special_form=minus_form,
        equal_sizes=equal,
        warnings=tuple(warnings),
    )
