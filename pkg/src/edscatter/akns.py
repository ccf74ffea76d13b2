"""Changes of variables linking the energy-dependent system to its two
associated AKNS systems.

The energy-dependent system with potentials (q, r) maps onto a standard AKNS
system in two ways, called flavors here:

    uv:  u = q E^-2,                        v = (-(i/2) r' + (1/4) q r^2) E^2
    ps:  p = ((i/2) q' + (1/4) q^2 r) E^-2, s = r E^2

with E(x) the accumulated normalization exponential.  Jost solutions and
scattering coefficients of the two pictures are related by explicit
triangular 2x2 factors and by a dictionary carrying powers of sqrt(lambda)
and e^{i mu/2}.

Note that u*v equals sigma = -(i/2) q r' + (1/4) q^2 r^2 identically, while
p*s differs from sigma by the exact derivative (i/2)(q r)'; only the
integrals of the two products agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .direct import (SWEEP_ATOL, SWEEP_RTOL, _KINDS, _jost_pair_general,
                     _six_from_hatted, FieldInvariants, ScatteringCoefficients,
                     field_invariants)
from .errors import BranchPointError
from .fields import PotentialField

_FLAVORS = ("uv", "ps")


@dataclass(frozen=True, eq=False)
class AknsField:
    """One AKNS potential pair derived from an energy-dependent field."""

    flavor: str
    first: object
    second: object
    E: object
    mu: complex
    x_min: float
    x_max: float


@dataclass(frozen=True)
class JostEvaluation:
    """The four Jost solutions of one picture at a single (zeta, x)."""

    zeta: complex
    x: float
    psi: tuple[complex, complex]
    psibar: tuple[complex, complex]
    phi: tuple[complex, complex]
    phibar: tuple[complex, complex]


@dataclass(frozen=True)
class AknsScattering:
    """Scattering coefficients of one AKNS flavor at a single lambda."""

    flavor: str
    lam: complex
    T: complex
    Tbar: complex
    R: complex
    Rbar: complex
    L: complex
    Lbar: complex


def _check_flavor(flavor: str) -> None:
    if flavor not in _FLAVORS:
        raise ValueError(f"flavor must be one of {_FLAVORS}")


def to_akns(field: PotentialField, flavor: str = "uv",
            invariants: FieldInvariants | None = None,
            step: float = 0.005) -> AknsField:
    """Transform an energy-dependent field into one of its AKNS pictures."""
    _check_flavor(flavor)
    if invariants is None:
        invariants = field_invariants(field, step=step)
    E = invariants.E
    if flavor == "uv":
        def first(x):
            return field.q_at(x) * E(x) ** -2

        def second(x):
            return (-0.5j * field.dr_at(x)
                    + 0.25 * field.q_at(x) * field.r_at(x) ** 2) * E(x) ** 2
    else:
        def first(x):
            return (0.5j * field.dq_at(x)
                    + 0.25 * field.q_at(x) ** 2 * field.r_at(x)) * E(x) ** -2

        def second(x):
            return field.r_at(x) * E(x) ** 2

    return AknsField(flavor=flavor, first=first, second=second, E=E,
                     mu=invariants.mu, x_min=field.x_min, x_max=field.x_max)


def _jost_factor(kind: str, flavor: str, zeta: complex, E: complex, mu: complex,
                 pot: complex) -> tuple[complex, np.ndarray]:
    """Prefactor and 2x2 matrix M with (energy-dep) = pref * M * (AKNS)."""
    lam = zeta ** 2
    if lam == 0:
        raise BranchPointError("Jost map is singular at lambda = 0")
    phase = np.exp(0.5j * mu)
    if flavor == "uv":
        narrow = np.array([[zeta * E, 0.0], [0.5j * pot * E, 1.0 / E]])
        wide = np.array([[E, 0.0], [0.5j * pot * E / zeta, 1.0 / (zeta * E)]])
        table = {"psi": (phase, narrow), "psibar": (1.0 / phase, wide),
                 "phi": (1.0, wide), "phibar": (1.0, narrow)}
    else:
        narrow = np.array([[E / zeta, -0.5j * pot / (zeta * E)], [0.0, 1.0 / E]])
        wide = np.array([[E, -0.5j * pot / E], [0.0, zeta / E]])
        table = {"psi": (phase, narrow), "psibar": (1.0 / phase, wide),
                 "phi": (1.0, wide), "phibar": (1.0, narrow)}
    return table[kind]


def map_jost(jost: JostEvaluation, field: PotentialField, flavor: str = "uv",
             direction: str = "to_akns",
             invariants: FieldInvariants | None = None) -> JostEvaluation:
    """Convert a Jost evaluation between the two pictures.

    ``direction`` 'to_akns' consumes energy-dependent Jost values and returns
    AKNS ones for the chosen flavor; 'from_akns' goes back.
    """
    _check_flavor(flavor)
    if direction not in ("to_akns", "from_akns"):
        raise ValueError("direction must be 'to_akns' or 'from_akns'")
    if invariants is None:
        invariants = field_invariants(field)
    E = complex(invariants.E(jost.x))
    pot = complex(field.r_at(jost.x) if flavor == "uv" else field.q_at(jost.x))
    out = {}
    for kind in _KINDS:
        pref, mat = _jost_factor(kind, flavor, jost.zeta, E, invariants.mu, pot)
        vec = np.asarray(getattr(jost, kind), dtype=np.complex128)
        if direction == "from_akns":
            res = pref * (mat @ vec)
        else:
            res = np.linalg.solve(mat, vec) / pref
        out[kind] = (complex(res[0]), complex(res[1]))
    return JostEvaluation(zeta=jost.zeta, x=jost.x, **out)


def map_scattering(coeffs, mu: complex, flavor: str = "uv",
                   direction: str = "to_akns"):
    """Convert a full coefficient set between the two pictures.

    'to_akns' takes a :class:`~edscatter.direct.ScatteringCoefficients` and
    returns an :class:`AknsScattering`; 'from_akns' inverts that.  The
    sqrt(lambda) entering the dictionary is the zeta of the energy-dependent
    picture itself.
    """
    _check_flavor(flavor)
    phase = np.exp(0.5j * mu)
    if direction == "to_akns":
        zeta = coeffs.zeta
        if zeta == 0:
            raise BranchPointError("coefficient dictionary is singular at lambda = 0")
        T = phase * coeffs.T
        Tbar = coeffs.Tbar / phase
        if flavor == "uv":
            R = zeta * phase ** 2 * coeffs.R
            Rbar = coeffs.Rbar / (zeta * phase ** 2)
            L = coeffs.L / zeta
            Lbar = zeta * coeffs.Lbar
        else:
            R = phase ** 2 * coeffs.R / zeta
            Rbar = zeta * coeffs.Rbar / phase ** 2
            L = zeta * coeffs.L
            Lbar = coeffs.Lbar / zeta
        return AknsScattering(flavor=flavor, lam=zeta ** 2, T=complex(T),
                              Tbar=complex(Tbar), R=complex(R), Rbar=complex(Rbar),
                              L=complex(L), Lbar=complex(Lbar))
    if direction == "from_akns":
        if coeffs.flavor != flavor:
            raise ValueError(f"coefficient set has flavor {coeffs.flavor!r}, expected {flavor!r}")
        from .bound_states import principal_sqrt
        zeta = principal_sqrt(coeffs.lam)
        if zeta == 0:
            raise BranchPointError("coefficient dictionary is singular at lambda = 0")
        T = coeffs.T / phase
        Tbar = phase * coeffs.Tbar
        if flavor == "uv":
            R = coeffs.R / (zeta * phase ** 2)
            Rbar = zeta * phase ** 2 * coeffs.Rbar
            L = zeta * coeffs.L
            Lbar = coeffs.Lbar / zeta
        else:
            R = zeta * coeffs.R / phase ** 2
            Rbar = phase ** 2 * coeffs.Rbar / zeta
            L = coeffs.L / zeta
            Lbar = zeta * coeffs.Lbar
        return ScatteringCoefficients(zeta=complex(zeta), T=complex(T),
                                      Tbar=complex(Tbar), R=complex(R),
                                      Rbar=complex(Rbar), L=complex(L),
                                      Lbar=complex(Lbar))
    raise ValueError("direction must be 'to_akns' or 'from_akns'")


def akns_coefficients(akns: AknsField, lam, x_mid: float | None = None,
                      rtol: float = SWEEP_RTOL, atol: float = SWEEP_ATOL):
    """AKNS scattering coefficients by direct integration of the AKNS system.

    Works at lam = 0 as well, which is what pins down e^{i mu/2} from
    transmission data alone.
    """
    scalar = np.ndim(lam) == 0
    lams = np.atleast_1d(np.asarray(lam, dtype=np.complex128))
    mults = np.ones_like(lams)
    if x_mid is None:
        x_mid = 0.5 * (akns.x_min + akns.x_max)
    hat = _jost_pair_general(akns.first, akns.second, akns.x_min, akns.x_max,
                             lams, mults, float(x_mid), _KINDS, rtol, atol)
    T, Tbar, R, Rbar, L, Lbar = _six_from_hatted(hat)
    out = [AknsScattering(
        flavor=akns.flavor, lam=complex(lams[k]), T=complex(T[k]),
        Tbar=complex(Tbar[k]), R=complex(R[k]), Rbar=complex(Rbar[k]),
        L=complex(L[k]), Lbar=complex(Lbar[k])) for k in range(lams.size)]
    return out[0] if scalar else out
