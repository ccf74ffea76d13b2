"""Closed-form machinery for reflectionless scattering data.

Given a triplet pair (A, B, C) and (Abar, Bbar, Cbar) encoding the bound
states of the two transmission coefficients, every quantity of interest has a
separable closed form built from matrix exponentials:

* Gram matrices ``M``, ``Mbar`` from small Sylvester solves,
* the dressing matrices ``Gamma(x)``, ``Gammabar(x)`` and the four Marchenko
  kernels,
* the diagonal g-functions whose tail integral ``G(x)`` carries the phase
  accumulated by the potentials,
* the potentials (q, r), the auxiliary pair (E(x), mu), the Jost solutions
  psi, psibar, and the transmission coefficients.

Everything, including the dressing tail ``G(x)`` (a log-determinant ratio),
is finite linear algebra with no quadrature anywhere, which is what makes
this module a trustworthy oracle for the generic Marchenko solver.

Far to the left of the support the dressing matrices have exponentially large
entries and the two g-functions cancel almost exactly, so double precision
runs out of digits there.  Evaluations in that zone transparently switch to
arbitrary-precision arithmetic (mpmath) for the handful of points that need
it; the transmission coefficients and mu avoid the issue entirely through an
exact determinant identity.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field

import mpmath as mp
import numpy as np

from .bound_states import MatrixTriplet, validate_pair
from .errors import PlacementError, SingularMatrixError, SpectralCollisionError
from .fields import PotentialField
from .linalg import mat_exp, solve_sylvester

logger = logging.getLogger(__name__)

#: Magnitude below which the g-function tail is treated as numerically zero.
TAIL_EPS = 1e-17
#: Dressing-matrix entry size beyond which double precision is distrusted.
RISK_THRESHOLD = 1e8


# =============================================================================
# Model
# =============================================================================

@dataclass(frozen=True, eq=False)
class ReflectionlessModel:
    """Triplet pair with precomputed Gram matrices and decay metadata."""

    plus: MatrixTriplet
    minus: MatrixTriplet
    M: np.ndarray
    Mbar: np.ndarray
    #: slowest decay rate of exp(iAx) factors (min Im of plus eigenvalues)
    decay_plus: float = field(default=math.inf)
    #: slowest decay rate of exp(-i Abar x) factors (min -Im of minus eigenvalues)
    decay_minus: float = field(default=math.inf)
    #: [x_lo, x_hi] outside of which g1 - g2 is negligible or unresolvable
    support: tuple[float, float] = (0.0, 0.0)

    @property
    def is_empty(self) -> bool:
        return self.plus.is_empty and self.minus.is_empty

    @property
    def rate(self) -> float:
        """Asymptotic decay rate of g1 - g2 (and of q*r) toward x -> +inf."""
        return 2.0 * (self.decay_plus + self.decay_minus)

    @property
    def growth_rate(self) -> float:
        """Fastest entry growth rate of the dressing matrices toward -inf."""
        a = float(np.max(self.plus.eigenvalues().imag)) if self.plus.size else 0.0
        b = float(np.max(-self.minus.eigenvalues().imag)) if self.minus.size else 0.0
        return 2.0 * (a + b)


def build_model(plus: MatrixTriplet, minus: MatrixTriplet) -> ReflectionlessModel:
    """Assemble the model: validate placement, solve for M and Mbar, and scan
    for the window outside of which the g-functions are negligible."""
    diag = validate_pair(plus, minus, require_equal_sizes=False)
    if not diag.ok:
        raise PlacementError("; ".join(diag.warnings) or "invalid spectral placement")
    m = solve_sylvester(plus.A, minus.A, plus.B, minus.C)
    # the barred Gram matrix solves the mirrored equation; negating both
    # coefficient matrices maps it onto the same solver
    mbar = solve_sylvester(-minus.A, -plus.A, minus.B, plus.C)
    a = float(np.min(plus.eigenvalues().imag)) if plus.size else math.inf
    b = float(np.min(-minus.eigenvalues().imag)) if minus.size else math.inf
    model = ReflectionlessModel(plus, minus, m, mbar, a, b)
    object.__setattr__(model, "support", _scan_support(model))
    return model


def _scan_support(model: ReflectionlessModel) -> tuple[float, float]:
    """Find a finite window carrying all resolvable mass of g1 - g2.

    Marches outward in unit steps.  A side stops when the value drops below
    TAIL_EPS (true decay), turns back up by an order of magnitude (noise or
    growth has taken over), stops being finite, or hits a hard cap keeping
    the matrix entries representable.
    """
    if model.is_empty:
        return (0.0, 0.0)
    cap = min(200.0, 550.0 / max(model.growth_rate, 1e-3))

    def march(direction: float) -> float:
        x = 0.0
        best = math.inf
        best_x = 0.0
        while abs(x) < cap:
            d = _g_diff_double(model, x)
            mag = abs(d)
            if not math.isfinite(mag):
                return x - direction
            if mag < TAIL_EPS:
                return x
            if mag < best:
                best, best_x = mag, x
            elif mag > 10.0 * best:
                return best_x
            x += direction
        return x

    return (march(-1.0) - 1.0, march(+1.0) + 1.0)


# =============================================================================
# Dressing matrices (double precision core)
# =============================================================================

@dataclass(frozen=True, eq=False)
class GammaPair:
    x: float
    Gamma: np.ndarray
    GammaBar: np.ndarray
    cond_gamma: float
    cond_gammabar: float


@dataclass(frozen=True)
class KernelQuadruple:
    K1: complex
    K2: complex
    K1bar: complex
    K2bar: complex


def _cond(a: np.ndarray) -> float:
    if a.shape[0] == 0:
        return 1.0
    try:
        return float(np.linalg.cond(a, 2))
    except np.linalg.LinAlgError:  # pragma: no cover
        return math.inf


class _Core:
    """All x-dependent matrix factors at one point, computed once."""

    __slots__ = ("x", "n", "nbar", "Ep", "Em", "Gamma", "GammaBar", "Gi", "Gbi",
                 "max_entry")

    def __init__(self, model: ReflectionlessModel, x: float):
        A, Abar = model.plus.A, model.minus.A
        self.x = x
        self.n, self.nbar = model.plus.size, model.minus.size
        with np.errstate(over="ignore", invalid="ignore"):
            self.Ep = mat_exp(A, 1j * x)          # exp(i A x)
            self.Em = mat_exp(Abar, -1j * x)      # exp(-i Abar x)
            Ep2 = self.Ep @ self.Ep               # exp(2 i A x)
            Em2 = self.Em @ self.Em               # exp(-2 i Abar x)
            self.Gamma = np.eye(self.n, dtype=np.complex128) - self.Ep @ model.M @ Abar @ Em2 @ model.Mbar @ self.Ep
            self.GammaBar = np.eye(self.nbar, dtype=np.complex128) - self.Em @ model.Mbar @ A @ Ep2 @ model.M @ self.Em
        entries = 0.0
        for m in (self.Gamma, self.GammaBar):
            if m.size:
                mx = float(np.max(np.abs(m)))
                entries = math.inf if not math.isfinite(mx) else max(entries, mx)
        self.max_entry = entries
        self.Gi = None
        self.Gbi = None

    @property
    def risky(self) -> bool:
        """True when double-precision cancellation can no longer be trusted.

        Scalar pairs are exempt: 1x1 chains are products and quotients only,
        which stay relatively accurate at any representable magnitude.
        """
        if not math.isfinite(self.max_entry):
            return True
        return self.max_entry > RISK_THRESHOLD and (self.n > 1 or self.nbar > 1)

    def invert(self):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                self.Gi = np.linalg.inv(self.Gamma) if self.Gamma.size else self.Gamma
                self.Gbi = np.linalg.inv(self.GammaBar) if self.GammaBar.size else self.GammaBar
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(
                f"dressing matrix singular at x={self.x:.6g}", condition=math.inf
            ) from exc
        return self


def _scalar(m: np.ndarray) -> complex:
    return complex(m[0, 0]) if m.size else 0.0j


# =============================================================================
# Arbitrary-precision fallback
# =============================================================================

def _mp_digits(model: ReflectionlessModel, x: float) -> int:
    scale_digits = model.growth_rate * abs(x) / math.log(10.0)
    return max(40, int(1.4 * scale_digits) + 30)


def _to_mp(a: np.ndarray) -> mp.matrix:
    out = mp.matrix(a.shape[0], a.shape[1])
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            v = complex(a[i, j])
            out[i, j] = mp.mpc(v.real, v.imag)
    return out


def _mp_samples(model: ReflectionlessModel, x: float, derivs: bool):
    """(q_alg, r_alg, g1, g2[, dq_alg, dr_alg]) in arbitrary precision."""
    old = mp.mp.dps
    mp.mp.dps = _mp_digits(model, x)
    try:
        A, Abar = _to_mp(model.plus.A), _to_mp(model.minus.A)
        B, Bbar = _to_mp(model.plus.B), _to_mp(model.minus.B)
        C, Cbar = _to_mp(model.plus.C), _to_mp(model.minus.C)
        M, Mbar = _to_mp(model.M), _to_mp(model.Mbar)
        n, nbar = model.plus.size, model.minus.size
        Ep = mp.expm(A * mp.mpc(0, x)) if n else A
        Em = mp.expm(Abar * mp.mpc(0, -x)) if nbar else Abar
        Ep2, Em2 = Ep * Ep, Em * Em
        Gamma = mp.eye(n) - Ep * M * Abar * Em2 * Mbar * Ep
        GammaBar = mp.eye(nbar) - Em * Mbar * A * Ep2 * M * Em
        Gi = Gamma ** -1
        Gbi = GammaBar ** -1
        q_alg = 2 * (Cbar * Em * Gbi * Em * Bbar)[0, 0]
        r_alg = 2 * (C * Ep * Gi * Ep * B)[0, 0]
        g1 = (Cbar * Em * Gbi * Em * Mbar * A * Ep2 * B)[0, 0]
        g2 = (C * Ep * Gi * Ep * M * Abar * Em2 * Bbar)[0, 0]
        if not derivs:
            return (complex(q_alg), complex(r_alg), complex(g1), complex(g2))
        iA = A * mp.mpc(0, 1)
        iAbar = Abar * mp.mpc(0, 1)
        P = Ep * M * Abar * Em2 * Mbar * Ep
        Pb = Em * Mbar * A * Ep2 * M * Em
        dGamma = -(iA * P + Ep * M * Abar * (iAbar * -2) * Em2 * Mbar * Ep + P * iA)
        dGammaBar = -((-1 * iAbar) * Pb + Em * Mbar * A * (2 * iA) * Ep2 * M * Em + Pb * (-1 * iAbar))
        dGi = -1 * (Gi * dGamma * Gi)
        dGbi = -1 * (Gbi * dGammaBar * Gbi)
        dq_alg = 2 * ((Cbar * (-1 * iAbar) * Em * Gbi * Em * Bbar)[0, 0]
                      + (Cbar * Em * dGbi * Em * Bbar)[0, 0]
                      + (Cbar * Em * Gbi * (-1 * iAbar) * Em * Bbar)[0, 0])
        dr_alg = 2 * ((C * iA * Ep * Gi * Ep * B)[0, 0]
                      + (C * Ep * dGi * Ep * B)[0, 0]
                      + (C * Ep * Gi * iA * Ep * B)[0, 0])
        return (complex(q_alg), complex(r_alg), complex(g1), complex(g2),
                complex(dq_alg), complex(dr_alg))
    finally:
        mp.mp.dps = old


def _samples_at(model: ReflectionlessModel, x: float, derivs: bool):
    """Shared sample evaluator with automatic precision escalation.

    Returns (q_alg, r_alg, g1, g2) or, with ``derivs``, additionally
    (dq_alg, dr_alg).  The *_alg values lack the exp(-4G) dressing.
    """
    if model.is_empty:
        return (0.0j,) * (6 if derivs else 4)
    core = _Core(model, x)
    if core.risky:
        return _mp_samples(model, x, derivs)
    core.invert()
    A, B, C = model.plus.A, model.plus.B, model.plus.C
    Abar, Bbar, Cbar = model.minus.A, model.minus.B, model.minus.C
    Ep, Em, Gi, Gbi = core.Ep, core.Em, core.Gi, core.Gbi
    Ep2 = Ep @ Ep
    Em2 = Em @ Em
    q_alg = 2.0 * _scalar(Cbar @ Em @ Gbi @ Em @ Bbar)
    r_alg = 2.0 * _scalar(C @ Ep @ Gi @ Ep @ B)
    g1 = _scalar(Cbar @ Em @ Gbi @ Em @ model.Mbar @ A @ Ep2 @ B)
    g2 = _scalar(C @ Ep @ Gi @ Ep @ model.M @ Abar @ Em2 @ Bbar)
    if not derivs:
        return q_alg, r_alg, g1, g2
    P = Ep @ model.M @ Abar @ Em2 @ model.Mbar @ Ep
    Pb = Em @ model.Mbar @ A @ Ep2 @ model.M @ Em
    dGamma = -((1j * A) @ P + Ep @ model.M @ Abar @ (-2j * Abar) @ Em2 @ model.Mbar @ Ep + P @ (1j * A))
    dGammaBar = -((-1j * Abar) @ Pb + Em @ model.Mbar @ A @ (2j * A) @ Ep2 @ model.M @ Em + Pb @ (-1j * Abar))
    dGi = -Gi @ dGamma @ Gi if Gi.size else Gi
    dGbi = -Gbi @ dGammaBar @ Gbi if Gbi.size else Gbi
    dq_alg = 2.0 * _scalar(
        Cbar @ (-1j * Abar) @ Em @ Gbi @ Em @ Bbar
        + Cbar @ Em @ dGbi @ Em @ Bbar
        + Cbar @ Em @ Gbi @ (-1j * Abar) @ Em @ Bbar
    )
    dr_alg = 2.0 * _scalar(
        C @ (1j * A) @ Ep @ Gi @ Ep @ B
        + C @ Ep @ dGi @ Ep @ B
        + C @ Ep @ Gi @ (1j * A) @ Ep @ B
    )
    return q_alg, r_alg, g1, g2, dq_alg, dr_alg


def _det_ratio(model: ReflectionlessModel, x: float) -> complex:
    """det(GammaBar(x)) / det(Gamma(x)), the exact dressing factor exp(-2 G).

    g1 - g2 equals -(1/2) d/dx log(det Gamma / det GammaBar), and both
    determinants tend to 1 as x -> +inf, so the tail integral G(x)
    exponentiates to this ratio with no quadrature at all.  slogdet keeps the
    far-left growth of the individual determinants from overflowing before
    the ratio is formed; in the cancellation-risky zone the determinants are
    taken in arbitrary precision.
    """
    core = _Core(model, x)
    if not core.risky:
        sg, lg = np.linalg.slogdet(core.Gamma) if core.n else (1.0 + 0.0j, 0.0)
        sgb, lgb = np.linalg.slogdet(core.GammaBar) if core.nbar else (1.0 + 0.0j, 0.0)
        if sg == 0:
            raise SingularMatrixError(
                f"dressing matrix singular at x={x:.6g}", condition=math.inf
            )
        if math.isfinite(lg) and math.isfinite(lgb):
            return complex(sgb / sg) * math.exp(lgb - lg)
    old = mp.mp.dps
    mp.mp.dps = _mp_digits(model, x)
    try:
        A, Abar = _to_mp(model.plus.A), _to_mp(model.minus.A)
        M, Mbar = _to_mp(model.M), _to_mp(model.Mbar)
        n, nbar = model.plus.size, model.minus.size
        Ep = mp.expm(A * mp.mpc(0, x)) if n else A
        Em = mp.expm(Abar * mp.mpc(0, -x)) if nbar else Abar
        dg = mp.det(mp.eye(n) - Ep * M * Abar * (Em * Em) * Mbar * Ep) if n else mp.mpf(1)
        dgb = mp.det(mp.eye(nbar) - Em * Mbar * A * (Ep * Ep) * M * Em) if nbar else mp.mpf(1)
        if dg == 0:
            raise SingularMatrixError(
                f"dressing matrix singular at x={x:.6g}", condition=math.inf
            )
        return complex(dgb / dg)
    finally:
        mp.mp.dps = old


def _g_diff_double(model: ReflectionlessModel, x: float) -> complex:
    """g1 - g2 on the plain double path (support scan only)."""
    core = _Core(model, x)
    try:
        core.invert()
    except SingularMatrixError:
        return complex(math.nan, math.nan)
    A, B = model.plus.A, model.plus.B
    Abar, Bbar = model.minus.A, model.minus.B
    with np.errstate(over="ignore", invalid="ignore"):
        Ep2 = core.Ep @ core.Ep
        Em2 = core.Em @ core.Em
        g1 = _scalar(model.minus.C @ core.Em @ core.Gbi @ core.Em @ model.Mbar @ A @ Ep2 @ B)
        g2 = _scalar(model.plus.C @ core.Ep @ core.Gi @ core.Ep @ model.M @ Abar @ Em2 @ Bbar)
    return g1 - g2


# =============================================================================
# Kernels and g-functions
# =============================================================================

def gamma_pair(model: ReflectionlessModel, x: float) -> GammaPair:
    """The pair Gamma(x), GammaBar(x) with condition estimates.

    Singularity is reported through the condition numbers rather than an
    exception; inversion sites downstream raise when they actually divide.
    """
    core = _Core(model, x)
    return GammaPair(x, core.Gamma, core.GammaBar, _cond(core.Gamma), _cond(core.GammaBar))


def kernels(model: ReflectionlessModel, x: float, y: float) -> KernelQuadruple:
    """The four Marchenko kernels at a point (x, y), y >= x.

    Double precision only; accuracy degrades far left of the support window
    where the dressing matrices are ill-conditioned.
    """
    if y < x:
        raise ValueError(f"kernels need y >= x, got x={x}, y={y}")
    if model.is_empty:
        return KernelQuadruple(0.0j, 0.0j, 0.0j, 0.0j)
    A, B, C = model.plus.A, model.plus.B, model.plus.C
    Abar, Bbar, Cbar = model.minus.A, model.minus.B, model.minus.C
    core = _Core(model, x).invert()
    Epy = mat_exp(A, 1j * y)
    Emy = mat_exp(Abar, -1j * y)
    k1 = -_scalar(Cbar @ core.Em @ core.Gbi @ Emy @ Bbar)
    k2 = _scalar(C @ core.Ep @ core.Gi @ core.Ep @ model.M @ Abar @ core.Em @ Emy @ Bbar)
    k1bar = _scalar(Cbar @ core.Em @ core.Gbi @ core.Em @ model.Mbar @ A @ core.Ep @ Epy @ B)
    k2bar = -_scalar(C @ core.Ep @ core.Gi @ Epy @ B)
    return KernelQuadruple(k1, k2, k1bar, k2bar)


def g_functions(model: ReflectionlessModel, x: float) -> tuple[complex, complex]:
    """Diagonal kernel values (g1, g2) = (K1bar(x, x), K2(x, x))."""
    if model.is_empty:
        return 0.0j, 0.0j
    _, _, g1, g2 = _samples_at(model, x, derivs=False)
    return g1, g2


# =============================================================================
# The dressing tail G
# =============================================================================

def G_of_x(model: ReflectionlessModel, x: float) -> complex:
    """Tail integral of g1 - g2 over [x, infinity), in closed form.

    Equal to (1/2) log(det Gamma(x) / det GammaBar(x)); the principal
    logarithm picks the representative with imaginary part in (-pi/2, pi/2].
    The integral itself is only used through exp(2 G), exp(-4 G) and E, all
    of which are insensitive to that choice.
    """
    if model.is_empty:
        return 0.0j
    return -0.5 * cmath.log(_det_ratio(model, x))


def phase_factor(model: ReflectionlessModel) -> complex:
    """exp(i mu / 2) from the determinant ratio of the triplet matrices.

    Exact (no quadrature): the transmission coefficient equals the rational
    function exp(-i mu/2) det(lam I - Abar) / det(lam I - A) and is 1 at
    lam = 0.
    """
    det_p = complex(np.linalg.det(-model.plus.A)) if model.plus.size else 1.0 + 0.0j
    det_m = complex(np.linalg.det(-model.minus.A)) if model.minus.size else 1.0 + 0.0j
    return det_m / det_p


def principal_mu(phase: complex) -> complex:
    """The canonical mu with exp(i mu / 2) equal to ``phase``.

    mu enters every formula through 4-pi-periodic exponentials, so it is only
    determined modulo 4 pi; the representative with real part in (-2 pi, 2 pi]
    is the conventional one.  The branch cut is nudged off the negative real
    axis so a phase of exactly -|p| (a common fixture value) maps stably to
    +2 pi rather than flickering between +-2 pi under roundoff.
    """
    phase = complex(phase)
    if phase == 0:
        raise ValueError("phase factor must be nonzero")
    ang = math.atan2(phase.imag, phase.real)
    if ang < -math.pi + 1e-6:
        ang += 2.0 * math.pi
    return complex(2.0 * ang, -2.0 * math.log(abs(phase)))


def E_and_mu(model: ReflectionlessModel):
    """The normalization function E(x) and the constant mu.

    mu comes from the exact phase factor (the full-line integral of q*r only
    determines it modulo 4 pi; the principal representative is returned).
    E(x) is exp(i mu / 2) times the determinant ratio behind ``G_of_x``:
    the ratio tends to exp(-i mu / 2) on the left and 1 on the right, which
    pins E(-inf) = 1 and E(+inf) = exp(i mu / 2).
    """
    if model.is_empty:
        return (lambda x: np.ones(np.shape(x), dtype=np.complex128) if np.ndim(x) else 1.0 + 0.0j), 0.0j
    mu = principal_mu(phase_factor(model))
    half = phase_factor(model)

    def E(x):
        if np.ndim(x):
            return np.array([E(float(xi)) for xi in np.asarray(x).ravel()]).reshape(np.shape(x))
        return half * _det_ratio(model, float(x))

    return E, mu


# =============================================================================
# Potentials
# =============================================================================

def potentials(model: ReflectionlessModel, x: float) -> tuple[complex, complex]:
    """Exact evaluation of (q(x), r(x))."""
    q, r, _, _ = _potentials_core(model, x, with_derivatives=False)
    return q, r


def potential_derivatives(model: ReflectionlessModel, x: float) -> tuple[complex, complex, complex, complex]:
    """(q, r, q', r') with the derivatives computed analytically."""
    return _potentials_core(model, x, with_derivatives=True)


def _potentials_core(model: ReflectionlessModel, x: float, with_derivatives: bool):
    if model.is_empty:
        return 0.0j, 0.0j, 0.0j, 0.0j
    vals = _samples_at(model, x, derivs=with_derivatives)
    q_alg, r_alg = vals[0], vals[1]
    g1, g2 = vals[2], vals[3]
    ratio = _det_ratio(model, x)
    eg = ratio * ratio
    q = q_alg * eg
    r = r_alg / eg
    if not with_derivatives:
        return q, r, 0.0j, 0.0j
    dq_alg, dr_alg = vals[4], vals[5]
    # G'(x) = -(g1 - g2)
    dq = dq_alg * eg + q * 4.0 * (g1 - g2)
    dr = dr_alg / eg - r * 4.0 * (g1 - g2)
    return q, r, dq, dr


# =============================================================================
# Jost solutions and transmission coefficients
# =============================================================================

def _check_resolvent(lam: complex, eigs: np.ndarray, label: str):
    if eigs.size and np.min(np.abs(eigs - lam)) < 1e-10 * (1.0 + abs(lam)):
        raise SpectralCollisionError(
            f"lambda={lam} collides with the {label} spectrum"
        )


def jost(model: ReflectionlessModel, zeta: complex, x: float) -> tuple[np.ndarray, np.ndarray]:
    """Jost solutions (psi, psibar) at spectral parameter zeta and point x."""
    lam = complex(zeta) ** 2
    A, B, C = model.plus.A, model.plus.B, model.plus.C
    Abar, Bbar, Cbar = model.minus.A, model.minus.B, model.minus.C
    _check_resolvent(lam, model.plus.eigenvalues(), "plus")
    _check_resolvent(lam, model.minus.eigenvalues(), "minus")
    if model.is_empty:
        up = np.exp(1j * lam * x)
        return (np.array([0.0j, up]), np.array([1.0 / up, 0.0j]))
    core = _Core(model, x).invert()
    Ep, Em, Gi, Gbi = core.Ep, core.Em, core.Gi, core.Gbi
    Ep2 = Ep @ Ep
    Em2 = Em @ Em
    n, nbar = model.plus.size, model.minus.size
    res_m = np.linalg.solve(Abar - lam * np.eye(nbar), Bbar) if nbar else Bbar
    res_p = np.linalg.solve(A - lam * np.eye(n), B) if n else B
    g3 = 1j * _scalar(Cbar @ Em @ Gbi @ Em @ res_m)
    g4 = 1.0 - 1j * _scalar(C @ Ep @ Gi @ Ep @ model.M @ Abar @ Em2 @ res_m)
    g5 = 1.0 + 1j * _scalar(Cbar @ Em @ Gbi @ Em @ model.Mbar @ A @ Ep2 @ res_p)
    g6 = -1j * _scalar(C @ Ep @ Gi @ Ep @ res_p)
    e2g = 1.0 / _det_ratio(model, x)
    up = np.exp(1j * lam * x)
    zeta = complex(zeta)
    psi = np.array([zeta * up * g3 / e2g, up * g4 * e2g])
    psibar = np.array([g5 / (up * e2g), zeta * g6 * e2g / up])
    return psi, psibar


def transmissions(model: ReflectionlessModel, zeta: complex) -> tuple[complex, complex]:
    """(T, Tbar) by the exact rational route; Tbar = 1/T."""
    lam = complex(zeta) ** 2
    _check_resolvent(lam, model.plus.eigenvalues(), "plus")
    _check_resolvent(lam, model.minus.eigenvalues(), "minus")
    n, nbar = model.plus.size, model.minus.size
    num = complex(np.linalg.det(lam * np.eye(nbar) - model.minus.A)) if nbar else 1.0 + 0.0j
    den = complex(np.linalg.det(lam * np.eye(n) - model.plus.A)) if n else 1.0 + 0.0j
    t = num / (phase_factor(model) * den)
    return t, 1.0 / t


def _mp_tails(model: ReflectionlessModel, x: float, lam: complex):
    """(g4, g5) at one point in arbitrary precision."""
    old = mp.mp.dps
    mp.mp.dps = _mp_digits(model, x)
    try:
        A, Abar = _to_mp(model.plus.A), _to_mp(model.minus.A)
        B, Bbar = _to_mp(model.plus.B), _to_mp(model.minus.B)
        C, Cbar = _to_mp(model.plus.C), _to_mp(model.minus.C)
        M, Mbar = _to_mp(model.M), _to_mp(model.Mbar)
        n, nbar = model.plus.size, model.minus.size
        lam_mp = mp.mpc(lam.real, lam.imag)
        Ep = mp.expm(A * mp.mpc(0, x)) if n else A
        Em = mp.expm(Abar * mp.mpc(0, -x)) if nbar else Abar
        Ep2, Em2 = Ep * Ep, Em * Em
        Gi = (mp.eye(n) - Ep * M * Abar * Em2 * Mbar * Ep) ** -1
        Gbi = (mp.eye(nbar) - Em * Mbar * A * Ep2 * M * Em) ** -1
        res_m = (Abar - lam_mp * mp.eye(nbar)) ** -1 * Bbar if nbar else Bbar
        res_p = (A - lam_mp * mp.eye(n)) ** -1 * B if n else B
        g4 = 1 - mp.mpc(0, 1) * (C * Ep * Gi * Ep * M * Abar * Em2 * res_m)[0, 0]
        g5 = 1 + mp.mpc(0, 1) * (Cbar * Em * Gbi * Em * Mbar * A * Ep2 * res_p)[0, 0]
        return complex(g4), complex(g5)
    finally:
        mp.mp.dps = old


def transmissions_by_limit(model: ReflectionlessModel, zeta: complex,
                           plateau_tol: float = 1e-8, x_start: float | None = None,
                           max_steps: int = 40) -> tuple[complex, complex]:
    """(T, Tbar) from the x -> -inf limits of the Jost tails g4 and g5.

    Cross-check route: walks x leftward one unit at a time until two
    consecutive evaluations agree to ``plateau_tol``.  The dressing matrices
    grow as x -> -inf, so evaluations escalate to arbitrary precision once
    double-precision cancellation becomes untrustworthy.
    """
    lam = complex(zeta) ** 2
    _check_resolvent(lam, model.plus.eigenvalues(), "plus")
    _check_resolvent(lam, model.minus.eigenvalues(), "minus")
    if model.is_empty:
        return 1.0 + 0.0j, 1.0 + 0.0j
    _, mu = E_and_mu(model)
    half = np.exp(1j * mu / 2.0)

    def tails(x: float):
        A, B, C = model.plus.A, model.plus.B, model.plus.C
        Abar, Bbar, Cbar = model.minus.A, model.minus.B, model.minus.C
        core = _Core(model, x)
        if core.risky:
            return _mp_tails(model, x, lam)
        core.invert()
        Em2 = core.Em @ core.Em
        Ep2 = core.Ep @ core.Ep
        n, nbar = model.plus.size, model.minus.size
        res_m = np.linalg.solve(Abar - lam * np.eye(nbar), Bbar) if nbar else Bbar
        res_p = np.linalg.solve(A - lam * np.eye(n), B) if n else B
        g4 = 1.0 - 1j * _scalar(C @ core.Ep @ core.Gi @ core.Ep @ model.M @ Abar @ Em2 @ res_m)
        g5 = 1.0 + 1j * _scalar(Cbar @ core.Em @ core.Gbi @ core.Em @ model.Mbar @ A @ Ep2 @ res_p)
        return g4, g5

    x = min(0.0, model.support[0]) if x_start is None else float(x_start)
    g4_prev, g5_prev = tails(x)
    for _ in range(max_steps):
        x -= 1.0
        g4_cur, g5_cur = tails(x)
        done = (abs(g4_cur - g4_prev) <= plateau_tol * max(1.0, abs(g4_cur))
                and abs(g5_cur - g5_prev) <= plateau_tol * max(1.0, abs(g5_cur)))
        g4_prev, g5_prev = g4_cur, g5_cur
        if done:
            break
    if g4_prev == 0 or g5_prev == 0:
        raise SpectralCollisionError(f"Jost tail vanished at lambda={lam}")
    return 1.0 / (half * g4_prev), half / g5_prev


# =============================================================================
# Sampled export for the direct-scattering round trip
# =============================================================================

def to_field(model: ReflectionlessModel, x_min: float = -12.0, x_max: float = 12.0,
             step: float = 0.01) -> PotentialField:
    """Sample the model onto a uniform grid and wrap it as a PotentialField.

    Every sample is exact (determinant dressing, analytic derivatives); the
    only approximation downstream is the spline between grid points.
    """
    n_panels = int(round((x_max - x_min) / step))
    if n_panels < 8:
        raise ValueError("window too narrow for sampling")
    x = np.linspace(x_min, x_max, n_panels + 1)
    if model.is_empty:
        zero = np.zeros_like(x, dtype=np.complex128)
        return PotentialField.from_samples(x, zero, zero, zero, zero)

    q_s = np.empty(x.size, dtype=np.complex128)
    r_s = np.empty(x.size, dtype=np.complex128)
    dq_s = np.empty(x.size, dtype=np.complex128)
    dr_s = np.empty(x.size, dtype=np.complex128)
    for k, xk in enumerate(x):
        q_s[k], r_s[k], dq_s[k], dr_s[k] = _potentials_core(model, float(xk), True)
    return PotentialField.from_samples(x, q_s, r_s, dq_s, dr_s)
