"""Direct scattering for the energy-dependent system by ODE integration.

Everything here consumes a :class:`~edscatter.fields.PotentialField` and knows
nothing about triplets, which is what makes the round trip against the
closed-form engine a genuine two-route check.

The system is integrated in hatted variables (a, b) = (alpha e^{i lam x},
beta e^{-i lam x}), which strip the free oscillation:

    a' = zeta q(x) e^{ 2 i lam x} b,
    b' = zeta r(x) e^{-2 i lam x} a,      lam = zeta^2.

Hatting is solution-independent, so the Wronskian of two solutions equals
a_f b_g - b_f a_g of their hatted components, with all exponentials
cancelled.  Jost solutions are fixed by their hatted values at the window
ends: phi -> (1, 0) and phibar -> (0, 1) on the left, psi -> (0, 1) and
psibar -> (1, 0) on the right.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp

from .bound_states import principal_sqrt
from .errors import IntegrationError, WindingError
from .fields import PotentialField, cspline
from .reflectionless import principal_mu

logger = logging.getLogger(__name__)

#: Default tolerances for the Jost sweeps.
SWEEP_RTOL = 1e-10
SWEEP_ATOL = 1e-13
#: Looser tolerances for winding-number contours (only phases matter).
WINDING_RTOL = 1e-8
WINDING_ATOL = 1e-11

_KINDS = ("phi", "phibar", "psi", "psibar")
#: hatted initial values and anchoring end for each Jost solution
_ANCHORS = {
    "phi": ((1.0, 0.0), "left"),
    "phibar": ((0.0, 1.0), "left"),
    "psi": ((0.0, 1.0), "right"),
    "psibar": ((1.0, 0.0), "right"),
}


# =============================================================================
# Batched hatted sweeps
# =============================================================================

def _sweep_general(q_at, r_at, lams: np.ndarray, mults: np.ndarray,
                   y0: np.ndarray, x_from: float, x_to: float, t_eval=None,
                   rtol: float = SWEEP_RTOL, atol: float = SWEEP_ATOL) -> np.ndarray:
    """Integrate a hatted two-component system for a batch of lambdas.

    The same machinery serves the energy-dependent system (mults = zeta,
    lams = zeta^2) and its associated AKNS systems (mults = 1).  ``y0`` has
    shape (n_sol, 2, K): several solution families (distinguished only by
    initial data) for K spectral points.  Returns the state with shape
    (n_sol, 2, K, len(t_eval)) or (n_sol, 2, K) for endpoint-only.
    """
    shape = y0.shape
    if x_from == x_to:
        out = np.repeat(y0[..., None], 1 if t_eval is None else len(t_eval), axis=-1)
        return out[..., 0] if t_eval is None else out

    def rhs(x, y):
        st = y.reshape(shape)
        a, b = st[:, 0, :], st[:, 1, :]
        q = q_at(x)
        r = r_at(x)
        osc = np.exp(2j * lams * x)
        da = (mults * q * osc) * b
        db = (mults * r / osc) * a
        return np.concatenate([da[:, None, :], db[:, None, :]], axis=1).ravel()

    sol = solve_ivp(rhs, (x_from, x_to), y0.ravel(), method="DOP853",
                    t_eval=t_eval, rtol=rtol, atol=atol, dense_output=False)
    if not sol.success:
        raise IntegrationError(f"Jost sweep failed: {sol.message}", location=x_from)
    if t_eval is None:
        return sol.y[:, -1].reshape(shape)
    return sol.y.reshape(shape + (len(sol.t),))


def _sweep(field: PotentialField, zetas: np.ndarray, y0: np.ndarray,
           x_from: float, x_to: float, t_eval=None,
           rtol: float = SWEEP_RTOL, atol: float = SWEEP_ATOL) -> np.ndarray:
    zetas = np.asarray(zetas, dtype=np.complex128).ravel()
    return _sweep_general(field.q_at, field.r_at, zetas ** 2, zetas, y0,
                          x_from, x_to, t_eval=t_eval, rtol=rtol, atol=atol)


def _jost_pair_general(q_at, r_at, x_lo: float, x_hi: float, lams: np.ndarray,
                       mults: np.ndarray, x_mid: float, kinds: tuple[str, ...],
                       rtol: float, atol: float) -> dict[str, np.ndarray]:
    """Hatted values of the requested Jost solutions at one meeting point."""
    K = lams.size
    out: dict[str, np.ndarray] = {}
    for end, x_end in (("left", x_lo), ("right", x_hi)):
        wanted = [k for k in kinds if _ANCHORS[k][1] == end]
        if not wanted:
            continue
        y0 = np.zeros((len(wanted), 2, K), dtype=np.complex128)
        for i, k in enumerate(wanted):
            y0[i, 0, :], y0[i, 1, :] = _ANCHORS[k][0]
        res = _sweep_general(q_at, r_at, lams, mults, y0, x_end, x_mid,
                             rtol=rtol, atol=atol)
        for i, k in enumerate(wanted):
            out[k] = res[i]
    return out


def _jost_pair_at(field: PotentialField, zetas: np.ndarray, x_mid: float,
                  kinds: tuple[str, ...], rtol: float, atol: float) -> dict[str, np.ndarray]:
    zetas = np.asarray(zetas, dtype=np.complex128).ravel()
    return _jost_pair_general(field.q_at, field.r_at, field.x_min, field.x_max,
                              zetas ** 2, zetas, x_mid, kinds, rtol, atol)


def integrate_jost(field: PotentialField, zeta: complex, x_eval,
                   kind: str = "psi", rtol: float = SWEEP_RTOL,
                   atol: float = SWEEP_ATOL) -> np.ndarray:
    """One Jost solution evaluated at the points ``x_eval``.

    Returns an array of shape (len(x_eval), 2) holding the unhatted
    components.  ``x_eval`` must be sorted ascending and lie inside the
    field window.
    """
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    x_eval = np.atleast_1d(np.asarray(x_eval, dtype=float))
    if x_eval.size == 0:
        return np.zeros((0, 2), dtype=np.complex128)
    if np.any(np.diff(x_eval) < 0):
        raise ValueError("x_eval must be sorted ascending")
    zeta = complex(zeta)
    lam = zeta ** 2
    ic, end = _ANCHORS[kind]
    y0 = np.zeros((1, 2, 1), dtype=np.complex128)
    y0[0, 0, 0], y0[0, 1, 0] = ic
    if end == "left":
        hat = _sweep(field, np.array([zeta]), y0, field.x_min, float(x_eval[-1]),
                     t_eval=x_eval, rtol=rtol, atol=atol)
    else:
        hat = _sweep(field, np.array([zeta]), y0, field.x_max, float(x_eval[0]),
                     t_eval=x_eval[::-1], rtol=rtol, atol=atol)
        hat = hat[..., ::-1]
    a = hat[0, 0, 0, :]
    b = hat[0, 1, 0, :]
    osc = np.exp(1j * lam * x_eval)
    return np.stack([a / osc, b * osc], axis=-1)


def wronskian(f: np.ndarray, g: np.ndarray) -> np.ndarray | complex:
    """[f; g] = f1 g2 - f2 g1 along the last axis of length 2."""
    f = np.asarray(f)
    g = np.asarray(g)
    out = f[..., 0] * g[..., 1] - f[..., 1] * g[..., 0]
    return complex(out) if out.ndim == 0 else out


# =============================================================================
# Scattering coefficients
# =============================================================================

@dataclass(frozen=True)
class ScatteringCoefficients:
    """The six scattering coefficients of the energy-dependent system."""

    zeta: complex
    T: complex
    Tbar: complex
    R: complex
    Rbar: complex
    L: complex
    Lbar: complex

    @property
    def lam(self) -> complex:
        return self.zeta ** 2

    @property
    def unitarity_defect(self) -> float:
        """|T Tbar + R Rbar - 1|, zero in exact arithmetic."""
        return abs(self.T * self.Tbar + self.R * self.Rbar - 1.0)


def _six_from_hatted(hat: dict[str, np.ndarray]) -> tuple[np.ndarray, ...]:
    """(T, Tbar, R, Rbar, L, Lbar) arrays from hatted Jost values at one x."""
    phi, phibar = hat["phi"], hat["phibar"]
    psi, psibar = hat["psi"], hat["psibar"]

    def w(f, g):
        return f[0] * g[1] - f[1] * g[0]

    denom_p = w(phi, psi)
    denom_m = w(psibar, phibar)
    if np.any(denom_p == 0) or np.any(denom_m == 0):
        raise IntegrationError("vanishing Wronskian in coefficient assembly")
    w_phi_psibar = w(phi, psibar)
    return (1.0 / denom_p, 1.0 / denom_m,
            -w_phi_psibar / denom_p, w(phibar, psi) / denom_m,
            w(psi, phibar) / denom_p, w_phi_psibar / denom_m)


def scattering_coefficients(field: PotentialField, zeta, x_mid: float | None = None,
                            rtol: float = SWEEP_RTOL, atol: float = SWEEP_ATOL):
    """Scattering coefficients at one or many spectral points.

    A scalar ``zeta`` returns a single :class:`ScatteringCoefficients`; a
    sequence returns a list (computed in one batched pair of sweeps).
    """
    scalar = np.ndim(zeta) == 0
    zetas = np.atleast_1d(np.asarray(zeta, dtype=np.complex128))
    if x_mid is None:
        x_mid = 0.5 * (field.x_min + field.x_max)
    hat = _jost_pair_at(field, zetas, float(x_mid), _KINDS, rtol, atol)
    T, Tbar, R, Rbar, L, Lbar = _six_from_hatted(hat)
    out = [ScatteringCoefficients(
        zeta=complex(zetas[k]), T=complex(T[k]), Tbar=complex(Tbar[k]),
        R=complex(R[k]), Rbar=complex(Rbar[k]), L=complex(L[k]),
        Lbar=complex(Lbar[k])) for k in range(zetas.size)]
    return out[0] if scalar else out


# =============================================================================
# Bound states by contour winding
# =============================================================================

@dataclass(frozen=True)
class LocatedPole:
    """A zero of the relevant Wronskian in lambda, with its winding count."""

    lam: complex
    multiplicity: int


class _WronskianEvaluator:
    """Cached, batched evaluation of [phi; psi] (plus) or [psibar; phibar]
    (minus) as a function of lambda."""

    def __init__(self, field: PotentialField, side: str):
        if side not in ("plus", "minus"):
            raise ValueError("side must be 'plus' or 'minus'")
        self.field = field
        self.side = side
        self.cache: dict[complex, complex] = {}
        self.x_mid = 0.5 * (field.x_min + field.x_max)

    def __call__(self, lams) -> np.ndarray:
        lams = np.atleast_1d(np.asarray(lams, dtype=np.complex128))
        missing = [lam for lam in lams.tolist() if lam not in self.cache]
        if missing:
            zetas = np.array([principal_sqrt(lam) for lam in missing])
            kinds = ("phi", "psi") if self.side == "plus" else ("phibar", "psibar")
            hat = _jost_pair_at(self.field, zetas, self.x_mid, kinds,
                                WINDING_RTOL, WINDING_ATOL)
            if self.side == "plus":
                f = hat["phi"][0] * hat["psi"][1] - hat["phi"][1] * hat["psi"][0]
            else:
                f = hat["psibar"][0] * hat["phibar"][1] - hat["psibar"][1] * hat["phibar"][0]
            for lam, val in zip(missing, f.tolist()):
                self.cache[lam] = val
        return np.array([self.cache[lam] for lam in lams.tolist()])


def _box_path(box: tuple[float, float, float, float], per_edge: int) -> np.ndarray:
    re0, re1, im0, im1 = box
    bottom = np.linspace(re0, re1, per_edge, endpoint=False) + 1j * im0
    right = re1 + 1j * np.linspace(im0, im1, per_edge, endpoint=False)
    top = np.linspace(re1, re0, per_edge, endpoint=False) + 1j * im1
    left = re0 + 1j * np.linspace(im1, im0, per_edge, endpoint=False)
    return np.concatenate([bottom, right, top, left])


def _winding(ev: _WronskianEvaluator, box, per_edge: int = 24,
             max_refine: int = 10) -> int:
    """Winding number of the Wronskian around a rectangle in lambda.

    The phase along the contour is refined wherever consecutive samples jump
    by more than 0.9 pi, so a zero close to (but not on) the contour is still
    counted correctly.  A zero essentially on the contour never settles and
    raises WindingError; callers recover by shifting the box.
    """
    pts = _box_path(box, per_edge).tolist()
    pts.append(pts[0])
    vals = ev(np.array(pts))
    for _ in range(max_refine):
        jumps = np.abs(np.diff(np.angle(vals)))
        jumps = np.minimum(jumps, 2.0 * math.pi - jumps)
        bad = set(np.nonzero(jumps > 0.9 * math.pi)[0].tolist())
        if not bad:
            break
        mids = [0.5 * (pts[i] + pts[i + 1]) for i in sorted(bad)]
        mid_vals = ev(np.array(mids))
        mid_map = dict(zip(sorted(bad), mid_vals.tolist()))
        new_pts, new_vals = [], []
        for i in range(len(pts) - 1):
            new_pts.append(pts[i])
            new_vals.append(vals[i])
            if i in mid_map:
                new_pts.append(0.5 * (pts[i] + pts[i + 1]))
                new_vals.append(mid_map[i])
        new_pts.append(pts[-1])
        new_vals.append(vals[-1])
        pts = new_pts
        vals = np.array(new_vals)
    else:
        raise WindingError(f"contour phase did not settle around box {box}")
    total = float(np.sum(np.diff(np.unwrap(np.angle(vals))))) / (2.0 * math.pi)
    wind = round(total)
    if abs(total - wind) > 0.15:
        raise WindingError(f"non-integer winding {total:.3f} around box {box}")
    return wind


#: split fractions tried in turn when a zero lands on a subdivision line
_SPLIT_FRACTIONS = ((0.5, 0.5), (0.53819, 0.46181), (0.44721, 0.55279))


def _subdivide(ev: _WronskianEvaluator, b, wind: int):
    """Split a box into four children whose windings add up to the parent's."""
    re0, re1, im0, im1 = b
    last_err: WindingError | None = None
    for fr, fi in _SPLIT_FRACTIONS:
        rm = re0 + fr * (re1 - re0)
        im_ = im0 + fi * (im1 - im0)
        children = [(re0, rm, im0, im_), (rm, re1, im0, im_),
                    (re0, rm, im_, im1), (rm, re1, im_, im1)]
        try:
            winds = [_winding(ev, c) for c in children]
        except WindingError as exc:
            last_err = exc
            continue
        if sum(winds) == wind:
            return [(c, w) for c, w in zip(children, winds) if w > 0]
        last_err = WindingError(
            f"child windings {winds} disagree with parent {wind} on {b}")
    raise last_err


def locate_bound_states(field: PotentialField, side: str = "plus",
                        box: tuple[float, float, float, float] | None = None,
                        target_size: float = 4e-4,
                        cluster_radius: float = 2e-3) -> list[LocatedPole]:
    """Find zeros of the transmission-coefficient Wronskian in lambda.

    ``box`` is (re_min, re_max, im_min, im_max); the default covers a generic
    search region in the relevant half plane, keeping clear of the real axis.
    Returns poles of T (side 'plus', lambda in C+) or of Tbar ('minus'),
    located to within ``target_size`` with their winding multiplicity.

    Integration noise splits a multiple zero into a tight cluster of simple
    ones, so zeros closer than ``cluster_radius`` are merged back into one
    pole whose multiplicity is the cluster's total winding.  Genuinely
    distinct poles closer than that are reported merged as well; shrink the
    radius if that resolution matters.
    """
    if box is None:
        box = (-3.0, 3.0, 0.05, 2.75) if side == "plus" else (-3.0, 3.0, -2.75, -0.05)
    ev = _WronskianEvaluator(field, side)
    total = _winding(ev, box)
    if total == 0:
        return []
    active: list[tuple[tuple[float, float, float, float], int]] = [(box, total)]
    while True:
        widest = max(max(b[1] - b[0], b[3] - b[2]) for b, _ in active)
        if widest <= target_size:
            break
        nxt = []
        for b, wind in active:
            if max(b[1] - b[0], b[3] - b[2]) <= target_size:
                nxt.append((b, wind))
                continue
            nxt.extend(_subdivide(ev, b, wind))
        active = nxt
    raw = [(complex(0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3])), wind)
           for b, wind in active]
    clusters: list[list[tuple[complex, int]]] = []
    for lam, wind in raw:
        for cl in clusters:
            centroid = sum(l * w for l, w in cl) / sum(w for _, w in cl)
            if abs(lam - centroid) <= cluster_radius:
                cl.append((lam, wind))
                break
        else:
            clusters.append([(lam, wind)])
    out = []
    for cl in clusters:
        total_w = sum(w for _, w in cl)
        centroid = sum(l * w for l, w in cl) / total_w
        out.append(LocatedPole(lam=centroid, multiplicity=total_w))
    out.sort(key=lambda p: (p.lam.real, p.lam.imag))
    return out


# =============================================================================
# Field invariants
# =============================================================================

@dataclass(frozen=True, eq=False)
class FieldInvariants:
    """Integral invariants of a potential pair.

    ``mu_integral`` is the literal full-window integral of q*r;  ``mu`` is
    its principal representative (real part in (-2 pi, 2 pi]), which is the
    form entering all scattering formulas.  ``E`` is the accumulated
    normalization function; ``sigma`` the combination entering both scalar
    reductions.
    """

    mu: complex
    mu_integral: complex
    E: object
    sigma: object


def field_invariants(field: PotentialField, step: float = 0.005) -> FieldInvariants:
    """Accumulated invariants E(x), mu, and sigma(x) from field samples."""
    n = max(int(round((field.x_max - field.x_min) / step)), 16)
    x = np.linspace(field.x_min, field.x_max, n + 1)
    qr = field.q_at(x) * field.r_at(x)
    # cumulative_simpson mishandles complex input, so split it
    acc = (cumulative_simpson(qr.real, x=x, initial=0.0)
           + 1j * cumulative_simpson(qr.imag, x=x, initial=0.0))
    mu_integral = complex(acc[-1])
    spline = cspline(x, acc, k=5)
    x_lo, x_hi = field.x_min, field.x_max

    def E(xq):
        xq = np.asarray(xq, dtype=float)
        scalar = xq.ndim == 0
        xv = np.clip(np.atleast_1d(xq), x_lo, x_hi)
        vals = np.exp(0.5j * spline(xv))
        return complex(vals[0]) if scalar else vals

    def sigma(xq):
        q = field.q_at(xq)
        r = field.r_at(xq)
        dr = field.dr_at(xq)
        return -0.5j * q * dr + 0.25 * q ** 2 * r ** 2

    mu = principal_mu(cmath.exp(0.5j * mu_integral))
    return FieldInvariants(mu=mu, mu_integral=mu_integral, E=E, sigma=sigma)
