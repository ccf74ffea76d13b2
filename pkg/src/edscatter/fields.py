"""Potential fields: the pair (q(x), r(x)) with a finite numerical window.

A ``PotentialField`` carries vectorized callables for the two potentials and,
when available, their analytic first derivatives.  Outside the window both
potentials are treated as zero; constructors are expected to choose windows
wide enough that the clipped tails sit below the stated threshold.

Fields can wrap closed-form callables or interpolate samples (quintic
splines, so that derivative evaluations stay accurate enough for the
higher-order residual checks downstream).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import make_interp_spline

__all__ = ["PotentialField", "cspline", "bump"]

_FD_STEP = 1e-3
# 6th-order central first-derivative stencil
_FD_WEIGHTS = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0
_FD_OFFSETS = np.arange(-3, 4)


def cspline(x: np.ndarray, y: np.ndarray, k: int = 5) -> Callable:
    """Interpolating spline tolerant of complex values.

    ``make_interp_spline`` handles complex data in recent scipy; the fallback
    splits real and imaginary parts for older versions.
    """
    y = np.asarray(y)
    if not np.iscomplexobj(y):
        return make_interp_spline(x, y, k=k)
    try:
        return make_interp_spline(x, y, k=k)
    except (TypeError, ValueError):
        sr = make_interp_spline(x, y.real, k=k)
        si = make_interp_spline(x, y.imag, k=k)
        return lambda t: sr(t) + 1j * si(t)


def bump(x, center: float = 0.0, radius: float = 1.0):
    """Smooth compactly supported bump, identically zero for |x-center| >= radius."""
    t = (np.asarray(x, dtype=float) - center) / radius
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ti * ti))
    return out


@dataclass(frozen=True, eq=False)
class PotentialField:
    """Pair of complex potentials on a finite window.

    ``q_fn``/``r_fn`` must accept numpy arrays.  ``dq_fn``/``dr_fn`` are
    optional analytic derivatives; when missing, derivative queries fall back
    to 6th-order central differences of the stored callables.
    """

    q_fn: Callable
    r_fn: Callable
    x_min: float
    x_max: float
    dq_fn: Callable | None = None
    dr_fn: Callable | None = None
    tail: float = 1e-12

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"empty window [{self.x_min}, {self.x_max}]")

    # -- evaluation ---------------------------------------------------------

    def _masked(self, fn: Callable, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.zeros(xv.shape, dtype=np.complex128)
        inside = (xv >= self.x_min) & (xv <= self.x_max)
        if np.any(inside):
            out[inside] = fn(xv[inside])
        return out[0] if scalar else out

    def q_at(self, x):
        return self._masked(self.q_fn, x)

    def r_at(self, x):
        return self._masked(self.r_fn, x)

    def _fd(self, fn: Callable, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        pts = x[..., None] + _FD_STEP * _FD_OFFSETS
        vals = self._masked(fn, pts.ravel()).reshape(pts.shape)
        return vals @ _FD_WEIGHTS / _FD_STEP

    def dq_at(self, x):
        if self.dq_fn is not None:
            return self._masked(self.dq_fn, x)
        return self._fd(self.q_fn, x)

    def dr_at(self, x):
        if self.dr_fn is not None:
            return self._masked(self.dr_fn, x)
        return self._fd(self.r_fn, x)

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_callables(cls, q, r, x_min: float, x_max: float, dq=None, dr=None,
                       tail: float = 1e-12) -> "PotentialField":
        return cls(q, r, float(x_min), float(x_max), dq, dr, tail)

    @classmethod
    def from_samples(cls, x, q_samples, r_samples, dq_samples=None, dr_samples=None,
                     tail: float = 1e-12) -> "PotentialField":
        """Interpolate uniform or non-uniform samples with quintic splines."""
        x = np.asarray(x, dtype=float)
        if x.ndim != 1 or x.size < 6:
            raise ValueError("need at least 6 sample points for quintic interpolation")
        if np.any(np.diff(x) <= 0):
            raise ValueError("sample grid must be strictly increasing")
        q_sp = cspline(x, np.asarray(q_samples, dtype=np.complex128))
        r_sp = cspline(x, np.asarray(r_samples, dtype=np.complex128))
        dq_sp = None if dq_samples is None else cspline(x, np.asarray(dq_samples, dtype=np.complex128))
        dr_sp = None if dr_samples is None else cspline(x, np.asarray(dr_samples, dtype=np.complex128))
        return cls(q_sp, r_sp, float(x[0]), float(x[-1]), dq_sp, dr_sp, tail)

    @classmethod
    def zero(cls, x_min: float = -12.0, x_max: float = 12.0) -> "PotentialField":
        z = lambda x: np.zeros(np.shape(x), dtype=np.complex128)
        return cls(z, z, x_min, x_max, z, z)
