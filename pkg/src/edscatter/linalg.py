"""Dense complex-matrix primitives used by every other module.

Matrices are plain ``numpy.ndarray`` values with ``complex128`` entries.  The
helpers here add the three operations the scattering machinery leans on:

* ``mat_exp``: matrix exponential, exact on Jordan-form input (scalar plus
  nilpotent blocks), Pade based fallback otherwise,
* ``mat_inverse``: inverse with a condition estimate and a singularity cap,
* ``solve_sylvester``: the small Sylvester-type solve ``i M Abar - i A M = B Cbar``
  that defines the Gram matrices of the soliton formulas.

All functions are pure; arrays are never mutated in place.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .errors import DimensionError, SingularMatrixError, SpectralOverlapError

logger = logging.getLogger(__name__)

#: Condition-number cap above which an inverse is reported as singular.
DEFAULT_CONDITION_CAP = 1e12


# =============================================================================
# Validation helpers
# =============================================================================

def as_cmatrix(a, name: str = "matrix") -> np.ndarray:
    """Coerce ``a`` to a finite 2-d complex128 array.

    Raises
    ------
    DimensionError
        If the input is not two dimensional or contains NaN/Inf entries.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-d, got ndim={arr.ndim}")
    if arr.size and not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} contains non-finite entries")
    return arr


def require_square(a: np.ndarray, name: str = "matrix") -> np.ndarray:
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {a.shape}")
    return a


# =============================================================================
# Matrix exponential
# =============================================================================

def _jordan_blocks(a: np.ndarray) -> list[tuple[int, int]] | None:
    """Detect exact Jordan form: upper bidiagonal, superdiagonal entries in
    {0, 1}, constant diagonal along each chain of ones.

    Returns half-open ``(start, stop)`` block ranges, or None when the matrix
    is not exactly in that form (fallback path then applies).
    """
    n = a.shape[0]
    # off-bidiagonal entries must vanish exactly, not merely be small
    mask = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    mask[idx, idx] = True
    mask[idx[:-1], idx[:-1] + 1] = True
    if np.any(a[~mask] != 0):
        return None
    sup = np.diagonal(a, offset=1)
    if not np.all((sup == 0) | (sup == 1)):
        return None
    blocks: list[tuple[int, int]] = []
    start = 0
    for k in range(n - 1):
        if sup[k] == 1:
            if a[k, k] != a[k + 1, k + 1]:
                return None
        else:
            blocks.append((start, k + 1))
            start = k + 1
    if n:
        blocks.append((start, n))
    return blocks


def mat_exp(a, t: complex = 1.0) -> np.ndarray:
    """Return ``exp(A t)`` for a square complex matrix.

    For matrices already in Jordan canonical form (the shape every triplet
    matrix arrives in) the block formula ``exp((lam I + N) t) =
    exp(lam t) sum_k N^k t^k / k!`` is evaluated directly, which is exact up
    to roundoff.  Anything else goes through ``scipy.linalg.expm``.
    """
    a = require_square(as_cmatrix(a, "A"), "A")
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    t = complex(t)
    blocks = _jordan_blocks(a)
    if blocks is None:
        from scipy.linalg import expm

        return expm(a * t)
    out = np.zeros((n, n), dtype=np.complex128)
    for start, stop in blocks:
        m = stop - start
        lam = a[start, start]
        scale = np.exp(lam * t)
        term = 1.0 + 0.0j
        for k in range(m):
            if k:
                term *= t / k
            for i in range(m - k):
                out[start + i, start + i + k] = scale * term
    return out


# =============================================================================
# Inverse with conditioning diagnostics
# =============================================================================

def mat_inverse(a, condition_cap: float = DEFAULT_CONDITION_CAP) -> tuple[np.ndarray, float]:
    """Invert ``A`` and report a 2-norm condition estimate.

    The empty 0x0 matrix is its own inverse with condition 1 (it acts as the
    identity on a zero-dimensional space).  A condition estimate above
    ``condition_cap`` raises ``SingularMatrixError`` carrying the estimate.
    """
    a = require_square(as_cmatrix(a, "A"), "A")
    if a.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.complex128), 1.0
    try:
        cond = float(np.linalg.cond(a, 2))
    except np.linalg.LinAlgError:  # pragma: no cover - cond rarely fails
        cond = float("inf")
    if not math.isfinite(cond) or cond > condition_cap:
        raise SingularMatrixError(
            f"matrix is numerically singular (condition estimate {cond:.3e})",
            condition=cond,
        )
    inv = np.linalg.inv(a)
    return inv, cond


# =============================================================================
# Sylvester-type solve for the Gram matrices
# =============================================================================

def solve_sylvester(a, abar, b, cbar) -> np.ndarray:
    """Solve ``i M Abar - i A M = B Cbar`` for ``M``.

    ``A`` is N x N with spectrum in the open upper half plane and ``Abar`` is
    Nbar x Nbar with spectrum in the lower half plane, in which case the
    Sylvester operator is invertible and ``M`` equals the convergent integral
    ``int_0^inf exp(iAz) B Cbar exp(-i Abar z) dz``.

    The sizes here are tiny (a handful of bound states), so the operator is
    linearized with a Kronecker product and solved densely.
    """
    a = require_square(as_cmatrix(a, "A"), "A")
    abar = require_square(as_cmatrix(abar, "Abar"), "Abar")
    b = as_cmatrix(b, "B")
    cbar = as_cmatrix(cbar, "Cbar")
    n, nbar = a.shape[0], abar.shape[0]
    if b.shape != (n, 1):
        raise DimensionError(f"B must be {n}x1, got {b.shape}")
    if cbar.shape != (1, nbar):
        raise DimensionError(f"Cbar must be 1x{nbar}, got {cbar.shape}")
    if n == 0 or nbar == 0:
        return np.zeros((n, nbar), dtype=np.complex128)
    rhs = b @ cbar
    # column-major vec: (-iA) M + M (i Abar) = rhs  becomes
    # [I (x) (-iA) + (i Abar)^T (x) I] vec(M) = vec(rhs)
    op = np.kron(np.eye(nbar), -1j * a) + np.kron((1j * abar).T, np.eye(n))
    try:
        vec = np.linalg.solve(op, rhs.reshape(-1, order="F"))
    except np.linalg.LinAlgError as exc:
        raise SpectralOverlapError(
            "Sylvester operator is singular; spectra of A and Abar overlap"
        ) from exc
    m = vec.reshape((n, nbar), order="F")
    scale = np.linalg.norm(a) + np.linalg.norm(abar)
    residual = np.linalg.norm(1j * m @ abar - 1j * a @ m - rhs)
    floor = max(np.linalg.norm(m), 1.0)
    if scale and residual > 1e-8 * scale * floor:
        raise SpectralOverlapError(
            f"Sylvester solve residual {residual:.3e} too large; "
            "spectra of A and Abar are too close"
        )
    return m
