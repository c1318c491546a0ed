"""Dense ground truth at desk scale: Jacobi eigensolver and exact entropies.

Everything here is for validating the stochastic estimator on matrices small
enough to decompose, plus closed-form references that need no matrix at all.
The eigensolver is a cyclic Jacobi sweep; it is independent of the Chebyshev
and sampling machinery by construction, so agreement between the two routes
is evidence, not circularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chebyshev import entropy_function

DENSE_CAP = 2000

# eigenvalues more negative than -NEG_EIG_RTOL * max|lambda| break the PSD
# contract; anything closer to zero is treated as rounding and clamped
NEG_EIG_RTOL = 1e-9


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a symmetric matrix, sorted ascending."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.eigenvalues, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("spectrum must be a nonempty 1-D array")
        if np.any(np.diff(arr) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        arr.setflags(write=False)
        object.__setattr__(self, "eigenvalues", arr)


def _jacobi(a, want_vectors, tol_factor=1e-12, max_sweeps=60):
    """Cyclic Jacobi with a threshold skip; returns (diag, V or None).

    Rotations zero one off-diagonal pair at a time; sweeps repeat until the
    off-diagonal Frobenius norm falls below tol_factor times the full norm.
    """
    a = np.array(a, dtype=np.float64)
    m = a.shape[0]
    vec = np.eye(m) if want_vectors else None
    fro = float(np.linalg.norm(a))
    if m == 1 or fro == 0.0:
        return np.diag(a).copy(), vec
    target = tol_factor * fro
    # once every pivot is below target / (2m), the off-norm is below target
    skip = target / (2.0 * m)
    od = np.empty_like(a)
    for _ in range(max_sweeps):
        # off-norm from the off-diagonal entries themselves; the difference
        # of squared norms cancels catastrophically once nearly converged
        np.copyto(od, a)
        np.fill_diagonal(od, 0.0)
        off = float(np.linalg.norm(od))
        if off <= target:
            break
        for p in range(m - 1):
            for q in range(p + 1, m):
                apq = a[p, q]
                if abs(apq) <= skip:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(1.0 + theta * theta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    vp = vec[:, p].copy()
                    vec[:, p] = c * vp - s * vec[:, q]
                    vec[:, q] = s * vp + c * vec[:, q]
    diag = np.diag(a).copy()
    order = np.argsort(diag, kind="stable")
    if want_vectors:
        vec = vec[:, order]
    return diag[order], vec


def dense_eigh(A, cap=DENSE_CAP):
    """Full eigendecomposition (eigenvalues ascending, eigenvector columns).

    Refuses matrices with dimension above ``cap``: the dense transform costs
    O(m^3) time and O(m^2) memory, which is the regime the stochastic
    estimator exists to avoid.
    """
    if A.dim > cap:
        raise ValueError(
            f"dimension {A.dim} exceeds the dense oracle cap {cap}; "
            "use the stochastic estimator for matrices this large"
        )
    w, v = _jacobi(A.to_dense(), want_vectors=True)
    return w, v


def dense_spectrum(A, cap=DENSE_CAP):
    """Eigenvalues only, for matrices of dimension at most ``cap``."""
    if A.dim > cap:
        raise ValueError(
            f"dimension {A.dim} exceeds the dense oracle cap {cap}; "
            "use the stochastic estimator for matrices this large"
        )
    w, _ = _jacobi(A.to_dense(), want_vectors=False)
    return Spectrum(eigenvalues=w)


def exact_entropy(spectrum):
    """-sum_i lambda_i log(lambda_i) over the spectrum, in nats.

    Eigenvalues in [-tol, 0) for tol = 1e-9 * max|lambda| are rounding
    artifacts of the decomposition and are clamped to zero; anything more
    negative means the matrix was not PSD and is an error.
    """
    lam = np.asarray(spectrum.eigenvalues, dtype=np.float64)
    scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    floor = -NEG_EIG_RTOL * scale
    if np.any(lam < floor):
        worst = float(lam.min())
        raise ValueError(f"eigenvalue {worst} is negative beyond rounding; matrix is not PSD")
    lam = np.maximum(lam, 0.0)
    return float(-np.sum(entropy_function(lam)))


def fem_exact_entropy(m):
    """Closed-form entropy of the (2, -1) tridiagonal second-difference matrix.

    Its eigenvalues are 4 sin^2(i pi / (2m + 2)) for i = 1..m, so the entropy
    is a plain sum with no decomposition. Grows like -2m + 0.7726 for large m.
    """
    m = int(m)
    if m < 1:
        raise ValueError("dimension must be at least 1")
    i = np.arange(1, m + 1, dtype=np.float64)
    lam = 4.0 * np.sin(i * math.pi / (2.0 * m + 2.0)) ** 2
    return float(-np.sum(lam * np.log(lam)))
