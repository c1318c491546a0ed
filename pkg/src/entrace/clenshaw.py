"""Backward Clenshaw recurrence for quadratic forms v^T p_n(A / gamma0) v.

Given the Chebyshev expansion of x*log(x) on [0, x0] and a matrix with
spectrum inside [0, x0 * gamma0], the form gamma0 * v^T p_n(A / gamma0) v is
accumulated with n matrix-vector products and no similarity transform of A.
"""

from __future__ import annotations

import numpy as np


class ClenshawWorkspace:
    """Three rotating length-m buffers for the backward recurrence.

    Reusing one workspace across the sample loop avoids reallocating the
    iterate vectors once per polynomial degree per sample.
    """

    __slots__ = ("y_cur", "y_next", "y_after")

    def __init__(self, dim):
        if dim < 1:
            raise ValueError("dimension must be at least 1")
        self.y_cur = np.zeros(dim)
        self.y_next = np.zeros(dim)
        self.y_after = np.zeros(dim)

    def reset(self):
        self.y_cur[:] = 0.0
        self.y_next[:] = 0.0
        self.y_after[:] = 0.0


def quadratic_form(A, v, expansion, gamma0, workspace=None):
    """gamma0 * v^T p_n(A / gamma0) v for a +-1 probe vector v.

    The argument matrix A / gamma0 is never formed: the recurrence applies
    A through matvec and folds the 2 * (2x/(x0 gamma0)) - 1 rescaling of the
    Chebyshev variable into the iteration constants. The constant term a_0
    enters the result only through the closed form v^T (a_0/2) v = m a_0 / 2,
    never through the recurrence, so it is not double counted.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (A.dim,):
        raise ValueError(f"probe vector length {v.shape} does not match dimension {A.dim}")
    if not np.all(np.abs(v) == 1.0):
        raise ValueError("probe vector entries must be +-1")
    gamma0 = float(gamma0)
    if not gamma0 > 0.0:
        raise ValueError("gamma0 must be positive")
    n = expansion.degree
    if n < 1:
        raise ValueError("matrix Clenshaw requires degree >= 1")

    ws = workspace if workspace is not None else ClenshawWorkspace(A.dim)
    ws.reset()
    y_cur, y_next, y_after = ws.y_cur, ws.y_next, ws.y_after

    a = expansion.coeffs
    scale = 4.0 / (expansion.x0 * gamma0)

    # k = n: y_{n+1} and y_{n+2} are zero, the matvec would be on a zero vector
    y_next[:] = a[n] * v
    for k in range(n - 1, 0, -1):
        y_cur[:] = a[k] * v + scale * A.matvec(y_next) - 2.0 * y_next - y_after
        y_cur, y_next, y_after = y_after, y_cur, y_next
    # k = 0: recurrence part only; a_0 is supplied by the m * a_0 term below
    y_cur[:] = scale * A.matvec(y_next) - 2.0 * y_next - y_after

    m = A.dim
    return 0.5 * gamma0 * (m * a[0] + float(v @ (y_cur - y_after)))
