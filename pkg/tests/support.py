"""Shared test oracles.

Everything here recomputes quantities through routes independent of the code
under test: adaptive quadrature for expansion coefficients, direct cosine
series (no Clenshaw) for polynomial values, numpy's eigendecomposition for
matrix functions, and exhaustive sign-vector enumeration for expectations.
"""

import itertools
import math

import numpy as np

from entrace.chebyshev import entropy_function


def coeff_quadrature(k, x0):
    """Expansion coefficient of x*log(x) on [0, x0] by adaptive quadrature.

    a_k = (2/pi) integral_0^pi L(x0 (cos t + 1) / 2) cos(k t) dt.
    """
    from scipy.integrate import quad

    def f(t):
        return entropy_function(x0 * (math.cos(t) + 1.0) / 2.0)

    val, _ = quad(f, 0.0, math.pi, weight="cos", wvar=k,
                  limit=400, epsabs=1e-13, epsrel=1e-13)
    return 2.0 * val / math.pi


def poly_eval_cosine(expansion, x):
    """p_n(x) by the direct cosine series sum_k a_k cos(k arccos(2x/x0 - 1))."""
    t = np.clip(2.0 * np.asarray(x, dtype=np.float64) / expansion.x0 - 1.0, -1.0, 1.0)
    theta = np.arccos(t)
    a = expansion.coeffs
    out = 0.5 * a[0] * np.ones_like(theta)
    for k in range(1, a.size):
        out = out + a[k] * np.cos(k * theta)
    return out


def dense_poly_trace(A, expansion, gamma0):
    """gamma0 * tr(p_n(A / gamma0)) through numpy's dense eigenvalues."""
    lam = np.linalg.eigvalsh(A.to_dense())
    return gamma0 * float(np.sum(poly_eval_cosine(expansion, lam / gamma0)))


def dense_quadratic_form(A, v, expansion, gamma0):
    """gamma0 * v^T p_n(A / gamma0) v through numpy's dense eigenvectors."""
    lam, vec = np.linalg.eigh(A.to_dense())
    w = vec.T @ np.asarray(v, dtype=np.float64)
    return gamma0 * float(np.sum(w * w * poly_eval_cosine(expansion, lam / gamma0)))


def all_sign_vectors(m):
    """Every +-1 vector of length m, 2^m of them. Keep m small."""
    for signs in itertools.product((-1.0, 1.0), repeat=m):
        yield np.array(signs, dtype=np.float64)
