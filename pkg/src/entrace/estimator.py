"""Rademacher-probe entropy estimation with Hoeffding-style confidence radii.

The estimate of -tr(L(A)) is a Monte Carlo average of quadratic forms
xi_i = gamma0 * w_i^T p_n(A / gamma0) w_i over +-1 probe vectors w_i, shifted
by the scaling identity term log(gamma0) * tr(A). Because each probe form is
confined to a computable envelope, a Hoeffding argument yields both the
number of samples needed for a target confidence and an a-posteriori radius
tau such that |estimate - E(A)| <= tau with probability at least p.

Every sample is a pure function of (seed, sample index), so runs are
reproducible regardless of thread count or early stopping.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .chebyshev import coefficients
from .clenshaw import ClenshawWorkspace, quadratic_form
from .sparse import SpectralBound

DEFAULT_N_MAX = 10_000


@dataclass(frozen=True)
class RademacherSampler:
    """Reproducible stream of +-1 probe vectors.

    Vector i is a pure function of (seed, i): each index spawns its own child
    of the seed's SeedSequence, so any subset of the stream can be generated
    in any order, on any thread, with identical results.
    """

    seed: int

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")

    def sample_vector(self, m, index):
        """Probe vector number ``index`` (1-based) of length m, entries +-1."""
        if m < 1:
            raise ValueError("dimension must be at least 1")
        if index < 1:
            raise ValueError("sample index is 1-based")
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(index,))
        rng = np.random.Generator(np.random.PCG64(ss))
        return rng.integers(0, 2, size=m).astype(np.float64) * 2.0 - 1.0


@dataclass(frozen=True)
class ScalingParams:
    """Spectral rescaling sigma(A) subseteq [0, x0 * gamma0].

    x0 is the approximation interval of the Chebyshev series and gamma0 the
    matrix prefactor in the identity
    E(A) = -gamma0 tr(L(A / gamma0)) - log(gamma0) tr(A).
    """

    x0: float
    gamma0: float
    provenance: str = "user"

    def __post_init__(self):
        if not self.x0 > 0.0:
            raise ValueError("x0 must be positive")
        if not self.gamma0 > 0.0:
            raise ValueError("gamma0 must be positive")
        if self.provenance not in ("gershgorin", "power-iteration", "user"):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @classmethod
    def from_bound(cls, bound: SpectralBound, x0=1.0):
        """Split an eigenvalue upper bound into (x0, gamma0) with x0*gamma0 = bound.

        x0 = 1 minimizes the sample-count constant; see spread_function.
        """
        if not bound.lambda_max_upper > 0.0:
            raise ValueError(
                "spectral bound must be positive to derive a scaling; "
                "a bound of zero means the matrix is zero and its entropy is 0"
            )
        prov = "user" if bound.method == "user-supplied" else bound.method
        return cls(x0=float(x0), gamma0=bound.lambda_max_upper / float(x0), provenance=prov)


@dataclass(frozen=True)
class EntropyEstimate:
    """Result of a sampling run, with enough metadata to audit or replay it.

    ``value`` estimates the entropy -tr(A log A) in nats; |value - truth| <=
    ``tau`` with probability at least ``confidence`` (over the probe draw,
    conditional on the scaling bound actually containing the spectrum).
    """

    value: float
    tau: float
    confidence: float
    samples_used: int
    degree: int
    delta: float
    xi_min: float
    xi_max: float
    trace: float
    scaling: ScalingParams
    seed: int
    capped: bool
    normalized: bool = False
    zero_trace: bool = False
    estimator: str = "adaptive"

    def to_dict(self):
        """JSON-ready dict with a stable key order."""
        return {
            "entropy": self.value,
            "tau": self.tau,
            "confidence": self.confidence,
            "samples": self.samples_used,
            "degree": self.degree,
            "delta": self.delta,
            "gamma0": self.scaling.gamma0,
            "x0": self.scaling.x0,
            "trace": self.trace,
            "seed": self.seed,
            "capped": self.capped,
            "method": {
                "estimator": self.estimator,
                "bound": self.scaling.provenance,
                "normalized": self.normalized,
                "zero_trace": self.zero_trace,
                "xi_min": self.xi_min,
                "xi_max": self.xi_max,
            },
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)


def hutchinson_trace(A, sampler, num_samples):
    """Plain stochastic trace (1/N) sum w_i^T A w_i; unbiased for tr(A)."""
    if num_samples < 1:
        raise ValueError("need at least one sample")
    total = 0.0
    for i in range(1, num_samples + 1):
        w = sampler.sample_vector(A.dim, i)
        total += float(w @ A.matvec(w))
    return total / num_samples


def sample_count(delta, n, p, m, x0, gamma0):
    """Samples needed so the confidence radius hits the truncation floor.

    N = ceil( 2 n^2 (n+1)^2 delta^2 log(2 / (1-p)) / (m x0 gamma0)^2 ),
    at least 1. delta is the Hoeffding range of a single probe form,
    including the polynomial-error widening.
    """
    _check_hoeffding_args(n, p, m, x0, gamma0)
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    num = 2.0 * (n * (n + 1.0)) ** 2 * delta * delta * math.log(2.0 / (1.0 - p))
    den = (m * x0 * gamma0) ** 2
    return max(1, math.ceil(num / den))


def error_tolerance(delta, n, num_samples, p, m, x0, gamma0):
    """A-posteriori radius tau: truncation floor plus the Hoeffding deviation.

    tau = m x0 gamma0 / (2 n (n+1)) + delta * sqrt(log(2/(1-p)) / (2 N)).
    """
    _check_hoeffding_args(n, p, m, x0, gamma0)
    if delta < 0.0:
        raise ValueError("delta must be nonnegative")
    if num_samples < 1:
        raise ValueError("need at least one sample")
    floor = m * x0 * gamma0 / (2.0 * n * (n + 1.0))
    return floor + delta * math.sqrt(math.log(2.0 / (1.0 - p)) / (2.0 * num_samples))


def _check_hoeffding_args(n, p, m, x0, gamma0):
    if n < 1:
        raise ValueError("degree must be at least 1")
    if not 0.0 < p < 1.0:
        raise ValueError("confidence must lie strictly between 0 and 1")
    if m < 1:
        raise ValueError("dimension must be at least 1")
    if not (x0 > 0.0 and gamma0 > 0.0):
        raise ValueError("x0 and gamma0 must be positive")


def _xi_batch(A, expansion, gamma0, sampler, first, last, threads, workspace=None):
    """Probe forms xi_first..xi_last in index order.

    With threads its a deterministic map: sample i never depends on any other
    sample, and the reduction below consumes results in index order, so the
    outcome is independent of the worker count.
    """
    indices = range(first, last + 1)
    if threads <= 1:
        ws = workspace if workspace is not None else ClenshawWorkspace(A.dim)
        return [
            quadratic_form(A, sampler.sample_vector(A.dim, i), expansion, gamma0, workspace=ws)
            for i in indices
        ]

    def one(i):
        return quadratic_form(A, sampler.sample_vector(A.dim, i), expansion, gamma0)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, indices))


def _zero_trace_estimate(n, p, scaling, sampler, normalize, estimator):
    return EntropyEstimate(
        value=0.0,
        tau=0.0,
        confidence=p,
        samples_used=0,
        degree=n,
        delta=0.0,
        xi_min=0.0,
        xi_max=0.0,
        trace=0.0,
        scaling=scaling,
        seed=sampler.seed,
        capped=False,
        normalized=normalize,
        zero_trace=True,
        estimator=estimator,
    )


def _setup(A, n, scaling, normalize):
    """Common wiring; returns (trace, norm_scale, gamma_clenshaw, trace_eff, expansion).

    With normalize=True the estimated state is A / tr(A) (the entropy of a
    density matrix handed in unnormalized) and ``scaling`` must be valid for
    that state: x0 * gamma0 >= lambda_max(A) / tr(A). The stored entries are
    never rescaled; the Clenshaw recurrence consumes A with the widened
    parameter gamma0 * tr(A), because (A/t) / gamma0 = A / (gamma0 t), and
    each probe form is divided by tr(A) afterwards. All Hoeffding quantities
    use the state's own (x0, gamma0) unchanged.
    """
    tr = A.trace()
    norm_scale = tr if normalize else 1.0
    gamma_clenshaw = scaling.gamma0 * norm_scale
    trace_eff = 1.0 if normalize else tr
    expansion = coefficients(n, scaling.x0)
    return tr, norm_scale, gamma_clenshaw, trace_eff, expansion


def estimate_fixed(A, n, num_samples, scaling, sampler, p=0.95, normalize=False, threads=1):
    """Entropy estimate from a fixed number of probe samples.

    delta and tau are computed a posteriori from the realized extreme probe
    forms, so tau is a valid radius for the estimate actually produced, at
    confidence p. Use estimate_adaptive to choose N instead.
    """
    if num_samples < 1:
        raise ValueError("need at least one sample")
    _check_hoeffding_args(n, p, A.dim, scaling.x0, scaling.gamma0)
    tr = A.trace()
    if normalize and tr == 0.0:
        raise ValueError("cannot normalize a matrix with zero trace")
    if tr == 0.0:
        return _zero_trace_estimate(n, p, scaling, sampler, normalize, "fixed")
    _, norm_scale, gamma_clenshaw, trace_eff, expansion = _setup(A, n, scaling, normalize)

    xis_raw = _xi_batch(A, expansion, gamma_clenshaw, sampler, 1, num_samples, threads)
    xis = [x / norm_scale for x in xis_raw]
    xi_min = min(xis)
    xi_max = max(xis)
    m = A.dim
    floor_width = m * scaling.x0 * scaling.gamma0 / (n * (n + 1.0))
    delta = (xi_max - xi_min) + floor_width
    value = -sum(xis) / num_samples - math.log(scaling.gamma0) * trace_eff
    tau = error_tolerance(delta, n, num_samples, p, m, scaling.x0, scaling.gamma0)
    return EntropyEstimate(
        value=value,
        tau=tau,
        confidence=p,
        samples_used=num_samples,
        degree=n,
        delta=delta,
        xi_min=xi_min,
        xi_max=xi_max,
        trace=tr,
        scaling=scaling,
        seed=sampler.seed,
        capped=False,
        normalized=normalize,
        zero_trace=False,
        estimator="fixed",
    )


def estimate_adaptive(A, n, p, scaling, sampler, n_max=DEFAULT_N_MAX,
                      normalize=False, threads=1):
    """Entropy estimate with the sample count chosen while sampling.

    Starts from N = 1 and, after every sample, re-derives the required count
    from the running extreme probe forms; the requirement only grows, so the
    loop ends with exactly N samples consumed. If the requirement exceeds
    ``n_max`` the run is truncated there and flagged ``capped`` (tau still
    honestly reflects the smaller N).

    Determinism: sample i depends only on (seed, i), and the count update
    consumes samples in index order even when a batch was computed in
    parallel, so the result is identical for any ``threads``.
    """
    _check_hoeffding_args(n, p, A.dim, scaling.x0, scaling.gamma0)
    if n_max < 8:
        raise ValueError("n_max below 8 cannot cover the zero-spread sample count")
    tr = A.trace()
    if normalize and tr == 0.0:
        raise ValueError("cannot normalize a matrix with zero trace")
    if tr == 0.0:
        return _zero_trace_estimate(n, p, scaling, sampler, normalize, "adaptive")
    _, norm_scale, gamma_clenshaw, trace_eff, expansion = _setup(A, n, scaling, normalize)

    m = A.dim
    floor_width = m * scaling.x0 * scaling.gamma0 / (n * (n + 1.0))
    xi_min = math.inf
    xi_max = -math.inf
    xi_sum = 0.0
    delta = floor_width
    drawn = 0
    needed = 1
    capped = False
    ws = ClenshawWorkspace(m) if threads <= 1 else None
    while drawn < needed:
        batch = _xi_batch(A, expansion, gamma_clenshaw, sampler,
                          drawn + 1, needed, threads, workspace=ws)
        for xi_raw in batch:
            drawn += 1
            xi = xi_raw / norm_scale
            xi_sum += xi
            if xi < xi_min:
                xi_min = xi
            if xi > xi_max:
                xi_max = xi
            delta = (xi_max - xi_min) + floor_width
            want = sample_count(delta, n, p, m, scaling.x0, scaling.gamma0)
            if want > n_max:
                capped = True
            # the requirement is nondecreasing in delta, so never below drawn
            needed = min(n_max, max(want, needed))

    value = -xi_sum / needed - math.log(scaling.gamma0) * trace_eff
    tau = error_tolerance(delta, n, needed, p, m, scaling.x0, scaling.gamma0)
    return EntropyEstimate(
        value=value,
        tau=tau,
        confidence=p,
        samples_used=needed,
        degree=n,
        delta=delta,
        xi_min=xi_min,
        xi_max=xi_max,
        trace=tr,
        scaling=scaling,
        seed=sampler.seed,
        capped=capped,
        normalized=normalize,
        zero_trace=False,
        estimator="adaptive",
    )


def entropy_with_normalization(A, n, p, scaling, sampler, n_max=DEFAULT_N_MAX,
                               normalize=True, threads=1):
    """Adaptive estimate of the entropy of the normalized state A / tr(A).

    ``scaling`` must be valid for the normalized matrix, i.e.
    x0 * gamma0 >= lambda_max(A) / tr(A); divide a bound on A by its trace to
    get one. A zero trace is an error since no normalizable state exists.
    """
    return estimate_adaptive(A, n, p, scaling, sampler, n_max=n_max,
                             normalize=normalize, threads=threads)
