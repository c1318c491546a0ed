"""Command-line entry point: reproducible entropy runs as JSON reports.

Structured JSON goes to stdout, a one-line human summary to stderr. Exit
codes: 0 success, 1 computation error (with a machine-readable error object
on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from .estimator import (
    DEFAULT_N_MAX,
    RademacherSampler,
    ScalingParams,
    estimate_adaptive,
    estimate_fixed,
)
from .generators import SpdcParams, fem_matrix, random_psd, spdc_density_matrix
from .oracle import DENSE_CAP, NEG_EIG_RTOL, dense_spectrum, exact_entropy, fem_exact_entropy
from .sparse import (
    SpectralBound,
    gershgorin_upper_bound,
    power_iteration_bound,
    read_matrix_market,
    write_matrix_market,
)

TABLE1_SIZES = (10, 50, 100, 500, 1000, 5000)
TABLE1_DEGREES = (2, 3, 3, 4, 6, 8)

THREADS_ENV = "ENTRACE_THREADS"


@dataclass
class RunConfig:
    subcommand: str
    input_path: str | None = None
    generate_spec: str | None = None
    degree: int = 3
    confidence: float = 0.95
    samples: int | None = None
    seed: int = 0
    x0: float = 1.0
    gamma0: float | None = None
    bound_method: str = "gershgorin"
    normalize: bool = False
    n_max: int = DEFAULT_N_MAX
    verify_psd: bool = False
    cap: int = DENSE_CAP
    threads: int = 0
    sizes: tuple = TABLE1_SIZES
    degrees: tuple = TABLE1_DEGREES
    output: str | None = None

    def validate(self):
        if self.subcommand in ("entropy", "oracle"):
            if (self.input_path is None) == (self.generate_spec is None):
                raise UsageError("exactly one of --input or --generate is required")
        if not 0.0 < self.confidence < 1.0:
            raise UsageError("confidence must lie strictly between 0 and 1")
        if self.degree < 1:
            raise UsageError("degree must be at least 1")
        if self.samples is not None and self.samples < 1:
            raise UsageError("--samples must be at least 1")
        if len(self.sizes) != len(self.degrees):
            raise UsageError("--sizes and --degrees must have the same length")


class UsageError(Exception):
    pass


def default_threads():
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            k = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}")
        if k < 1:
            raise UsageError(f"{THREADS_ENV} must be at least 1")
        return k
    return os.cpu_count() or 1


def _load_matrix(config):
    """Resolve the input source to (matrix, source label, warnings)."""
    if config.input_path is not None:
        mat = read_matrix_market(config.input_path)
        return mat, config.input_path, []
    spec = config.generate_spec
    kind, _, rest = spec.partition(":")
    if kind == "fem":
        try:
            m = int(rest)
        except ValueError:
            raise UsageError(f"fem spec needs a size, e.g. fem:100, got {spec!r}")
        return fem_matrix(m), spec, []
    if kind == "spdc":
        params = SpdcParams() if rest in ("", "default") else SpdcParams.from_config(rest)
        mat = spdc_density_matrix(params)
        return mat, spec, list(mat.build_warnings)
    if kind == "random":
        parts = rest.split(":")
        if len(parts) != 2:
            raise UsageError(f"random spec is random:<m>:<seed>, got {spec!r}")
        try:
            m, seed = int(parts[0]), int(parts[1])
        except ValueError:
            raise UsageError(f"random spec is random:<m>:<seed>, got {spec!r}")
        spectrum = np.random.default_rng(seed).uniform(0.0, 1.0, size=m)
        return random_psd(m, seed, spectrum), spec, []
    raise UsageError(f"unknown generator kind {kind!r}; use fem:, spdc:, or random:")


def _verify_psd(mat, cap):
    if mat.dim > cap:
        raise ValueError(
            f"--verify-psd needs the dense oracle, which is capped at {cap}; "
            f"matrix has dimension {mat.dim}"
        )
    spec = dense_spectrum(mat, cap=cap)
    lam = spec.eigenvalues
    floor = -NEG_EIG_RTOL * float(np.max(np.abs(lam)))
    if lam[0] < floor:
        raise ValueError(f"matrix is not PSD: smallest eigenvalue {lam[0]}")


def _spectral_bound(mat, config):
    if config.gamma0 is not None:
        return SpectralBound(config.gamma0 * config.x0, "user-supplied")
    if config.bound_method == "power-iteration":
        return power_iteration_bound(mat, seed=config.seed)
    return gershgorin_upper_bound(mat)


def _emit(payload, config):
    text = json.dumps(payload, indent=2)
    print(text)
    if config.output and config.subcommand != "generate":
        with open(config.output, "w", encoding="ascii") as fh:
            fh.write(text + "\n")


def _run_entropy(config):
    mat, source, warnings = _load_matrix(config)
    if config.verify_psd:
        _verify_psd(mat, config.cap)
    bound = _spectral_bound(mat, config)
    tr = mat.trace()
    lam_upper = bound.lambda_max_upper
    if config.normalize:
        # scaling must describe the normalized state A / tr(A)
        lam_upper = lam_upper / tr if tr != 0.0 else lam_upper
    if lam_upper <= 0.0 and tr != 0.0:
        raise ValueError("spectral bound is zero but the trace is not; matrix is not PSD")
    prov = "user" if bound.method == "user-supplied" else bound.method
    scaling = ScalingParams(
        x0=config.x0,
        gamma0=lam_upper / config.x0 if lam_upper > 0.0 else 1.0,
        provenance=prov,
    )
    sampler = RademacherSampler(config.seed)
    threads = config.threads or default_threads()
    if config.samples is not None:
        est = estimate_fixed(mat, config.degree, config.samples, scaling, sampler,
                             p=config.confidence, normalize=config.normalize,
                             threads=threads)
    else:
        est = estimate_adaptive(mat, config.degree, config.confidence, scaling, sampler,
                                n_max=config.n_max, normalize=config.normalize,
                                threads=threads)
    payload = est.to_dict()
    payload["method"]["matrix"] = source
    payload["method"]["dim"] = mat.dim
    payload["method"]["threads"] = threads
    payload["method"]["warnings"] = warnings
    _emit(payload, config)
    print(
        f"entropy = {est.value:.6g} +- {est.tau:.4g} "
        f"(p={est.confidence}, N={est.samples_used}, n={est.degree}, m={mat.dim})",
        file=sys.stderr,
    )
    return 0


def _run_oracle(config):
    mat, source, warnings = _load_matrix(config)
    spec = dense_spectrum(mat, cap=config.cap)
    lam = spec.eigenvalues
    if config.normalize:
        tr = mat.trace()
        if tr == 0.0:
            raise ValueError("cannot normalize a matrix with zero trace")
        from .oracle import Spectrum

        value = exact_entropy(Spectrum(eigenvalues=np.sort(lam / tr)))
    else:
        value = exact_entropy(spec)
    payload = {
        "entropy": value,
        "min_eig": float(lam[0]),
        "max_eig": float(lam[-1]),
        "trace": mat.trace(),
        "method": {
            "route": "dense-jacobi",
            "normalized": config.normalize,
            "matrix": source,
            "dim": mat.dim,
            "warnings": warnings,
        },
    }
    _emit(payload, config)
    print(f"exact entropy = {value:.8g} (m={mat.dim})", file=sys.stderr)
    return 0


def _run_generate(config):
    if not config.output:
        raise UsageError("generate requires --output for the Matrix Market file")
    mat, source, warnings = _load_matrix(config)
    write_matrix_market(mat, config.output)
    payload = {
        "written": config.output,
        "dim": mat.dim,
        "nnz": mat.nnz,
        "source": source,
        "warnings": warnings,
    }
    print(json.dumps(payload, indent=2))
    print(f"wrote {source} ({mat.dim} x {mat.dim}, {mat.nnz} entries) to {config.output}",
          file=sys.stderr)
    return 0


def _run_table1(config):
    sampler = RademacherSampler(config.seed)
    threads = config.threads or default_threads()
    rows = []
    for m, n in zip(config.sizes, config.degrees):
        mat = fem_matrix(m)
        scaling = ScalingParams.from_bound(gershgorin_upper_bound(mat), x0=config.x0)
        est = estimate_adaptive(mat, n, config.confidence, scaling, sampler,
                                n_max=config.n_max, threads=threads)
        exact = fem_exact_entropy(m)
        abs_err = abs(est.value - exact)
        rows.append({
            "m": m,
            "n": n,
            "exact": exact,
            "estimate": est.value,
            "abs_err": abs_err,
            "rel_err": abs_err / abs(exact),
            "tau": est.tau,
            "samples": est.samples_used,
            "capped": est.capped,
        })
        print(
            f"m={m:<6d} n={n:<2d} exact={exact:<12.6g} estimate={est.value:<12.6g} "
            f"rel_err={100.0 * abs_err / abs(exact):.4f}% tau={est.tau:.4g} "
            f"N={est.samples_used}",
            file=sys.stderr,
        )
    payload = {"confidence": config.confidence, "seed": config.seed, "rows": rows}
    _emit(payload, config)
    return 0


_RUNNERS = {
    "entropy": _run_entropy,
    "oracle": _run_oracle,
    "generate": _run_generate,
    "table1": _run_table1,
}


def run(config):
    """Execute a validated RunConfig; returns the process exit code."""
    try:
        config.validate()
        return _RUNNERS[config.subcommand](config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - boundary: report and exit nonzero
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}))
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _int_list(text):
    return tuple(int(tok) for tok in text.split(",") if tok)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="entrace",
        description="Stochastic von Neumann entropy of sparse symmetric PSD matrices.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_input(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--input", help="Matrix Market file to read")
        group.add_argument(
            "--generate",
            help="synthesize the input: fem:<m>, spdc:default, spdc:<config>, "
            "random:<m>:<seed>",
        )

    p_ent = sub.add_parser("entropy", help="estimate -tr(A log A) by sampling")
    add_input(p_ent)
    p_ent.add_argument("-n", "--degree", type=int, default=3,
                       help="Chebyshev degree (default 3)")
    p_ent.add_argument("-p", "--confidence", type=float, default=0.95,
                       help="confidence level in (0,1) (default 0.95)")
    p_ent.add_argument("--samples", type=int, default=None,
                       help="fixed sample count; omit for the adaptive loop")
    p_ent.add_argument("--seed", type=int, default=0, help="probe stream seed (default 0)")
    p_ent.add_argument("--x0", type=float, default=1.0,
                       help="approximation interval endpoint (default 1)")
    p_ent.add_argument("--gamma0", type=float, default=None,
                       help="user spectral scaling; overrides --bound")
    p_ent.add_argument("--bound", dest="bound_method", default="gershgorin",
                       choices=("gershgorin", "power-iteration"),
                       help="how to bound lambda_max (default gershgorin)")
    p_ent.add_argument("--normalize", action="store_true",
                       help="estimate the entropy of A / tr(A)")
    p_ent.add_argument("--n-max", type=int, default=DEFAULT_N_MAX,
                       help="adaptive sample cap (default 10000)")
    p_ent.add_argument("--verify-psd", action="store_true",
                       help="check PSD via the dense oracle first (small matrices only)")
    p_ent.add_argument("--threads", type=int, default=0,
                       help=f"worker threads (default: ${THREADS_ENV} or all cores)")
    p_ent.add_argument("-o", "--output", default=None, help="also write the JSON here")

    p_or = sub.add_parser("oracle", help="exact entropy via dense eigendecomposition")
    add_input(p_or)
    p_or.add_argument("--cap", type=int, default=DENSE_CAP,
                      help=f"dense size cap (default {DENSE_CAP})")
    p_or.add_argument("--normalize", action="store_true",
                      help="entropy of A / tr(A) instead of A")
    p_or.add_argument("-o", "--output", default=None, help="also write the JSON here")

    p_gen = sub.add_parser("generate", help="write a generated matrix as Matrix Market")
    add_input(p_gen)
    p_gen.add_argument("-o", "--output", required=True, help="target .mtx path")

    p_t1 = sub.add_parser("table1", help="reference table: estimate vs closed form")
    p_t1.add_argument("--sizes", type=_int_list, default=TABLE1_SIZES,
                      help="comma-separated matrix sizes")
    p_t1.add_argument("--degrees", type=_int_list, default=TABLE1_DEGREES,
                      help="comma-separated Chebyshev degrees, one per size")
    p_t1.add_argument("-p", "--confidence", type=float, default=0.95)
    p_t1.add_argument("--seed", type=int, default=0)
    p_t1.add_argument("--x0", type=float, default=1.0)
    p_t1.add_argument("--n-max", type=int, default=DEFAULT_N_MAX)
    p_t1.add_argument("--threads", type=int, default=0)
    p_t1.add_argument("-o", "--output", default=None, help="also write the JSON here")
    return parser


def config_from_args(args):
    fields = {
        "subcommand": args.subcommand,
        "input_path": getattr(args, "input", None),
        "generate_spec": getattr(args, "generate", None),
        "degree": getattr(args, "degree", 3),
        "confidence": getattr(args, "confidence", 0.95),
        "samples": getattr(args, "samples", None),
        "seed": getattr(args, "seed", 0),
        "x0": getattr(args, "x0", 1.0),
        "gamma0": getattr(args, "gamma0", None),
        "bound_method": getattr(args, "bound_method", "gershgorin"),
        "normalize": getattr(args, "normalize", False),
        "n_max": getattr(args, "n_max", DEFAULT_N_MAX),
        "verify_psd": getattr(args, "verify_psd", False),
        "cap": getattr(args, "cap", DENSE_CAP),
        "threads": getattr(args, "threads", 0),
        "sizes": tuple(getattr(args, "sizes", TABLE1_SIZES)),
        "degrees": tuple(getattr(args, "degrees", TABLE1_DEGREES)),
        "output": getattr(args, "output", None),
    }
    return RunConfig(**fields)


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run(config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
