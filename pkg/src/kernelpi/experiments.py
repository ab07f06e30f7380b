"""Benchmark studies: error decay ladders, spatial maps, and property checks.

Every study runs against the closed-form two-state benchmark.  Ladder studies
sweep center-grid resolutions, record errors against the known references,
and fit a straight line to the logarithms of error versus fill distance.
Value errors are reported for the origin-anchored estimate (see
:func:`kernelpi.galerkin.anchored_values`); a companion column stores the
error modulo constants, which is the part of the estimate the residual
actually controls.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, fields

import numpy as np

from .dynamics import Policy, benchmark_system
from .errors import UnsupportedDerivativeError
from .galerkin import assemble, residual_norm, solve_value
from .geometry import CenterSet, Domain, fill_distance, grid_centers
from .kernels import Kernel, grad_x, gram, kernel_eval
from .native import power_function
from .policy_iteration import (
    controller_error,
    eval_policy_batch,
    policy_iterate,
    policy_update,
)
from .quadrature import gauss_legendre_tensor


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings shared by the benchmark studies and the command-line tools."""

    lower: tuple = (-1.0, -1.0)
    upper: tuple = (1.0, 1.0)
    family: str = "matern52"
    lengthscale: float = 0.5
    variance: float = 1.0
    grids: tuple = (5, 7, 9, 11)
    grid: int = 9
    quadrature_order: int = 40
    probe_n: int = 101
    # 241 per axis puts the worst-case cell midpoints of every default ladder
    # grid exactly on the probe, so reported fill distances are not biased low
    fill_probe_n: int = 241
    pi_tol: float = 1e-6
    pi_max_iter: int = 20
    mu0_gain: float = -3.0
    rounds: int = 2
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        if len(self.grids) < 1 or any(n < 1 for n in self.grids):
            raise ValueError("grids must be positive integers")
        if self.grid < 1 or self.quadrature_order < 1:
            raise ValueError("grid sizes and quadrature order must be >= 1")
        if self.probe_n < 2 or self.fill_probe_n < 2:
            raise ValueError("probe resolutions must be >= 2")
        if self.pi_tol <= 0 or self.pi_max_iter < 0:
            raise ValueError("pi_tol must be positive and pi_max_iter >= 0")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")

    def domain(self):
        return Domain(np.asarray(self.lower), np.asarray(self.upper))

    def kernel(self):
        return Kernel(self.family, self.lengthscale, self.variance)

    def rule(self):
        return gauss_legendre_tensor(self.domain(), self.quadrature_order)

    def mu0(self):
        gain = self.mu0_gain
        return Policy(fn=lambda x: np.array([gain * x[1]]), provenance="explicit-formula")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line through (log h, log error) with fit quality."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int
    degenerate: bool = False


@dataclass(frozen=True)
class DecayRecord:
    """One ladder point of an error-decay study."""

    kernel_family: str
    n_centers: int
    fill_dist: float
    sup_error: float
    sup_error_modc: float
    h_error: float
    pe_margin: float
    residual: float
    condition: float = float("nan")
    jitter: float = 0.0
    converged: bool | None = None
    iterations: int | None = None


def fit_decay(h_values, errors, noise_floor=1e-9):
    """Fit log(error) against log(h); returns None for fewer than two points.

    When every error sits at the solver noise floor the fit carries no rate
    information and is flagged degenerate.
    """
    h_values = np.asarray(h_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if len(h_values) < 2:
        return None
    if np.max(errors) < noise_floor:
        return SlopeFit(slope=float("nan"), intercept=float("nan"),
                        r_squared=float("nan"), n_points=len(errors), degenerate=True)
    log_h, log_e = np.log(h_values), np.log(errors)
    slope, intercept = np.polyfit(log_h, log_e, 1)
    predicted = slope * log_h + intercept
    ss_res = float(np.sum((log_e - predicted) ** 2))
    ss_tot = float(np.sum((log_e - log_e.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return SlopeFit(slope=float(slope), intercept=float(intercept),
                    r_squared=r_squared, n_points=len(errors))


def _batch_scalar(fn, X):
    return np.array([fn(x) for x in X])


def exact_policy_solve(cfg, n_per_dim, kernel=None):
    """Single value solve under the known optimal feedback.

    Returns ``(approximant, galerkin_system, centers)`` for one center grid.
    """
    bench = benchmark_system()
    domain = cfg.domain()
    kernel = kernel or cfg.kernel()
    centers = grid_centers(domain, n_per_dim)
    gsys = assemble(kernel, centers, bench.system, bench.policy, bench.cost, cfg.rule())
    value = solve_value(gsys, kernel, centers)
    return value, gsys, centers


def convergence_study(cfg, kernel=None):
    """Value-error decay under the exact feedback across the grid ladder.

    For each grid size: build centers, solve, and record the worst probe-grid
    error of the anchored value estimate against the known value function,
    alongside the fill distance.  Returns the records and the slope fit of
    log sup-error against log fill distance.
    """
    if len(cfg.grids) < 3:
        raise ValueError("a convergence study needs at least 3 grid sizes")
    bench = benchmark_system()
    domain = cfg.domain()
    kernel = kernel or cfg.kernel()
    probe = domain.grid(cfg.probe_n)
    reference = _batch_scalar(bench.value, probe)
    records = []
    for n in cfg.grids:
        value, gsys, centers = exact_policy_solve(cfg, n, kernel=kernel)
        h = fill_distance(centers, domain, cfg.fill_probe_n)
        raw = value.value(probe)
        anchored = raw - value.value(np.zeros(domain.dim))
        err = raw - reference
        records.append(DecayRecord(
            kernel_family=kernel.family,
            n_centers=len(centers),
            fill_dist=h,
            sup_error=float(np.abs(anchored - reference).max()),
            sup_error_modc=float(0.5 * (err.max() - err.min())),
            h_error=float("nan"),
            pe_margin=gsys.pe_margin,
            residual=residual_norm(gsys, value.coefficients),
            condition=gsys.condition_estimate,
            jitter=value.factorization.jitter,
        ))
    fit = fit_decay([r.fill_dist for r in records], [r.sup_error for r in records])
    return records, fit


def pi_decay_study(cfg):
    """Controller-error decay of full policy iteration across the grid ladder.

    Runs policy iteration from the configured linear feedback at every grid
    size and records the final worst-case feedback error against the optimal
    controller.  Single-size ladders yield one record and no slope fit.
    """
    from .dynamics import verify_stabilizing
    from .errors import UnstablePolicyError

    bench = benchmark_system()
    domain = cfg.domain()
    kernel = cfg.kernel()
    rule = cfg.rule()
    mu0 = cfg.mu0()
    # one gate for the shared initial policy instead of one per ladder point
    if not verify_stabilizing(bench.system, mu0, domain).passed:
        raise UnstablePolicyError("configured initial policy failed the stabilization check")
    records = []
    for n in cfg.grids:
        centers = grid_centers(domain, n)
        result = policy_iterate(kernel, centers, bench.system, bench.cost, mu0,
                                rule, tol=cfg.pi_tol, max_iter=cfg.pi_max_iter,
                                domain=domain, probe_n=cfg.probe_n,
                                check_stabilizing=False)
        last = result.iterates[-1]
        err = controller_error(last.policy, bench.policy, domain, cfg.probe_n)
        records.append(DecayRecord(
            kernel_family=kernel.family,
            n_centers=len(centers),
            fill_dist=fill_distance(centers, domain, cfg.fill_probe_n),
            sup_error=err,
            sup_error_modc=err,
            h_error=float("nan"),
            pe_margin=last.pe_margin,
            residual=last.residual,
            condition=last.condition,
            jitter=last.value.factorization.jitter,
            converged=result.converged,
            iterations=result.iterations_used,
        ))
    fit = fit_decay([r.fill_dist for r in records], [r.sup_error for r in records])
    return records, fit


@dataclass(frozen=True)
class ErrorMapResult:
    """Controller-error field over the probe grid, with center-distance deciles."""

    points: np.ndarray
    errors: np.ndarray
    centers: CenterSet
    near_decile_mean: float
    far_decile_mean: float


def error_map(cfg, n_per_dim=None):
    """Spatial map of feedback error for the exact-feedback solve.

    Also summarizes the error contrast between probe points nearest to the
    centers (lowest distance decile) and farthest from them (highest decile);
    errors concentrate away from the centers.
    """
    from scipy.spatial.distance import cdist

    n = n_per_dim or cfg.grid
    bench = benchmark_system()
    domain = cfg.domain()
    value, _, centers = exact_policy_solve(cfg, n)
    fitted = policy_update(value, bench.system, bench.cost.R)
    probe = domain.grid(cfg.probe_n)
    diff = eval_policy_batch(fitted, probe) - eval_policy_batch(bench.policy, probe)
    errors = np.abs(diff).max(axis=1)
    nearest = cdist(probe, centers.points).min(axis=1)
    lo, hi = np.quantile(nearest, [0.1, 0.9])
    return ErrorMapResult(
        points=probe,
        errors=errors,
        centers=centers,
        near_decile_mean=float(errors[nearest <= lo].mean()),
        far_decile_mean=float(errors[nearest >= hi].mean()),
    )


@dataclass(frozen=True)
class PowerMapResult:
    """Power-function field over the probe grid plus the greedy candidate."""

    points: np.ndarray
    values: np.ndarray
    centers: CenterSet
    candidate: np.ndarray
    max_power: float


def power_map(cfg, n_per_dim=None):
    """Power function over the probe grid and the next greedy center."""
    n = n_per_dim or cfg.grid
    domain = cfg.domain()
    kernel = cfg.kernel()
    centers = grid_centers(domain, n)
    probe = domain.grid(cfg.probe_n)
    values = power_function(kernel, centers, probe)
    best = int(np.argmax(values))
    return PowerMapResult(points=probe, values=values, centers=centers,
                          candidate=probe[best].copy(), max_power=float(values[best]))


@dataclass(frozen=True)
class GreedyRound:
    """One greedy augmentation: state before, and the point selected."""

    round_index: int
    n_centers: int
    max_power_before: float
    candidate: np.ndarray


def greedy_rounds(cfg, n_start=None, rounds=None):
    """Iterated greedy center placement at the power-function maximum.

    Returns the per-round records and the final center set; the probe-grid
    maximum of the power function decreases strictly across rounds whenever
    the previous maximizer was not already a center.
    """
    n = n_start or cfg.grid
    rounds = rounds or cfg.rounds
    domain = cfg.domain()
    kernel = cfg.kernel()
    centers = grid_centers(domain, n)
    probe = domain.grid(cfg.probe_n)
    out = []
    for i in range(rounds):
        values = power_function(kernel, centers, probe)
        best = int(np.argmax(values))
        out.append(GreedyRound(round_index=i, n_centers=len(centers),
                               max_power_before=float(values[best]),
                               candidate=probe[best].copy()))
        centers = centers.add(probe[best])
    return out, centers


@dataclass(frozen=True)
class PropertyCheck:
    name: str
    passed: bool
    detail: str


def _fd_gradient(kernel, x, y, step=1e-5):
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = step
        g[i] = (kernel_eval(kernel, x + e, y) - kernel_eval(kernel, x - e, y)) / (2 * step)
    return g


def kernel_property_suite(seed=0, n_samples=200):
    """Numerical checks of the kernel contracts; one record per property.

    Covers exact symmetry, the diagonal value, Gram positive
    semidefiniteness, agreement of analytic gradients with central finite
    differences, antisymmetry of the radial derivative under argument swap,
    and the derivative refusal of the non-smooth family.
    """
    rng = np.random.default_rng(seed)
    smooth = [Kernel(f, 0.5) for f in ("gaussian", "matern32", "matern52")]
    all_families = smooth + [Kernel("matern12", 0.5)]
    checks = []

    worst = 0.0
    for kernel in all_families:
        for _ in range(50):
            x, y = rng.uniform(-1, 1, (2, 2))
            worst = max(worst, abs(kernel_eval(kernel, x, y) - kernel_eval(kernel, y, x)))
    checks.append(PropertyCheck("symmetry", worst == 0.0, f"max |k(x,y)-k(y,x)| = {worst:.1e}"))

    worst = 0.0
    for kernel in all_families:
        for _ in range(20):
            x = rng.uniform(-1, 1, 2)
            worst = max(worst, abs(kernel_eval(kernel, x, x) - kernel.variance))
    checks.append(PropertyCheck("diagonal", worst == 0.0, f"max |k(x,x)-s2| = {worst:.1e}"))

    min_eig_norm = np.inf
    for kernel in all_families:
        X = rng.uniform(-1, 1, (50, 2))
        K = gram(kernel, X, X)
        min_eig_norm = min(min_eig_norm, float(np.linalg.eigvalsh(K)[0]) / len(X))
    psd_ok = min_eig_norm >= -1e-12
    checks.append(PropertyCheck("gram_psd", psd_ok, f"min eigenvalue / N = {min_eig_norm:.1e}"))

    worst = 0.0
    for kernel in smooth:
        for _ in range(n_samples):
            x, y = rng.uniform(-1, 1, (2, 2))
            analytic = grad_x(kernel, x, y)
            fd = _fd_gradient(kernel, x, y)
            rel = np.linalg.norm(analytic - fd) / max(np.linalg.norm(analytic), 1e-12)
            worst = max(worst, rel)
    checks.append(PropertyCheck("gradient_fd", worst <= 1e-6,
                                f"worst relative error vs central differences = {worst:.1e}"))

    worst = 0.0
    for kernel in smooth:
        for _ in range(50):
            x, y = rng.uniform(-1, 1, (2, 2))
            worst = max(worst, float(np.abs(grad_x(kernel, x, y) + grad_x(kernel, y, x)).max()))
    checks.append(PropertyCheck("gradient_antisymmetry", worst == 0.0,
                                f"max |grad(x,y) + grad(y,x)| = {worst:.1e}"))

    try:
        grad_x(Kernel("matern12", 0.5), np.zeros(2), np.ones(2))
        refused = False
    except UnsupportedDerivativeError:
        refused = True
    checks.append(PropertyCheck("matern12_refuses_derivatives", refused,
                                "grad_x raises UnsupportedDerivativeError"))
    return checks


def _atomic_write(path, text):
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_decay_csv(path, records):
    lines = ["kernel,n_centers,fill_distance,sup_error,sup_error_modc,"
             "h_error,pe_margin,residual,condition,jitter,converged,iterations"]
    for r in records:
        lines.append(",".join([
            r.kernel_family, str(r.n_centers), repr(r.fill_dist), repr(r.sup_error),
            repr(r.sup_error_modc), repr(r.h_error), repr(r.pe_margin), repr(r.residual),
            repr(r.condition), repr(r.jitter),
            "" if r.converged is None else str(r.converged),
            "" if r.iterations is None else str(r.iterations),
        ]))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_field_csv(path, points, values, value_name="value"):
    lines = [",".join([f"x{i + 1}" for i in range(points.shape[1])] + [value_name])]
    for p, v in zip(points, values):
        lines.append(",".join([repr(c) for c in p] + [repr(float(v))]))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_manifest(out_dir, cfg, extra=None):
    """Record config, seed, and solver diagnostics so runs are reproducible."""
    from . import __version__

    payload = {"version": __version__, "config": asdict(cfg), "seed": cfg.seed}
    if extra:
        payload.update(extra)

    def encode(obj):
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        return str(obj)

    _atomic_write(os.path.join(out_dir, "manifest.json"),
                  json.dumps(payload, indent=2, default=encode) + "\n")


def config_field_names():
    return tuple(f.name for f in fields(ExperimentConfig))
