"""Command-line harness for the benchmark studies.

Exit codes: 0 on success, 2 for configuration problems, 3 for numerical
failures (excitation violations, singular Gram matrices, non-finite values,
unstable initial policies), 4 when the kernel property suite finds a failing
property.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .dynamics import benchmark_system
from .errors import (
    ConfigError,
    NonFiniteError,
    PEViolationError,
    SingularGramError,
    UnstablePolicyError,
)
from .experiments import (
    ExperimentConfig,
    config_field_names,
    convergence_study,
    error_map,
    exact_policy_solve,
    greedy_rounds,
    kernel_property_suite,
    pi_decay_study,
    power_map,
    write_decay_csv,
    write_field_csv,
    write_manifest,
)
from .galerkin import anchored_values, residual_norm
from .geometry import fill_distance, grid_centers
from .policy_iteration import controller_error, policy_iterate

_INT_KEYS = {"grid", "quadrature_order", "probe_n", "fill_probe_n",
             "pi_max_iter", "rounds", "seed"}
_FLOAT_KEYS = {"lengthscale", "variance", "pi_tol", "mu0_gain"}
_TUPLE_FLOAT_KEYS = {"lower", "upper"}
_TUPLE_INT_KEYS = {"grids"}


def parse_config_file(path):
    """Read ``key = value`` lines into a config-overrides dict."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    known = set(config_field_names())
    overrides = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            for sep in ("=", ":"):
                if sep in line:
                    key, value = line.split(sep, 1)
                    break
            else:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.rstrip()!r}")
            key, value = key.strip(), value.strip()
            if key not in known:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                if key in _INT_KEYS:
                    overrides[key] = int(value)
                elif key in _FLOAT_KEYS:
                    overrides[key] = float(value)
                elif key in _TUPLE_FLOAT_KEYS:
                    overrides[key] = tuple(float(v) for v in value.split(","))
                elif key in _TUPLE_INT_KEYS:
                    overrides[key] = tuple(int(v) for v in value.split(","))
                else:
                    overrides[key] = value
            except ValueError as err:
                raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {value!r}") from err
    return overrides


def build_config(args):
    overrides = {}
    if args.config:
        overrides.update(parse_config_file(args.config))
    if args.out is not None:
        overrides["out"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if getattr(args, "grid", None) is not None:
        overrides["grid"] = args.grid
    if getattr(args, "rounds", None) is not None:
        overrides["rounds"] = args.rounds
    try:
        return replace(ExperimentConfig(), **overrides)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err


def _outdir(cfg):
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def cmd_kernel_check(cfg):
    checks = kernel_property_suite(seed=cfg.seed)
    failures = 0
    for check in checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status}  {check.name}: {check.detail}")
        failures += not check.passed
    return 4 if failures else 0


def cmd_approximate(cfg):
    out = _outdir(cfg)
    bench = benchmark_system()
    domain = cfg.domain()
    value, gsys, centers = exact_policy_solve(cfg, cfg.grid)
    probe = domain.grid(cfg.probe_n)
    estimate = anchored_values(value, probe)
    reference = np.array([bench.value(x) for x in probe])
    sup_err = float(np.abs(estimate - reference).max())
    h = fill_distance(centers, domain, cfg.fill_probe_n)
    residual = residual_norm(gsys, value.coefficients)

    value.save_csv(os.path.join(out, "approximant.csv"))
    write_field_csv(os.path.join(out, "value_map.csv"), probe, estimate)
    write_manifest(out, cfg, {
        "command": "approximate",
        "solves": [{"n_centers": len(centers), "pe_margin": gsys.pe_margin,
                    "condition_estimate": gsys.condition_estimate,
                    "residual": residual, "jitter": value.factorization.jitter}],
    })
    print(f"centers={len(centers)} fill_distance={h:.5f} pe_margin={gsys.pe_margin:.3e} "
          f"residual={residual:.3e} sup_error={sup_err:.3e}")
    return 0


def cmd_pi(cfg):
    out = _outdir(cfg)
    bench = benchmark_system()
    domain = cfg.domain()
    kernel = cfg.kernel()
    centers = grid_centers(domain, cfg.grid)
    result = policy_iterate(kernel, centers, bench.system, bench.cost, cfg.mu0(),
                            cfg.rule(), tol=cfg.pi_tol, max_iter=cfg.pi_max_iter,
                            domain=domain, probe_n=cfg.probe_n)
    lines = ["iteration,pe_margin,residual,policy_delta,controller_error_vs_reference"]
    for i, it in enumerate(result.iterates):
        ref_err = controller_error(it.policy, bench.policy, domain, cfg.probe_n)
        lines.append(f"{i},{it.pe_margin!r},{it.residual!r},{it.policy_delta!r},{ref_err!r}")
        print(f"iter {i}: delta={it.policy_delta:.3e} pe_margin={it.pe_margin:.3e} "
              f"residual={it.residual:.3e} error_vs_optimal={ref_err:.3e}")
    with open(os.path.join(out, "pi_log.csv"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    write_manifest(out, cfg, {"command": "pi", "converged": result.converged,
                              "iterations": result.iterations_used})
    print(f"converged={result.converged} iterations={result.iterations_used}")
    return 0


def _print_fit(fit):
    if fit is None:
        print("slope fit unavailable (need at least two ladder points)")
    elif fit.degenerate:
        print("slope fit degenerate (errors at solver noise floor)")
    else:
        print(f"fitted slope={fit.slope:.3f} r_squared={fit.r_squared:.4f}")


def cmd_convergence(cfg):
    out = _outdir(cfg)
    records, fit = convergence_study(cfg)
    write_decay_csv(os.path.join(out, "convergence.csv"), records)
    write_manifest(out, cfg, {
        "command": "convergence",
        "fit": None if fit is None else fit.__dict__,
        "solves": [{"n_centers": r.n_centers, "pe_margin": r.pe_margin,
                    "residual": r.residual, "condition": r.condition,
                    "jitter": r.jitter} for r in records],
    })
    for r in records:
        print(f"N={r.n_centers:4d} h={r.fill_dist:.4f} sup_error={r.sup_error:.4e} "
              f"pe_margin={r.pe_margin:.3e}")
    _print_fit(fit)
    return 0


def cmd_pi_decay(cfg):
    out = _outdir(cfg)
    records, fit = pi_decay_study(cfg)
    write_decay_csv(os.path.join(out, "pi_decay.csv"), records)
    write_manifest(out, cfg, {
        "command": "pi-decay",
        "fit": None if fit is None else fit.__dict__,
        "solves": [{"n_centers": r.n_centers, "pe_margin": r.pe_margin,
                    "residual": r.residual, "condition": r.condition,
                    "jitter": r.jitter, "converged": r.converged,
                    "iterations": r.iterations} for r in records],
    })
    for r in records:
        print(f"N={r.n_centers:4d} h={r.fill_dist:.4f} controller_error={r.sup_error:.4e} "
              f"converged={r.converged} iterations={r.iterations}")
    _print_fit(fit)
    return 0


def cmd_error_map(cfg):
    out = _outdir(cfg)
    result = error_map(cfg)
    write_field_csv(os.path.join(out, "error_map.csv"), result.points, result.errors,
                    value_name="error")
    result.centers.save_csv(os.path.join(out, "centers.csv"))
    write_manifest(out, cfg, {"command": "error-map",
                              "near_decile_mean": result.near_decile_mean,
                              "far_decile_mean": result.far_decile_mean})
    print(f"near-decile mean error={result.near_decile_mean:.4e} "
          f"far-decile mean error={result.far_decile_mean:.4e}")
    return 0


def cmd_power_map(cfg):
    out = _outdir(cfg)
    result = power_map(cfg)
    write_field_csv(os.path.join(out, "power_map.csv"), result.points, result.values,
                    value_name="power")
    result.centers.save_csv(os.path.join(out, "centers.csv"))
    write_manifest(out, cfg, {"command": "power-map",
                              "candidate": result.candidate.tolist(),
                              "max_power": result.max_power})
    print(f"max power={result.max_power:.4e} candidate={result.candidate.tolist()}")
    return 0


def cmd_greedy(cfg):
    out = _outdir(cfg)
    rounds, centers = greedy_rounds(cfg)
    lines = ["round,n_centers,max_power_before," +
             ",".join(f"candidate_x{i + 1}" for i in range(centers.dim))]
    for r in rounds:
        lines.append(f"{r.round_index},{r.n_centers},{r.max_power_before!r}," +
                     ",".join(repr(c) for c in r.candidate))
        print(f"round {r.round_index}: centers={r.n_centers} "
              f"max_power={r.max_power_before:.4e} candidate={r.candidate.tolist()}")
    with open(os.path.join(out, "greedy.csv"), "w") as fh:
        fh.write("\n".join(lines) + "\n")
    centers.save_csv(os.path.join(out, "centers.csv"))
    write_manifest(out, cfg, {"command": "greedy", "final_centers": len(centers)})
    return 0


_COMMANDS = {
    "kernel-check": cmd_kernel_check,
    "approximate": cmd_approximate,
    "pi": cmd_pi,
    "convergence": cmd_convergence,
    "pi-decay": cmd_pi_decay,
    "error-map": cmd_error_map,
    "power-map": cmd_power_map,
    "greedy": cmd_greedy,
}


def make_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="seed for random-point property checks")

    parser = argparse.ArgumentParser(
        prog="kernelpi",
        description="Kernel-based value approximation and policy iteration benchmark runs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name in ("approximate", "pi", "error-map", "power-map", "greedy"):
            p.add_argument("--grid", type=int, help="centers per dimension")
        if name == "greedy":
            p.add_argument("--rounds", type=int, help="number of augmentation rounds")
    return parser


def main(argv=None):
    args = make_parser().parse_args(argv)
    try:
        cfg = build_config(args)
        return _COMMANDS[args.command](cfg)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except (PEViolationError, SingularGramError, NonFiniteError, UnstablePolicyError) as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
