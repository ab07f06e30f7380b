"""Control-affine systems, running costs, feedback policies, and simulation.

The plant is ``xdot = f(x) + g(x) u`` with equilibrium ``f(0) = 0``; feedback
policies map states to inputs with ``u(0) = 0``.  The module carries the
cost-rate ``Q(x) + u^T R u``, the right-hand side used by the policy
evaluation equation, a closed-form two-state benchmark with known optimal
value function and controller, fixed-step trajectory integration, and a
pragmatic stabilization verifier used to gate policy iteration.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import NonFiniteError
from .geometry import unit_box


@dataclass(frozen=True)
class ControlAffineSystem:
    """Drift ``f`` and input map ``g`` of ``xdot = f(x) + g(x) u``."""

    dim: int
    input_dim: int
    f: Callable[[np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class CostSpec:
    """State cost rate ``Q`` (positive definite) and input weight matrix ``R``."""

    Q: Callable[[np.ndarray], float]
    R: np.ndarray

    def __post_init__(self):
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if not np.allclose(R, R.T):
            raise ValueError("R must be symmetric")
        if np.linalg.eigvalsh(R)[0] <= 0:
            raise ValueError("R must be positive definite")
        R.setflags(write=False)
        object.__setattr__(self, "R", R)


@dataclass(frozen=True)
class Policy:
    """State feedback ``u = mu(x)`` with a provenance tag.

    ``provenance`` is ``"explicit-formula"`` for closed-form laws and
    ``"kernel-approximant"`` for policies derived from fitted value functions.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    provenance: str = "explicit-formula"

    def __call__(self, x):
        return np.atleast_1d(np.asarray(self.fn(np.asarray(x, dtype=float)), dtype=float))


class SmoothValue(NamedTuple):
    """A scalar field with a closed-form gradient (duck-types an approximant)."""

    value_fn: Callable[[np.ndarray], float]
    gradient_fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.value_fn(np.asarray(x, dtype=float))

    def value(self, x):
        return self.value_fn(np.asarray(x, dtype=float))

    def gradient(self, x):
        return np.asarray(self.gradient_fn(np.asarray(x, dtype=float)), dtype=float)


def closed_loop_field(system, policy, x):
    """Vector field of the loop closed under ``policy``: f(x) + g(x) mu(x)."""
    x = np.asarray(x, dtype=float)
    return system.f(x) + system.g(x) @ policy(x)


def running_cost(cost, x, u):
    """Instantaneous cost rate Q(x) + u^T R u."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    return float(cost.Q(np.asarray(x, dtype=float)) + u @ cost.R @ u)


def pde_rhs(cost, policy, x):
    """Negated cost rate under the policy; the data of the evaluation equation."""
    x = np.asarray(x, dtype=float)
    return -running_cost(cost, x, policy(x))


class Benchmark(NamedTuple):
    system: ControlAffineSystem
    cost: CostSpec
    value: SmoothValue
    policy: Policy


def benchmark_system():
    """Two-state oscillator benchmark with known optimal value and controller.

        f(x) = [ -x1 + x2,
                 -0.5 x1 - 0.5 x2 (1 - (cos(2 x1) + 2)^2) ]
        g(x) = [ 0, cos(2 x1) + 2 ]^T
        Q(x) = ||x||^2,  R = 1

    The optimal value function is ``V(x) = 0.5 x1^2 + x2^2`` and the optimal
    feedback is ``u(x) = -(cos(2 x1) + 2) x2``; both are returned in closed
    form for use as references.
    """

    def f(x):
        G = np.cos(2.0 * x[0]) + 2.0
        return np.array([-x[0] + x[1], -0.5 * x[0] - 0.5 * x[1] * (1.0 - G * G)])

    def g(x):
        return np.array([[0.0], [np.cos(2.0 * x[0]) + 2.0]])

    system = ControlAffineSystem(dim=2, input_dim=1, f=f, g=g)
    cost = CostSpec(Q=lambda x: float(x @ x), R=np.array([[1.0]]))
    value = SmoothValue(
        value_fn=lambda x: float(0.5 * x[0] ** 2 + x[1] ** 2),
        gradient_fn=lambda x: np.array([x[0], 2.0 * x[1]]),
    )
    policy = Policy(
        fn=lambda x: np.array([-(np.cos(2.0 * x[0]) + 2.0) * x[1]]),
        provenance="explicit-formula",
    )
    return Benchmark(system=system, cost=cost, value=value, policy=policy)


@dataclass(frozen=True)
class Trajectory:
    """Fixed-step closed-loop trajectory with optional domain-exit flag."""

    times: np.ndarray
    states: np.ndarray
    exited: bool = False
    exit_index: int | None = None

    def save_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t"] + [f"x{i + 1}" for i in range(self.states.shape[1])])
            for t, x in zip(self.times, self.states):
                writer.writerow([t] + list(x))


def simulate(system, policy, x0, t_final, dt=1e-3, domain=None, stop_on_exit=False):
    """Classical fourth-order Runge-Kutta integration of the closed loop.

    If ``domain`` is given, the trajectory is flagged when the state first
    leaves it; with ``stop_on_exit`` integration also stops there.  A NaN or
    Inf state raises :class:`NonFiniteError` (diverging policy).
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if t_final < dt:
        raise ValueError("t_final must be at least one step")
    n_steps = int(round(t_final / dt))
    x = np.asarray(x0, dtype=float).copy()
    times = np.empty(n_steps + 1)
    states = np.empty((n_steps + 1, x.size))
    times[0], states[0] = 0.0, x
    exited, exit_index = False, None

    def field(z):
        return closed_loop_field(system, policy, z)

    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(1, n_steps + 1):
            k1 = field(x)
            k2 = field(x + 0.5 * dt * k1)
            k3 = field(x + 0.5 * dt * k2)
            k4 = field(x + dt * k3)
            x = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            if not np.all(np.isfinite(x)):
                raise NonFiniteError(f"state became non-finite at t={i * dt:.6g}")
            times[i], states[i] = i * dt, x
            if domain is not None and not exited and not domain.contains(x)[0]:
                exited, exit_index = True, i
                if stop_on_exit:
                    times, states = times[: i + 1], states[: i + 1]
                    break
    return Trajectory(times=times, states=states, exited=exited, exit_index=exit_index)


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of the boundary-start stabilization check."""

    passed: bool
    entries: tuple


def verify_stabilizing(system, policy, domain=None, t_final=10.0, dt=1e-3,
                       inflation=1.5, contraction=0.1):
    """Simulate from the box corners and face midpoints and grade the runs.

    Passes when every trajectory stays inside the ``inflation``-scaled box and
    ends with norm at most ``contraction`` times its initial norm.  In two
    dimensions the start set has the 8 boundary points (4 corners, 4 edge
    midpoints).  Divergence (non-finite state) counts as failure, not error.
    """
    if domain is None:
        domain = unit_box(system.dim)
    big = domain.inflate(inflation)
    starts = np.vstack([domain.corners(), domain.face_midpoints()])
    entries = []
    passed = True
    for x0 in starts:
        norm0 = float(np.linalg.norm(x0))
        try:
            traj = simulate(system, policy, x0, t_final, dt, domain=big, stop_on_exit=True)
        except NonFiniteError:
            entries.append({"x0": tuple(x0), "final_norm": float("inf"),
                            "stayed": False, "contracted": False, "ok": False})
            passed = False
            continue
        final_norm = float(np.linalg.norm(traj.states[-1]))
        stayed = not traj.exited
        contracted = final_norm <= contraction * norm0 or norm0 == 0.0
        ok = stayed and contracted
        entries.append({"x0": tuple(x0), "final_norm": final_norm,
                        "stayed": stayed, "contracted": contracted, "ok": ok})
        passed = passed and ok
    return StabilityReport(passed=passed, entries=tuple(entries))
