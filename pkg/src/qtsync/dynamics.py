"""Gradient-flow integration of the homogeneous Kuramoto model."""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .energy import Tolerances, check_state, is_synchronized
from .graph import Graph

__all__ = [
    "FlowOptions",
    "Trajectory",
    "Termination",
    "FlowVerdict",
    "IntegrationError",
    "EdgeKernel",
    "integrate",
    "flow_to_verdict",
]

logger = logging.getLogger(__name__)

# Allowed rise of the energy over one accepted step, relative to max(1, E).
_MONOTONE_SLACK = 1e-12
_MIN_DT = 1e-14


class IntegrationError(FloatingPointError):
    """A non-finite value appeared during integration."""


class Termination(str, enum.Enum):
    CONVERGED = "converged"
    MAX_TIME = "max_time"
    MAX_STEPS = "max_steps"


class FlowVerdict(str, enum.Enum):
    SYNC = "sync"
    NONSYNC_STATIONARY = "nonsync_stationary"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class FlowOptions:
    max_time: float = 1e4
    dt_initial: float = 0.1
    grad_tol: float = 1e-8
    max_steps: int = 200_000
    record_every: int = 50

    def __post_init__(self):
        for name in ("max_time", "dt_initial", "grad_tol", "max_steps", "record_every"):
            if not getattr(self, name) > 0:
                raise ValueError(f"FlowOptions.{name} must be positive")


@dataclass
class Trajectory:
    """Recorded samples ``(t, theta, energy)`` and the final state."""

    samples: list[tuple[float, np.ndarray, float]] = field(default_factory=list)
    terminal: np.ndarray | None = None
    termination_reason: Termination = Termination.CONVERGED
    steps: int = 0

    @property
    def converged(self) -> bool:
        return self.termination_reason is Termination.CONVERGED


class EdgeKernel:
    """Edge-list evaluation of energy and gradient, cheaper than dense sums."""

    def __init__(self, g: Graph):
        self.n = g.n
        if g.edges:
            self.i, self.j = (np.asarray(x, dtype=np.intp) for x in zip(*g.edges))
        else:
            self.i = self.j = np.zeros(0, dtype=np.intp)

    def energy(self, theta: np.ndarray) -> float:
        return float(np.sum(1.0 - np.cos(theta[self.i] - theta[self.j])))

    def gradient(self, theta: np.ndarray) -> np.ndarray:
        s = np.sin(theta[self.i] - theta[self.j])
        return np.bincount(self.i, s, self.n) - np.bincount(self.j, s, self.n)


def _rk4(kernel: EdgeKernel, theta: np.ndarray, dt: float) -> np.ndarray:
    k1 = -kernel.gradient(theta)
    k2 = -kernel.gradient(theta + 0.5 * dt * k1)
    k3 = -kernel.gradient(theta + 0.5 * dt * k2)
    k4 = -kernel.gradient(theta + dt * k3)
    return theta + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def integrate(g: Graph, theta0, opts: FlowOptions | None = None) -> Trajectory:
    """Integrate ``d theta / dt = -grad E(theta)`` until the gradient is small.

    Classical RK4. A step that would raise the energy is retried at half the
    step size; the step size grows back towards ``opts.dt_initial`` after a
    run of accepted steps. No noise is injected, so the flow can stall at
    saddles.
    """
    opts = opts or FlowOptions()
    theta = check_state(g, theta0).copy()
    kernel = EdgeKernel(g)
    traj = Trajectory()
    t, dt, steps, streak = 0.0, opts.dt_initial, 0, 0
    e = kernel.energy(theta)
    traj.samples.append((t, theta.copy(), e))
    while True:
        grad = kernel.gradient(theta)
        if np.sqrt(grad @ grad) <= opts.grad_tol:
            reason = Termination.CONVERGED
            break
        if t >= opts.max_time:
            reason = Termination.MAX_TIME
            break
        if steps >= opts.max_steps:
            reason = Termination.MAX_STEPS
            break
        h = min(dt, opts.max_time - t)
        while True:
            trial = _rk4(kernel, theta, h)
            e_trial = kernel.energy(trial)
            if not np.isfinite(e_trial) or not np.all(np.isfinite(trial)):
                raise IntegrationError(f"non-finite state at t={t:.6g}, dt={h:.3g}")
            if e_trial <= e + _MONOTONE_SLACK * max(1.0, e) or h <= _MIN_DT:
                break
            h *= 0.5
            streak = 0
        dt = h
        theta, e, t = trial, e_trial, t + h
        steps += 1
        streak += 1
        if streak >= 8 and dt < opts.dt_initial:
            dt = min(2 * dt, opts.dt_initial)
            streak = 0
        if steps % opts.record_every == 0:
            traj.samples.append((t, theta.copy(), e))
    if traj.samples[-1][0] != t:
        traj.samples.append((t, theta.copy(), e))
    traj.terminal = theta
    traj.termination_reason = reason
    traj.steps = steps
    return traj


class FlowResult(NamedTuple):
    verdict: FlowVerdict
    state: np.ndarray
    trajectory: Trajectory


def flow_to_verdict(
    g: Graph, theta0, opts: FlowOptions | None = None, tols: Tolerances | None = None
) -> FlowResult:
    """Integrate, polish with Newton, and report whether the limit is synchronized."""
    from .landscape import refine_newton

    tols = tols or Tolerances()
    traj = integrate(g, theta0, opts)
    if not traj.converged:
        return FlowResult(FlowVerdict.UNDECIDED, traj.terminal, traj)
    state = refine_newton(g, traj.terminal)
    if is_synchronized(state, tols.sync):
        return FlowResult(FlowVerdict.SYNC, state, traj)
    return FlowResult(FlowVerdict.NONSYNC_STATIONARY, state, traj)
