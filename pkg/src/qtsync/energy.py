"""Kuramoto energy on a graph and its derivatives.

The energy is

    E(theta) = 1/2 * sum_{i,j} A_ij (1 - cos(theta_i - theta_j)),

i.e. the sum of ``1 - cos`` over the edges. The other common normalisation,
``-sum_{i,j} A_ij cos(theta_i - theta_j)``, equals ``2 E - 2|E|``: it has the
same stationary points and minimisers, and its derivatives are twice ours.

Phases are plain float arrays of length ``n`` in radians. Wrapping into
``(-pi, pi]`` happens only at I/O boundaries (:func:`wrap_angles`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

__all__ = [
    "Strengths",
    "Tolerances",
    "check_state",
    "wrap_angles",
    "phasors",
    "energy",
    "gradient",
    "kuramoto_rhs",
    "hessian",
    "strengths",
    "aligned_deviation",
    "is_synchronized",
    "circular_distance",
]


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by classification and certification.

    ``grad`` decides stationarity, ``eig`` is the PSD slack on the restricted
    Hessian, ``sync`` bounds the angular spread of a synchronized state and
    ``zero`` decides when a vector sum counts as the zero vector.
    """

    grad: float = 1e-10
    eig: float = 1e-8
    sync: float = 1e-6
    zero: float = 1e-7

    def __post_init__(self):
        for name in ("grad", "eig", "sync", "zero"):
            if not getattr(self, name) > 0:
                raise ValueError(f"tolerance {name!r} must be positive")


@dataclass(frozen=True)
class Strengths:
    """Per-node strengths ``mu`` and equilibrium residuals.

    ``residual[i]`` is ``|sum_{j in N(i)} v_j - mu[i] v_i|``; all residuals
    vanish exactly at an equilibrium.
    """

    mu: np.ndarray
    residual: np.ndarray


def check_state(g: Graph, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or theta.shape[0] != g.n:
        raise ValueError(f"state must have shape ({g.n},), got {theta.shape}")
    if not np.all(np.isfinite(theta)):
        raise ValueError("state contains non-finite angles")
    return theta


def wrap_angles(theta) -> np.ndarray:
    """Map angles into ``(-pi, pi]``."""
    theta = np.asarray(theta, dtype=float)
    w = np.mod(theta + np.pi, 2 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def phasors(theta) -> np.ndarray:
    """Unit vectors ``(cos theta_i, sin theta_i)`` as an ``(n, 2)`` array."""
    theta = np.asarray(theta, dtype=float)
    return np.column_stack([np.cos(theta), np.sin(theta)])


def circular_distance(x, y) -> np.ndarray:
    """Shortest angular distance, in ``[0, pi]``."""
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), 2 * np.pi)
    return np.minimum(d, 2 * np.pi - d)


def _differences(g: Graph, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return g.adjacency, theta[:, None] - theta[None, :]


def energy(g: Graph, theta) -> float:
    theta = check_state(g, theta)
    if not g.edges:
        return 0.0
    i, j = np.array(g.edges).T
    return float(np.sum(1.0 - np.cos(theta[i] - theta[j])))


def gradient(g: Graph, theta) -> np.ndarray:
    """Component ``j`` is ``sum_i A_ij sin(theta_j - theta_i)``."""
    theta = check_state(g, theta)
    a, d = _differences(g, theta)
    return np.where(a, np.sin(d), 0.0).sum(axis=1)


def kuramoto_rhs(g: Graph, theta) -> np.ndarray:
    """Homogeneous Kuramoto vector field, ``-gradient``."""
    return -gradient(g, theta)


def hessian(g: Graph, theta) -> np.ndarray:
    """Off-diagonal ``-A_ij cos(theta_i - theta_j)``, rows summing to zero."""
    theta = check_state(g, theta)
    a, d = _differences(g, theta)
    c = np.where(a, np.cos(d), 0.0)
    return np.diag(c.sum(axis=1)) - c


def strengths(g: Graph, theta) -> Strengths:
    theta = check_state(g, theta)
    v = phasors(theta)
    a = g.adjacency.astype(float)
    s = a @ v
    mu = np.einsum("ij,ij->i", s, v)
    residual = np.linalg.norm(s - mu[:, None] * v, axis=1)
    return Strengths(mu=mu, residual=residual)


def _mean_direction(theta: np.ndarray) -> float | None:
    c, s = np.cos(theta).sum(), np.sin(theta).sum()
    if np.hypot(c, s) <= 1e-12 * theta.size:
        return None
    return float(np.arctan2(s, c))


def aligned_deviation(theta) -> float:
    """Largest angular distance from the circular mean direction.

    Returns ``pi`` when the mean resultant vanishes (e.g. an antipodal pair).
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise ValueError("aligned_deviation needs at least one angle")
    mean = _mean_direction(theta)
    if mean is None:
        return float(np.pi)
    return float(np.max(circular_distance(theta, mean)))


def is_synchronized(theta, tol: float = 1e-6) -> bool:
    return aligned_deviation(theta) <= tol
