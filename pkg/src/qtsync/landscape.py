"""Stationary-point refinement, second-order classification and multistart surveys.

The energy is invariant under a common rotation of all phases, so the all-ones
vector is always in the Hessian kernel. Classification therefore looks at the
Hessian restricted to the orthogonal complement of that vector; Newton solves
instead pin ``theta[0]``.
"""

from __future__ import annotations

import enum
import logging
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dynamics import EdgeKernel, FlowOptions, integrate
from .energy import (
    Strengths,
    Tolerances,
    aligned_deviation,
    check_state,
    gradient,
    hessian,
    is_synchronized,
    phasors,
    strengths,
)
from .graph import Graph

__all__ = [
    "Verdict",
    "StationaryReport",
    "StartResult",
    "SurveyReport",
    "NewtonConvergenceError",
    "refine_newton",
    "gauge_basis",
    "restricted_hessian",
    "classify",
    "survey_start",
    "multistart_survey",
    "start_state",
    "verify_nonsync_exemplar",
]

logger = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    NON_STATIONARY = "non_stationary"
    STRICT_SADDLE = "strict_saddle"
    SOSP_SYNC = "sosp_sync"
    SOSP_NONSYNC = "sosp_nonsync"
    UNDECIDED = "undecided"
    FAILED = "failed"


class NewtonConvergenceError(RuntimeError):
    """Damped Newton did not reach the requested gradient norm.

    ``theta`` holds the last iterate and ``residual`` its gradient norm.
    """

    def __init__(self, message: str, theta: np.ndarray, residual: float):
        super().__init__(message)
        self.theta = theta
        self.residual = residual


def refine_newton(
    g: Graph, theta, tol: float = 1e-12, max_iter: int = 100, max_halvings: int = 30
) -> np.ndarray:
    """Solve ``gradient(theta) = 0`` by damped Newton with ``theta[0]`` held fixed.

    Each step is halved until the gradient norm decreases; after
    ``max_halvings`` failed halvings a plain gradient step is taken instead.

    Raises
    ------
    NewtonConvergenceError
        If the gradient norm is still above ``tol`` after ``max_iter`` steps.
    """
    theta = check_state(g, theta).copy()
    kernel = EdgeKernel(g)
    grad = kernel.gradient(theta)
    res = float(np.linalg.norm(grad))
    if res <= tol or g.n < 2:
        return theta
    max_deg = max(g.degree(v) for v in range(g.n))
    for _ in range(max_iter):
        h = hessian(g, theta)[1:, 1:]
        step = np.zeros(g.n)
        step[1:] = np.linalg.lstsq(h, -grad[1:], rcond=None)[0]
        lam = 1.0
        for _ in range(max_halvings):
            trial = theta + lam * step
            trial_grad = kernel.gradient(trial)
            trial_res = float(np.linalg.norm(trial_grad))
            if trial_res < res:
                break
            lam *= 0.5
        else:
            trial = theta - grad / (2.0 * max_deg)
            trial[0] = theta[0]
            trial_grad = kernel.gradient(trial)
            trial_res = float(np.linalg.norm(trial_grad))
        theta, grad, res = trial, trial_grad, trial_res
        if res <= tol:
            return theta
    raise NewtonConvergenceError(
        f"Newton refinement stopped at gradient norm {res:.3e} > {tol:.1e}", theta, res
    )


def gauge_basis(n: int) -> np.ndarray:
    """Orthonormal ``(n, n-1)`` basis of the complement of the all-ones vector.

    Columns are the normalised Helmert contrasts ``(1, .., 1, -k, 0, ..)``.
    """
    basis = np.zeros((n, max(n - 1, 0)))
    for k in range(1, n):
        basis[:k, k - 1] = 1.0
        basis[k, k - 1] = -float(k)
        basis[:, k - 1] /= np.sqrt(k * (k + 1.0))
    return basis


def restricted_hessian(g: Graph, theta) -> tuple[np.ndarray, np.ndarray]:
    """Hessian in gauge coordinates, together with the basis used."""
    basis = gauge_basis(g.n)
    return basis.T @ hessian(g, theta) @ basis, basis


@dataclass
class StationaryReport:
    """Second-order classification of a state.

    ``node_branches[i]`` records which alternative of the nodewise stability
    condition holds at node ``i``: ``"zero_sum"`` when the neighbour phasors
    cancel, ``"aligned"`` when their sum points along ``v_i``, otherwise
    ``"violated"``. At a second-order stationary point no node is violated.
    """

    state: np.ndarray
    grad_norm: float
    restricted_spectrum: np.ndarray
    verdict: Verdict
    strengths: Strengths
    degenerate: bool = False
    node_branches: list[str] = field(default_factory=list)
    escape_direction: np.ndarray | None = None

    @property
    def min_eigenvalue(self) -> float:
        if self.restricted_spectrum.size == 0:
            return float("inf")
        return float(self.restricted_spectrum[0])

    @property
    def branches_consistent(self) -> bool:
        return "violated" not in self.node_branches

    @property
    def is_sosp(self) -> bool:
        return self.verdict in (Verdict.SOSP_SYNC, Verdict.SOSP_NONSYNC)


def _node_branches(g: Graph, theta: np.ndarray, st: Strengths, tols: Tolerances) -> list[str]:
    sums = g.adjacency.astype(float) @ phasors(theta)
    out = []
    for i in range(g.n):
        norm = float(np.linalg.norm(sums[i]))
        if norm <= tols.zero:
            out.append("zero_sum")
        elif st.mu[i] > 0 and st.residual[i] <= tols.zero * max(1.0, norm):
            out.append("aligned")
        else:
            out.append("violated")
    return out


def classify(g: Graph, theta, tols: Tolerances | None = None) -> StationaryReport:
    """Classify ``theta`` as non-stationary, strict saddle, or SOSP (sync or not).

    The PSD test uses the eigenvalues of the Hessian restricted to the
    complement of the rotation direction. A smallest eigenvalue inside
    ``(-tols.eig, tols.eig)`` is accepted as PSD but flagged ``degenerate``.
    """
    tols = tols or Tolerances()
    theta = check_state(g, theta)
    grad_norm = float(np.linalg.norm(EdgeKernel(g).gradient(theta)))
    h, basis = restricted_hessian(g, theta)
    if not np.all(np.isfinite(h)):
        raise FloatingPointError("Hessian has non-finite entries")
    evals, evecs = np.linalg.eigh(h)
    st = strengths(g, theta)
    report = StationaryReport(
        state=theta.copy(),
        grad_norm=grad_norm,
        restricted_spectrum=evals,
        verdict=Verdict.NON_STATIONARY,
        strengths=st,
        node_branches=_node_branches(g, theta, st, tols),
    )
    if evals.size:
        report.degenerate = bool(abs(evals[0]) < tols.eig)
        report.escape_direction = basis @ evecs[:, 0]
    if grad_norm > tols.grad:
        return report
    if evals.size and evals[0] < -tols.eig:
        report.verdict = Verdict.STRICT_SADDLE
    elif is_synchronized(theta, tols.sync):
        report.verdict = Verdict.SOSP_SYNC
    else:
        report.verdict = Verdict.SOSP_NONSYNC
    return report


def start_state(n: int, seed: int, k: int) -> np.ndarray:
    """Initial phases of start ``k``: uniform on ``[0, 2 pi)`` from stream ``(seed, k)``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(k),))
    return np.random.default_rng(ss).uniform(0.0, 2.0 * np.pi, n)


@dataclass
class StartResult:
    index: int
    verdict: Verdict
    state: np.ndarray | None
    escapes: int = 0
    error: str | None = None


def survey_start(
    g: Graph,
    theta0,
    opts: FlowOptions | None = None,
    tols: Tolerances | None = None,
    max_escapes: int = 20,
    escape_step: float = 1e-2,
    index: int = 0,
) -> StartResult:
    """Flow, refine, classify; step off strict saddles along negative curvature."""
    opts = opts or FlowOptions()
    tols = tols or Tolerances()
    theta = np.asarray(theta0, dtype=float)
    escapes = 0
    try:
        while True:
            traj = integrate(g, theta, opts)
            if not traj.converged:
                return StartResult(index, Verdict.UNDECIDED, traj.terminal, escapes)
            state = refine_newton(g, traj.terminal)
            report = classify(g, state, tols)
            if report.verdict is Verdict.STRICT_SADDLE and escapes < max_escapes:
                theta = state + escape_step * report.escape_direction
                escapes += 1
                continue
            return StartResult(index, report.verdict, state, escapes)
    except (ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        logger.warning("start %d failed: %s", index, exc)
        return StartResult(index, Verdict.FAILED, None, escapes, error=str(exc))


@dataclass
class SurveyReport:
    """Aggregate outcome of a multistart survey.

    ``to_dict`` omits the wall time unless asked, so that reports from
    identical inputs serialise identically.
    """

    graph_id: str
    n: int
    n_edges: int
    n_starts: int
    seed: int
    counts: dict[str, int]
    exemplars: list[np.ndarray]
    results: list[StartResult]
    wall_time: float = 0.0

    @property
    def sync_fraction(self) -> float:
        return self.counts.get(Verdict.SOSP_SYNC.value, 0) / self.n_starts

    def terminal_states(self, verdict: Verdict | None = None) -> list[np.ndarray]:
        return [
            r.state
            for r in self.results
            if r.state is not None and (verdict is None or r.verdict is verdict)
        ]

    def to_dict(self, include_timing: bool = False, include_starts: bool = False) -> dict:
        out = {
            "graph_id": self.graph_id,
            "n": self.n,
            "n_edges": self.n_edges,
            "n_starts": self.n_starts,
            "seed": self.seed,
            "counts": {k: self.counts[k] for k in sorted(self.counts)},
            "exemplars": [{"theta": [float(x) for x in s]} for s in self.exemplars],
        }
        if include_starts:
            out["starts"] = [
                {
                    "index": r.index,
                    "verdict": r.verdict.value,
                    "escapes": r.escapes,
                    "theta": None if r.state is None else [float(x) for x in r.state],
                    "error": r.error,
                }
                for r in self.results
            ]
        if include_timing:
            out["wall_time"] = self.wall_time
        return out


def _run_start(args) -> StartResult:
    g, seed, k, opts, tols, max_escapes = args
    return survey_start(g, start_state(g.n, seed, k), opts, tols, max_escapes, index=k)


def multistart_survey(
    g: Graph,
    n_starts: int,
    seed: int = 0,
    opts: FlowOptions | None = None,
    tols: Tolerances | None = None,
    max_escapes: int = 20,
    max_exemplars: int = 10,
    workers: int = 1,
    graph_id: str = "",
) -> SurveyReport:
    """Run ``n_starts`` independent seeded starts and tally their verdicts.

    Start ``k`` draws its phases from the stream ``(seed, k)``, so the report
    does not depend on ``workers``; results are merged in start order.
    """
    if n_starts < 1:
        raise ValueError(f"n_starts must be at least 1, got {n_starts}")
    opts = opts or FlowOptions()
    tols = tols or Tolerances()
    tic = time.perf_counter()
    tasks = [(g, seed, k, opts, tols, max_escapes) for k in range(n_starts)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_start, tasks, chunksize=max(1, n_starts // (4 * workers))))
    else:
        results = [_run_start(t) for t in tasks]
    results.sort(key=lambda r: r.index)
    counts = Counter(r.verdict.value for r in results)
    exemplars = [r.state for r in results if r.verdict is Verdict.SOSP_NONSYNC][:max_exemplars]
    return SurveyReport(
        graph_id=graph_id or f"n{g.n}_m{g.n_edges}",
        n=g.n,
        n_edges=g.n_edges,
        n_starts=n_starts,
        seed=seed,
        counts=dict(counts),
        exemplars=exemplars,
        results=results,
        wall_time=time.perf_counter() - tic,
    )


def verify_nonsync_exemplar(g: Graph, theta, tols: Tolerances | None = None) -> bool:
    """Independent re-check of a reported non-synchronized SOSP."""
    tols = tols or Tolerances()
    theta = np.asarray(theta, dtype=float)
    grad_norm = float(np.linalg.norm(gradient(g, theta)))
    evals = np.linalg.eigvalsh(restricted_hessian(g, theta)[0])
    return (
        grad_norm <= tols.grad
        and (evals.size == 0 or evals[0] >= -tols.eig)
        and aligned_deviation(theta) > tols.sync
    )
