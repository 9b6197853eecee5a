"""scikit-learn style estimators over the Kuramoto energy landscape.

Each estimator is fitted on a graph (a :class:`~qtsync.graph.Graph` or a
symmetric 0/1 adjacency matrix) and then acts on batches of phase states,
an array ``X`` of shape ``(n_samples, n_nodes)``.

>>> from qtsync.graph import complete_bipartite
>>> survey = SynchronizationSurvey(n_starts=20, random_state=0).fit(complete_bipartite(2, 3))
>>> survey.sync_fraction_
1.0
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .dynamics import FlowOptions, integrate
from .energy import Tolerances, energy, gradient
from .graph import Graph
from .landscape import classify, multistart_survey, refine_newton, survey_start

__all__ = [
    "check_graph",
    "check_states",
    "GradientFlow",
    "StationaryPointClassifier",
    "SynchronizationSurvey",
]


def check_graph(G) -> Graph:
    """Accept a :class:`Graph` or an adjacency matrix."""
    if isinstance(G, Graph):
        return G
    a = check_array(G, ensure_2d=True, dtype=None, ensure_min_samples=1, ensure_min_features=1)
    return Graph.from_adjacency(a)


def check_states(X, n_nodes: int) -> np.ndarray:
    X = check_array(X, dtype=float, ensure_2d=True)
    if X.shape[1] != n_nodes:
        raise ValueError(f"X has {X.shape[1]} columns but the graph has {n_nodes} nodes")
    return X


class _GraphEstimator(BaseEstimator):
    def fit(self, G, y=None):
        self.graph_ = check_graph(G)
        self.n_features_in_ = self.graph_.n
        return self

    def _tols(self) -> Tolerances:
        return Tolerances(grad=self.tol_grad, eig=self.tol_eig, sync=self.tol_sync)

    def score_samples(self, X):
        """Energy of each state."""
        check_is_fitted(self, "graph_")
        X = check_states(X, self.graph_.n)
        return np.array([energy(self.graph_, x) for x in X])


class GradientFlow(TransformerMixin, _GraphEstimator):
    """Map initial phases to the end points of the gradient flow.

    Parameters
    ----------
    max_time, dt, grad_tol, max_steps : flow budget and stopping rule
    refine : bool, default True
        Polish each end point with damped Newton.
    """

    def __init__(self, max_time=1e4, dt=0.1, grad_tol=1e-8, max_steps=200_000, refine=True):
        self.max_time = max_time
        self.dt = dt
        self.grad_tol = grad_tol
        self.max_steps = max_steps
        self.refine = refine

    def transform(self, X):
        check_is_fitted(self, "graph_")
        X = check_states(X, self.graph_.n)
        opts = FlowOptions(self.max_time, self.dt, self.grad_tol, self.max_steps, self.max_steps)
        out = np.empty_like(X)
        self.converged_ = np.zeros(X.shape[0], dtype=bool)
        for k, x in enumerate(X):
            traj = integrate(self.graph_, x, opts)
            self.converged_[k] = traj.converged
            end = traj.terminal
            out[k] = refine_newton(self.graph_, end) if self.refine and traj.converged else end
        return out


class StationaryPointClassifier(_GraphEstimator):
    """Label states as ``non_stationary``, ``strict_saddle``, ``sosp_sync`` or ``sosp_nonsync``."""

    def __init__(self, tol_grad=1e-10, tol_eig=1e-8, tol_sync=1e-6):
        self.tol_grad = tol_grad
        self.tol_eig = tol_eig
        self.tol_sync = tol_sync

    def predict(self, X):
        check_is_fitted(self, "graph_")
        X = check_states(X, self.graph_.n)
        tols = self._tols()
        return np.array([classify(self.graph_, x, tols).verdict.value for x in X], dtype=object)

    def decision_function(self, X):
        """Smallest eigenvalue of the gauge-restricted Hessian of each state."""
        check_is_fitted(self, "graph_")
        X = check_states(X, self.graph_.n)
        return np.array([classify(self.graph_, x, self._tols()).min_eigenvalue for x in X])

    def gradient_norm(self, X):
        check_is_fitted(self, "graph_")
        X = check_states(X, self.graph_.n)
        return np.array([np.linalg.norm(gradient(self.graph_, x)) for x in X])


class SynchronizationSurvey(_GraphEstimator):
    """Multistart test of global synchronization.

    ``fit`` runs the survey; ``predict`` runs the same flow/refine/escape
    pipeline from caller-supplied initial states.

    Attributes
    ----------
    report_ : SurveyReport
    sync_fraction_ : float
    """

    def __init__(
        self,
        n_starts=100,
        random_state=0,
        max_escapes=20,
        n_jobs=1,
        tol_grad=1e-10,
        tol_eig=1e-8,
        tol_sync=1e-6,
    ):
        self.n_starts = n_starts
        self.random_state = random_state
        self.max_escapes = max_escapes
        self.n_jobs = n_jobs
        self.tol_grad = tol_grad
        self.tol_eig = tol_eig
        self.tol_sync = tol_sync

    def fit(self, G, y=None):
        super().fit(G)
        self.report_ = multistart_survey(
            self.graph_,
            self.n_starts,
            seed=self.random_state,
            tols=self._tols(),
            max_escapes=self.max_escapes,
            workers=self.n_jobs,
        )
        self.sync_fraction_ = self.report_.sync_fraction
        return self

    def predict(self, X):
        check_is_fitted(self, "graph_")
        X = check_states(X, self.graph_.n)
        tols = self._tols()
        return np.array(
            [
                survey_start(self.graph_, x, tols=tols, max_escapes=self.max_escapes).verdict.value
                for x in X
            ],
            dtype=object,
        )
