import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from qtsync.energy import energy
from qtsync.estimators import (
    GradientFlow,
    StationaryPointClassifier,
    SynchronizationSurvey,
    check_graph,
)
from qtsync.graph import complete_split, cycle_graph

TWISTED_C5 = 2 * np.pi * np.arange(5) / 5


def test_params_round_trip():
    est = SynchronizationSurvey(n_starts=7, random_state=3)
    assert est.get_params()["n_starts"] == 7
    est.set_params(n_starts=9)
    assert clone(est).n_starts == 9


def test_check_graph_accepts_adjacency():
    g = complete_split(2, 2)
    assert check_graph(g.adjacency) == g
    with pytest.raises(ValueError):
        check_graph(np.array([[0, 1], [0, 0]]))


def test_not_fitted():
    with pytest.raises(NotFittedError):
        StationaryPointClassifier().predict(np.zeros((1, 3)))


def test_flow_transform():
    g = cycle_graph(5)
    X = np.vstack([TWISTED_C5, np.linspace(0, 0.4, 5)])
    flow = GradientFlow().fit(g)
    Y = flow.transform(X)
    assert Y.shape == X.shape and flow.converged_.all()
    assert energy(g, Y[1]) < 1e-12
    np.testing.assert_allclose(flow.score_samples(X[:1]), [energy(g, TWISTED_C5)])
    with pytest.raises(ValueError):
        flow.transform(np.zeros((1, 4)))


def test_classifier_predict():
    clf = StationaryPointClassifier().fit(cycle_graph(5))
    X = np.vstack([TWISTED_C5, np.zeros(5), np.linspace(0, 1, 5)])
    assert list(clf.predict(X)) == ["sosp_nonsync", "sosp_sync", "non_stationary"]
    assert clf.decision_function(X[:1])[0] > 0.4
    assert clf.gradient_norm(X)[0] < 1e-12


def test_survey_fit_predict():
    est = SynchronizationSurvey(n_starts=40, random_state=1).fit(cycle_graph(5))
    assert 0 < est.sync_fraction_ < 1
    assert sum(est.report_.counts.values()) == 40
    assert list(est.predict(TWISTED_C5[None, :])) == ["sosp_nonsync"]
