import numpy as np
import pytest

from qtsync.dynamics import (
    FlowOptions,
    FlowVerdict,
    Termination,
    flow_to_verdict,
    integrate,
)
from qtsync.energy import energy, gradient
from qtsync.graph import complete_graph, complete_split, cycle_graph, path_graph
from qtsync.skeleton import comparability_closure, rooted_trees

from .conftest import random_graph

TWISTED_C5 = 2 * np.pi * np.arange(5) / 5


def test_options_validated():
    with pytest.raises(ValueError):
        FlowOptions(grad_tol=0)
    with pytest.raises(ValueError):
        FlowOptions(max_steps=0)


def test_constant_state_is_fixed():
    traj = integrate(complete_graph(4), np.full(4, 1.3))
    assert traj.converged and traj.steps == 0
    assert traj.samples[-1][0] == 0.0
    assert np.array_equal(traj.terminal, np.full(4, 1.3))


def test_two_oscillators_synchronize():
    g = complete_graph(2)
    traj = integrate(g, [0.0, 0.1], FlowOptions(grad_tol=1e-12))
    assert traj.converged
    assert energy(g, traj.terminal) < 1e-20
    # closed form: the difference obeys d(delta)/dt = -2 sin(delta)
    t_check, delta0 = 0.5, 0.1
    traj2 = integrate(g, [0.0, delta0], FlowOptions(max_time=t_check, dt_initial=1e-3, record_every=1))
    delta = np.diff(traj2.terminal)[0]
    exact = 2 * np.arctan(np.tan(delta0 / 2) * np.exp(-2 * t_check))
    assert delta == pytest.approx(exact, rel=1e-9)
    assert traj2.termination_reason is Termination.MAX_TIME


def test_twisted_c5_is_fixed():
    traj = integrate(cycle_graph(5), TWISTED_C5)
    assert traj.converged and traj.steps == 0
    assert np.array_equal(traj.terminal, TWISTED_C5)


def test_energy_monotone_along_samples(rng):
    for _ in range(10):
        g = random_graph(rng, int(rng.integers(3, 10)), 0.5)
        traj = integrate(g, rng.uniform(0, 2 * np.pi, g.n), FlowOptions(record_every=1, dt_initial=0.3))
        es = [e for _, _, e in traj.samples]
        assert all(b <= a + 1e-9 for a, b in zip(es, es[1:]))
        if traj.converged:
            assert np.linalg.norm(gradient(g, traj.terminal)) <= 1e-8


def test_large_step_is_halved_not_diverging():
    g = complete_graph(8)
    theta0 = np.random.default_rng(0).uniform(0, 2 * np.pi, 8)
    traj = integrate(g, theta0, FlowOptions(dt_initial=2.0, record_every=1))
    es = [e for _, _, e in traj.samples]
    assert all(b <= a + 1e-9 for a, b in zip(es, es[1:]))
    assert traj.converged


def test_equilibria_stay_put():
    g = path_graph(3)
    start = np.array([0.0, np.pi, 0.0])
    traj = integrate(g, start, FlowOptions(grad_tol=1e-12, max_steps=1000))
    assert np.abs(traj.terminal - start).max() < 1e-9


def test_gauge_equivariance(rng):
    opts = FlowOptions(grad_tol=1e-10)
    for _ in range(5):
        g = comparability_closure(rooted_trees(6)[int(rng.integers(0, 20))])
        theta0 = rng.uniform(0, 2 * np.pi, g.n)
        c = rng.uniform(-3, 3)
        a = integrate(g, theta0, opts).terminal
        b = integrate(g, theta0 + c, opts).terminal
        assert np.abs((b - c) - a).max() < 1e-8


def test_step_budget_gives_undecided():
    res = flow_to_verdict(complete_split(2, 3), np.linspace(0, 3, 5), FlowOptions(max_steps=1))
    assert res.verdict is FlowVerdict.UNDECIDED
    assert res.trajectory.termination_reason is Termination.MAX_STEPS


def test_flow_verdicts():
    assert flow_to_verdict(cycle_graph(5), TWISTED_C5).verdict is FlowVerdict.NONSYNC_STATIONARY
    g = comparability_closure(rooted_trees(7)[10])
    rng = np.random.default_rng(3)
    for _ in range(10):
        assert flow_to_verdict(g, rng.uniform(0, 2 * np.pi, 7)).verdict is FlowVerdict.SYNC


def test_records_every_k_steps():
    g = complete_graph(3)
    traj = integrate(g, [0.0, 1.0, 2.5], FlowOptions(record_every=5, grad_tol=1e-10))
    assert traj.samples[0][0] == 0.0
    assert traj.samples[-1][0] > 0
    assert len(traj.samples) <= traj.steps // 5 + 2
