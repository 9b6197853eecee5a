import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtsync.graph import (
    complete_bipartite,
    complete_graph,
    complete_split,
    from_edge_list,
    path_graph,
)
from qtsync.landscape import Verdict, multistart_survey
from qtsync.skeleton import RootedForest, comparability_closure
from qtsync.twins import (
    BenignExtraStatus,
    ExtensionOutcome,
    StructuralHypothesisError,
    TwinCase,
    TwinKind,
    check_benign_extra,
    check_homogeneous_extension,
    classify_geometric_closed,
    classify_geometric_open,
    geometric_twins_at,
    is_positively_aligned,
    structural_twins,
    witness_quadratic_form,
)


def _pairs(records):
    return {(r.a, r.b, r.kind.value) for r in records}


def test_structural_twins_examples():
    star = complete_split(1, 3)  # centre 0
    assert _pairs(structural_twins(star)) == {
        (1, 2, "structural_open"),
        (1, 3, "structural_open"),
        (2, 3, "structural_open"),
    }
    assert _pairs(structural_twins(complete_graph(3))) == {
        (0, 1, "structural_closed"),
        (0, 2, "structural_closed"),
        (1, 2, "structural_closed"),
    }
    assert _pairs(structural_twins(path_graph(3))) == {(0, 2, "structural_open")}
    assert structural_twins(path_graph(4)) == []


def test_open_cases():
    p3 = from_edge_list(3, [(0, 2), (1, 2)])
    theta = np.array([0.0, np.pi, 0.0])
    q = np.array([1.0, 0.0])  # phasor of the centre
    r = classify_geometric_open(theta, 0, 1, q)
    assert r.kind is TwinKind.GEOMETRIC_OPEN and r.case is TwinCase.ANTIPODAL
    assert (r.mu_a, r.mu_b) == pytest.approx((1.0, -1.0))
    r = classify_geometric_open([0.3, 0.3, 0.0], 0, 1, 2 * np.array([np.cos(0.3), np.sin(0.3)]))
    assert r.case is TwinCase.SYNCHRONIZED and r.mu_a == pytest.approx(2.0)
    r = classify_geometric_open([0.0, 1.7], 0, 1, np.zeros(2))
    assert r.case is TwinCase.DEGENERATE
    # q not parallel to v_a: not a geometric twin
    r = classify_geometric_open([0.0, 0.0], 0, 1, np.array([0.0, 1.0]))
    assert r.kind is TwinKind.NONE and r.case is TwinCase.NA
    assert geometric_twins_at(p3, theta)[0].case is TwinCase.ANTIPODAL


def test_closed_cases():
    r = classify_geometric_closed([0.0, 0.0], 0, 1, np.zeros(2))
    assert r.case is TwinCase.SYNCHRONIZED and r.mu_a == pytest.approx(1.0)
    r = classify_geometric_closed([0.0, np.pi], 0, 1, np.zeros(2))
    assert r.case is TwinCase.DEGENERATE
    assert (r.mu_a, r.mu_b) == pytest.approx((-1.0, -1.0))
    r = classify_geometric_closed([0.0, np.pi], 0, 1, np.array([2.0, 0.0]))
    assert r.case is TwinCase.ANTIPODAL
    assert (r.mu_a, r.mu_b) == pytest.approx((1.0, -3.0))
    r = classify_geometric_closed([0.0, 1.0], 0, 1, np.zeros(2))
    assert r.kind is TwinKind.NONE


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0, 2 * np.pi),
    st.sampled_from(["sync", "anti", "free"]),
    st.floats(-3, 3),
    st.floats(0, 2 * np.pi),
)
def test_open_trichotomy_lines(ta, mode, r, tb_free):
    va = np.array([np.cos(ta), np.sin(ta)])
    tb = {"sync": ta, "anti": ta + np.pi, "free": tb_free}[mode]
    q = np.zeros(2) if mode == "free" else r * va
    rec = classify_geometric_open([ta, tb], 0, 1, q)
    assert rec.kind is TwinKind.GEOMETRIC_OPEN
    on_sync = abs(rec.mu_a - rec.mu_b) <= 1e-9
    on_anti = abs(rec.mu_a + rec.mu_b) <= 1e-9
    assert on_sync or on_anti
    if rec.case is TwinCase.DEGENERATE:
        assert abs(rec.mu_a) <= 1e-9 and abs(rec.mu_b) <= 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 2 * np.pi), st.sampled_from(["sync", "anti"]), st.floats(-3, 3))
def test_closed_trichotomy_lines(ta, mode, r):
    va = np.array([np.cos(ta), np.sin(ta)])
    tb = ta if mode == "sync" else ta + np.pi
    vb = np.array([np.cos(tb), np.sin(tb)])
    q = r * va - vb if mode == "anti" else r * va
    rec = classify_geometric_closed([ta, tb], 0, 1, q)
    assert rec.kind is TwinKind.GEOMETRIC_CLOSED
    assert abs(rec.mu_a - rec.mu_b) <= 1e-9 or abs(rec.mu_a + rec.mu_b + 2) <= 1e-9


def test_twins_at_survey_minima_are_geometric():
    graphs = [
        complete_bipartite(2, 3),
        complete_split(2, 3),
        comparability_closure(RootedForest([None, 0, 0, 1, 1, 2])),
    ]
    for g in graphs:
        rep = multistart_survey(g, 10, seed=4)
        for s in rep.terminal_states(Verdict.SOSP_SYNC):
            for rec in geometric_twins_at(g, s):
                assert rec.kind is not TwinKind.NONE
                assert rec.case is TwinCase.SYNCHRONIZED


def test_benign_extra_without_extra_neighbours():
    res = check_benign_extra(complete_graph(2), [0.4, 0.4], 0, 1)
    assert res.status is BenignExtraStatus.APPLIES_AND_SYNCS
    assert res.T == [] and res.S == []


def _rooted_example():
    # 0 is the root with children 1, 2, 3; node 4 hangs below 1
    f = RootedForest([None, 0, 0, 0, 1])
    return comparability_closure(f)


def test_benign_extra_applies():
    g = _rooted_example()
    res = check_benign_extra(g, np.full(5, 2.0), 0, 1)
    assert res.applies_and_syncs
    assert res.S == [4] and res.T == [2, 3]
    assert res.mu_a == pytest.approx(4.0) and res.mu_b == pytest.approx(2.0)


def test_benign_extra_reports_misaligned_t():
    g = _rooted_example()
    theta = np.zeros(5)
    theta[2] = 0.5
    res = check_benign_extra(g, theta, 0, 1)
    assert res.status is BenignExtraStatus.HYPOTHESES_FAIL
    assert "T not aligned" in res.reasons


def test_benign_extra_structural_failures():
    g = path_graph(4)
    res = check_benign_extra(g, np.zeros(4), 1, 2)
    assert res.status is BenignExtraStatus.HYPOTHESES_FAIL
    assert any("not contained" in r for r in res.reasons)
    res = check_benign_extra(g, np.zeros(4), 0, 2)
    assert any("not adjacent" in r for r in res.reasons)


def test_extension_aligned():
    g = _rooted_example()
    res = check_homogeneous_extension(g, np.zeros(5), {1, 4}, {0})
    assert res.outcome is ExtensionOutcome.ALIGNED
    assert res.inner == pytest.approx(1.0)
    assert not res.proves_instability
    res = check_homogeneous_extension(complete_split(3, 2), np.zeros(5), {3}, {0, 1, 2})
    assert res.inner == pytest.approx(3.0)


def test_extension_zero_sum():
    g = from_edge_list(3, [(0, 2), (1, 2)])
    res = check_homogeneous_extension(g, [0.0, np.pi, 1.0], {2}, {0, 1})
    assert res.outcome is ExtensionOutcome.ZERO_SUM
    assert res.witness is None


def test_extension_witness_matches_hessian(rng):
    g = _rooted_example()
    for _ in range(20):
        base = rng.uniform(0, 2 * np.pi)
        theta = rng.uniform(0, 2 * np.pi, 5)
        theta[[1, 4]] = base + np.pi
        theta[0] = base + rng.uniform(-1.0, 1.0)
        res = check_homogeneous_extension(g, theta, {1, 4}, {0})
        assert res.outcome is ExtensionOutcome.VIOLATION_WITNESS
        assert res.proves_instability
        assert res.witness_value == pytest.approx(witness_quadratic_form(g, theta, res.witness), abs=1e-9)


def test_extension_structural_errors():
    g = _rooted_example()
    with pytest.raises(StructuralHypothesisError, match="outside"):
        check_homogeneous_extension(g, np.zeros(5), {1}, {0})
    with pytest.raises(StructuralHypothesisError, match="overlap"):
        check_homogeneous_extension(g, np.zeros(5), {1, 4}, {0, 1})
    with pytest.raises(StructuralHypothesisError, match="not adjacent"):
        check_homogeneous_extension(g, np.zeros(5), {2}, {0, 1})
    theta = np.zeros(5)
    theta[4] = 1.0
    with pytest.raises(StructuralHypothesisError, match="synchronized"):
        check_homogeneous_extension(g, theta, {1, 4}, {0})


def test_positive_alignment():
    assert is_positively_aligned([1, 0], [2, 1e-12], 1e-9)
    assert not is_positively_aligned([1, 0], [-1, 0], 1e-9)
    assert not is_positively_aligned([0, 0], [1, 0], 1e-9)
    assert not is_positively_aligned([1, 0], [1, 1], 1e-9)
