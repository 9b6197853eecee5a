"""Leaf-like propagation certificates for SOSPs on quasi-threshold graphs.

A node is leaf-like at a state when every tree descendant shares its phase.
Processing the tree from the deepest layer up to the root, each internal node
``A`` is shown leaf-like from three numerically checked steps:

1. every child subtree points along ``w = v_A + sum_{Anc(A)} v_j``, and ``w``
   is not the zero vector (if it were, the cut energy of ``{A} + Desc(A)``
   would be ``-(mu_A + 2) < 0``);
2. the children are synchronized with one another (geometric open twins with
   common vector ``w``);
3. ``A`` synchronizes with each child (benign extra neighbours).

A certified state has a leaf-like root, hence is synchronized.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .energy import Tolerances, aligned_deviation, check_state, circular_distance, phasors, strengths
from .graph import Graph
from .landscape import classify
from .skeleton import RootedForest, comparability_closure
from .twins import (
    ExtensionOutcome,
    StructuralHypothesisError,
    TwinCase,
    check_benign_extra,
    check_homogeneous_extension,
    classify_geometric_open,
)

__all__ = [
    "NodeVerdict",
    "NodeEvidence",
    "SyncCertificate",
    "CertificationError",
    "is_leaf_like",
    "cut_energy",
    "certify",
]


class CertificationError(ValueError):
    """Inputs violate the certifier's preconditions."""


class NodeVerdict(str, enum.Enum):
    LEAF = "leaf"
    LEAF_LIKE = "leaf_like"
    FAILED = "FAILED"


@dataclass
class NodeEvidence:
    node: int
    depth: int
    verdict: NodeVerdict
    mu: float
    steps: list[dict] = field(default_factory=list)
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "depth": self.depth,
            "verdict": self.verdict.value,
            "mu": self.mu,
            "steps": self.steps,
            "reason": self.reason,
        }


@dataclass
class SyncCertificate:
    tree: RootedForest
    state: np.ndarray
    layers: list[tuple[int, list[NodeEvidence]]]
    certified: bool
    failed_node: int | None = None
    failure_reason: str | None = None

    @property
    def overall(self) -> str:
        if self.certified:
            return "certified_sync"
        return f"failed_at({self.failed_node}, {self.failure_reason})"

    def to_dict(self) -> dict:
        return {
            "tree": {"parent": list(self.tree.parent)},
            "state": {"theta": [float(x) for x in self.state]},
            "layers": [
                {"depth": d, "nodes": [ev.to_dict() for ev in nodes]} for d, nodes in self.layers
            ],
            "overall": {
                "certified_sync": self.certified,
                "failed_node": self.failed_node,
                "reason": self.failure_reason,
            },
        }


def is_leaf_like(f: RootedForest, theta, v: int, tol: float = 1e-6) -> bool:
    """All tree descendants of ``v`` are within ``tol`` of ``theta[v]`` on the circle."""
    theta = np.asarray(theta, dtype=float)
    desc = sorted(f.descendants(v))
    return bool(np.all(circular_distance(theta[desc], theta[v]) <= tol))


def cut_energy(g: Graph, theta, U) -> float:
    """``sum cos(theta_i - theta_j)`` over edges with ``i`` in ``U`` and ``j`` outside.

    This is the Hessian quadratic form on the indicator vector of ``U``; a
    negative value shows the state is not a local minimum.
    """
    theta = check_state(g, theta)
    U = set(U)
    if not U or len(U) >= g.n or not U <= set(range(g.n)):
        raise ValueError("U must be a non-empty proper subset of the vertices")
    return float(
        sum(
            np.cos(theta[i] - theta[j])
            for i, j in g.edges
            if (i in U) != (j in U)
        )
    )


def _vec(x) -> list[float]:
    return [float(c) for c in x]


def _certify_node(
    g: Graph, f: RootedForest, theta: np.ndarray, a: int, mu: np.ndarray, tols: Tolerances
) -> NodeEvidence:
    ev = NodeEvidence(a, f.depth(a), NodeVerdict.LEAF_LIKE, float(mu[a]))
    v = phasors(theta)
    anc = sorted(f.ancestors(a))
    children = list(f.children(a))

    def fail(reason: str) -> NodeEvidence:
        ev.verdict, ev.reason = NodeVerdict.FAILED, reason
        return ev

    # Step 1
    w = v[a] + v[anc].sum(axis=0)
    step1 = {"step": 1, "w": _vec(w), "w_norm": float(np.linalg.norm(w)), "children": []}
    ev.steps.append(step1)
    if np.linalg.norm(w) <= tols.zero:
        subtree = {a} | f.descendants(a)
        witness = cut_energy(g, theta, subtree) if len(subtree) < g.n else None
        step1["branch"] = "zero_sum"
        step1["cut_energy"] = witness
        step1["minus_mu_plus_2"] = -(float(mu[a]) + 2.0)
        return fail(
            "v_A + sum over ancestors vanishes; the cut energy of the subtree "
            f"is {witness!r}, so the state is not stable"
        )
    step1["branch"] = "aligned"
    for c in children:
        Q = {c} | f.descendants(c)
        try:
            res = check_homogeneous_extension(g, theta, Q, {a} | set(anc), tols)
        except StructuralHypothesisError as exc:
            return fail(f"step 1, child {c}: {exc}")
        step1["children"].append(
            {"child": c, "outcome": res.outcome.value, "inner": res.inner, "mu": float(mu[c])}
        )
        if res.outcome is not ExtensionOutcome.ALIGNED:
            extra = f" (witness value {res.witness_value:.3g})" if res.witness_value is not None else ""
            return fail(f"step 1, child {c}: subtree is {res.outcome.value}{extra}")

    # Step 2
    step2 = {"step": 2, "pairs": []}
    ev.steps.append(step2)
    for p, q in zip(children, children[1:]):
        tw = classify_geometric_open(theta, p, q, w, tol=tols.sync * max(1.0, np.linalg.norm(w)))
        step2["pairs"].append(
            {"pair": [p, q], "case": tw.case.value, "mu_a": tw.mu_a, "mu_b": tw.mu_b}
        )
        if tw.case is not TwinCase.SYNCHRONIZED:
            return fail(f"step 2: children {p} and {q} are not synchronized ({tw.case.value})")

    # Step 3
    step3 = {"step": 3, "children": []}
    ev.steps.append(step3)
    for c in children:
        res = check_benign_extra(g, theta, a, c, tols)
        step3["children"].append(
            {
                "child": c,
                "status": res.status.value,
                "S": res.S,
                "T": res.T,
                "mu_A": res.mu_a,
                "mu_child": res.mu_b,
                "reasons": res.reasons,
            }
        )
        if not res.applies_and_syncs:
            return fail(f"step 3, child {c}: {'; '.join(res.reasons)}")

    if not is_leaf_like(f, theta, a, tols.sync):
        return fail("all lemma steps passed but descendants are not in phase with the node")
    return ev


def certify(
    g: Graph,
    f: RootedForest,
    theta,
    tols: Tolerances | None = None,
    check_preconditions: bool = True,
) -> SyncCertificate:
    """Run the layer-by-layer leaf-like induction and return a certificate.

    Parameters
    ----------
    g : Graph
    f : RootedForest
        Tree representation of ``g``.
    theta : array-like
        A second-order stationary point of the energy on ``g``.
    tols : Tolerances, optional
    check_preconditions : bool
        When false, skip the closure and SOSP checks (for negative controls).

    Raises
    ------
    CertificationError
        If ``f`` does not generate ``g`` or ``theta`` is not an SOSP.
    """
    tols = tols or Tolerances()
    theta = check_state(g, theta)
    if f.n != g.n:
        raise CertificationError(f"tree has {f.n} nodes but graph has {g.n}")
    if check_preconditions:
        if comparability_closure(f) != g:
            raise CertificationError("closure mismatch: comparability graph of the tree is not g")
        report = classify(g, theta, tols)
        if not report.is_sosp:
            raise CertificationError(
                f"state is not a second-order stationary point (verdict {report.verdict.value}, "
                f"grad norm {report.grad_norm:.3e}, min eigenvalue {report.min_eigenvalue:.3e})"
            )
    mu = strengths(g, theta).mu
    verdicts: dict[int, NodeVerdict] = {}
    layers = []
    failed_node, failure = None, None
    for d in range(f.height(), -1, -1):
        layer = []
        for a in f.nodes_at_depth(d):
            if f.is_leaf(a):
                ev = NodeEvidence(a, d, NodeVerdict.LEAF, float(mu[a]))
            elif any(verdicts[c] is NodeVerdict.FAILED for c in f.children(a)):
                ev = NodeEvidence(
                    a, d, NodeVerdict.FAILED, float(mu[a]), reason="a child is not leaf-like"
                )
            else:
                ev = _certify_node(g, f, theta, a, mu, tols)
            verdicts[a] = ev.verdict
            if ev.verdict is NodeVerdict.FAILED and failed_node is None:
                failed_node, failure = a, ev.reason
            layer.append(ev)
        layers.append((d, layer))
    certified = failed_node is None
    if certified and len(f.roots) == 1 and aligned_deviation(theta) > tols.sync:
        # soundness guard: never certify a spread state
        certified = False
        failed_node, failure = f.roots[0], "root leaf-like but state is not synchronized"
    return SyncCertificate(f, theta.copy(), layers, certified, failed_node, failure)
