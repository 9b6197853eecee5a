"""Structural and geometric twins, and the two twin-formation lemmas.

Geometric open twins ``a, b`` with common vector ``q`` satisfy
``q = mu_a v_a = mu_b v_b``; geometric closed twins satisfy
``v_b + q = mu_a v_a`` and ``v_a + q = mu_b v_b``. In both cases the phasors
are either synchronized, antipodal, or sit at the degenerate point of the
strength plane where they are unconstrained.
"""

from __future__ import annotations

import enum
import itertools
from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from .energy import Tolerances, check_state, hessian, is_synchronized, phasors, strengths
from .graph import Graph

__all__ = [
    "TwinKind",
    "TwinCase",
    "TwinClassification",
    "structural_twins",
    "classify_geometric_open",
    "classify_geometric_closed",
    "geometric_twins_at",
    "BenignExtraStatus",
    "BenignExtraResult",
    "check_benign_extra",
    "ExtensionOutcome",
    "ExtensionResult",
    "StructuralHypothesisError",
    "check_homogeneous_extension",
    "is_positively_aligned",
    "witness_quadratic_form",
]


class TwinKind(str, enum.Enum):
    STRUCTURAL_OPEN = "structural_open"
    STRUCTURAL_CLOSED = "structural_closed"
    GEOMETRIC_OPEN = "geometric_open"
    GEOMETRIC_CLOSED = "geometric_closed"
    NONE = "none"


class TwinCase(str, enum.Enum):
    SYNCHRONIZED = "synchronized"
    ANTIPODAL = "antipodal"
    DEGENERATE = "degenerate"
    NA = "n/a"


@dataclass
class TwinClassification:
    a: int
    b: int
    kind: TwinKind
    case: TwinCase = TwinCase.NA
    mu_a: float = float("nan")
    mu_b: float = float("nan")
    q: np.ndarray = field(default_factory=lambda: np.full(2, np.nan))

    def to_dict(self) -> dict:
        def num(x):
            return None if np.isnan(x) else float(x)

        return {
            "pair": [self.a, self.b],
            "kind": self.kind.value,
            "case": self.case.value,
            "mu_a": num(self.mu_a),
            "mu_b": num(self.mu_b),
            "q": [num(x) for x in self.q],
        }


def structural_twins(g: Graph) -> list[TwinClassification]:
    """All vertex pairs with identical neighbourhoods (open) or closed neighbourhoods."""
    out = []
    for a, b in itertools.combinations(range(g.n), 2):
        na, nb = g.bits[a], g.bits[b]
        if g.has_edge(a, b):
            if na & ~(1 << b) == nb & ~(1 << a):
                out.append(TwinClassification(a, b, TwinKind.STRUCTURAL_CLOSED))
        elif na == nb:
            out.append(TwinClassification(a, b, TwinKind.STRUCTURAL_OPEN))
    return out


def _unit(theta: np.ndarray, i: int) -> np.ndarray:
    return np.array([np.cos(theta[i]), np.sin(theta[i])])


def classify_geometric_open(theta, a: int, b: int, q, tol: float = 1e-9) -> TwinClassification:
    """Place ``(a, b)`` in the open-twin trichotomy for common vector ``q``.

    Strengths are the least-squares fits ``mu = <q, v>``. The pair is not a
    geometric open twin (kind ``none``) if either fit leaves a residual above
    ``tol``. The degenerate point ``mu_a = mu_b = 0`` is tested first.
    """
    theta = np.asarray(theta, dtype=float)
    q = np.asarray(q, dtype=float)
    va, vb = _unit(theta, a), _unit(theta, b)
    mu_a, mu_b = float(q @ va), float(q @ vb)
    rec = TwinClassification(a, b, TwinKind.NONE, TwinCase.NA, mu_a, mu_b, q.copy())
    if np.linalg.norm(q - mu_a * va) > tol or np.linalg.norm(q - mu_b * vb) > tol:
        return rec
    if abs(mu_a) <= tol and abs(mu_b) <= tol:
        case = TwinCase.DEGENERATE
    elif abs(mu_a - mu_b) <= tol and np.linalg.norm(va - vb) <= tol:
        case = TwinCase.SYNCHRONIZED
    elif abs(mu_a + mu_b) <= tol and np.linalg.norm(va + vb) <= tol:
        case = TwinCase.ANTIPODAL
    else:
        return rec
    rec.kind, rec.case = TwinKind.GEOMETRIC_OPEN, case
    return rec


def classify_geometric_closed(theta, a: int, b: int, q, tol: float = 1e-9) -> TwinClassification:
    """Place ``(a, b)`` in the closed-twin trichotomy for common vector ``q``.

    Strengths are ``mu_a = <v_b + q, v_a>`` and ``mu_b = <v_a + q, v_b>``. The
    degenerate point ``mu_a = mu_b = -1`` is tested before the two lines.
    """
    theta = np.asarray(theta, dtype=float)
    q = np.asarray(q, dtype=float)
    va, vb = _unit(theta, a), _unit(theta, b)
    mu_a, mu_b = float((vb + q) @ va), float((va + q) @ vb)
    rec = TwinClassification(a, b, TwinKind.NONE, TwinCase.NA, mu_a, mu_b, q.copy())
    if np.linalg.norm(vb + q - mu_a * va) > tol or np.linalg.norm(va + q - mu_b * vb) > tol:
        return rec
    if abs(mu_a + 1) <= tol and abs(mu_b + 1) <= tol:
        if np.linalg.norm(va + vb + q) > tol:
            return rec
        case = TwinCase.DEGENERATE
    elif abs(mu_a - mu_b) <= tol and np.linalg.norm(va - vb) <= tol:
        case = TwinCase.SYNCHRONIZED
    elif abs(mu_a + mu_b + 2) <= tol and np.linalg.norm(va + vb) <= tol:
        case = TwinCase.ANTIPODAL
    else:
        return rec
    rec.kind, rec.case = TwinKind.GEOMETRIC_CLOSED, case
    return rec


def geometric_twins_at(g: Graph, theta, tol: float = 1e-8) -> list[TwinClassification]:
    """Classify every structural twin pair geometrically at ``theta``.

    The common vector is the phasor sum over the shared neighbourhood.
    """
    theta = check_state(g, theta)
    v = phasors(theta)
    out = []
    for tw in structural_twins(g):
        common = [j for j in g.neighbors[tw.a] if j != tw.b]
        q = v[common].sum(axis=0) if common else np.zeros(2)
        if tw.kind is TwinKind.STRUCTURAL_OPEN:
            out.append(classify_geometric_open(theta, tw.a, tw.b, q, tol))
        else:
            out.append(classify_geometric_closed(theta, tw.a, tw.b, q, tol))
    return out


def is_positively_aligned(u, w, tol: float) -> bool:
    """``u`` and non-zero ``w`` point the same way, up to an angle of about ``tol``."""
    u, w = np.asarray(u, dtype=float), np.asarray(w, dtype=float)
    nu, nw = np.linalg.norm(u), np.linalg.norm(w)
    if nu == 0 or nw == 0:
        return False
    cross = abs(u[0] * w[1] - u[1] * w[0]) / (nu * nw)
    return bool(u @ w > 0 and cross <= tol)


class BenignExtraStatus(str, enum.Enum):
    APPLIES_AND_SYNCS = "applies_and_syncs"
    HYPOTHESES_FAIL = "hypotheses_fail"
    # hypotheses verified yet v_a != v_b: a numerical contradiction
    CONCLUSION_FAILS = "conclusion_fails"


@dataclass
class BenignExtraResult:
    status: BenignExtraStatus
    reasons: list[str]
    S: list[int]
    T: list[int]
    mu_a: float
    mu_b: float
    phase_gap: float

    @property
    def applies_and_syncs(self) -> bool:
        return self.status is BenignExtraStatus.APPLIES_AND_SYNCS


def check_benign_extra(
    g: Graph, theta, a: int, b: int, tols: Tolerances | None = None
) -> BenignExtraResult:
    """Check that adjacent ``a, b`` synchronize when ``a``'s extra neighbours side with ``b``.

    With ``S = N(b) - {a}`` and ``T = N(a) - {b} - S``, the hypotheses are
    ``S`` contained in ``N(a)``, both ``a`` and ``b`` at a nodewise stable
    equilibrium (``mu >= 0``, zero residual), and ``v_i = v_b`` for every
    ``i`` in ``T``. When they hold, ``v_a = v_b`` must follow. Every failing
    hypothesis is listed in ``reasons``.
    """
    tols = tols or Tolerances()
    theta = check_state(g, theta)
    st = strengths(g, theta)
    reasons = []
    na = set(g.neighbors[a]) - {b}
    S = set(g.neighbors[b]) - {a}
    T = na - S
    if not g.has_edge(a, b):
        reasons.append(f"{a} and {b} are not adjacent")
    if not S <= na:
        reasons.append(f"N({b}) is not contained in N({a}): missing {sorted(S - na)}")
    if any(not is_synchronized(theta[[i, b]], tols.sync) for i in T):
        reasons.append("T not aligned")
    for node in (a, b):
        if st.mu[node] < -tols.zero or st.residual[node] > tols.zero:
            reasons.append(
                f"node {node} not at stable equilibrium "
                f"(mu={st.mu[node]:.3g}, residual={st.residual[node]:.3g})"
            )
    gap = float(np.abs(np.angle(np.exp(1j * (theta[a] - theta[b])))))
    if reasons:
        status = BenignExtraStatus.HYPOTHESES_FAIL
    elif gap <= tols.sync:
        status = BenignExtraStatus.APPLIES_AND_SYNCS
    else:
        status = BenignExtraStatus.CONCLUSION_FAILS
        reasons.append(f"hypotheses hold but phases differ by {gap:.3g}")
    return BenignExtraResult(
        status, reasons, sorted(S), sorted(T), float(st.mu[a]), float(st.mu[b]), gap
    )


class StructuralHypothesisError(ValueError):
    """The node sets do not satisfy the structural hypotheses of a lemma."""


class ExtensionOutcome(str, enum.Enum):
    ALIGNED = "aligned"
    ZERO_SUM = "zero_sum"
    VIOLATION_WITNESS = "violation_witness"


@dataclass
class ExtensionResult:
    """Outcome of the homogeneous-extension check.

    For a violation, ``witness`` is the indicator vector of ``Q`` and
    ``witness_value`` equals ``x^T H x = |Q| <sum_P v_i, v>``; a negative value
    proves the state is not a local minimum.
    """

    outcome: ExtensionOutcome
    p_sum: np.ndarray
    q_phasor: np.ndarray
    inner: float
    witness: np.ndarray | None = None
    witness_value: float | None = None

    @property
    def proves_instability(self) -> bool:
        return self.witness_value is not None and self.witness_value < 0


def check_homogeneous_extension(
    g: Graph, theta, Q: Iterable[int], P: Iterable[int], tols: Tolerances | None = None
) -> ExtensionResult:
    """Relate the common phasor of a synchronized set ``Q`` to the phasor sum over ``P``.

    Requires ``P`` and ``Q`` disjoint, every node of ``Q`` adjacent to all of
    ``P``, and no neighbour of a ``Q`` node outside ``P`` and ``Q``. Returns
    ``aligned`` when ``sum_P v_i`` points along the ``Q`` phasor, ``zero_sum``
    when it vanishes, and otherwise an indicator-vector witness.

    Raises
    ------
    StructuralHypothesisError
        If the structural hypotheses fail or ``Q`` is not synchronized.
    """
    tols = tols or Tolerances()
    theta = check_state(g, theta)
    Q, P = sorted(set(Q)), sorted(set(P))
    if not Q:
        raise StructuralHypothesisError("Q must be non-empty")
    if set(Q) & set(P):
        raise StructuralHypothesisError(f"P and Q overlap in {sorted(set(Q) & set(P))}")
    pq = set(P) | set(Q)
    for i in Q:
        missing = set(P) - set(g.neighbors[i])
        if missing:
            raise StructuralHypothesisError(f"node {i} in Q is not adjacent to {sorted(missing)} in P")
        outside = set(g.neighbors[i]) - pq
        if outside:
            raise StructuralHypothesisError(
                f"node {i} in Q has neighbours {sorted(outside)} outside P and Q"
            )
    if not is_synchronized(theta[Q], tols.sync):
        raise StructuralHypothesisError(f"nodes of Q={Q} are not synchronized")
    v = phasors(theta)
    q_phasor = v[Q].sum(axis=0)
    q_phasor /= np.linalg.norm(q_phasor)
    p_sum = v[P].sum(axis=0) if P else np.zeros(2)
    inner = float(p_sum @ q_phasor)
    if np.linalg.norm(p_sum) <= tols.zero:
        return ExtensionResult(ExtensionOutcome.ZERO_SUM, p_sum, q_phasor, inner)
    if is_positively_aligned(p_sum, q_phasor, tols.sync):
        return ExtensionResult(ExtensionOutcome.ALIGNED, p_sum, q_phasor, inner)
    x = np.zeros(g.n)
    x[Q] = 1.0
    return ExtensionResult(
        ExtensionOutcome.VIOLATION_WITNESS,
        p_sum,
        q_phasor,
        inner,
        witness=x,
        # sum_{i in Q, j in P} cos(theta_i - theta_j); equals |Q| * inner when Q is in sync
        witness_value=float(v[Q].sum(axis=0) @ p_sum),
    )


def witness_quadratic_form(g: Graph, theta, x) -> float:
    """``x^T H x`` from the explicit Hessian, for cross-checking witnesses."""
    x = np.asarray(x, dtype=float)
    return float(x @ hessian(g, theta) @ x)
