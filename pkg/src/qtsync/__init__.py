"""Energy landscape of the homogeneous Kuramoto model on quasi-threshold graphs."""

from .certifier import SyncCertificate, certify, cut_energy, is_leaf_like
from .dynamics import FlowOptions, Trajectory, flow_to_verdict, integrate
from .energy import (
    Tolerances,
    aligned_deviation,
    energy,
    gradient,
    hessian,
    is_synchronized,
    kuramoto_rhs,
    strengths,
)
from .estimators import GradientFlow, StationaryPointClassifier, SynchronizationSurvey
from .graph import (
    Graph,
    add_universal_vertex,
    complete_bipartite,
    complete_split,
    disjoint_union,
    from_edge_list,
    is_quasi_threshold,
    threshold_from_sequence,
    trivially_perfect_check,
)
from .landscape import StationaryReport, SurveyReport, Verdict, classify, multistart_survey, refine_newton
from .skeleton import (
    RootedForest,
    caterpillar_from_sequence,
    comparability_closure,
    rooted_trees,
    tree_representation,
)

__version__ = "0.1.0"
