"""JSON and CSV interchange formats.

* Graph: ``{"n": int, "edges": [[i, j], ...]}`` with ``i < j``, sorted.
* Forest: ``{"parent": [null | int, ...]}``.
* State: ``{"theta": [float, ...]}`` in radians.

Floats go through :func:`json.dumps`, which writes the shortest repr that
round-trips exactly.
"""

from __future__ import annotations

import csv
import io
import json
from collections.abc import Iterable

import numpy as np

from .dynamics import Trajectory
from .graph import Graph
from .landscape import SurveyReport
from .skeleton import RootedForest

__all__ = [
    "graph_to_dict",
    "graph_from_dict",
    "forest_to_dict",
    "forest_from_dict",
    "state_to_dict",
    "state_from_dict",
    "dumps",
    "load_json",
    "trajectory_csv",
    "survey_summary_csv",
]


def graph_to_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [[i, j] for i, j in g.edges]}


def graph_from_dict(obj: dict) -> Graph:
    """Parse Graph JSON; a wrapper object with a ``"graph"`` key is also accepted."""
    if "graph" in obj and "n" not in obj:
        obj = obj["graph"]
    try:
        n = obj["n"]
        edges = obj["edges"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"Graph JSON needs 'n' and 'edges' fields: {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise ValueError(f"'n' must be an integer, got {n!r}")
    for e in edges:
        if len(e) != 2 or not all(isinstance(x, int) for x in e):
            raise ValueError(f"edge {e!r} is not a pair of integers")
    return Graph(n, (tuple(e) for e in edges))


def forest_to_dict(f: RootedForest) -> dict:
    return {"parent": list(f.parent)}


def forest_from_dict(obj: dict) -> RootedForest:
    for key in ("forest", "tree"):
        if key in obj and "parent" not in obj:
            obj = obj[key]
    if "parent" not in obj:
        raise ValueError("Forest JSON needs a 'parent' field")
    for p in obj["parent"]:
        if p is not None and (not isinstance(p, int) or isinstance(p, bool)):
            raise ValueError(f"parent entries must be null or integers, got {p!r}")
    return RootedForest(obj["parent"])


def state_to_dict(theta) -> dict:
    return {"theta": [float(x) for x in np.asarray(theta, dtype=float)]}


def state_from_dict(obj: dict) -> np.ndarray:
    if "theta" not in obj:
        raise ValueError("State JSON needs a 'theta' field")
    theta = np.asarray(obj["theta"], dtype=float)
    if theta.ndim != 1:
        raise ValueError("'theta' must be a flat list of numbers")
    if not np.all(np.isfinite(theta)):
        raise ValueError("'theta' contains non-finite values")
    return theta


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False, allow_nan=False) + "\n"


def load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def trajectory_csv(traj: Trajectory) -> str:
    """Columns ``t, theta_0 .. theta_{n-1}, energy``, one row per recorded sample."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    n = traj.samples[0][1].size
    w.writerow(["t"] + [f"theta_{i}" for i in range(n)] + ["energy"])
    for t, theta, e in traj.samples:
        w.writerow([repr(float(t))] + [repr(float(x)) for x in theta] + [repr(float(e))])
    return buf.getvalue()


def survey_summary_csv(reports: Iterable[SurveyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["graph_id", "n", "n_starts", "pct_sync", "n_nonsync", "n_undecided"])
    for r in reports:
        w.writerow(
            [
                r.graph_id,
                r.n,
                r.n_starts,
                f"{100.0 * r.sync_fraction:.2f}",
                r.counts.get("sosp_nonsync", 0),
                r.counts.get("undecided", 0),
            ]
        )
    return buf.getvalue()
