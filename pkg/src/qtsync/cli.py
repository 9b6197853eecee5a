"""Command-line interface: ``qtsync {gen,flow,survey,certify,twins}``.

Exit codes: 0 success, 1 error (or a failed certificate), 2 undecided.
Errors are reported on stderr as a one-line JSON object.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from . import io
from .certifier import certify
from .dynamics import FlowOptions, integrate
from .energy import Tolerances, is_synchronized
from .graph import (
    Graph,
    complete_bipartite,
    complete_split,
    from_edge_list,
    threshold_from_sequence,
)
from .landscape import Verdict, classify, multistart_survey, refine_newton, start_state
from .skeleton import RootedForest, comparability_closure, rooted_trees
from .twins import geometric_twins_at, structural_twins

EXIT_OK, EXIT_ERROR, EXIT_UNDECIDED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _write(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _tols(args) -> Tolerances:
    return Tolerances(grad=args.tol_grad, eig=args.tol_eig, sync=args.tol_sync)


def _parse_edges(text: str) -> list[tuple[int, int]]:
    edges = []
    for item in filter(None, (s.strip() for s in text.split(","))):
        try:
            i, j = item.split("-")
            edges.append((int(i), int(j)))
        except ValueError:
            raise UsageError(f"cannot parse edge {item!r}; use the form 'i-j'") from None
    return edges


def _parse_parents(text: str) -> list[int | None]:
    out = []
    for item in (s.strip() for s in text.split(",")):
        if item.lower() in ("null", "none", ""):
            out.append(None)
        else:
            try:
                out.append(int(item))
            except ValueError:
                raise UsageError(f"cannot parse parent {item!r}") from None
    return out


def cmd_gen(args) -> int:
    fam = args.family
    if fam == "threshold":
        obj = io.graph_to_dict(threshold_from_sequence(args.bits))
    elif fam == "qt-tree":
        f = RootedForest(_parse_parents(args.parents))
        obj = {"graph": io.graph_to_dict(comparability_closure(f)), "forest": io.forest_to_dict(f)}
    elif fam == "split":
        obj = io.graph_to_dict(complete_split(args.clique, args.independent))
    elif fam == "bipartite":
        obj = io.graph_to_dict(complete_bipartite(args.a, args.b))
    else:
        obj = io.graph_to_dict(from_edge_list(args.n, _parse_edges(args.edges)))
    _write(io.dumps(obj), args.out)
    return EXIT_OK


def _load_graph(path: str) -> Graph:
    return io.graph_from_dict(io.load_json(path))


def cmd_flow(args) -> int:
    g = _load_graph(args.graph)
    if args.state:
        theta = io.state_from_dict(io.load_json(args.state))
    elif args.random:
        theta = start_state(g.n, args.seed, 0)
    else:
        raise UsageError("flow needs --state FILE or --random")
    opts = FlowOptions(
        max_time=args.max_time,
        dt_initial=args.dt,
        grad_tol=args.flow_tol,
        max_steps=args.max_steps,
        record_every=args.record_every,
    )
    traj = integrate(g, theta, opts)
    terminal = traj.terminal
    if traj.converged and args.refine:
        terminal = refine_newton(g, terminal)
    if args.csv:
        _write(io.trajectory_csv(traj), args.csv)
    out = io.state_to_dict(terminal)
    out["termination_reason"] = traj.termination_reason.value
    out["synchronized"] = bool(is_synchronized(terminal, args.tol_sync))
    _write(io.dumps(out), args.out)
    return EXIT_OK if traj.converged else EXIT_UNDECIDED


def cmd_survey(args) -> int:
    if args.starts < 1:
        raise UsageError("--starts must be at least 1")
    tols = _tols(args)
    if args.enumerate_trees is not None:
        graphs = [
            (f"tree{args.enumerate_trees}_{k}", comparability_closure(t))
            for k, t in enumerate(rooted_trees(args.enumerate_trees))
        ]
    elif args.graph:
        graphs = [(args.graph_id or "graph", _load_graph(args.graph))]
    else:
        raise UsageError("survey needs a graph file or --enumerate-trees N")
    reports = [
        multistart_survey(
            g,
            args.starts,
            seed=args.seed,
            tols=tols,
            max_escapes=args.max_escapes,
            workers=args.workers,
            graph_id=gid,
        )
        for gid, g in graphs
    ]
    dicts = [r.to_dict(include_starts=args.include_starts) for r in reports]
    _write(io.dumps(dicts[0] if args.graph and args.enumerate_trees is None else dicts), args.out)
    if args.csv:
        _write(io.survey_summary_csv(reports), args.csv)
    undecided = any(r.counts.get(Verdict.UNDECIDED.value, 0) for r in reports)
    return EXIT_UNDECIDED if undecided else EXIT_OK


def cmd_certify(args) -> int:
    g = _load_graph(args.graph)
    f = io.forest_from_dict(io.load_json(args.tree))
    theta = io.state_from_dict(io.load_json(args.state))
    cert = certify(g, f, theta, _tols(args))
    _write(io.dumps(cert.to_dict()), args.out)
    return EXIT_OK if cert.certified else EXIT_ERROR


def cmd_twins(args) -> int:
    g = _load_graph(args.graph)
    if args.state:
        theta = io.state_from_dict(io.load_json(args.state))
        records = geometric_twins_at(g, theta, tol=args.twin_tol)
    else:
        records = structural_twins(g)
    _write(io.dumps([r.to_dict() for r in records]), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit master seed (default 0)")
    common.add_argument("--tol-grad", type=float, default=1e-10)
    common.add_argument("--tol-eig", type=float, default=1e-8)
    common.add_argument("--tol-sync", type=float, default=1e-6)
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="qtsync", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", parents=[common], help="generate a graph")
    gen.add_argument("family", choices=["threshold", "qt-tree", "split", "bipartite", "edge-list"])
    gen.add_argument("--bits", default="")
    gen.add_argument("--parents", default="null")
    gen.add_argument("--clique", type=int, default=1)
    gen.add_argument("--independent", type=int, default=0)
    gen.add_argument("--a", type=int, default=1)
    gen.add_argument("--b", type=int, default=1)
    gen.add_argument("--n", type=int, default=1)
    gen.add_argument("--edges", default="", help="comma-separated pairs, e.g. '0-1,1-2'")
    gen.set_defaults(func=cmd_gen)

    flow = sub.add_parser("flow", parents=[common], help="integrate the gradient flow")
    flow.add_argument("graph")
    flow.add_argument("--state")
    flow.add_argument("--random", action="store_true")
    flow.add_argument("--csv", help="trajectory CSV output")
    flow.add_argument("--max-time", type=float, default=1e4)
    flow.add_argument("--dt", type=float, default=0.1)
    flow.add_argument("--flow-tol", type=float, default=1e-8)
    flow.add_argument("--max-steps", type=int, default=200_000)
    flow.add_argument("--record-every", type=int, default=10)
    flow.add_argument("--no-refine", dest="refine", action="store_false")
    flow.set_defaults(func=cmd_flow)

    survey = sub.add_parser("survey", parents=[common], help="multistart landscape survey")
    survey.add_argument("graph", nargs="?")
    survey.add_argument("--enumerate-trees", type=int)
    survey.add_argument("--starts", type=int, default=100)
    survey.add_argument("--max-escapes", type=int, default=20)
    survey.add_argument("--graph-id")
    survey.add_argument("--csv", help="summary CSV output")
    survey.add_argument("--include-starts", action="store_true")
    survey.set_defaults(func=cmd_survey)

    cert = sub.add_parser("certify", parents=[common], help="leaf-like propagation certificate")
    cert.add_argument("graph")
    cert.add_argument("tree")
    cert.add_argument("state")
    cert.set_defaults(func=cmd_certify)

    twins = sub.add_parser("twins", parents=[common], help="structural / geometric twins")
    twins.add_argument("graph")
    twins.add_argument("state", nargs="?")
    twins.add_argument("--twin-tol", type=float, default=1e-8)
    twins.set_defaults(func=cmd_twins)
    return parser


def _error(kind: str, message: str) -> None:
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
        if args.workers < 1:
            raise UsageError("--workers must be at least 1")
        if min(args.tol_grad, args.tol_eig, args.tol_sync) <= 0:
            raise UsageError("tolerances must be positive")
        return args.func(args)
    except UsageError as exc:
        _error("usage", str(exc))
        return EXIT_ERROR
    except (ValueError, IndexError, KeyError, OSError, json.JSONDecodeError) as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_ERROR
    except (ArithmeticError, RuntimeError) as exc:
        _error(type(exc).__name__, str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
