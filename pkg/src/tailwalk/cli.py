"""Command-line front end.

Subcommands: ``scenario`` (preset experiments), ``evolve`` (propagate a state
on a graph loaded from JSON), ``decouple`` (tail decoupling report), and
``certify`` (grid-and-refine transfer certification).  Graphs travel as JSON
(see graphs module), states as {"entries": [[vertex, re, im], ...]}.
Vertices on the command line are integer ids or exact label matches; pair
states use ``a:b`` meaning (e_a - e_b)/sqrt(2), so labels containing commas
(like grid coordinates "1,2") work unchanged.

Exit codes: 0 success, 2 validation/parse error, 3 truncation
non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .decouple import dark_eigenvalues, decouple, verify_decoupling
from .evolve import (DEFAULT_TOL, PST_THRESHOLD, NoTransferPossible, State,
                     TruncationError, detect_pst, evolve, pair_state)
from .graphs import Graph, TailedGraph, graph_from_json
from .scenarios import ScenarioParamError, run_scenario

__all__ = ["main"]


class _CliError(ValueError):
    pass


def _load_tailed(path: str) -> TailedGraph:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            g = graph_from_json(fh.read())
    except OSError as exc:
        raise _CliError(f"cannot read graph file {path}: {exc}") from exc
    except (ValueError, KeyError, TypeError) as exc:
        raise _CliError(f"invalid graph file {path}: {exc}") from exc
    if isinstance(g, Graph):
        return TailedGraph(g, ())
    return g


def _resolve_vertex(g: Graph, token: str) -> int:
    if g.labels is not None and token in g.labels:
        return g.labels.index(token)
    try:
        v = int(token)
    except ValueError:
        raise _CliError(
            f"vertex {token!r} is neither a label nor an integer id") \
            from None
    if not (0 <= v < g.n):
        raise _CliError(f"vertex id {v} outside 0..{g.n - 1}")
    return v


def _parse_state_arg(t: TailedGraph, single: str | None, pair: str | None,
                     state_path: str | None, role: str) -> np.ndarray:
    given = [x for x in (single, pair, state_path) if x is not None]
    if len(given) != 1:
        raise _CliError(
            f"specify the {role} exactly once: a vertex, a pair a:b, "
            f"or a state file")
    if single is not None:
        vec = np.zeros(t.base.n, dtype=np.complex128)
        vec[_resolve_vertex(t.base, single)] = 1.0
        return vec
    if pair is not None:
        parts = pair.split(":")
        if len(parts) != 2:
            raise _CliError(
                f"pair state must be 'a:b', got {pair!r}")
        a = _resolve_vertex(t.base, parts[0])
        b = _resolve_vertex(t.base, parts[1])
        if a == b:
            raise _CliError("pair state needs two distinct vertices")
        return pair_state(t, a, b)
    try:
        with open(state_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
        entries = doc["entries"]
        vec = np.zeros(t.base.n, dtype=np.complex128)
        for v, re, im in entries:
            vec[int(v)] = complex(float(re), float(im))
    except OSError as exc:
        raise _CliError(f"cannot read state file {state_path}: {exc}") \
            from exc
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise _CliError(f"invalid state file {state_path}: {exc}") from exc
    nrm = float(np.linalg.norm(vec))
    if abs(nrm - 1.0) > 1e-9:
        raise _CliError(f"state in {state_path} has norm {nrm:.6g}, "
                        "expected a unit vector")
    return vec


def _emit(text: str, out_path: str | None):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _to_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def _tables_to_csv(tables: dict, reports: dict) -> str:
    buf = io.StringIO()
    for key in sorted(reports):
        buf.write(f"# {key} = {reports[key]}\n")
    writer = csv.writer(buf, lineterminator="\n")
    for name in sorted(tables):
        buf.write(f"# table: {name}\n")
        writer.writerow(tables[name]["columns"])
        writer.writerows(tables[name]["rows"])
    return buf.getvalue()


def _complex_rows(vec, location):
    return [[location, i, float(z.real), float(z.imag), float(abs(z))]
            for i, z in enumerate(vec)]


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_scenario(args) -> int:
    params = {}
    for key, flag in (("n", args.n), ("m", args.m), ("trials", args.trials),
                      ("seed", args.seed), ("horizon", args.horizon),
                      ("tol", args.tol)):
        if flag is not None:
            params[key] = flag
    for item in args.param or []:
        if "=" not in item:
            raise _CliError(f"--param expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        if key in params:
            raise _CliError(f"parameter {key!r} given twice")
        try:
            val = int(raw)
        except ValueError:
            try:
                val = float(raw)
            except ValueError:
                val = raw
        params[key] = val
    result = run_scenario(args.name, params)
    if args.format == "csv":
        _emit(_tables_to_csv(result.tables, result.reports), args.out)
    else:
        _emit(_to_json(result.to_json_dict()), args.out)
    return 0


def _cmd_evolve(args) -> int:
    t = _load_tailed(args.graph)
    vec = _parse_state_arg(t, args.source, args.pair_source, args.state,
                           "source")
    state = evolve(t, vec, args.time, args.tol)
    payload = {
        "time": args.time,
        "tol": args.tol,
        "truncation": state.truncation,
        "norm": state.norm(),
        "base": [[float(z.real), float(z.imag)] for z in state.finite_amps],
        "tails": [[[float(z.real), float(z.imag)] for z in amp]
                  for amp in state.tail_amps],
    }
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("location", "index", "re", "im", "abs"))
        writer.writerows(_complex_rows(state.finite_amps, "base"))
        for k, amp in enumerate(state.tail_amps):
            writer.writerows(_complex_rows(amp, f"tail{k}"))
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_to_json(payload), args.out)
    return 0


def _cmd_decouple(args) -> int:
    t = _load_tailed(args.graph)
    form = decouple(t)
    residual = verify_decoupling(t, form, args.truncation)
    payload = {
        "dark_dimension": form.dark_dimension,
        "krylov_dimension": len(form.jacobi.diag),
        "jacobi": {
            "diag": [float(x) for x in form.jacobi.diag],
            "offdiag": [float(x) for x in form.jacobi.offdiag],
            "tail_coupling": float(form.jacobi.tail_coupling),
        },
        "dark_eigenvalues": [float(x) for x in dark_eigenvalues(form)],
        "residual": float(residual),
        "residual_truncation": args.truncation,
    }
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("key", "value"))
        for key in sorted(payload):
            writer.writerow((key, json.dumps(payload[key], sort_keys=True)))
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_to_json(payload), args.out)
    return 0


def _cmd_certify(args) -> int:
    t = _load_tailed(args.graph)
    src = _parse_state_arg(t, args.source, args.pair_source,
                           args.source_state, "source")
    tgt = _parse_state_arg(t, args.target, args.pair_target,
                           args.target_state, "target")
    if t.tails:
        form = decouple(t)
        block = form.dark_block
        s = form.dark_basis.conj().T @ src
        g = form.dark_basis.conj().T @ tgt
        dark_weights = (float(np.linalg.norm(s) ** 2),
                        float(np.linalg.norm(g) ** 2))
    else:
        block = t.base.adjacency()
        s, g = src, tgt
        dark_weights = None
    try:
        certs = detect_pst(block, s, g, args.horizon, args.threshold)
    except NoTransferPossible as exc:
        payload = {"certificates": [], "no_transfer_reason": str(exc)}
        _emit(_to_json(payload), args.out)
        return 0
    payload = {
        "horizon": args.horizon,
        "threshold": args.threshold,
        "certificates": [c.to_json_dict() for c in certs],
    }
    if dark_weights is not None:
        payload["source_dark_weight"], payload["target_dark_weight"] = \
            dark_weights
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(("time", "fidelity", "threshold"))
        for c in certs:
            writer.writerow((c.time, c.fidelity, c.threshold))
        _emit(buf.getvalue(), args.out)
    else:
        _emit(_to_json(payload), args.out)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _add_common(p):
    p.add_argument("--out", help="write output to this path instead of "
                                 "stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tailwalk",
        description="Quantum walks on graphs with semi-infinite path tails")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", help="run a named preset experiment")
    p.add_argument("name")
    p.add_argument("--param", action="append", metavar="KEY=VALUE",
                   help="scenario parameter (repeatable)")
    p.add_argument("--n", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--horizon", type=float)
    p.add_argument("--tol", type=float)
    _add_common(p)
    p.set_defaults(func=_cmd_scenario)

    p = sub.add_parser("evolve", help="propagate a state and print it")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", help="source vertex id or label")
    p.add_argument("--pair-source", metavar="A:B",
                   help="pair state (e_A - e_B)/sqrt(2)")
    p.add_argument("--state", help="JSON state file")
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_common(p)
    p.set_defaults(func=_cmd_evolve)

    p = sub.add_parser("decouple", help="tail decoupling report")
    p.add_argument("--graph", required=True)
    p.add_argument("--truncation", type=int, default=100,
                   help="tail length for the residual check")
    _add_common(p)
    p.set_defaults(func=_cmd_decouple)

    p = sub.add_parser("certify", help="search for near-perfect transfer")
    p.add_argument("--graph", required=True)
    p.add_argument("--source", help="source vertex id or label")
    p.add_argument("--pair-source", metavar="A:B")
    p.add_argument("--source-state", help="JSON state file")
    p.add_argument("--target", help="target vertex id or label")
    p.add_argument("--pair-target", metavar="A:B")
    p.add_argument("--target-state", help="JSON state file")
    p.add_argument("--horizon", type=float, default=10.0)
    p.add_argument("--threshold", type=float, default=PST_THRESHOLD)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _add_common(p)
    p.set_defaults(func=_cmd_certify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TruncationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (_CliError, ScenarioParamError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
