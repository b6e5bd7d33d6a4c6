"""Preset experiment runners.

Each scenario builds its graphs from the library constructors, runs the
evolution/detection machinery, and packages plot-ready tables, summary
reports, and transfer certificates into a ScenarioResult.  Re-running a
scenario with the same parameters reproduces the payload exactly (the
``meta`` block carrying timestamp and wall-clock is excluded from that
guarantee).
"""
from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from .cube import (clebsch_gordan_square, dark_modules_of_tailed_cube,
                   zeta_state)
from .decouple import decouple, reduce_multitail, truncated_operator
from .evolve import (DEFAULT_TOL, PST_THRESHOLD, State, detect_pst, evolve,
                     fidelity, fidelity_curve, pair_state, sedentariness)
from .graphs import (Graph, RootedPiece, TAIL, Tail, TailedGraph, attach_tail,
                     cartesian, complete, cone, empty_graph, hypercube,
                     krawtchouk_chain, mcone, oriented_clique3, path,
                     rooted_product, series_graph)
from .linalg import hermitian_eig
from .partitions import controllability, random_graph

__all__ = ["ScenarioResult", "ScenarioParamError", "run_scenario", "SCENARIOS"]


class ScenarioParamError(ValueError):
    """Invalid scenario parameters; the message carries usage text."""


@dataclass(frozen=True, eq=False)
class ScenarioResult:
    """Deterministic payload of one scenario run.

    ``tables`` maps table name to {"columns": [...], "rows": [[...], ...]};
    ``certificates`` is a tuple of {"label": str, "certificate":
    PSTCertificate}; ``meta`` holds timestamp and wall-clock and is the only
    non-reproducible part.
    """

    name: str
    params: dict
    tables: dict
    reports: dict
    certificates: tuple
    seeds: tuple
    meta: dict

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "params": self.params,
            "tables": self.tables,
            "reports": self.reports,
            "certificates": [
                {"label": c["label"], **c["certificate"].to_json_dict()}
                for c in self.certificates
            ],
            "seeds": list(self.seeds),
            "meta": self.meta,
        }


def _table(columns, rows) -> dict:
    return {"columns": list(columns),
            "rows": [[_plain(x) for x in row] for row in rows]}


def _plain(x):
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    return x


def _grid(t_max: float, step: float) -> np.ndarray:
    return np.arange(0.0, t_max + step / 2, step)


def _refined_peak(t, source, target, around: float, half_width: float,
                  tol: float) -> tuple:
    """Fine local search of the fidelity peak near a nominal time."""
    lo = max(0.0, around - half_width)
    fine = np.linspace(lo, around + half_width, 4001)
    curve = fidelity_curve(t, source, target, fine, tol)
    return curve.max()


def _base_overlap(t: TailedGraph, source, target, time: float,
                  tol: float) -> complex:
    """<target, U(time) source> for a base-supported target (phase kept)."""
    ev = evolve(t, source, time, tol)
    tgt = target.finite_amps if isinstance(target, State) else \
        np.asarray(target, dtype=np.complex128)
    return complex(np.vdot(tgt, ev.finite_amps))


# ---------------------------------------------------------------------------
# parameter handling
# ---------------------------------------------------------------------------

def _coerce(kind, value):
    if kind is int:
        if isinstance(value, bool):
            raise ValueError("expected integer")
        return int(value)
    if kind is float:
        return float(value)
    raise TypeError(f"unsupported parameter kind {kind}")


def _validate_params(name: str, schema: dict, params: dict) -> dict:
    params = dict(params or {})
    out = {}
    for key, (kind, default) in schema.items():
        if key in params:
            try:
                out[key] = _coerce(kind, params.pop(key))
            except (TypeError, ValueError):
                raise ScenarioParamError(
                    f"scenario {name!r}: parameter {key!r} must be "
                    f"{kind.__name__}\n{_usage(name)}") from None
        else:
            out[key] = default
    if params:
        unknown = ", ".join(sorted(params))
        raise ScenarioParamError(
            f"scenario {name!r}: unknown parameter(s) {unknown}\n"
            f"{_usage(name)}")
    return out


def _usage(name: str) -> str:
    schema = SCENARIOS[name]["schema"]
    parts = [f"{k}:{kind.__name__} (default {dflt})"
             for k, (kind, dflt) in schema.items()]
    return f"usage: {name} accepts " + (", ".join(parts) if parts
                                        else "no parameters")


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

def _scn_lollipop(p):
    n, tol = p["n"], p["tol"]
    if n < 4:
        raise ScenarioParamError("lollipop-sedentary needs n >= 4")
    lolli = attach_tail(complete(n), 0)
    times = _grid(p["t_max"], p["step"])
    rep = sedentariness(lolli, 1, times, tol)
    curve = fidelity_curve(lolli, State.from_vertex(lolli, 1),
                           State.from_vertex(lolli, 1), times, tol)
    # the tail-free clique return has a two-term closed form; measure the gap
    bare = TailedGraph(complete(n), ())
    free = fidelity_curve(bare, State.from_vertex(bare, 1),
                          State.from_vertex(bare, 1), times, tol)
    formula = np.abs(np.exp(-1j * times * (n - 1)) / n
                     + np.exp(1j * times) * (1 - 1 / n))
    tables = {
        "return_curve": _table(("t", "magnitude"),
                               zip(times, curve.magnitudes)),
    }
    reports = {
        "n": n,
        "vertex": 1,
        "min_magnitude": rep.min_magnitude,
        "min_time": rep.min_time,
        "analytic_bound": rep.analytic_bound,
        "bound_satisfied": (rep.analytic_bound is not None
                            and rep.min_magnitude >= rep.analytic_bound),
        "tail_free_formula_max_deviation":
            float(np.max(np.abs(free.magnitudes - formula))),
        "truncation": rep.truncation,
    }
    return tables, reports, (), ()


def _scn_multicone(p):
    m, n, tol = p["m"], p["n"], p["tol"]
    if m < 1 or n < 3:
        raise ScenarioParamError("multicone-sedentary needs m >= 1, n >= 3")
    base = mcone(m, complete(n))
    full = TailedGraph(base, tuple(Tail(i, 1.0) for i in range(m)))
    reduced = reduce_multitail(full)
    times = _grid(p["t_max"], p["step"])
    rep = sedentariness(reduced, 1, times, tol)
    # the merge is an exact unitary equivalence, so full and reduced agree
    # already at any matched truncation; compare there to keep the 4-tail
    # eigenproblem small
    L = 90
    u = m
    full_dec = hermitian_eig(truncated_operator(full, L))
    red_dec = hermitian_eig(truncated_operator(reduced, L))
    e_full = np.zeros(full_dec.eigenvalues.size, dtype=np.complex128)
    e_full[u] = 1.0
    e_red = np.zeros(red_dec.eigenvalues.size, dtype=np.complex128)
    e_red[1] = 1.0
    f_full = np.abs(full_dec.propagate_many(times, e_full)[:, u])
    f_red = np.abs(red_dec.propagate_many(times, e_red)[:, 1])
    tables = {
        "return_curve_reduced": _table(("t", "magnitude"),
                                       zip(times, f_red)),
    }
    reports = {
        "m": m,
        "n": n,
        "clique_vertex_full": u,
        "clique_vertex_reduced": 1,
        "min_magnitude": rep.min_magnitude,
        "min_time": rep.min_time,
        "analytic_bound": rep.analytic_bound,
        "bound_satisfied": (rep.analytic_bound is not None
                            and rep.min_magnitude >= rep.analytic_bound),
        "full_vs_reduced_max_deviation":
            float(np.max(np.abs(f_full - f_red))),
        "matched_truncation": L,
        "truncation": rep.truncation,
    }
    return tables, reports, (), ()


def _scn_cone_cube(p):
    tol = p["tol"]
    n_min, n_max = p["n_min"], p["n_max"]
    if not (2 <= n_min <= n_max <= 8):
        raise ScenarioParamError(
            "cone-cube-transport needs 2 <= n_min <= n_max <= 8")
    times = _grid(p["horizon"], p["step"])
    rows = []
    deficits = []
    for n in range(n_min, n_max + 1):
        tg = attach_tail(cone(hypercube(n)), 0)
        src = State.from_vertex(tg, 1)
        tgt = State.from_vertex(tg, 1 + ((1 << n) - 1))
        curve = fidelity_curve(tg, src, tgt, times, tol)
        t0, _ = curve.max()
        peak_t, peak_f = _refined_peak(tg, src, tgt, t0, 2 * p["step"], tol)
        f_half_pi = fidelity(tg, src, tgt, math.pi / 2, tol)
        f_n_half_pi = fidelity(tg, src, tgt, n * math.pi / 2, tol)
        rows.append((n, peak_t, peak_f, 1.0 - peak_f, f_half_pi, f_n_half_pi))
        deficits.append(1.0 - peak_f)
    tables = {"transport": _table(
        ("n", "peak_time", "peak_fidelity", "deficit",
         "fidelity_at_pi_over_2", "fidelity_at_n_pi_over_2"), rows)}
    reports = {
        "deficit_monotone_decreasing":
            all(b < a for a, b in zip(deficits, deficits[1:])),
        "deficits": [float(d) for d in deficits],
        "peak_times": [float(r[1]) for r in rows],
    }
    return tables, reports, (), ()


def _scn_random_controllability(p):
    n, trials, seed0 = p["n"], p["trials"], p["seed"]
    if n < 2 or trials < 1:
        raise ScenarioParamError(
            "random-controllability needs n >= 2, trials >= 1")
    rows = []
    good_cone = []
    good_plain = []
    seeds = tuple(range(seed0, seed0 + trials))
    for s in seeds:
        g = random_graph(n, s)
        c = cone(g)
        rep_c = controllability(c, 0)
        rep_g = controllability(g, 0)
        rows.append((s, rep_c.rank, rep_c.dark_dimension, rep_c.controllable,
                     rep_g.rank, rep_g.dark_dimension, rep_g.controllable))
        if rep_c.controllable:
            good_cone.append(s)
        if rep_g.controllable:
            good_plain.append(s)
    tables = {"trials": _table(
        ("seed", "cone_rank", "cone_dark_dim", "cone_controllable",
         "rank", "dark_dim", "controllable"), rows)}
    reports = {
        "n": n,
        "trials": trials,
        "cone_controllable_fraction": len(good_cone) / trials,
        "plain_controllable_fraction": len(good_plain) / trials,
        "cone_controllable_seeds": good_cone,
    }
    return tables, reports, (), seeds


def _scn_series_k3(p):
    tol = p["tol"]
    tau1 = 2 * math.pi / (3 * math.sqrt(3))
    tau2 = 4 * math.pi / (3 * math.sqrt(3))
    tg = attach_tail(
        series_graph([empty_graph(1), oriented_clique3(), oriented_clique3()]),
        0)
    rows = []
    for copy_id, off in ((1, 1), (2, 4)):
        for a, b, tau in ((0, 2, tau1), (0, 1, tau2)):
            src = State.from_vertex(tg, off + a)
            tgt = State.from_vertex(tg, off + b)
            f_tau = fidelity(tg, src, tgt, tau, tol)
            pk_t, pk_f = _refined_peak(tg, src, tgt, tau, 0.5, tol)
            rows.append((copy_id, off + a, off + b, tau, f_tau, pk_t, pk_f))
    tri = oriented_clique3().adjacency()
    certs = []
    e = np.eye(3, dtype=np.complex128)
    for a, b in ((0, 1), (0, 2)):
        for cert in detect_pst(tri, e[a], e[b], p["horizon"]):
            certs.append({"label": f"isolated-triangle {a}->{b}",
                          "certificate": cert})
    tables = {"series_transfers": _table(
        ("copy", "source", "target", "nominal_time", "fidelity_at_nominal",
         "peak_time", "peak_fidelity"), rows)}
    reports = {
        "tau1": tau1,
        "tau2": tau2,
        "isolated_certificate_times":
            [float(c["certificate"].time) for c in certs],
    }
    return tables, reports, tuple(certs), ()


def _flyswatter_graph() -> Graph:
    grid = cartesian(path(3), path(3))
    labels = [f"{r + 1},{c + 1}" for r in range(3) for c in range(3)]
    return grid.relabel(labels)


def _scn_flyswatter(p):
    tol = p["tol"]
    tau = math.pi / math.sqrt(2.0)
    tg = attach_tail(_flyswatter_graph(), 0)
    src = pair_state(tg, 1, 3)
    tgt = pair_state(tg, 5, 7)
    f = fidelity(tg, src, tgt, tau, tol)
    form = decouple(tg)
    s_dark = form.dark_basis.conj().T @ src
    t_dark = form.dark_basis.conj().T @ tgt
    certs = []
    best = None
    for cert in detect_pst(form.dark_block, s_dark, t_dark, p["horizon"]):
        certs.append({"label": "dark-block pair transfer",
                      "certificate": cert})
        if best is None or abs(cert.time - tau) < abs(best.time - tau):
            best = cert
    consistency = None
    if best is not None:
        consistency = abs(best.fidelity
                          - fidelity(tg, src, tgt, best.time, tol))
    reports = {
        "tau": tau,
        "fidelity_at_tau": f,
        "dark_dimension": form.dark_dimension,
        "pair_dark_weight": float(np.linalg.norm(s_dark) ** 2),
        "certificate_times": [float(c["certificate"].time) for c in certs],
        "dark_vs_full_consistency": consistency,
    }
    return {}, reports, tuple(certs), ()


def _scn_clebsch_gordan(p):
    n = p["n"]
    if not (1 <= n <= 10):
        raise ScenarioParamError("clebsch-gordan-square needs 1 <= n <= 10")
    mods = clebsch_gordan_square(n)
    m = n + 1
    b = np.zeros((m, m))
    for k in range(n):
        b[k + 1, k] = math.sqrt((k + 1) * (n - k))
    a2 = np.kron(b + b.T, np.eye(m)) + np.kron(np.eye(m), b + b.T)
    stacked = np.hstack([mod.basis for mod in mods])
    conj = stacked.conj().T @ a2 @ stacked
    off = conj.copy()
    i0 = 0
    for mod in mods:
        off[i0:i0 + mod.chain_length, i0:i0 + mod.chain_length] = 0.0
        i0 += mod.chain_length
    residual = float(np.linalg.norm(off))
    certs = []
    rows = []
    for mod in mods:
        if mod.chain_length < 2:
            rows.append((mod.chain_length, None, None))
            continue
        restriction = mod.restriction(a2)
        lo, hi = np.eye(mod.chain_length, dtype=np.complex128)[[0, -1]]
        found = detect_pst(restriction, lo, hi, p["horizon"])
        best = min(found, key=lambda c: abs(c.time - math.pi / 2))
        certs.append({"label": f"chain-length-{mod.chain_length} endpoints",
                      "certificate": best})
        rows.append((mod.chain_length, best.time, best.fidelity))
    tables = {"chains": _table(
        ("chain_length", "pst_time", "pst_fidelity"), rows)}
    reports = {
        "n": n,
        "chain_lengths": sorted((mm.chain_length for mm in mods),
                                reverse=True),
        "block_residual": residual,
    }
    return tables, reports, tuple(certs), ()


def _scn_cube_dark(p):
    n, tol = p["n"], p["tol"]
    if not (2 <= n <= 10):
        raise ScenarioParamError("cube-dark-pst needs 2 <= n <= 10")
    tg = attach_tail(hypercube(n), 0)
    src = State.from_vector(tg, zeta_state(n, 1))
    tgt = State.from_vector(tg, zeta_state(n, n - 1))
    f = fidelity(tg, src, tgt, math.pi / 2, tol)
    adj = tg.base.adjacency()
    mods = dark_modules_of_tailed_cube(n)
    certs = []
    rows = []
    constant_ok = True
    for i, mod in enumerate(mods):
        if mod.chain_length == 1:
            # a singleton chain never moves; its return curve is constantly 1
            v = mod.basis[:, 0]
            val = abs(complex(v.conj() @ adj @ v))
            rows.append((i, mod.chain_length, mod.start_level, None, 1.0))
            constant_ok = constant_ok and val < 1e-10
            continue
        restriction = mod.restriction(adj)
        lo, hi = np.eye(mod.chain_length, dtype=np.complex128)[[0, -1]]
        found = detect_pst(restriction, lo, hi, p["horizon"])
        best = min(found, key=lambda c: abs(c.time - math.pi / 2))
        certs.append({"label":
                      f"module-{i} length-{mod.chain_length} endpoints",
                      "certificate": best})
        rows.append((i, mod.chain_length, mod.start_level, best.time,
                     best.fidelity))
    tables = {"modules": _table(
        ("module", "chain_length", "start_level", "pst_time",
         "pst_fidelity"), rows)}
    reports = {
        "n": n,
        "zeta_fidelity_at_pi_over_2": f,
        "dark_dimension": sum(mm.chain_length for mm in mods),
        "expected_dark_dimension": (1 << n) - (n + 1),
        "singleton_chains_stationary": constant_ok,
    }
    return tables, reports, tuple(certs), ()


def _scn_dual_rail(p):
    tol = p["tol"]
    tau = math.pi / 2
    piece = RootedPiece(krawtchouk_chain(4), 0)
    plain = rooted_product(path(3), [piece, TAIL, piece])
    rungs = {(0, 2): 1.0, (3, 7): 1.0, (4, 8): 1.0, (5, 9): 1.0,
             (6, 10): 1.0}
    matched = TailedGraph(plain.base.with_edges(rungs), plain.tails)
    src = pair_state(plain, 0, 2)
    tgt = pair_state(plain, 6, 10)
    a_plain = _base_overlap(plain, State.from_vector(plain, src), tgt, tau,
                            tol)
    a_matched = _base_overlap(matched, State.from_vector(matched, src), tgt,
                              tau, tol)
    diff = math.remainder(np.angle(a_matched) - np.angle(a_plain),
                          2 * math.pi)
    reports = {
        "tau": tau,
        "fidelity_plain": abs(a_plain),
        "fidelity_matched_rungs": abs(a_matched),
        "phase_plain": float(np.angle(a_plain)),
        "phase_matched_rungs": float(np.angle(a_matched)),
        "phase_difference": float(diff),
        "phase_difference_minus_pi_over_2": float(abs(diff) - math.pi / 2),
    }
    return {}, reports, (), ()


SCENARIOS = {
    "lollipop-sedentary": {
        "func": _scn_lollipop,
        "schema": {"n": (int, 10), "t_max": (float, 30.0),
                   "step": (float, 0.01), "tol": (float, DEFAULT_TOL)},
    },
    "multicone-sedentary": {
        "func": _scn_multicone,
        "schema": {"m": (int, 4), "n": (int, 8), "t_max": (float, 30.0),
                   "step": (float, 0.01), "tol": (float, DEFAULT_TOL)},
    },
    "cone-cube-transport": {
        "func": _scn_cone_cube,
        "schema": {"n_min": (int, 3), "n_max": (int, 6),
                   "horizon": (float, 12.0), "step": (float, 0.002),
                   "tol": (float, DEFAULT_TOL)},
    },
    "random-controllability": {
        "func": _scn_random_controllability,
        "schema": {"n": (int, 12), "trials": (int, 50), "seed": (int, 1)},
    },
    "series-oriented-k3": {
        "func": _scn_series_k3,
        "schema": {"horizon": (float, 8.0), "tol": (float, DEFAULT_TOL)},
    },
    "fly-swatter": {
        "func": _scn_flyswatter,
        "schema": {"horizon": (float, 10.0), "tol": (float, DEFAULT_TOL)},
    },
    "clebsch-gordan-square": {
        "func": _scn_clebsch_gordan,
        "schema": {"n": (int, 3), "horizon": (float, 7.0)},
    },
    "cube-dark-pst": {
        "func": _scn_cube_dark,
        "schema": {"n": (int, 4), "horizon": (float, 7.0),
                   "tol": (float, DEFAULT_TOL)},
    },
    "dual-rail": {
        "func": _scn_dual_rail,
        "schema": {"tol": (float, DEFAULT_TOL)},
    },
}


def run_scenario(name: str, params: dict | None = None) -> ScenarioResult:
    """Run a named preset; unknown names list the available ones."""
    if name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise ScenarioParamError(f"unknown scenario {name!r}; "
                                 f"available: {known}")
    entry = SCENARIOS[name]
    used = _validate_params(name, entry["schema"], params)
    t0 = _time.perf_counter()
    tables, reports, certs, seeds = entry["func"](used)
    wall = _time.perf_counter() - t0
    meta = {
        "timestamp": datetime.now(timezone.utc).isoformat(),
        "wall_clock_s": wall,
    }
    return ScenarioResult(name, used, tables,
                          {k: _plain(v) if not isinstance(v, (list, dict))
                           else v for k, v in reports.items()},
                          tuple(certs), tuple(seeds), meta)
