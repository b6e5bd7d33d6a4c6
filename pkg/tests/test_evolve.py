"""Tests for tailed time evolution, fidelity, sedentariness, and transfer
detection."""
import math

import numpy as np
import pytest

from tailwalk import (
    FidelityCurve,
    NoTransferPossible,
    PSTCertificate,
    State,
    Tail,
    TailedGraph,
    TruncationError,
    attach_tail,
    cartesian,
    choose_truncation,
    complete,
    detect_pst,
    evolve,
    fidelity,
    fidelity_curve,
    krawtchouk_chain,
    oriented_clique3,
    pair_state,
    path,
    sedentariness,
)
from tailwalk.evolve import PST_THRESHOLD

from reference import dense_tailed, eigh_propagate


def lollipop(n: int) -> TailedGraph:
    return attach_tail(complete(n), 0, 1.0)


def tailfree(g) -> TailedGraph:
    return TailedGraph(g, ())


# -- choose_truncation and truncation control ---------------------------------

def test_choose_truncation_values():
    assert choose_truncation(0.0) == 30
    assert choose_truncation(10.0) == 55
    assert choose_truncation(-10.0) == 55
    assert choose_truncation(0.4) == 31


def test_evolve_raises_early_for_huge_time():
    with pytest.raises(TruncationError) as ei:
        evolve(lollipop(4), State.from_vertex(lollipop(4), 1), 1e4)
    assert ei.value.L > 1 << 14
    assert "truncation" in str(ei.value)


# -- State and pair_state -----------------------------------------------------

def test_state_from_vertex_and_norm():
    t = lollipop(4)
    s = State.from_vertex(t, 2)
    assert s.norm() == pytest.approx(1.0)
    assert s.finite_amps[2] == 1.0
    assert len(s.tail_amps) == 1 and s.tail_amps[0].size == 0
    assert s.truncation == 0


def test_state_from_vector_rejects_wrong_length():
    with pytest.raises(ValueError, match="length"):
        State.from_vector(lollipop(4), np.ones(3))


def test_evolve_rejects_non_unit_state():
    t = lollipop(4)
    bad = State.from_vector(t, np.array([0.5, 0, 0, 0]))
    with pytest.raises(ValueError, match="unit"):
        evolve(t, bad, 1.0)


def test_evolve_rejects_deep_tail_support():
    t = lollipop(4)
    deep = State(np.zeros(4, dtype=np.complex128),
                 (np.array([0.0, 1.0], dtype=np.complex128),))
    with pytest.raises(ValueError, match="first tail site"):
        evolve(t, deep, 1.0)


def test_evolve_accepts_first_tail_site_support():
    t = lollipop(4)
    first = State(np.zeros(4, dtype=np.complex128),
                  (np.array([1.0], dtype=np.complex128),))
    out = evolve(t, first, 0.5)
    assert out.norm() == pytest.approx(1.0, abs=1e-9)


def test_pair_state_values_and_validation():
    v = pair_state(lollipop(4), 1, 3)
    assert v[1] == pytest.approx(1 / math.sqrt(2))
    assert v[3] == pytest.approx(-1 / math.sqrt(2))
    assert np.linalg.norm(v) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        pair_state(lollipop(4), 2, 2)
    # plain graphs work too
    assert pair_state(path(3), 0, 2).shape == (3,)


# -- evolve -------------------------------------------------------------------

def test_evolve_time_zero_is_identity():
    t = lollipop(5)
    s = State.from_vertex(t, 3)
    out = evolve(t, s, 0.0)
    assert np.allclose(out.finite_amps, s.finite_amps, atol=1e-12)
    for amp in out.tail_amps:
        assert np.max(np.abs(amp)) <= 1e-12


def test_evolve_conserves_norm():
    t = lollipop(6)
    for time in (0.7, 5.0, 12.5):
        out = evolve(t, State.from_vertex(t, 1), time)
        assert out.norm() == pytest.approx(1.0, abs=1e-9)


def test_evolve_tail_free_matches_direct_exponential():
    g = complete(4)
    t = tailfree(g)
    s = State.from_vertex(t, 0)
    out = evolve(t, s, 1.3)
    oracle = eigh_propagate(g.adjacency(), np.eye(4)[0], 1.3)
    assert np.linalg.norm(out.finite_amps - oracle) <= 1e-12
    assert out.tail_amps == ()


def test_evolve_group_law_tail_free():
    g = krawtchouk_chain(4)
    t = tailfree(g)
    s = State.from_vertex(t, 2)
    one = evolve(t, evolve(t, s, 0.9), 1.7)
    both = evolve(t, s, 2.6)
    assert np.linalg.norm(one.finite_amps - both.finite_amps) <= 1e-10


def test_evolve_matches_dense_oracle_at_long_time():
    t = lollipop(10)
    src = np.zeros(10)
    src[1] = 1.0
    out = evolve(t, State.from_vector(t, src), 20.0)
    dense = dense_tailed(t.base.adjacency(), [(0, 1.0)], 800)
    big = np.zeros(810, dtype=np.complex128)
    big[1] = 1.0
    oracle = eigh_propagate(dense, big, 20.0)
    assert np.max(np.abs(out.finite_amps - oracle[:10])) <= 1e-8


def test_evolve_group_law_through_tail():
    # Composing two short evolutions matches one long one on the base block.
    t = lollipop(5)
    s = State.from_vertex(t, 2)
    mid = evolve(t, s, 1.0)
    # renormalize the truncated intermediate before the second leg
    vec = np.concatenate([mid.finite_amps] + [a for a in mid.tail_amps])
    direct = evolve(t, s, 2.5)
    dense = dense_tailed(t.base.adjacency(), [(0, 1.0)], mid.truncation)
    second = eigh_propagate(dense, vec, 1.5)
    assert np.max(np.abs(second[:5] - direct.finite_amps)) <= 1e-8


# -- fidelity and fidelity_curve ----------------------------------------------

def test_fidelity_is_symmetric_in_time_for_real_weights():
    t = lollipop(5)
    a = fidelity(t, State.from_vertex(t, 1), State.from_vertex(t, 2), 3.0)
    b = fidelity(t, State.from_vertex(t, 1), State.from_vertex(t, 2), -3.0)
    assert a == pytest.approx(b, abs=1e-9)


def test_fidelity_at_zero_is_overlap():
    t = lollipop(4)
    s = State.from_vertex(t, 1)
    assert fidelity(t, s, s, 0.0) == pytest.approx(1.0, abs=1e-12)
    other = State.from_vertex(t, 2)
    assert fidelity(t, s, other, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_fidelity_curve_matches_pointwise_fidelity():
    t = lollipop(5)
    src = State.from_vertex(t, 1)
    times = np.linspace(0.0, 6.0, 25)
    curve = fidelity_curve(t, src, src, times)
    assert isinstance(curve, FidelityCurve)
    assert curve.converged and curve.truncation >= 30
    for i in (0, 7, 24):
        spot = fidelity(t, src, src, float(times[i]))
        assert curve.magnitudes[i] == pytest.approx(spot, abs=1e-8)


def test_fidelity_curve_min_max_helpers():
    t = tailfree(path(2))
    src = State.from_vertex(t, 0)
    tgt = State.from_vertex(t, 1)
    times = np.linspace(0.0, math.pi, 201)
    curve = fidelity_curve(t, src, tgt, times)
    t_best, mag_best = curve.max()
    assert t_best == pytest.approx(math.pi / 2, abs=0.02)
    assert mag_best == pytest.approx(1.0, abs=1e-4)
    t_worst, mag_worst = curve.min()
    assert mag_worst == pytest.approx(0.0, abs=1e-4)
    assert t_worst in (times[0], times[-1])


# -- sedentariness -------------------------------------------------------------

def test_sedentary_clique_vertex_respects_analytic_bound():
    # Non-attachment vertex of the tailed 10-clique stays heavy at all times.
    t = lollipop(10)
    times = np.arange(0.0, 8.0, 0.05)
    rep = sedentariness(t, 1, times)
    assert rep.vertex == 1
    assert rep.analytic_bound == pytest.approx(7.0 / 9.0, abs=1e-12)
    assert rep.min_magnitude >= rep.analytic_bound
    assert 0.0 <= rep.min_time <= 8.0


def test_attachment_vertex_has_no_dark_bound():
    t = lollipop(6)
    rep = sedentariness(t, 0, np.arange(0.0, 4.0, 0.1))
    assert rep.analytic_bound is None


def test_grid_vertex_bound_is_none_with_spread_dark_spectrum():
    t = attach_tail(cartesian(path(3), path(3)), 0, 1.0)
    rep = sedentariness(t, 4, np.arange(0.0, 3.0, 0.1))
    assert rep.analytic_bound is None


def test_sedentariness_rejects_bad_vertex():
    with pytest.raises(ValueError):
        sedentariness(lollipop(4), 9, [0.0, 1.0])


# -- detect_pst ----------------------------------------------------------------

def test_detect_pst_edge_transfer():
    certs = detect_pst(path(2).adjacency(), [1, 0], [0, 1], horizon=5.0)
    times = [c.time for c in certs]
    assert len(times) == 2
    assert times[0] == pytest.approx(math.pi / 2, abs=1e-6)
    assert times[1] == pytest.approx(3 * math.pi / 2, abs=1e-6)
    for c in certs:
        assert c.fidelity >= PST_THRESHOLD
        assert c.fidelity_from_support() == pytest.approx(c.fidelity, abs=1e-9)
        assert max(abs(row[3]) for row in c.eigen_support) <= 1e-5


def test_detect_pst_weighted_chain_endpoints():
    for n in (2, 3, 5):
        g = krawtchouk_chain(n)
        src = np.zeros(n + 1)
        tgt = np.zeros(n + 1)
        src[0] = tgt[n] = 1.0
        certs = detect_pst(g.adjacency(), src, tgt, horizon=2.0)
        assert certs, f"no transfer found for chain {n}"
        assert certs[0].time == pytest.approx(math.pi / 2, abs=1e-6)
        assert certs[0].fidelity >= PST_THRESHOLD


def test_detect_pst_oriented_triangle_universal_times():
    a = oriented_clique3().adjacency()
    period = 2 * math.pi / math.sqrt(3)
    c01 = detect_pst(a, np.eye(3)[0], np.eye(3)[1], horizon=8.0)
    assert [c.time for c in c01] == [
        pytest.approx(period / 3, abs=1e-6),
        pytest.approx(4 * period / 3, abs=1e-6)]
    c02 = detect_pst(a, np.eye(3)[0], np.eye(3)[2], horizon=8.0)
    assert [c.time for c in c02] == [
        pytest.approx(2 * period / 3, abs=1e-6),
        pytest.approx(5 * period / 3, abs=1e-6)]
    for c in c02 + c01:
        assert c.fidelity >= PST_THRESHOLD


def test_detect_pst_no_shared_support():
    # Middle vertex of a 3-path is even under the flip; the pair state is odd.
    with pytest.raises(NoTransferPossible):
        detect_pst(path(3).adjacency(), [0, 1, 0], pair_state(path(3), 0, 2),
                   horizon=5.0)


def test_detect_pst_below_threshold_returns_empty():
    g = path(4)
    src = np.zeros(4)
    tgt = np.zeros(4)
    src[0] = tgt[3] = 1.0
    assert detect_pst(g.adjacency(), src, tgt, horizon=10.0) == []


def test_detect_pst_constant_curve():
    zero = np.zeros((2, 2))
    certs = detect_pst(zero, [1, 0], [1, 0], horizon=3.0)
    assert len(certs) == 1 and certs[0].time == 0.0
    assert certs[0].fidelity == pytest.approx(1.0)
    weak = detect_pst(zero, [1, 0], [1 / math.sqrt(2), 1 / math.sqrt(2)],
                      horizon=3.0)
    assert weak == []


def test_detect_pst_requires_positive_horizon():
    with pytest.raises(ValueError):
        detect_pst(path(2).adjacency(), [1, 0], [0, 1], horizon=0.0)


def test_certificate_json_dict_shape():
    certs = detect_pst(path(2).adjacency(), [1, 0], [0, 1], horizon=2.0)
    doc = certs[0].to_json_dict()
    assert set(doc) == {"time", "fidelity", "threshold", "source", "target",
                        "eigen_support"}
    assert len(doc["eigen_support"]) == 2
    row = doc["eigen_support"][0]
    assert set(row) == {"eigenvalue", "source_coeff", "target_coeff",
                        "phase_error"}


def test_certificate_threshold_recorded():
    certs = detect_pst(path(2).adjacency(), [1, 0], [0, 1], horizon=2.0,
                       threshold=0.9)
    assert certs[0].threshold == 0.9
