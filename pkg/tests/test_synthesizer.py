import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unifourier.certificate import certify_targeting
from unifourier.exceptions import GapTooSmall, InvalidInput, SearchExhausted, StageConflict
from unifourier.gadgets import IndexSetSpec, single_point_target
from unifourier.synthesizer import (
    ExhaustionSchedule,
    TargetSpec,
    min_gap,
    multi_point_target,
    split_point,
    universal_function,
)
from unifourier.trig_core import TWO_PI, TrigPoly, certified_sup_norm, evaluate, partial_sum

LAM = IndexSetSpec(0, 100_000)
THIRDS = (0.0, TWO_PI / 3, 2 * TWO_PI / 3)
SEVEN = tuple(TWO_PI * k / 7 for k in range(7))


def sn_on(f, n, pts):
    return np.atleast_1d(evaluate(partial_sum(f, n), np.asarray(pts, dtype=float)))


def test_target_spec_validation():
    with pytest.raises(InvalidInput):
        TargetSpec((), ())
    with pytest.raises(InvalidInput):
        TargetSpec((0.0, TWO_PI), (1, 2))
    with pytest.raises(InvalidInput):
        TargetSpec((0.0, 1.0), (1,))
    assert TargetSpec((-1.0,), (2,)).points[0] == pytest.approx(TWO_PI - 1.0)


def test_split_point_is_most_isolated():
    pts = [0.0, 0.5, 3.0]
    assert split_point(pts) == 2
    assert min_gap(pts) == pytest.approx(0.5)


def test_single_point_delegation_identical():
    g = TrigPoly.from_dict({1: 0.2})
    spec = TargetSpec((1.0,), (0.9,))
    a = multi_point_target(g, spec, 0.5, LAM)
    b = single_point_target(g, 1.0, 0.9, 0.5, LAM)
    assert a[1] == b[1] and a[2].to_json() == b[2].to_json()


def test_trivial_targets_return_g():
    g = TrigPoly.from_dict({-3: 0.1, 2: 0.2j})
    vals = tuple(complex(v) for v in np.atleast_1d(evaluate(g, np.array(THIRDS))))
    f, n, cert = multi_point_target(g, TargetSpec(THIRDS, vals), 0.3, IndexSetSpec(1, 100))
    assert f is g and n == 3 and cert.passed


def test_three_point_example_is_out_of_reach():
    # |h| = 3 > eps * L_{1e5} = 2.968
    with pytest.raises(SearchExhausted):
        multi_point_target(TrigPoly.zero(), TargetSpec(THIRDS, (1, -2, 3j)), 0.5, LAM)


def test_three_point_reachable_version():
    spec = TargetSpec(THIRDS, (0.5, -1, 1.5j))
    f, n, cert = multi_point_target(TrigPoly.zero(), spec, 0.5, LAM)
    assert cert.passed
    _, up = certified_sup_norm(f, oversample=32)
    assert up < 0.5
    assert np.max(np.abs(sn_on(f, n, THIRDS) - np.array(spec.values))) < 0.5


def test_certificate_independent_of_construction():
    spec = TargetSpec((0.3, 2.0, 4.1), (0.4, 0.2j, -0.6))
    g = TrigPoly.from_dict({0: 0.1, 2: -0.1})
    f, n, cert = multi_point_target(g, spec, 0.4, LAM)
    again = certify_targeting(f, g, n, spec.points, spec.values, 0.4, oversample=16)
    assert [c.passed for c in again.clauses] == [c.passed for c in cert.clauses]
    assert [c.achieved for c in again.clauses] == [c.achieved for c in cert.clauses]


def test_audit_and_residues():
    spec = TargetSpec((0.0, 1.5, 3.0, 4.5), (0.8, -0.8, 0.8j, -0.8j))
    eps = 0.6
    f, n, cert = multi_point_target(TrigPoly.zero(), spec, eps, LAM)
    audit = cert.parameters["localization_audit"]
    assert len(audit) == 3
    for rec in audit:
        for key in ("uphi_minus_u_on_F", "uphi_at_t0", "vrest_minus_v_at_t0", "vrest_on_F"):
            assert rec[key] < eps / 3
        assert rec["budget_F"] < eps and rec["budget_t0"] < eps


def test_gap_too_small():
    tight = IndexSetSpec(0, 100_000)
    cfg_spec = TargetSpec((1.0, 1.0 + 1e-4), (0.5, -0.5))
    with pytest.raises(GapTooSmall):
        multi_point_target(TrigPoly.zero(), cfg_spec, 0.5, tight)


@settings(max_examples=5, deadline=None)
@given(st.permutations([0, 1, 2, 3]), st.integers(0, 2**16))
def test_permutation_invariance_of_contract(order, seed):
    rng = np.random.default_rng(seed)
    pts = [0.2, 1.9, 3.3, 5.0]
    vals = [complex(x) for x in rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)]
    spec = TargetSpec(tuple(pts[i] for i in order), tuple(vals[i] for i in order))
    f, n, cert = multi_point_target(TrigPoly.zero(), spec, 0.6, LAM)
    assert cert.passed


# -- schedules -------------------------------------------------------------------


def test_schedule_validation():
    with pytest.raises(InvalidInput):
        ExhaustionSchedule(((0.0, 1.0), (1.0,)))
    with pytest.raises(InvalidInput):
        ExhaustionSchedule(((0.0,), (0.0, 1.0)), (0.5, 1.0))
    with pytest.raises(InvalidInput):
        ExhaustionSchedule(((0.0,),), (0.0,))
    s = ExhaustionSchedule.prefixes([0.0, 1.0, 2.0], 3)
    assert s.tolerances == (1.0, 0.5, 1.0 / 3.0)
    assert s.stages[1] == (0.0, 1.0)


def test_universal_single_stage_matches_multi_point():
    h = {0.0: 0.6, 2.0: -0.6j}
    sched = ExhaustionSchedule(((0.0, 2.0),), (0.8,))
    res = universal_function(TrigPoly.zero(), h, sched, 0.5, LAM)
    f, n, cert = multi_point_target(TrigPoly.zero(), TargetSpec((0.0, 2.0), (0.6, -0.6j)), 0.5, LAM)
    assert res.indices == [n]
    assert res.certificates[0].to_json() == cert.to_json()
    assert res.f.allclose(f, atol=0)


def test_universal_trivial():
    g = TrigPoly.from_dict({2: 0.3})
    h = {t: complex(evaluate(g, t)) for t in SEVEN[:3]}
    res = universal_function(g, h, ExhaustionSchedule.prefixes(SEVEN, 3), 1.0, LAM)
    assert res.f is g and res.passed
    assert res.indices == sorted(set(res.indices)) and res.indices[0] >= 2


def test_universal_three_stage_example():
    h = {t: 1j**k for k, t in enumerate(SEVEN)}
    sched = ExhaustionSchedule.prefixes(SEVEN, 3)
    res = universal_function(TrigPoly.zero(), h, sched, 1.0)
    assert res.passed
    assert all(b > a for a, b in zip(res.indices, res.indices[1:]))
    _, up = certified_sup_norm(res.f, oversample=16)
    assert up < 1.0
    for j, (stage, n) in enumerate(zip(sched.stages, res.indices), start=1):
        err = np.abs(sn_on(res.f, n, stage) - np.array([h[t] for t in stage]))
        assert np.max(err) < 1.0 / j
    recs = [json.loads(r.to_json()) for r in res.log]
    assert [r["stage"] for r in recs] == [1, 2, 3]
    assert all(set(r) == {"stage", "n", "norm_added", "clauses"} for r in recs)


def test_universal_stage_conflict_reports_stage():
    h = {t: 1j**k for k, t in enumerate(SEVEN)}
    with pytest.raises(StageConflict) as info:
        universal_function(TrigPoly.zero(), h, ExhaustionSchedule.prefixes(SEVEN, 3), 1e-12, LAM)
    # stage 1 only needs |s_n f(0) - 1| < 1, which any tiny nonzero push achieves
    assert info.value.stage == 2


def test_universal_missing_value():
    with pytest.raises(InvalidInput):
        universal_function(TrigPoly.zero(), {0.0: 1}, ExhaustionSchedule.prefixes([0.0, 1.0], 2), 1.0)


def test_universal_rejects_bad_budget():
    with pytest.raises(InvalidInput):
        universal_function(TrigPoly.zero(), {0.0: 1}, ExhaustionSchedule.prefixes([0.0], 1), 0.0)
