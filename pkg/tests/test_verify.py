import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unifourier.exceptions import InvalidInput
from unifourier.gadgets import BumpSpec, IndexSetSpec, bump
from unifourier.synthesizer import TargetSpec, multi_point_target
from unifourier.trig_core import TWO_PI, TrigPoly, evaluate, partial_sum
from unifourier.verify import (
    FiniteCompactum,
    bernstein_modulus,
    carleson_return_report,
    grid_values,
    hausdorff_distance,
    localization_report,
    partial_sums_on_set,
    uniform_universality_report,
)

angle_sets = st.lists(st.floats(0, TWO_PI, exclude_max=True), min_size=1, max_size=6)


def test_compactum_sorted_and_deduplicated():
    E = FiniteCompactum((3.0, 1.0, 3.0, TWO_PI + 1.0))
    assert E.points == (1.0, 3.0) or np.allclose(E.points, (1.0, 3.0))
    with pytest.raises(InvalidInput):
        FiniteCompactum(())


def test_hausdorff_examples():
    assert hausdorff_distance([0.0], [0.0]) == 0.0
    assert hausdorff_distance([0.0], [math.pi]) == pytest.approx(math.pi)
    assert hausdorff_distance([0.0], [0.0, math.pi / 2]) == pytest.approx(math.pi / 2)


@settings(max_examples=200)
@given(angle_sets, angle_sets, angle_sets)
def test_hausdorff_metric_axioms(a, b, c):
    A, B, C = FiniteCompactum(tuple(a)), FiniteCompactum(tuple(b)), FiniteCompactum(tuple(c))
    ab = hausdorff_distance(A, B)
    assert ab >= 0
    assert ab == hausdorff_distance(B, A)
    assert hausdorff_distance(A, A) == 0
    assert (ab == 0) == (A.points == B.points)
    assert hausdorff_distance(A, C) <= ab + hausdorff_distance(B, C) + 1e-12


@settings(max_examples=100)
@given(angle_sets, angle_sets, st.integers(0, 2**32 - 1))
def test_sup_over_sets_is_continuous_in_hausdorff_metric(a, b, seed):
    rng = np.random.default_rng(seed)
    d = int(rng.integers(0, 8))
    p = TrigPoly(rng.standard_normal(2 * d + 1) + 1j * rng.standard_normal(2 * d + 1))
    A, B = FiniteCompactum(tuple(a)), FiniteCompactum(tuple(b))
    gap = abs(A.sup_norm(p) - B.sup_norm(p))
    assert gap <= bernstein_modulus(p, hausdorff_distance(A, B)) + 1e-9


def test_grid_values_folds_high_frequencies():
    p = TrigPoly.from_dict({-40: 1.0, 3: 2j, 17: 0.5})
    t = TWO_PI * np.arange(16) / 16
    np.testing.assert_allclose(grid_values(p, 16), evaluate(p, t), atol=1e-12)


def test_partial_sums_on_set_rows():
    rng = np.random.default_rng(1)
    p = TrigPoly(rng.standard_normal(9) + 0j)
    pts = np.array([0.1, 2.0])
    rows = partial_sums_on_set(p, pts, 6)
    for n in range(7):
        np.testing.assert_allclose(rows[n], evaluate(partial_sum(p, n), pts), atol=1e-12)


# -- localization ------------------------------------------------------------------


def sharp_bump():
    spec = BumpSpec(((math.pi - 1.4, math.pi + 1.4),), ((-1.4, 1.4),), 1e-6, 4096)
    return bump(spec)[0]


def test_localization_zero_u():
    rep = localization_report(TrigPoly.zero(), sharp_bump(), [math.pi], 0.0, [8, 64])
    assert all(v == 0 for row in rep.rows for v in row.values())


def test_localization_constant_phi():
    rng = np.random.default_rng(0)
    u = TrigPoly(rng.standard_normal(41) + 0j)
    rep = localization_report(u, TrigPoly.constant(1.0), [1.0, 2.0], 4.0, [5, 50])
    assert all(row["uphi_minus_u_on_F"] == 0 for row in rep.rows)


def test_localization_trend():
    rng = np.random.default_rng(5)
    c = rng.standard_normal(41) + 1j * rng.standard_normal(41)
    u = TrigPoly(c / np.sum(np.abs(c)))
    phi = sharp_bump()
    assert phi.degree + u.degree > 64  # otherwise s_64 already reproduces u phi
    rep = localization_report(u, phi, [math.pi], 0.0, [64, 256, 1024])
    for key in rep.rows[0]:
        assert rep.rows[-1][key] < rep.rows[0][key]
    assert rep.trend_ok()
    assert rep.to_csv().splitlines()[0].startswith("n,")
    assert json.loads(rep.to_json())["trend_ok"] is True


# -- return report ------------------------------------------------------------------


def test_return_report_saturated_indices():
    p = TrigPoly.from_dict({-3: 1, 2: 0.5j})
    rep = carleson_return_report(p, [3, 5], grid=256)
    assert np.all(rep.density == 1.0)
    assert np.max(rep.best_residual) < 1e-12


def test_return_report_requires_indices():
    with pytest.raises(InvalidInput):
        carleson_return_report(TrigPoly.zero(), [])


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_return_density_monotone(seed):
    rng = np.random.default_rng(seed)
    d = 60
    p = TrigPoly((rng.standard_normal(2 * d + 1) + 1j * rng.standard_normal(2 * d + 1)) / np.arange(1, 2 * d + 2))
    idx = sorted(rng.choice(np.arange(1, 80), size=5, replace=False).tolist())
    rep = carleson_return_report(p, idx, grid=512)
    dens = rep.density
    assert np.all((dens >= 0) & (dens <= 1))
    assert np.all(np.diff(dens, axis=0) >= 0)  # nondecreasing in J
    assert np.all(np.diff(dens, axis=1) <= 0)  # nonincreasing as the threshold 1/k shrinks


# -- uniform universality ---------------------------------------------------------


def test_universality_exact_entry():
    f = TrigPoly.from_dict({-2: 1, 1: 0.3})
    rep = uniform_universality_report(f, FiniteCompactum((0.5, 2.0)), [f], n_max=10)
    assert rep.entries[0]["best_error"] < 1e-12 and rep.entries[0]["argmin_n"] == 2


def test_universality_singleton_constants():
    f = TrigPoly.from_dict({0: 0.1, 1: 1.0})
    t0 = 0.7
    consts = [0.1, 0.1 + np.exp(1j * t0)]
    rep = uniform_universality_report(f, FiniteCompactum((t0,)), [TrigPoly.constant(c) for c in consts], 5)
    assert rep.entries[0]["argmin_n"] == 0 and rep.entries[0]["best_error"] < 1e-12
    assert rep.entries[1]["argmin_n"] == 1 and rep.entries[1]["best_error"] < 1e-12


def test_universality_after_targeting():
    E = (0.5, 2.5, 4.5)
    q = TrigPoly.from_dict({1: 0.6, -1: 0.2j})
    spec = TargetSpec(E, tuple(complex(v) for v in np.atleast_1d(evaluate(q, np.array(E)))))
    f, n, cert = multi_point_target(TrigPoly.zero(), spec, 0.3, IndexSetSpec(0, 100_000))
    rep = uniform_universality_report(f, FiniteCompactum(E), [q], n_max=n)
    assert rep.entries[0]["best_error"] < 0.3


def test_universality_requires_dictionary():
    with pytest.raises(InvalidInput):
        uniform_universality_report(TrigPoly.zero(), FiniteCompactum((0.0,)), [], 3)
