import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from unifourier.exceptions import InvalidInput
from unifourier.trig_core import (
    TWO_PI,
    CirclePoint,
    GridFunction,
    SpectralBand,
    TrigPoly,
    canonical_angle,
    certified_sup_norm,
    circle_distance,
    dirichlet_eval,
    dirichlet_kernel,
    evaluate,
    fejer_mean,
    fourier_coeffs,
    lebesgue_constant,
    max_modulus_on_grid,
    modulate,
    multiply,
    partial_sum,
    step_function_coeffs,
    translate,
    vallee_poussin_mean,
)


def exact_lebesgue(n):
    """(1/pi) * sum over the lobes on [0, pi] of |F(b) - F(a)|, F(t) = t + sum 2 sin(kt)/k."""
    k = np.arange(1, n + 1)

    def F(t):
        return t + np.sum(2.0 * np.sin(k * t) / k)

    z = [0.0] + [TWO_PI * j / (2 * n + 1) for j in range(1, n + 1)] + [math.pi]
    vals = [F(t) for t in z]
    return sum(abs(b - a) for a, b in zip(vals, vals[1:])) / math.pi


def rand_poly(rng, d):
    return TrigPoly(rng.standard_normal(2 * d + 1) + 1j * rng.standard_normal(2 * d + 1))


# -- angles ------------------------------------------------------------------


@given(st.floats(-1e6, 1e6, allow_nan=False))
def test_canonical_angle_range(t):
    a = canonical_angle(t)
    assert 0.0 <= a < TWO_PI
    assert 0.0 <= CirclePoint(t).angle < TWO_PI


@given(st.floats(-50, 50), st.floats(-50, 50))
def test_circle_distance_bounds_and_symmetry(a, b):
    d = circle_distance(a, b)
    assert 0.0 <= d <= math.pi + 1e-12
    assert d == pytest.approx(circle_distance(b, a), abs=1e-12)


# -- evaluation ----------------------------------------------------------------


def test_evaluate_examples():
    assert complex(evaluate(TrigPoly.constant(1), 1.234)) == 1
    assert complex(evaluate(TrigPoly.monomial(3), math.pi)) == pytest.approx(-1, abs=1e-12)
    assert complex(evaluate(dirichlet_kernel(2), 0.0)) == pytest.approx(5, abs=1e-12)


def test_triples_round_trip():
    p = TrigPoly.from_dict({-2: 1 + 1j, 0: 3, 1: -0.5j})
    assert p.to_triples()[0] == (-2, 1.0, 1.0)
    assert TrigPoly.from_triples(p.to_triples()).allclose(p)


def test_trim_gives_minimal_degree():
    p = TrigPoly(np.array([0, 0, 1, 2, 0], dtype=complex))
    assert p.trim().degree == 1
    assert TrigPoly(np.zeros(5)).trim().degree == 0


@settings(max_examples=50)
@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_product_and_sum_degrees(d1, d2, seed):
    rng = np.random.default_rng(seed)
    p, q = rand_poly(rng, d1), rand_poly(rng, d2)
    assert (p * q).degree <= d1 + d2
    assert (p + q).degree <= max(d1, d2)
    t = rng.uniform(0, TWO_PI, 5)
    np.testing.assert_allclose(evaluate(multiply(p, q), t), evaluate(p, t) * evaluate(q, t), atol=1e-9)


# -- partial sums ----------------------------------------------------------------


def test_partial_sum_examples():
    p = TrigPoly.from_dict({-3: 1, 2: 2j, 3: -1})
    assert partial_sum(p, 5).allclose(p)
    assert partial_sum(dirichlet_kernel(4), 2).allclose(dirichlet_kernel(2))
    q = TrigPoly.from_dict({3: 1, -1: 1})
    assert partial_sum(q, 1).allclose(TrigPoly.monomial(-1))


@settings(max_examples=50)
@given(st.integers(0, 10), st.integers(0, 12), st.integers(0, 12), st.integers(0, 2**32 - 1))
def test_partial_sum_linear_and_projection(d, n, m, seed):
    rng = np.random.default_rng(seed)
    p, q = rand_poly(rng, d), rand_poly(rng, d)
    a, b = 2.0 - 1j, 0.5j
    lhs = partial_sum(p * a + q * b, n)
    rhs = partial_sum(p, n) * a + partial_sum(q, n) * b
    assert lhs.allclose(rhs, atol=1e-12)
    assert partial_sum(partial_sum(p, n), m).allclose(partial_sum(p, min(n, m)), atol=0)


def test_reproduction_by_dirichlet_convolution():
    rng = np.random.default_rng(3)
    p = rand_poly(rng, 16)
    n, t = 7, 1.1
    N = 4096
    tau = TWO_PI * np.arange(N) / N
    conv = np.mean(evaluate(p, tau) * dirichlet_eval(n, t - tau))
    assert abs(conv - complex(evaluate(partial_sum(p, n), t))) < 1e-8


# -- transforms ----------------------------------------------------------------


def test_fourier_coeffs_examples():
    c = fourier_coeffs(GridFunction.from_poly(TrigPoly.monomial(3), 16))
    expect = TrigPoly.monomial(3).pad(7)
    assert np.max(np.abs(c.coeffs - expect.coeffs)) < 1e-12
    c7 = fourier_coeffs(GridFunction.from_callable(lambda t: 7.0, 8))
    assert abs(c7.coeff(0) - 7) < 1e-12
    rng = np.random.default_rng(10)
    p = rand_poly(rng, 10)
    back = fourier_coeffs(GridFunction.from_poly(p, 64))
    assert np.max(np.abs(back.coeffs - p.pad(31).coeffs)) < 1e-12


@settings(max_examples=40)
@given(st.integers(0, 20), st.integers(0, 2**32 - 1))
def test_fft_round_trip(d, seed):
    p = rand_poly(np.random.default_rng(seed), d)
    N = 1 << max(1, math.ceil(math.log2(2 * d + 2)))
    back = fourier_coeffs(GridFunction.from_poly(p, N))
    assert np.max(np.abs(back.pad(max(back.degree, d)).coeffs - p.pad(max(back.degree, d)).coeffs)) < 1e-10


def test_grid_function_rejects_non_power_of_two():
    with pytest.raises(InvalidInput):
        GridFunction(np.ones(6))


def test_modulate_examples():
    assert modulate(TrigPoly.constant(1), 5).trim().allclose(TrigPoly.monomial(5))
    assert modulate(TrigPoly.monomial(-2), 2).trim().allclose(TrigPoly.constant(1))
    rng = np.random.default_rng(7)
    p = rand_poly(rng, 4)
    t = rng.uniform(0, TWO_PI, 100)
    np.testing.assert_allclose(evaluate(modulate(p, 7), t), np.exp(7j * t) * evaluate(p, t), atol=1e-12)


def test_modulated_band():
    p = TrigPoly.from_dict({-3: 1, 3: 1})
    assert modulate(p, 10).band() == SpectralBand(7, 13)


def test_translate_shifts_argument():
    rng = np.random.default_rng(8)
    p = rand_poly(rng, 5)
    t = rng.uniform(0, TWO_PI, 20)
    np.testing.assert_allclose(evaluate(translate(p, 0.7), t), evaluate(p, t - 0.7), atol=1e-12)


# -- kernels -------------------------------------------------------------------


def test_dirichlet_examples():
    assert float(dirichlet_eval(3, 0.0)) == 7
    assert float(dirichlet_eval(1, math.pi)) == pytest.approx(-1, abs=1e-12)
    assert abs(float(dirichlet_eval(10, 0.3)) - complex(evaluate(dirichlet_kernel(10), 0.3))) < 1e-10


def test_dirichlet_near_singularity():
    # both paths agree just outside the branch threshold
    for t in (1e-7, TWO_PI - 1e-7, 3e-9):
        assert abs(float(dirichlet_eval(50, t)) - complex(evaluate(dirichlet_kernel(50), t))) < 1e-6


def test_fejer_examples():
    m = 9
    out = fejer_mean(TrigPoly.monomial(4), m)
    assert abs(out.coeff(4) - (1 - 4 / (m + 1))) < 1e-15
    assert fejer_mean(TrigPoly.constant(2.5), 3).trim().allclose(TrigPoly.constant(2.5))
    assert fejer_mean(TrigPoly.monomial(4), 12).degree <= 12


def test_fejer_of_clipped_sign_is_bounded():
    N = 1024
    t = TWO_PI * np.arange(N) / N
    grid = GridFunction(np.sign(np.asarray(dirichlet_eval(6, t))) + 0j)
    sm = fejer_mean(grid, 128)
    assert max_modulus_on_grid(sm, 8192) <= 1 + 1e-9


def test_vallee_poussin_reproduces_low_degree():
    rng = np.random.default_rng(4)
    p = rand_poly(rng, 5)
    assert vallee_poussin_mean(p, 4).allclose(p, atol=1e-12)


def test_step_function_coeffs_match_quadrature():
    vals = np.array([1.0, -1.0, 0.0, 2.0, 0.5])
    c = step_function_coeffs(vals, 6)
    L = vals.size
    for k in (-6, -1, 0, 2, 5):
        # exact integral of e^{-ikt} over each cell
        if k == 0:
            ref = vals.mean()
        else:
            a = TWO_PI * np.arange(L) / L
            b = a + TWO_PI / L
            ref = np.sum(vals * (np.exp(-1j * k * a) - np.exp(-1j * k * b)) / (1j * k)) / TWO_PI
        assert abs(c.coeff(k) - ref) < 1e-14


# -- Lebesgue constants ------------------------------------------------------------


def test_lebesgue_small_cases():
    assert lebesgue_constant(0) == 1.0
    assert abs(lebesgue_constant(1) - (1 / 3 + 2 * math.sqrt(3) / math.pi)) < 1e-6


@pytest.mark.parametrize("n", [1, 2, 3, 10, 37, 100, 1000])
def test_lebesgue_matches_antiderivative_oracle(n):
    assert abs(lebesgue_constant(n) - exact_lebesgue(n)) < 1e-8


def test_lebesgue_band_at_100():
    assert abs(lebesgue_constant(100) - (4 / math.pi**2 * math.log(100) + 1.27)) < 0.2


def test_lebesgue_increasing():
    vals = [lebesgue_constant(n) for n in range(51)]
    assert all(b > a for a, b in zip(vals, vals[1:]))


# -- certified sup norm ----------------------------------------------------------


def test_sup_norm_examples():
    assert certified_sup_norm(TrigPoly.constant(1)) == (1.0, 1.0)
    lo, up = certified_sup_norm(TrigPoly.monomial(5), oversample=64)
    assert lo >= 1 - 1e-12 and up <= 1.02
    lo, up = certified_sup_norm(dirichlet_kernel(3), oversample=64)
    assert lo <= 7 <= up


def test_sup_norm_linear_bound_is_looser():
    p = dirichlet_kernel(4)
    _, quad = certified_sup_norm(p, 64)
    _, lin = certified_sup_norm(p, 64, bound="linear")
    assert quad < lin


def test_sup_norm_rejects_coarse_grid():
    with pytest.raises(InvalidInput):
        certified_sup_norm(TrigPoly.monomial(3), oversample=4)


@settings(max_examples=60)
@given(st.integers(0, 32), st.integers(0, 2**32 - 1))
def test_sup_norm_encloses_finer_grid(d, seed):
    p = rand_poly(np.random.default_rng(seed), d)
    lo, up = certified_sup_norm(p, oversample=64)
    fine = max_modulus_on_grid(p, 640 * max(d, 1))
    assert lo <= fine <= up
    assert up <= 1.05 * lo


def test_large_grid_coset_sweep_matches_direct():
    rng = np.random.default_rng(2)
    p = rand_poly(rng, 40)
    N = 1 << 12
    direct = float(np.max(np.abs(p.sample(N))))
    assert abs(max_modulus_on_grid(p, N, chunk=1 << 8) - direct) < 1e-10
