"""
The acceptance suite as plain functions, so it can run from pytest or the CLI.

Every check returns a :class:`CheckResult`; nothing here relaxes a stated
tolerance. Random instances come from ``numpy.random.default_rng(seed)``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_CONFIG
from .exceptions import UnifourierError
from .gadgets import IndexSetSpec, single_point_target
from .synthesizer import ExhaustionSchedule, TargetSpec, min_gap, multi_point_target, universal_function
from .trig_core import (
    TWO_PI,
    GridFunction,
    TrigPoly,
    certified_sup_norm,
    dirichlet_eval,
    dirichlet_kernel,
    evaluate,
    fourier_coeffs,
    lebesgue_constant,
    max_modulus_on_grid,
    partial_sum,
)
from .verify import FiniteCompactum, carleson_return_report, hausdorff_distance


@dataclass
class CheckResult:
    criterion: int
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} criterion {self.criterion}: {self.name} ({self.detail})"


def random_trig_poly(rng: np.random.Generator, max_degree: int, sup: float | None = None) -> TrigPoly:
    """Random complex Gaussian coefficients; if ``sup`` is given, scaled so sum |c_k| = sup."""
    d = int(rng.integers(0, max_degree + 1))
    c = rng.standard_normal(2 * d + 1) + 1j * rng.standard_normal(2 * d + 1)
    c /= math.sqrt(2 * (2 * d + 1))
    if sup is not None:
        c *= sup / np.sum(np.abs(c))
    return TrigPoly(c)


def random_disk(rng: np.random.Generator, radius: float) -> complex:
    r = radius * math.sqrt(rng.uniform())
    return complex(r * np.exp(1j * rng.uniform(0, TWO_PI)))


def random_points(rng: np.random.Generator, k: int, gap: float) -> list:
    while True:
        pts = list(rng.uniform(0, TWO_PI, size=k))
        if min_gap(pts) >= gap:
            return pts


# -- criterion 1 ---------------------------------------------------------------


def single_point_instances(seed: int, count: int = 100):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        g = random_trig_poly(rng, 10)
        t0 = float(rng.uniform(0, TWO_PI))
        c = random_disk(rng, 10.0)
        eps = float(rng.uniform(0.1, 1.0))
        yield g, t0, c, eps


def check_single_point(seed: int = 0, count: int = 100, time_limit: float = 120.0) -> CheckResult:
    lam = IndexSetSpec(0, 100_000)
    ok = 0
    start = time.perf_counter()
    for g, t0, c, eps in single_point_instances(seed, count):
        try:
            f, n, cert = single_point_target(g, t0, c, eps, lam)
        except UnifourierError:
            continue
        # independent re-verification from (f, n)
        _, upper = certified_sup_norm(f - g, oversample=DEFAULT_CONFIG.oversample)
        val = complex(evaluate(partial_sum(f, n), t0))
        if cert.passed and upper < eps and abs(val - c) <= 1e-9:
            ok += 1
    elapsed = time.perf_counter() - start
    return CheckResult(1, "single-point certificates", ok == count and elapsed < time_limit,
                       f"{ok}/{count} passed in {elapsed:.1f}s")


# -- criterion 2 ---------------------------------------------------------------


def multi_point_instances(seed: int, count: int = 30):
    """g of degree <= 3 with sup <= 0.5, |E| in {2,3,4}, gap >= 0.3, |h - g| <= 2 eps."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        g = random_trig_poly(rng, 3, sup=0.5)
        k = int(rng.integers(2, 5))
        pts = random_points(rng, k, 0.3)
        eps = float(rng.uniform(0.5, 1.0))
        gv = np.atleast_1d(evaluate(g, np.asarray(pts)))
        vals = [complex(v + random_disk(rng, 2.0 * eps)) for v in gv]
        yield g, TargetSpec(tuple(pts), tuple(vals)), eps


def run_multi_point(seed: int = 0, count: int = 30):
    lam = IndexSetSpec(0, 100_000)
    out = []
    for g, spec, eps in multi_point_instances(seed, count):
        try:
            out.append((g, spec, eps) + multi_point_target(g, spec, eps, lam))
        except UnifourierError as exc:
            out.append((g, spec, eps, None, None, exc))
    return out


def check_multi_point(seed: int = 0, count: int = 30) -> CheckResult:
    ok = 0
    audit_ok = True
    for g, spec, eps, f, n, cert in run_multi_point(seed, count):
        if f is None:
            continue
        _, upper = certified_sup_norm(f - g, oversample=DEFAULT_CONFIG.oversample)
        vals = np.atleast_1d(evaluate(partial_sum(f, n), np.asarray(spec.points)))
        err = float(np.max(np.abs(vals - np.asarray(spec.values))))
        if cert.passed and upper < eps and err < eps:
            ok += 1
            for rec in cert.parameters.get("localization_audit", []):
                audit_ok &= rec["budget_F"] < eps and rec["budget_t0"] < eps
    return CheckResult(2, "multi-point certificates and audit", ok == count and audit_ok,
                       f"{ok}/{count} passed, audit {'ok' if audit_ok else 'violated'}")


# -- criterion 3 and 8 ------------------------------------------------------------


SEVEN_POINTS = tuple(TWO_PI * k / 7 for k in range(7))


@lru_cache(maxsize=4)
def seven_point_run(J: int = 5):
    h = {t: 1j**k for k, t in enumerate(SEVEN_POINTS)}
    schedule = ExhaustionSchedule.prefixes(SEVEN_POINTS, J)
    return universal_function(TrigPoly.zero(), h, schedule, 1.0), schedule, h


def check_universal(J: int = 5) -> CheckResult:
    res, schedule, h = seven_point_run(J)
    _, upper = certified_sup_norm(res.f, oversample=DEFAULT_CONFIG.oversample)
    ok = upper < 1.0 and all(b > a for a, b in zip(res.indices, res.indices[1:]))
    worst = []
    for stage, tol, n in zip(schedule.stages, schedule.tolerances, res.indices):
        vals = np.atleast_1d(evaluate(partial_sum(res.f, n), np.asarray(stage)))
        err = float(np.max(np.abs(vals - np.array([h[t] for t in stage]))))
        worst.append(err / tol)
        ok &= err < tol
    ok &= res.passed
    return CheckResult(3, f"{J}-stage schedule on 7 points", bool(ok),
                       f"||f|| <= {upper:.4f}, indices {res.indices}, max err/tol {max(worst):.3f}")


def check_return_density(J: int = 5, grid: int = 4096, threshold: float = 0.1) -> CheckResult:
    res, _, _ = seven_point_run(J)
    rep = carleson_return_report(res.f, res.indices, grid=grid)
    dens = [rep.density_at(threshold, j) for j in range(1, J + 1)]
    mono = all(b >= a for a, b in zip(dens, dens[1:]))
    return CheckResult(8, "return density", mono and dens[-1] > 0.5,
                       "densities " + ", ".join(f"{d:.3f}" for d in dens))


# -- criterion 4 ---------------------------------------------------------------


def check_kernels() -> list[CheckResult]:
    exact = all(float(dirichlet_eval(n, 0.0)) == 2 * n + 1 for n in range(1001))
    L1 = lebesgue_constant(1)
    L1_true = 1.0 / 3.0 + 2.0 * math.sqrt(3.0) / math.pi
    Ls = [lebesgue_constant(n) for n in range(51)]
    increasing = all(b > a for a, b in zip(Ls, Ls[1:]))
    ratio = lebesgue_constant(100) / math.log(100)
    return [
        CheckResult(4, "D_n(0) = 2n+1 for n <= 1000", exact, "exact equality"),
        CheckResult(4, "L_0 = 1", lebesgue_constant(0) == 1.0, f"L_0 = {lebesgue_constant(0)!r}"),
        CheckResult(4, "L_1 closed form", abs(L1 - L1_true) < 1e-6, f"|diff| = {abs(L1 - L1_true):.2e}"),
        CheckResult(4, "L_n increasing for n <= 50", increasing, f"L_50 = {Ls[-1]:.6f}"),
        CheckResult(4, "L_100 / ln 100 in [0.38, 0.44]", 0.38 <= ratio <= 0.44, f"ratio = {ratio:.4f}"),
    ]


# -- criterion 5 ---------------------------------------------------------------


def check_oracles(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    worst_fft = 0.0
    worst_coef = 0.0
    for _ in range(200):
        p = random_trig_poly(rng, 32)
        N = 128
        grid = GridFunction.from_poly(p, N)
        direct = np.atleast_1d(evaluate(p, grid.nodes))
        worst_fft = max(worst_fft, float(np.max(np.abs(grid.samples - direct))))
        back = fourier_coeffs(grid).pad(N // 2 - 1).coeffs
        worst_coef = max(worst_coef, float(np.max(np.abs(back - p.pad(N // 2 - 1).coeffs))))
    t = rng.uniform(0, TWO_PI, size=1000)
    ns = rng.integers(0, 201, size=1000)
    worst_dir = max(abs(float(dirichlet_eval(int(n), x)) - complex(evaluate(dirichlet_kernel(int(n)), x)))
                    for n, x in zip(ns, t))
    return [
        CheckResult(5, "FFT vs direct evaluation", max(worst_fft, worst_coef) < 1e-10,
                    f"max diff {max(worst_fft, worst_coef):.2e}"),
        CheckResult(5, "Dirichlet closed form vs coefficient sum", worst_dir < 1e-10,
                    f"max diff {worst_dir:.2e}"),
    ]


# -- criterion 6 ---------------------------------------------------------------


def check_sup_norm(seed: int = 0, count: int = 200) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    worst_ratio = 1.0
    for _ in range(count):
        p = random_trig_poly(rng, 32)
        lower, upper = certified_sup_norm(p, oversample=64)
        true = max_modulus_on_grid(p, 640 * max(p.degree, 1))
        ratio = upper / lower if lower > 0 else 1.0
        worst_ratio = max(worst_ratio, ratio)
        ok &= lower <= true <= upper and ratio <= 1.05
    return CheckResult(6, "certified sup norm enclosure", bool(ok), f"max upper/lower {worst_ratio:.5f}")


# -- criterion 7 ---------------------------------------------------------------


def check_hausdorff(seed: int = 0, count: int = 1000) -> CheckResult:
    rng = np.random.default_rng(seed)
    ok = True
    worst = 0.0
    for _ in range(count):
        A, B, C = (FiniteCompactum(tuple(rng.uniform(0, TWO_PI, size=int(rng.integers(1, 8)))))
                   for _ in range(3))
        ab, ba = hausdorff_distance(A, B), hausdorff_distance(B, A)
        ac, bc = hausdorff_distance(A, C), hausdorff_distance(B, C)
        worst = max(worst, ac - ab - bc)
        ok &= ab >= 0 and ab == ba and hausdorff_distance(A, A) == 0.0
        ok &= (ab == 0.0) == (A.points == B.points)
        ok &= ac <= ab + bc + 1e-12
    return CheckResult(7, "Hausdorff metric axioms", bool(ok), f"max triangle excess {worst:.2e}")


# -- criterion 9 ---------------------------------------------------------------


def certificate_bytes(seed: int, count: int = 5) -> list[str]:
    out = []
    for g, t0, c, eps in single_point_instances(seed, count):
        try:
            out.append(single_point_target(g, t0, c, eps, IndexSetSpec(0, 100_000))[2].to_json())
        except UnifourierError as exc:
            out.append(f"{type(exc).__name__}: {exc}")
    for *_, f, n, cert in run_multi_point(seed, count):
        out.append(cert.to_json() if f is not None else repr(cert))
    return out


def check_determinism(seed: int = 0) -> CheckResult:
    first = certificate_bytes(seed)
    second = certificate_bytes(seed)
    J3 = [c.to_json() for c in universal_function(
        TrigPoly.zero(), {t: 1j**k for k, t in enumerate(SEVEN_POINTS)},
        ExhaustionSchedule.prefixes(SEVEN_POINTS, 3), 1.0).certificates]
    J3b = [c.to_json() for c in universal_function(
        TrigPoly.zero(), {t: 1j**k for k, t in enumerate(SEVEN_POINTS)},
        ExhaustionSchedule.prefixes(SEVEN_POINTS, 3), 1.0).certificates]
    same = first == second and J3 == J3b
    return CheckResult(9, "byte-identical certificates on rerun", same, f"{len(first) + len(J3)} certificates compared")


def run_all(seed: int = 0) -> list[CheckResult]:
    results = [check_single_point(seed), check_multi_point(seed), check_universal()]
    results += check_kernels()
    results += check_oracles(seed)
    results += [check_sup_norm(seed), check_hausdorff(seed), check_return_density(), check_determinism(seed)]
    return sorted(results, key=lambda r: r.criterion)
