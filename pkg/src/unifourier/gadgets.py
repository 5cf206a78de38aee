"""
Building blocks for single-point targeting: index sets, divergence gadgets,
the rescaling step, localization bumps.

A gadget for index n is the Fejer-smoothed sign pattern of the Dirichlet
kernel D_n, optionally restricted to a window (or annulus) of its lobes and
translated to the target point. Its partial sum of order n at the center
correlates against D_n itself and so grows like the Lebesgue constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import erfcinv

from .certificate import Certificate, Clause, certify_targeting
from .config import DEFAULT_CONFIG, TargetingConfig
from .exceptions import BudgetTooSmall, DegenerateGadget, InvalidInput, SearchExhausted
from .trig_core import (
    TWO_PI,
    TrigPoly,
    _fejer_weights,
    canonical_angle,
    certified_sup_norm,
    evaluate,
    lebesgue_constant,
    partial_sum,
    step_function_coeffs,
    translate,
)

# -- index sets -----------------------------------------------------------------


@dataclass(frozen=True)
class IndexSetSpec:
    """
    Finite, filterable stand-in for an infinite index set of partial-sum orders.

    kind="all" admits every n in [n_min, n_cap]; kind="arithmetic" admits
    n = start + step * i; kind="list" admits the given values.
    """

    n_min: int = 0
    n_cap: int = 100_000
    kind: str = "all"
    start: int = 0
    step: int = 1
    values: tuple = ()

    def __post_init__(self):
        if self.n_min > self.n_cap:
            raise InvalidInput(f"n_min={self.n_min} exceeds n_cap={self.n_cap}")
        if self.n_min < 0:
            raise InvalidInput("indices are nonnegative")
        if self.kind not in ("all", "arithmetic", "list"):
            raise InvalidInput(f"unknown index filter {self.kind!r}")
        if self.kind == "arithmetic" and self.step < 1:
            raise InvalidInput("arithmetic progression needs step >= 1")
        object.__setattr__(self, "values", tuple(sorted({int(v) for v in self.values})))

    @classmethod
    def arithmetic(cls, start: int, step: int, n_cap: int = 100_000, n_min: int = 0):
        return cls(n_min=n_min, n_cap=n_cap, kind="arithmetic", start=start, step=step)

    @classmethod
    def explicit(cls, values: Sequence[int]):
        vals = sorted(int(v) for v in values)
        if not vals:
            raise InvalidInput("explicit index list is empty")
        return cls(n_min=vals[0], n_cap=vals[-1], kind="list", values=tuple(vals))

    def admissible(self, lo: int = 0) -> np.ndarray:
        lo = max(int(lo), self.n_min)
        if lo > self.n_cap:
            return np.empty(0, dtype=np.int64)
        if self.kind == "all":
            return np.arange(lo, self.n_cap + 1, dtype=np.int64)
        if self.kind == "arithmetic":
            i0 = max(0, -(-(lo - self.start) // self.step))
            first = self.start + i0 * self.step
            return np.arange(first, self.n_cap + 1, self.step, dtype=np.int64)
        v = np.asarray(self.values, dtype=np.int64)
        return v[(v >= lo) & (v <= self.n_cap)]

    def contains(self, n: int) -> bool:
        if not self.n_min <= n <= self.n_cap:
            return False
        if self.kind == "arithmetic":
            return n >= self.start and (n - self.start) % self.step == 0
        if self.kind == "list":
            return n in self.values
        return True

    def restrict(self, lo: int) -> "IndexSetSpec":
        """Sub-index-set with n >= lo (the nested Lambda' inside Lambda)."""
        lo = max(int(lo), self.n_min)
        if lo > self.n_cap:
            raise SearchExhausted(f"no admissible index >= {lo} below cap {self.n_cap}")
        return IndexSetSpec(lo, self.n_cap, self.kind, self.start, self.step, self.values)

    def first(self, lo: int = 0) -> int:
        adm = self.admissible(lo)
        if adm.size == 0:
            raise SearchExhausted(f"no admissible index >= {lo} below cap {self.n_cap}")
        return int(adm[0])

    def to_dict(self) -> dict:
        return {
            "n_min": self.n_min,
            "n_cap": self.n_cap,
            "kind": self.kind,
            "start": self.start,
            "step": self.step,
            "values": list(self.values),
        }


def first_passing(candidates: np.ndarray, predicate: Callable[[int], bool]):
    """
    Position of the first candidate passing ``predicate``, assuming passes are
    (essentially) upward closed: gallop to bracket, then bisect.
    Returns None if even the last candidate fails.
    """
    size = candidates.size
    if size == 0:
        return None
    if predicate(int(candidates[0])):
        return 0
    lo, step = 0, 1
    while True:
        hi = min(lo + step, size - 1)
        if predicate(int(candidates[hi])):
            break
        if hi == size - 1:
            return None
        lo, step = hi, step * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if predicate(int(candidates[mid])):
            hi = mid
        else:
            lo = mid
    return hi


# -- gadgets --------------------------------------------------------------------


def dirichlet_sign_cells(n: int, inner: int = 0, outer: int | None = None) -> np.ndarray:
    """
    sign(D_n) on the 2n+1 cells between consecutive zeros 2pi j/(2n+1).

    Cells are indexed by lobe distance q = min(j, 2n - j) from the origin; only
    lobes with inner <= q < outer are kept (the rest are zero), so
    (inner, outer) = (0, None) is the full clipped sign.
    """
    L = 2 * int(n) + 1
    j = np.arange(L)
    q = np.minimum(j, L - 1 - j)
    v = np.where(q % 2 == 0, 1.0, -1.0)
    hi = L if outer is None else outer
    return np.where((q >= inner) & (q < hi), v, 0.0)


def gadget_gain(n: int, smoothing: int = 8, inner: int = 0, outer: int | None = None) -> float:
    """s_n at the center of the unit gadget, from its coefficients |k| <= n only."""
    m = smoothing * n
    c = step_function_coeffs(dirichlet_sign_cells(n, inner, outer), n)
    return float(np.real(np.sum(c.coeffs * _fejer_weights(n, m))))


def unit_gadget(n: int, t0: float = 0.0, smoothing: int = 8, inner: int = 0,
                outer: int | None = None, order: int | None = None) -> TrigPoly:
    """
    sigma_m applied to the (windowed) sign pattern of D_n, centered at t0.

    Sup norm is at most 1 because the Fejer kernel is positive. ``order``
    overrides the Fejer order m (default smoothing * n).
    """
    m = smoothing * n if order is None else int(order)
    c = step_function_coeffs(dirichlet_sign_cells(n, inner, outer), m)
    return translate(TrigPoly(c.coeffs * _fejer_weights(m, m)), t0)


def lobes_within(n: int, radius: float) -> int:
    """Number of lobes of D_n (counted from the origin) fully inside |s| < radius."""
    return int(math.floor(radius * (2 * n + 1) / TWO_PI))


@dataclass
class GadgetResult:
    h: TrigPoly
    n: int
    attained: complex
    norm_upper: float


def divergence_gadget(t0: float, delta: float, M: float, lam: IndexSetSpec,
                      config: TargetingConfig = DEFAULT_CONFIG) -> GadgetResult:
    """
    A polynomial of certified norm <= delta whose n-th partial sum at t0 has
    modulus >= M, for the smallest admissible n found by the growth search.

    Raises SearchExhausted when no admissible n up to the cap reaches M.
    """
    if not (math.isfinite(delta) and delta > 0 and math.isfinite(M)):
        raise InvalidInput("delta must be positive and M finite")
    t0 = canonical_angle(t0)
    adm = lam.admissible()
    if adm.size == 0:
        raise SearchExhausted("index set is empty")
    if M <= 0:
        return GadgetResult(TrigPoly.zero(), int(adm[0]), 0j, 0.0)
    if M >= delta * lebesgue_constant(lam.n_cap):
        raise SearchExhausted(
            f"|s_n h(t0)| <= L_n ||h|| < {delta * lebesgue_constant(lam.n_cap):.6g} for all n <= {lam.n_cap}"
        )

    def build(n):
        unit = unit_gadget(n, t0, config.smoothing)
        _, up = certified_sup_norm(unit, oversample=config.oversample)
        h = unit * (delta / max(up, 1.0))
        return h, abs(evaluate(partial_sum(h, n), t0))

    # cheap gain screen first, then confirm on the actual polynomial
    pos = first_passing(adm, lambda n: delta * gadget_gain(n, config.smoothing) >= M * (1 + 1e-9))
    if pos is None:
        raise SearchExhausted(f"no admissible n <= {lam.n_cap} reaches |s_n h(t0)| >= {M}")
    for n in adm[pos : pos + config.max_candidates]:
        h, att = build(int(n))
        if att >= M:
            _, up = certified_sup_norm(h, oversample=config.oversample)
            return GadgetResult(h, int(n), complex(evaluate(partial_sum(h, int(n)), t0)), float(up))
    raise SearchExhausted(f"certified gadgets fall short of {M} near n={int(adm[pos])}")


def scale_to_target(h: TrigPoly, n: int, t0: float, target: complex) -> TrigPoly:
    """(target / s_n h(t0)) * h, so that s_n of the result at t0 equals target."""
    base = complex(evaluate(partial_sum(h, n), t0))
    if abs(base) <= 1e-12:
        raise DegenerateGadget(f"s_n h(t0) = {base} is too small to rescale")
    return h * (complex(target) / base)


def single_point_target(g: TrigPoly, t0: float, c: complex, eps: float, lam: IndexSetSpec,
                        config: TargetingConfig = DEFAULT_CONFIG):
    """
    f with ||f - g|| < eps and (s_n f)(t0) = c for an admissible n.

    q = g (already a trigonometric polynomial); a gadget h with
    ||h|| < gadget_share * eps and |s_n h(t0)| > |c - q(t0)| is found for
    n >= deg q and rescaled, so f = h~ + q has s_n f(t0) = c - q(t0) + q(t0).

    Returns
    -------
    f : TrigPoly
    n : int
    cert : Certificate
        ||f - g|| (certified upper bound) and |s_n f(t0) - c| < attain_tol,
        both recomputed from (f, n).
    """
    if not eps > 0:
        raise InvalidInput("eps must be positive")
    t0 = canonical_angle(t0)
    c = complex(c)
    q = g
    lam_q = lam.restrict(q.degree)
    residual = c - complex(evaluate(q, t0))
    params = {"t0": t0, "c": c, "eps": eps, "index_set": lam.to_dict()}

    if abs(residual) <= 0.1 * config.attain_tol:
        n = lam_q.first()
        f = q
    else:
        # headroom so the certified bound of h~ stays under the gadget share
        delta = config.gadget_share * eps * 0.97
        gad = divergence_gadget(t0, delta, abs(residual), lam_q, config)
        n = gad.n
        f = scale_to_target(gad.h, n, t0, residual) + q
        params["gadget_attained"] = abs(gad.attained)
    cert = certify_targeting(f, g, n, [t0], [c], eps, point_bound=config.attain_tol,
                             oversample=config.oversample, parameters=params)
    cert.clauses[1] = Clause("|s_n f(t0) - c| < attain_tol", config.attain_tol, cert.clauses[1].achieved)
    return f, n, cert


def required_gain_feasible(residual: float, budget: float, n_cap: int) -> bool:
    """Operator-norm test: |s_n u(t)| <= L_n ||u|| can only reach residual if budget * L_cap > residual."""
    return residual < budget * lebesgue_constant(n_cap)


# -- bumps ----------------------------------------------------------------------


def _arc(a, b):
    a = float(a)
    length = float(b) - a
    if not 0 < length <= TWO_PI:
        raise InvalidInput(f"arc [{a}, {b}] must have length in (0, 2pi]")
    start = canonical_angle(a)
    return (start, start + length)


@dataclass(frozen=True)
class BumpSpec:
    """ones_region / zeros_region are lists of closed arcs (a, b), a < b <= a + 2pi."""

    ones_region: tuple
    zeros_region: tuple
    flatness: float = 1e-6
    degree_budget: int = 4096

    def __post_init__(self):
        if not 0 < self.flatness < 0.5:
            raise InvalidInput("flatness must lie in (0, 1/2)")
        object.__setattr__(self, "ones_region", tuple(_arc(*a) for a in self.ones_region))
        object.__setattr__(self, "zeros_region", tuple(_arc(*a) for a in self.zeros_region))

    def swapped(self) -> "BumpSpec":
        return BumpSpec(self.zeros_region, self.ones_region, self.flatness, self.degree_budget)


@dataclass
class BumpReport:
    eta_requested: float
    eta_bound: float
    eta_achieved: float
    degree: int
    sigma: float


def _arc_distance(x, y) -> float:
    """Distance between two arcs on the circle (0 if they meet)."""
    (a1, b1), (a2, b2) = x, y
    for s in (-TWO_PI, 0.0, TWO_PI):
        if a1 <= b2 + s and a2 + s <= b1:
            return 0.0
    ends1 = np.array([a1, b1])
    ends2 = np.array([a2, b2])
    return float(np.min(circle_distance_matrix(ends1, ends2)))


def circle_distance_matrix(x, y):
    d = np.abs(np.subtract.outer(np.asarray(x) % TWO_PI, np.asarray(y) % TWO_PI))
    return np.minimum(d, TWO_PI - d)


def _in_arcs(t, arcs) -> np.ndarray:
    t = np.asarray(t) % TWO_PI
    mask = np.zeros(t.shape, dtype=bool)
    for a, b in arcs:
        rel = (t - a) % TWO_PI
        mask |= rel <= (b - a) + 1e-15
        if b - a >= TWO_PI:
            mask[:] = True
    return mask


def _voronoi_ones_arcs(ones, zeros):
    """Arcs of the set of points at least as close to ones_region as to zeros_region."""
    labelled = sorted([(a, b, 1) for a, b in ones] + [(a, b, 0) for a, b in zeros])
    # merge overlapping arcs with equal labels
    merged = []
    for a, b, lab in labelled:
        if merged and merged[-1][2] == lab and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], b), lab)
        else:
            merged.append((a, b, lab))
    if len(merged) > 1 and merged[0][2] == merged[-1][2] and merged[-1][1] >= merged[0][0] + TWO_PI:
        first = merged.pop(0)
        merged[-1] = (merged[-1][0], max(merged[-1][1], first[1] + TWO_PI), first[2])
    out = []
    k = len(merged)
    for i, (a, b, lab) in enumerate(merged):
        na, nb, nlab = merged[(i + 1) % k]
        if i + 1 == k:
            na += TWO_PI
        if lab == 1:
            if nlab == 1:
                out.append((a, na))
            else:
                out.append((a, 0.5 * (b + na)))
        elif nlab == 1:
            out.append((0.5 * (b + na), na))
    # join touching pieces, including across the 0 / 2pi seam
    out = sorted((canonical_angle(a), canonical_angle(a) + (b - a)) for a, b in out)
    joined = []
    for a, b in out:
        if joined and a <= joined[-1][1] + 1e-12:
            joined[-1] = (joined[-1][0], max(joined[-1][1], b))
        else:
            joined.append((a, b))
    if len(joined) > 1 and joined[-1][1] >= joined[0][0] + TWO_PI - 1e-12:
        a0, b0 = joined.pop(0)
        joined[-1] = (joined[-1][0], max(joined[-1][1], b0 + TWO_PI))
    return joined


def _indicator_coeffs(arcs, degree):
    k = np.arange(-degree, degree + 1).astype(float)
    c = np.zeros(k.size, dtype=complex)
    nz = k != 0
    for a, b in arcs:
        c[nz] += (np.exp(-1j * k[nz] * a) - np.exp(-1j * k[nz] * b)) / (2j * math.pi * k[nz])
        c[~nz] += (b - a) / TWO_PI
    return c


def bump(spec: BumpSpec):
    """
    Real polynomial phi with |phi - 1| <= eta on ones_region, |phi| <= eta on
    zeros_region and -eta <= phi <= 1 + eta everywhere.

    phi is the indicator of the points nearer to ones_region than to
    zeros_region, convolved with a periodic Gaussian (values stay in [0, 1])
    and truncated; the Gaussian width uses half of the smaller margin, the
    truncation degree the remaining half of eta.
    """
    ones, zeros = spec.ones_region, spec.zeros_region
    eta = spec.flatness
    if not zeros:
        return TrigPoly.constant(1.0), BumpReport(eta, 0.0, 0.0, 0, 0.0)
    if not ones:
        return TrigPoly.constant(0.0), BumpReport(eta, 0.0, 0.0, 0, 0.0)
    gap = min(_arc_distance(x, y) for x in ones for y in zeros)
    if gap <= 0:
        raise InvalidInput("ones_region and zeros_region must be disjoint with positive gap")
    if gap < TWO_PI / spec.degree_budget:
        raise BudgetTooSmall(f"gap {gap:.3g} is below 2pi/budget")
    region = _voronoi_ones_arcs(ones, zeros)
    sigma = 0.5 * gap / (math.sqrt(2.0) * float(erfcinv(0.5 * eta)))
    # truncation tail: sum_{|k|>K} (count/(pi k)) exp(-sigma^2 k^2 / 2) <= eta/2
    count = len(region)
    kmax = int(min(spec.degree_budget * 4, max(64, 40.0 / sigma)))
    ks = np.arange(1, kmax + 1)
    terms = 2.0 * count / (math.pi * ks) * np.exp(-0.5 * (sigma * ks) ** 2)
    tail = np.cumsum(terms[::-1])[::-1]  # tail[i] = sum_{k >= i+1}
    ok = np.flatnonzero(np.append(tail[1:], 0.0) <= 0.5 * eta)
    K = int(ks[ok[0]]) if ok.size else kmax
    if K > spec.degree_budget:
        raise BudgetTooSmall(f"flatness {eta:g} needs degree {K} > budget {spec.degree_budget}")
    bound_tail = float(np.append(tail[1:], 0.0)[K - 1])
    c = _indicator_coeffs(region, K) * np.exp(-0.5 * (sigma * np.arange(-K, K + 1)) ** 2)
    # enforce exact conjugate symmetry (phi real)
    c = 0.5 * (c + np.conj(c[::-1]))
    phi = TrigPoly(c)
    achieved = _bump_flatness(phi, ones, zeros)
    gauss_err = 0.5 * float(math.erfc(0.5 * gap / (math.sqrt(2.0) * sigma)))
    return phi, BumpReport(eta, gauss_err + bound_tail, achieved, K, sigma)


def _bump_flatness(phi: TrigPoly, ones, zeros, n_grid: int = 1 << 14) -> float:
    N = max(n_grid, 8 * phi.degree)
    N = 1 << int(math.ceil(math.log2(N)))
    t = TWO_PI * np.arange(N) / N
    v = phi.sample(N).real
    dev = np.maximum(v - 1.0, -v)
    worst = float(np.max(dev, initial=0.0))
    m1 = _in_arcs(t, ones)
    m0 = _in_arcs(t, zeros)
    if m1.any():
        worst = max(worst, float(np.max(np.abs(v[m1] - 1.0))))
    if m0.any():
        worst = max(worst, float(np.max(np.abs(v[m0]))))
    return max(worst, 0.0)
