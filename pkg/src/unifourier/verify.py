"""
Numerical probes around the targeting constructions: Hausdorff distance of
finite sets, localization residues, return densities of partial sums, and
best approximation of a dictionary by partial sums on a finite set.

All reports are plain dataclasses with ``to_csv`` / ``to_json`` writers so they
can be dumped by the CLI and plotted elsewhere.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import InvalidInput
from .trig_core import TWO_PI, TrigPoly, canonical_angle, circle_distance, evaluate, partial_sum


@dataclass(frozen=True)
class FiniteCompactum:
    """A nonempty finite subset of the circle, stored sorted and deduplicated."""

    points: tuple

    def __post_init__(self):
        pts = sorted({float(canonical_angle(float(t))) for t in self.points})
        if not pts:
            raise InvalidInput("a compactum must be nonempty")
        object.__setattr__(self, "points", tuple(pts))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    def sup_norm(self, p: TrigPoly) -> float:
        """max over the set of |p|."""
        return float(np.max(np.abs(np.atleast_1d(evaluate(p, self.as_array())))))


def _as_compactum(x) -> FiniteCompactum:
    return x if isinstance(x, FiniteCompactum) else FiniteCompactum(tuple(np.atleast_1d(x)))


def hausdorff_distance(A, B) -> float:
    """
    Hausdorff distance between two finite subsets of the circle.

    Parameters
    ----------
    A, B : FiniteCompactum or array_like of angles

    Returns
    -------
    float
        max(sup_a dist(a, B), sup_b dist(b, A)) with the arc-length metric.
    """
    a = _as_compactum(A).as_array()
    b = _as_compactum(B).as_array()
    d = circle_distance(a[:, None], b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def bernstein_modulus(p: TrigPoly, delta: float) -> float:
    """
    Upper bound on the modulus of continuity of p at scale delta.

    Bernstein: ||p'|| <= deg(p) ||p||, and ||p|| <= sum |c_k|, so
    |p(s) - p(t)| <= deg(p) * sum|c_k| * |s - t|.
    """
    return float(p.degree * np.sum(np.abs(p.coeffs)) * delta)


# -- grid evaluation -----------------------------------------------------------


def grid_values(p: TrigPoly, N: int) -> np.ndarray:
    """
    p at t_j = 2 pi j / N for any N, folding frequencies modulo N (exact on the grid).
    """
    N = int(N)
    d = p.degree
    k = np.arange(-d, d + 1) % N
    folded = np.bincount(k, weights=p.coeffs.real, minlength=N) + 1j * np.bincount(
        k, weights=p.coeffs.imag, minlength=N
    )
    return np.fft.ifft(folded) * N


def _partial_sums_on_grid(f: TrigPoly, indices: Sequence[int], N: int) -> np.ndarray:
    return np.stack([grid_values(partial_sum(f, int(n)), N) for n in indices])


# -- localization ----------------------------------------------------------------


RESIDUE_NAMES = ("uphi_minus_u_on_F", "uphi_at_t0", "vrest_minus_v_at_t0", "vrest_on_F")


@dataclass
class LocalizationReport:
    n_list: list
    rows: list  # one dict of residues per n

    def trend_ok(self) -> bool:
        """Residues at the largest n do not exceed those at the smallest (soft check)."""
        if len(self.rows) < 2:
            return True
        lo, hi = self.rows[0], self.rows[-1]
        return all(hi[k] <= lo[k] + 1e-15 for k in RESIDUE_NAMES)

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("n",) + RESIDUE_NAMES)
        for n, row in zip(self.n_list, self.rows):
            w.writerow([n] + [repr(row[k]) for k in RESIDUE_NAMES])
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps({"n": self.n_list, "rows": self.rows, "trend_ok": self.trend_ok()},
                          sort_keys=True, indent=2)


def localization_report(u: TrigPoly, phi: TrigPoly, F, t0: float, n_list: Sequence[int],
                        v: TrigPoly | None = None) -> LocalizationReport:
    """
    The four localization residues of the gluing f = u phi + v (1 - phi).

    ``v`` defaults to u, which probes the same operator for both pieces.
    """
    F = _as_compactum(F).as_array()
    t0 = float(canonical_angle(t0))
    v = u if v is None else v
    u_phi = u * phi
    v_rest = v * (1.0 - phi)
    rows = []
    for n in n_list:
        n = int(n)

        def sn(p, pts):
            return np.atleast_1d(evaluate(partial_sum(p, n), pts))

        rows.append({
            "uphi_minus_u_on_F": float(np.max(np.abs(sn(u_phi, F) - sn(u, F)))),
            "uphi_at_t0": float(abs(sn(u_phi, t0)[0])),
            "vrest_minus_v_at_t0": float(abs(sn(v_rest, t0)[0] - sn(v, t0)[0])),
            "vrest_on_F": float(np.max(np.abs(sn(v_rest, F)))),
        })
    return LocalizationReport([int(n) for n in n_list], rows)


# -- return densities --------------------------------------------------------------


def default_thresholds(k_max: int = 10) -> list:
    return [1.0 / k for k in range(1, k_max + 1)]


@dataclass
class ReturnReport:
    """
    Attributes
    ----------
    grid : int
    indices : list of int
    thresholds : list of float
    best_residual : ndarray, shape (grid,)
        min over all indices of |s_{n_j} f(t) - f(t)|.
    density : ndarray, shape (J, len(thresholds))
        density[J-1, i] = share of grid points with min_{j <= J} residual < thresholds[i].
    """

    grid: int
    indices: list
    thresholds: list
    best_residual: np.ndarray
    density: np.ndarray = field(repr=False)

    def density_at(self, threshold: float, J: int | None = None) -> float:
        i = int(np.argmin(np.abs(np.asarray(self.thresholds) - threshold)))
        J = len(self.indices) if J is None else J
        return float(self.density[J - 1, i])

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("t", "best_residual"))
        for j, r in enumerate(self.best_residual):
            w.writerow((repr(TWO_PI * j / self.grid), repr(float(r))))
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps({
            "grid": self.grid,
            "indices": [int(n) for n in self.indices],
            "thresholds": list(self.thresholds),
            "density_by_J": self.density.tolist(),
        }, sort_keys=True, indent=2)


def carleson_return_report(f: TrigPoly, indices: Sequence[int], grid: int = 4096,
                           thresholds: Sequence[float] | None = None) -> ReturnReport:
    """
    How often the partial sums s_{n_1} f, ..., s_{n_J} f come back close to f.

    For every grid point the smallest residual over the first J indices is
    recorded, for every prefix J, and densities below each threshold follow.
    """
    if len(indices) == 0:
        raise InvalidInput("indices must be nonempty")
    thresholds = default_thresholds() if thresholds is None else [float(x) for x in thresholds]
    fv = grid_values(f, grid)
    resid = np.abs(_partial_sums_on_grid(f, indices, grid) - fv[None, :])
    running = np.minimum.accumulate(resid, axis=0)
    th = np.asarray(thresholds)
    density = (running[:, :, None] < th[None, None, :]).mean(axis=1)
    return ReturnReport(int(grid), [int(n) for n in indices], thresholds, running[-1], density)


# -- uniform universality on finite sets ------------------------------------------


@dataclass
class UniversalityReport:
    entries: list  # dicts {index, best_error, argmin_n}

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(("entry", "best_error", "argmin_n"))
        for e in self.entries:
            w.writerow((e["index"], repr(e["best_error"]), e["argmin_n"]))
        return out.getvalue()

    def to_json(self) -> str:
        return json.dumps({"entries": self.entries}, sort_keys=True, indent=2)


def partial_sums_on_set(f: TrigPoly, points, n_max: int) -> np.ndarray:
    """
    Rows n = 0..n_max of s_n f evaluated at the points, by cumulative sums of
    the symmetric frequency pairs.
    """
    pts = np.atleast_1d(np.asarray(points, dtype=float))
    d = f.degree
    n_top = min(int(n_max), d)
    k = np.arange(1, n_top + 1)
    base = f.coeff(0) * np.ones(pts.size, dtype=complex)
    if n_top == 0:
        rows = base[None, :]
    else:
        pos = f.coeffs[d + k][:, None] * np.exp(1j * np.outer(k, pts))
        neg = f.coeffs[d - k][:, None] * np.exp(-1j * np.outer(k, pts))
        rows = np.vstack([base[None, :], base[None, :] + np.cumsum(pos + neg, axis=0)])
    if n_max > n_top:
        rows = np.vstack([rows, np.repeat(rows[-1:], int(n_max) - n_top, axis=0)])
    return rows


def uniform_universality_report(f: TrigPoly, E, dictionary: Sequence[TrigPoly], n_max: int,
                                chunk: int = 4096) -> UniversalityReport:
    """
    For each dictionary entry q, min over n <= n_max of max_E |s_n f - q| and
    the smallest n attaining it.
    """
    if len(dictionary) == 0:
        raise InvalidInput("dictionary must be nonempty")
    pts = _as_compactum(E).as_array()
    targets = [np.atleast_1d(evaluate(q, pts)) for q in dictionary]
    best = [np.inf] * len(dictionary)
    arg = [0] * len(dictionary)
    rows = partial_sums_on_set(f, pts, n_max)
    for start in range(0, rows.shape[0], chunk):
        block = rows[start : start + chunk]
        for i, tv in enumerate(targets):
            err = np.max(np.abs(block - tv[None, :]), axis=1)
            j = int(np.argmin(err))
            if err[j] < best[i]:
                best[i], arg[i] = float(err[j]), start + j
    return UniversalityReport([
        {"index": i, "best_error": best[i], "argmin_n": arg[i]} for i in range(len(dictionary))
    ])
