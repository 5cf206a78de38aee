"""
Multi-point targeting by induction over the target set, and staged
(exhaustion) constructions whose partial sums approach targets along an
increasing index sequence.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .certificate import Certificate, certify_targeting, norm_clause, point_clauses
from .config import DEFAULT_CONFIG, TargetingConfig
from .exceptions import (
    BudgetTooSmall,
    GapTooSmall,
    InvalidInput,
    SearchExhausted,
    StageConflict,
)
from .gadgets import (
    BumpSpec,
    IndexSetSpec,
    bump,
    first_passing,
    gadget_gain,
    lobes_within,
    single_point_target,
    unit_gadget,
)
from .trig_core import (
    TWO_PI,
    TrigPoly,
    canonical_angle,
    certified_sup_norm,
    circle_distance,
    evaluate,
    lebesgue_constant,
    partial_sum,
)


@dataclass(frozen=True)
class TargetSpec:
    """A finite set E of distinct points on the circle and target values h on E."""

    points: tuple
    values: tuple

    def __post_init__(self):
        pts = tuple(canonical_angle(float(t)) for t in self.points)
        vals = tuple(complex(v) for v in self.values)
        if not pts:
            raise InvalidInput("target set is empty")
        if len(pts) != len(vals):
            raise InvalidInput("points and values differ in length")
        if len(pts) > 1 and min_gap(pts) <= 0:
            raise InvalidInput("target points must be pairwise distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.points)

    def as_dict(self) -> dict:
        return dict(zip(self.points, self.values))


def min_gap(points: Sequence[float]) -> float:
    p = np.asarray(points, dtype=float)
    if p.size < 2:
        return math.pi
    d = circle_distance(p[:, None], p[None, :])
    d[np.diag_indices(p.size)] = np.inf
    return float(np.min(d))


def split_point(points: Sequence[float]) -> int:
    """Index of the point with the largest distance to its nearest neighbour (ties: first)."""
    p = np.asarray(points, dtype=float)
    d = circle_distance(p[:, None], p[None, :])
    d[np.diag_indices(p.size)] = np.inf
    return int(np.argmax(np.min(d, axis=1)))


# -- multi-point targeting ------------------------------------------------------


@dataclass
class _Level:
    rest: list          # indices (into the target) of F
    split: int          # index of t0
    phi: TrigPoly
    eta: float


def _plan_levels(points, window, cfg) -> list[_Level]:
    """Split order and bumps; independent of the partial-sum index."""
    gap = min_gap(points)
    pad = window + gap / 16.0
    remaining = list(range(len(points)))
    levels = []
    while len(remaining) > 1:
        sub = [points[i] for i in remaining]
        k = remaining[split_point(sub)]
        rest = [i for i in remaining if i != k]
        spec = BumpSpec(
            ones_region=tuple((points[i] - pad, points[i] + pad) for i in rest),
            zeros_region=((points[k] - pad, points[k] + pad),),
            flatness=cfg.bump_eta,
            degree_budget=cfg.bump_budget,
        )
        try:
            phi, report = bump(spec)
        except BudgetTooSmall as exc:
            raise GapTooSmall(f"minimal gap {gap:.3g} too small for the bump budget: {exc}") from exc
        levels.append(_Level(rest, k, phi, max(report.eta_achieved, report.eta_bound)))
        remaining = rest
    return levels


def _sn_at(p: TrigPoly, n: int, pts) -> np.ndarray:
    return np.atleast_1d(evaluate(partial_sum(p, n), np.asarray(pts, dtype=float)))


def _build_at(n, points, residual, levels, window, cfg):
    """
    The inductive construction for a fixed index n.

    Returns the correction f - g and one audit record per level, in the order
    the induction peels points off (outermost first).
    """
    outer = lobes_within(n, window)
    gadgets = {i: unit_gadget(n, points[i], cfg.smoothing, 0, outer) for i in range(len(points))}
    gain = float(np.real(_sn_at(gadgets[0], n, [points[0]])[0]))

    def piece(i):
        return gadgets[i] * (residual[i] / gain)

    audits = []

    def build(depth):
        if depth == len(levels):
            # innermost: exactly one point left
            last = levels[-1].rest[0] if levels else 0
            return piece(last)
        lv = levels[depth]
        u = build(depth + 1)
        v = piece(lv.split)
        u_phi = u * lv.phi
        v_rest = v * (1.0 - lv.phi)
        F = [points[i] for i in lv.rest]
        t0 = [points[lv.split]]
        su_F, suphi_F, svr_F = (_sn_at(x, n, F) for x in (u, u_phi, v_rest))
        suphi_0, sv_0, svr_0 = (_sn_at(x, n, t0)[0] for x in (u_phi, v, v_rest))
        target_F = np.array([residual[i] for i in lv.rest])
        rec = {
            "split_point": points[lv.split],
            "rest": F,
            "phi_eta": lv.eta,
            # the four localization residues
            "uphi_minus_u_on_F": float(np.max(np.abs(suphi_F - su_F))),
            "uphi_at_t0": float(abs(suphi_0)),
            "vrest_minus_v_at_t0": float(abs(svr_0 - sv_0)),
            "vrest_on_F": float(np.max(np.abs(svr_F))),
            # remaining approximation terms of the triangle inequality
            "u_minus_target_on_F": float(np.max(np.abs(su_F - target_F))),
            "v_minus_target_at_t0": float(abs(sv_0 - residual[lv.split])),
        }
        rec["budget_F"] = rec["vrest_on_F"] + rec["uphi_minus_u_on_F"] + rec["u_minus_target_on_F"]
        rec["budget_t0"] = rec["uphi_at_t0"] + rec["vrest_minus_v_at_t0"] + rec["v_minus_target_at_t0"]
        audits.append(rec)
        return u_phi + v_rest

    correction = build(0)
    audits.reverse()
    return correction, audits, gain


def multi_point_target(g: TrigPoly, target: TargetSpec, eps: float, lam: IndexSetSpec,
                       config: TargetingConfig = DEFAULT_CONFIG):
    """
    f with ||f - g|| < eps and max_E |s_n f - h| < eps.

    E is split as F + {t0} (t0 the most isolated point), F is handled
    recursively by u, t0 by a gadget v, and the pieces are glued with a bump
    phi that is ~1 near F and ~0 near t0: f = u phi + v (1 - phi) + g.
    Gadgets are localized to windows around their points so the four
    localization residues stay small at the chosen n; the smallest candidate n
    whose residues are all < eps/3 and whose certificate passes is returned.

    Returns
    -------
    f, n, cert
        ``cert.parameters["localization_audit"]`` holds the per-level residues.
    """
    if not eps > 0 or not math.isfinite(eps):
        raise InvalidInput("eps must be positive")
    if len(target) == 1:
        return single_point_target(g, target.points[0], target.values[0], eps, lam, config)

    points = list(target.points)
    values = np.array(target.values)
    residual = values - np.atleast_1d(evaluate(g, np.asarray(points)))
    params = {"eps": eps, "index_set": lam.to_dict(), "points": points}
    lam_g = lam.restrict(g.degree)

    if np.max(np.abs(residual)) <= 0.1 * config.attain_tol:
        n = lam_g.first()
        cert = certify_targeting(g, g, n, points, values, eps, oversample=config.oversample,
                                 parameters=params)
        return g, n, cert

    worst = float(np.max(np.abs(residual)))
    if worst >= eps * lebesgue_constant(lam.n_cap):
        raise SearchExhausted(
            f"|s_n (f-g)(t)| <= L_n ||f-g|| < {eps * lebesgue_constant(lam.n_cap):.6g} "
            f"for n <= {lam.n_cap}, below the required {worst:.6g}"
        )

    gap = min_gap(points)
    window = config.window_fraction * gap
    levels = _plan_levels(points, window, config)
    eta = max(lv.eta for lv in levels)
    amp = config.piece_share * eps / (1.0 + 2.0 * eta) ** len(levels)
    need = worst / amp

    adm = lam_g.admissible()
    resolved = adm[[lobes_within(int(n), window) >= 1 for n in adm]] if adm.size < 4096 else \
        adm[adm >= math.ceil(math.pi / window)]
    pos = first_passing(resolved, lambda n: gadget_gain(n, config.smoothing, 0, lobes_within(n, window)) >= need)
    if pos is None:
        raise SearchExhausted(f"windowed gadgets cannot reach gain {need:.4g} for n <= {lam.n_cap}")

    last_reason = ""
    for n in resolved[pos : pos + config.max_candidates]:
        n = int(n)
        correction, audits, gain = _build_at(n, points, residual, levels, window, config)
        f = g + correction
        cert = certify_targeting(f, g, n, points, values, eps, oversample=config.oversample,
                                 parameters=dict(params, gain=gain, window=window))
        third = eps / 3.0
        residues_ok = all(
            rec[k] < third
            for rec in audits
            for k in ("uphi_minus_u_on_F", "uphi_at_t0", "vrest_minus_v_at_t0", "vrest_on_F")
        )
        budget_ok = all(rec["budget_F"] < eps and rec["budget_t0"] < eps for rec in audits)
        if cert.passed and residues_ok and budget_ok:
            cert.parameters["localization_audit"] = audits
            return f, n, cert
        last_reason = "certificate" if not cert.passed else "localization residues"
    raise SearchExhausted(
        f"no candidate n in {int(resolved[pos])}..{int(resolved[min(pos + config.max_candidates, resolved.size) - 1])} "
        f"passed ({last_reason})"
    )


# -- staged construction ----------------------------------------------------------


@dataclass(frozen=True)
class ExhaustionSchedule:
    """
    Nested finite point sets E_1 <= E_2 <= ... <= E_J with tolerances
    (default 1/j).
    """

    stages: tuple
    tolerances: tuple | None = None

    def __post_init__(self):
        stages = tuple(tuple(canonical_angle(float(t)) for t in s) for s in self.stages)
        if not stages:
            raise InvalidInput("schedule needs at least one stage")
        for a, b in zip(stages, stages[1:]):
            if not set(a) <= set(b):
                raise InvalidInput("stages must be nested")
        tol = self.tolerances
        if tol is None:
            tol = tuple(1.0 / j for j in range(1, len(stages) + 1))
        tol = tuple(float(x) for x in tol)
        if len(tol) != len(stages):
            raise InvalidInput("one tolerance per stage")
        if any(x <= 0 for x in tol) or any(b > a for a, b in zip(tol, tol[1:])):
            raise InvalidInput("tolerances must be positive and nonincreasing")
        object.__setattr__(self, "stages", stages)
        object.__setattr__(self, "tolerances", tol)

    @classmethod
    def prefixes(cls, points: Sequence[float], J: int, tolerances=None) -> "ExhaustionSchedule":
        """E_j = first j points."""
        if J > len(points):
            raise InvalidInput("more stages than points")
        return cls(tuple(tuple(points[:j]) for j in range(1, J + 1)), tolerances)

    def __len__(self):
        return len(self.stages)


@dataclass
class StageRecord:
    stage: int
    n: int
    norm_added: float
    certificate: Certificate

    def to_json(self) -> str:
        return json.dumps(
            {
                "stage": self.stage,
                "n": self.n,
                "norm_added": self.norm_added,
                "clauses": self.certificate.clause_records(),
            },
            sort_keys=True,
        )


@dataclass
class UniversalResult:
    f: TrigPoly
    indices: list
    certificates: list
    log: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.certificates)


def _lookup(h_values, t):
    if isinstance(h_values, Mapping):
        for key, val in h_values.items():
            if circle_distance(float(key), t) < 1e-12:
                return complex(val)
    raise InvalidInput(f"no target value for point {t}")


# lobes of D_{n_j} kept free around each point for the finer stages
_CORE_LOBES = 1
_TOLERANCE_USE = 0.9


def _stage_certificates(f, g, indices, schedule, h_of, budget, oversample):
    nc = norm_clause(f, g, budget, oversample)
    certs = []
    for j, (stage, n) in enumerate(zip(schedule.stages, indices)):
        clauses = [nc] + point_clauses(f, n, stage, [h_of[t] for t in stage], schedule.tolerances[j])
        certs.append(Certificate(clauses, int(n), {"stage": j + 1, "tolerance": schedule.tolerances[j]}))
    return certs


def universal_function(g: TrigPoly, h_values, schedule: ExhaustionSchedule, norm_budget: float,
                       lam: IndexSetSpec | None = None, config: TargetingConfig = DEFAULT_CONFIG,
                       max_retries: int = 6) -> UniversalResult:
    """
    One f with ||f - g|| < norm_budget and ||s_{n_j} f - h||_{E_j} < tol_j for
    every stage, along strictly increasing n_1 < ... < n_J.

    Each point t carries one gadget per stage it belongs to. Stage j's gadget
    is the sign pattern of D_{n_j} restricted to an annulus around t, and the
    annuli of successive stages are nested (coarse outside, fine inside), so
    all gadget supports are disjoint and ||f - g|| <= max amplitude. The
    amplitudes are then solved jointly so every stage hits its target,
    which absorbs the cross-talk between stages and points.
    """
    if not norm_budget > 0:
        raise InvalidInput("norm_budget must be positive")
    lam = lam or IndexSetSpec(0, 1_000_000)
    J = len(schedule)
    final = schedule.stages[-1]
    h_of = {t: _lookup(h_values, t) for t in final}

    if J == 1:
        eps = min(norm_budget, schedule.tolerances[0])
        spec = TargetSpec(final, [h_of[t] for t in final])
        f, n, cert = multi_point_target(g, spec, eps, lam, config)
        # the single-stage certificate is the targeting certificate itself
        log = [StageRecord(1, n, float(certified_sup_norm(f - g, config.oversample)[1]), cert)]
        return UniversalResult(f, [n], [cert], log)

    g_at = {t: complex(evaluate(g, t)) for t in final}
    resid = {t: h_of[t] - g_at[t] for t in final}
    lam_g = lam.restrict(g.degree)

    if max(abs(r) for r in resid.values()) <= 0.1 * config.attain_tol:
        adm = lam_g.admissible()
        if adm.size < J:
            raise SearchExhausted("fewer admissible indices than stages")
        idx = [int(x) for x in adm[:J]]
        certs = _stage_certificates(g, g, idx, schedule, h_of, norm_budget, config.oversample)
        return UniversalResult(g, idx, certs, [StageRecord(j + 1, idx[j], 0.0, certs[j]) for j in range(J)])

    L_cap = lebesgue_constant(lam.n_cap)
    for j, (stage, tol) in enumerate(zip(schedule.stages, schedule.tolerances), start=1):
        worst = max(abs(resid[t]) for t in stage)
        if worst - tol >= norm_budget * L_cap:
            raise StageConflict(
                f"stage {j}: |h - g| up to {worst:.4g} but |s_n(f-g)| < {norm_budget * L_cap:.4g} "
                f"for n <= {lam.n_cap}", stage=j)

    gap = min_gap(final)
    window = min(2.0 * config.window_fraction * gap, math.pi / 2)
    amp = config.piece_share * norm_budget
    slack = 1.0
    last_exc = None
    for _ in range(max_retries):
        try:
            design = _design_stages(schedule, resid, window, amp * slack, lam_g, config)
        except SearchExhausted as exc:
            raise StageConflict(str(exc), stage=getattr(exc, "stage", None)) from exc
        f, alpha = _solve_amplitudes(g, design, schedule, resid, config)
        worst_alpha = max(abs(a) for a in alpha.values())
        if worst_alpha < amp:
            indices = [d["n"] for d in design]
            certs = _stage_certificates(f, g, indices, schedule, h_of, norm_budget, config.oversample)
            if all(c.passed for c in certs):
                log = []
                for j, d in enumerate(design):
                    block = sum((d["gadgets"][t] * alpha[(j, t)] for t in schedule.stages[j]), TrigPoly.zero())
                    added = float(certified_sup_norm(block, config.oversample)[1])
                    log.append(StageRecord(j + 1, indices[j], added, certs[j]))
                return UniversalResult(f, indices, certs, log)
            last_exc = StageConflict("stage certificates failed", stage=next(
                j + 1 for j, c in enumerate(certs) if not c.passed))
        else:
            bad = max(alpha, key=lambda key: abs(alpha[key]))
            last_exc = StageConflict(
                f"stage {bad[0] + 1}: amplitude {abs(alpha[bad]):.4g} exceeds {amp:.4g}", stage=bad[0] + 1)
        slack *= 0.8
    raise last_exc


def _design_stages(schedule, resid, window, amp, lam, cfg):
    """
    Pick n_j and the annulus (in lobes of D_{n_j}) for every (stage, point).

    Stage j < J keeps lobes [_CORE_LOBES, outer) and leaves the inner
    _CORE_LOBES lobes to the later stages; the last stage keeps [0, outer).
    """
    J = len(schedule)
    radius = {}
    design = []
    prev = -1
    for j, (stage, tol) in enumerate(zip(schedule.stages, schedule.tolerances)):
        for t in stage:
            radius.setdefault(t, window)
        inner = 0 if j == J - 1 else _CORE_LOBES
        need = {t: max(0.0, abs(resid[t]) - _TOLERANCE_USE * tol) / amp for t in stage}
        adm = lam.admissible(prev + 1)

        def ok(n):
            for t in stage:
                outer = lobes_within(n, radius[t])
                if outer <= inner:
                    return False
                if need[t] > 0 and gadget_gain(n, cfg.smoothing, inner, outer) < need[t]:
                    return False
            return True

        pos = first_passing(adm, ok)
        if pos is None:
            exc = SearchExhausted(f"stage {j + 1}: no admissible n <= {lam.n_cap} gives the required gain")
            exc.stage = j + 1
            raise exc
        n = int(adm[pos])
        L = 2 * n + 1
        shells = {t: (inner, lobes_within(n, radius[t])) for t in stage}
        for t in stage:
            radius[t] = TWO_PI * inner / L
        design.append({"n": n, "shells": shells, "need": need})
        prev = n
    return design


def _solve_amplitudes(g, design, schedule, resid, cfg):
    J = len(design)
    m = cfg.smoothing * design[-1]["n"]
    cols = []
    for j, d in enumerate(design):
        d["gadgets"] = {}
        for t in schedule.stages[j]:
            inner, outer = d["shells"][t]
            d["gadgets"][t] = unit_gadget(d["n"], t, cfg.smoothing, inner, outer, order=m)
            cols.append((j, t))
    rows = cols  # one constraint per (stage, point), same indexing
    A = np.zeros((len(rows), len(cols)))
    for c, (i, s) in enumerate(cols):
        G = design[i]["gadgets"][s]
        for r, (j, t) in enumerate(rows):
            A[r, c] = float(np.real(evaluate(partial_sum(G, design[j]["n"]), t)))
    rhs = np.empty(len(rows), dtype=complex)
    for r, (j, t) in enumerate(rows):
        tol = schedule.tolerances[j]
        mag = abs(resid[t])
        shrink = max(0.0, mag - _TOLERANCE_USE * tol) / mag if mag > 0 else 0.0
        rhs[r] = resid[t] * shrink
    sol = np.linalg.solve(A, rhs)
    alpha = {key: complex(a) for key, a in zip(cols, sol)}
    f = g
    for (j, t), a in alpha.items():
        f = f + design[j]["gadgets"][t] * a
    return f, alpha
