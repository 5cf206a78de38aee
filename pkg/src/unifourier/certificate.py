"""Certificates: independently re-verified strict-inequality clauses."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .trig_core import TrigPoly, certified_sup_norm, evaluate, partial_sum


@dataclass(frozen=True)
class Clause:
    description: str
    bound: float
    achieved: float

    @property
    def passed(self) -> bool:
        return bool(self.achieved < self.bound)


@dataclass
class Certificate:
    clauses: list[Clause]
    n: int
    parameters: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)

    def clause_records(self) -> list[dict]:
        return [
            {
                "clause": c.description,
                "bound": float(c.bound),
                "achieved": float(c.achieved),
                "n": int(self.n),
                "verified": c.passed,
            }
            for c in self.clauses
        ]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "n": int(self.n),
            "parameters": _jsonable(self.parameters),
            "clauses": self.clause_records(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def norm_clause(f: TrigPoly, g: TrigPoly, eps: float, oversample: int) -> Clause:
    _, upper = certified_sup_norm(f - g, oversample=oversample)
    return Clause("||f - g|| < eps", float(eps), float(upper))


def point_clauses(f: TrigPoly, n: int, points: Sequence[float], values: Sequence[complex], bound: float):
    """|s_n f(t) - h(t)| < bound at each point, from the defining sum of s_n f."""
    sn = partial_sum(f, n)
    got = np.atleast_1d(evaluate(sn, np.asarray(points, dtype=float)))
    return [
        Clause(f"|s_n f(t) - h(t)| < eps at t={float(t):.12g}", float(bound), float(abs(v - h)))
        for t, v, h in zip(points, got, values)
    ]


def certify_targeting(
    f: TrigPoly,
    g: TrigPoly,
    n: int,
    points: Sequence[float],
    values: Sequence[complex],
    eps: float,
    *,
    point_bound: float | None = None,
    oversample: int = 16,
    parameters: dict | None = None,
) -> Certificate:
    """Recompute every clause from (f, n) alone."""
    bound = eps if point_bound is None else point_bound
    clauses = [norm_clause(f, g, eps, oversample)]
    clauses += point_clauses(f, n, points, values, bound)
    return Certificate(clauses, int(n), dict(parameters or {}))
