"""
scikit-learn style wrappers: fit on (angles, complex targets), predict the
partial sum s_n f at new angles.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .config import DEFAULT_CONFIG
from .exceptions import InvalidInput
from .gadgets import IndexSetSpec
from .synthesizer import ExhaustionSchedule, TargetSpec, multi_point_target, universal_function
from .trig_core import TrigPoly, evaluate, partial_sum


def check_angles(X) -> np.ndarray:
    """Accept a 1-d array or an (n, 1) column of finite real angles; return 1-d."""
    X = np.asarray(X)
    if X.ndim == 2 and X.shape[1] == 1:
        X = X[:, 0]
    if X.ndim != 1 or X.size == 0:
        raise InvalidInput("X must be a nonempty 1-d array of angles or an (n, 1) column")
    if np.iscomplexobj(X) or not np.all(np.isfinite(X)):
        raise InvalidInput("angles must be finite real numbers")
    return X.astype(float)


def check_targets(y, n_samples: int) -> np.ndarray:
    y = np.asarray(y, dtype=complex).ravel()
    if y.size != n_samples:
        raise InvalidInput(f"y has {y.size} entries, expected {n_samples}")
    if not np.all(np.isfinite(y)):
        raise InvalidInput("targets must be finite")
    return y


def _base(g):
    return TrigPoly.zero() if g is None else g


class PartialSumTargeter(BaseEstimator):
    """
    Find f near ``base`` whose n-th partial sum hits the targets at the given angles.

    Parameters
    ----------
    eps : float
        Bound for both ||f - base|| and the errors at the fitted angles.
    base : TrigPoly or None
        The polynomial g to stay close to (zero if None).
    n_min, n_cap : int
        Admissible index range.
    config : TargetingConfig or None

    Attributes
    ----------
    f_ : TrigPoly
    n_ : int
    certificate_ : Certificate
    """

    def __init__(self, eps=0.5, base=None, n_min=0, n_cap=100_000, config=None):
        self.eps = eps
        self.base = base
        self.n_min = n_min
        self.n_cap = n_cap
        self.config = config

    def fit(self, X, y):
        X = check_angles(X)
        y = check_targets(y, X.size)
        lam = IndexSetSpec(self.n_min, self.n_cap)
        f, n, cert = multi_point_target(_base(self.base), TargetSpec(tuple(X), tuple(y)), float(self.eps),
                                        lam, self.config or DEFAULT_CONFIG)
        self.f_, self.n_, self.certificate_ = f, n, cert
        return self

    def predict(self, X):
        check_is_fitted(self, "f_")
        return np.atleast_1d(evaluate(partial_sum(self.f_, self.n_), check_angles(X)))

    def score(self, X, y):
        """Negative max error of s_n f against y (higher is better)."""
        y = check_targets(y, check_angles(X).size)
        return -float(np.max(np.abs(self.predict(X) - y)))


class UniversalTargeter(BaseEstimator):
    """
    One f whose partial sums along n_1 < ... < n_J approach the targets on the
    growing prefixes E_j = first j fitted angles (tolerance 1/j by default).

    ``predict(X, stage=j)`` evaluates s_{n_j} f; default is the last stage.
    """

    def __init__(self, n_stages=None, norm_budget=1.0, base=None, tolerances=None, n_cap=1_000_000,
                 config=None):
        self.n_stages = n_stages
        self.norm_budget = norm_budget
        self.base = base
        self.tolerances = tolerances
        self.n_cap = n_cap
        self.config = config

    def fit(self, X, y):
        X = check_angles(X)
        y = check_targets(y, X.size)
        J = X.size if self.n_stages is None else int(self.n_stages)
        schedule = ExhaustionSchedule.prefixes(tuple(X), J, self.tolerances)
        res = universal_function(_base(self.base), dict(zip(X.tolist(), y.tolist())), schedule,
                                 float(self.norm_budget), IndexSetSpec(0, self.n_cap),
                                 self.config or DEFAULT_CONFIG)
        self.f_ = res.f
        self.indices_ = list(res.indices)
        self.certificates_ = list(res.certificates)
        self.stage_log_ = list(res.log)
        return self

    def predict(self, X, stage=None):
        check_is_fitted(self, "f_")
        j = len(self.indices_) if stage is None else int(stage)
        if not 1 <= j <= len(self.indices_):
            raise InvalidInput(f"stage must be in 1..{len(self.indices_)}")
        return np.atleast_1d(evaluate(partial_sum(self.f_, self.indices_[j - 1]), check_angles(X)))
