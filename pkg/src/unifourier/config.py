"""Tunable defaults shared by the library and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace


@dataclass(frozen=True)
class TargetingConfig:
    """
    Numerical knobs for the synthesis routines.

    Attributes
    ----------
    smoothing : int
        Fejer order of a gadget built for index n is ``smoothing * n``.
    gadget_share : float
        Fraction of eps given to the single-point gadget. The rest would cover
        ||g - q|| for a polynomial approximant q of g; inputs here are already
        polynomials (q = g), so the default spends all of eps on the gadget.
    piece_share : float
        Fraction of eps each localized piece may use in multi-point targeting.
    attain_tol : float
        Absolute tolerance on single-point attained values.
    oversample : int
        Grid oversampling for certified sup norms in certificates.
    bump_eta : float
        Flatness of the localization bumps.
    bump_budget : int
        Degree cap for bumps.
    window_fraction : float
        Gadget window radius as a fraction of the minimal point gap.
    max_candidates : int
        Candidate indices tried after the growth search before giving up.
    seed : int
        Seed for randomized instance generation in reports and acceptance.
    """

    smoothing: int = 8
    gadget_share: float = 1.0
    piece_share: float = 0.9
    attain_tol: float = 1e-9
    oversample: int = 16
    bump_eta: float = 1e-6
    bump_budget: int = 4096
    window_fraction: float = 0.25
    max_candidates: int = 64
    seed: int = 0

    def with_(self, **kw) -> "TargetingConfig":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def field_names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


DEFAULT_CONFIG = TargetingConfig()
