"""Constructive Fourier partial-sum targeting on the circle."""

from .certificate import Certificate, Clause, certify_targeting
from .config import DEFAULT_CONFIG, TargetingConfig
from .exceptions import (
    BudgetTooSmall,
    DegenerateGadget,
    GapTooSmall,
    InvalidInput,
    QuadratureError,
    SearchExhausted,
    StageConflict,
    UnifourierError,
)
from .estimator import PartialSumTargeter, UniversalTargeter
from .gadgets import (
    BumpReport,
    BumpSpec,
    GadgetResult,
    IndexSetSpec,
    bump,
    divergence_gadget,
    single_point_target,
    unit_gadget,
)
from .synthesizer import (
    ExhaustionSchedule,
    StageRecord,
    TargetSpec,
    UniversalResult,
    multi_point_target,
    universal_function,
)
from .trig_core import (
    CirclePoint,
    GridFunction,
    SpectralBand,
    TrigPoly,
    certified_sup_norm,
    circle_distance,
    dirichlet_eval,
    dirichlet_kernel,
    evaluate,
    fejer_mean,
    fourier_coeffs,
    lebesgue_constant,
    modulate,
    partial_sum,
    translate,
    vallee_poussin_mean,
)
from .verify import (
    FiniteCompactum,
    carleson_return_report,
    hausdorff_distance,
    localization_report,
    uniform_universality_report,
)

__version__ = "0.1.0"
