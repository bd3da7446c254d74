"""Differential rational invariants of affine subgroups under gauge changes of derivations."""

from .diffcore import (
    Context,
    DiffAlgebraError,
    DiffRational,
    Poly,
    UnluckyEvaluation,
    ZeroDenominator,
    derive,
    derive_multi,
    equals,
    eval_random,
    is_zero_probabilistic,
    substitute,
)
from .actions import (
    AffineElement,
    FiniteGroup,
    GaugeMatrix,
    GroupClosureExceeded,
    NotGaugeCompatible,
    ParametrizedGroup,
    affine_act,
    gauge_act,
    gauge_transport,
    generic_gauge,
    is_gl_partial,
    joint_act,
)
from .invariants import (
    AlphaSet,
    GaugeFrame,
    bordered_invariant_coeffs,
    character_cocycle_check,
    delta_rewrite,
    frame_check,
    instantiate_tuple_invariant,
    invariance_check,
    jet_jacobian_rank,
    lindep_constants,
    reynolds_average,
    tuple_act,
    wronskian,
)
from .parser import parse

__version__ = "0.1.0"
