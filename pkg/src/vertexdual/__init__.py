"""Exact-arithmetic engine for multi-species stochastic vertex model dualities."""

from .qarith import Rational, format_rational, q_binom, q_fact, q_int, rational
from .report import CheckReport
from .state import (
    Composition,
    Config,
    Window,
    blocks,
    color_reverse,
    config_from_json,
    config_to_json,
    conserved_weights,
    empty_config,
    enum_compositions,
    enum_configs,
    shift,
    uniform_window,
)
from .vertex import ModelParams, check_charge_reversal, nonnegative_regime, s_entry, s_matrix
from .evolve import (
    BoundarySpec,
    StepMatrix,
    build_step_matrix,
    check_L3,
    check_LF,
    factorize_entry,
)
from .duality import (
    KINDS,
    VARIANTS,
    check_duality_identity,
    eval_duality,
)

__version__ = "0.1.0"
