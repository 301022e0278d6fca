"""Pyramid transforms with pseudo-reversed decimation on scalars, SO(3) and SE(3)."""

from ._manipyr import (
    Config,
    Error,
    NumericalError,
    Pair,
    ValidationError,
    add_noise,
    distance,
    gen_morlet,
    gen_se3_curve,
    gen_so3_curve,
    kappa,
    run_table,
)

__all__ = [
    "Config",
    "Error",
    "NumericalError",
    "Pair",
    "ValidationError",
    "add_noise",
    "distance",
    "gen_morlet",
    "gen_se3_curve",
    "gen_so3_curve",
    "kappa",
    "run_table",
]
