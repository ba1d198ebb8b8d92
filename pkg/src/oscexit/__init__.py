"""Exit problems for an oscillating compound Poisson process."""

from .functionals import (
    cross_up_lt,
    exit_interval_lt,
    osc_cross_up_lt,
    osc_exit_interval_lt,
    osc_passage_down_lt,
    passage_down_lt,
    verify_pecherskii_rogozin,
)
from .inversion import InversionConfig, invert, invert_grid
from .levy import (
    Component,
    Erlang,
    Exponential,
    HyperExponential,
    OscillatingModel,
    cramer_root,
    laplace_exponent,
    moment_rates,
)
from .scale import KernelHandle, Resolvent
from .simulation import Down, Interval, McEstimate, PathSampler, Up, estimate_lt

__all__ = [
    "Component", "Erlang", "Exponential", "HyperExponential", "OscillatingModel",
    "cramer_root", "laplace_exponent", "moment_rates",
    "InversionConfig", "invert", "invert_grid",
    "KernelHandle", "Resolvent",
    "cross_up_lt", "exit_interval_lt", "osc_cross_up_lt", "osc_exit_interval_lt",
    "osc_passage_down_lt", "passage_down_lt", "verify_pecherskii_rogozin",
    "Down", "Interval", "McEstimate", "PathSampler", "Up", "estimate_lt",
]
