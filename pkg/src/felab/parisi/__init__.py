"""Parisi PDE, functional, minimisation and stochastic-control checks."""

from felab.parisi.control import CONSTANT, PDE_FEEDBACK, ZERO, ControlConfig, ControlEstimate, ac_simulate
from felab.parisi.corollary import (
    LOG2,
    CorollaryReport,
    CoupledPaths,
    corollary_parisi_check,
    coupled_payoffs,
    log_2cosh,
)
from felab.parisi.optimize import OptimizerConfig, ParisiMinimum, parisi_minimize
from felab.parisi.pde import (
    GridConfig,
    GridError,
    PdeSolution,
    cole_hopf_step,
    correction_integral,
    log_cosh,
    parisi_functional,
    parisi_pde_solve,
)
from felab.parisi.zeta import StepZeta, ZetaCombination, ZetaError, zeta_combine

__all__ = [
    "CONSTANT",
    "LOG2",
    "PDE_FEEDBACK",
    "ZERO",
    "ControlConfig",
    "ControlEstimate",
    "CorollaryReport",
    "CoupledPaths",
    "GridConfig",
    "GridError",
    "OptimizerConfig",
    "ParisiMinimum",
    "PdeSolution",
    "StepZeta",
    "ZetaCombination",
    "ZetaError",
    "ac_simulate",
    "cole_hopf_step",
    "corollary_parisi_check",
    "correction_integral",
    "coupled_payoffs",
    "log_2cosh",
    "log_cosh",
    "parisi_functional",
    "parisi_minimize",
    "parisi_pde_solve",
    "zeta_combine",
]
