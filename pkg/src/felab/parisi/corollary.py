"""The log 2 subadditivity of Parisi free energies and its pathwise mechanism."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from felab.classical.xi import MixtureXi
from felab.parisi.control import ControlConfig
from felab.parisi.optimize import OptimizerConfig, ParisiMinimum, parisi_minimize
from felab.parisi.pde import GridConfig, correction_integral, log_cosh, parisi_pde_solve
from felab.parisi.zeta import StepZeta, zeta_combine
from felab.seeding import STREAM_PATHS, realization_seed, rng

LOG2 = math.log(2.0)
SLACK_TOL = 1e-4


def log_2cosh(x):
    return log_cosh(x) + LOG2


@dataclass(frozen=True)
class CorollaryReport:
    """``F(xi1 + xi2) <= F(xi1) + F(xi2) + log 2`` and the intermediate chain.

    ``phi_combined`` and ``functional_combined`` are ``Phi`` and ``P`` for
    ``xi1 + xi2`` at the combined order parameter (step approximation);
    ``phi_bound`` is ``Phi_1(0,0) + Phi_2(0,0) + log 2`` at the individual
    minimisers.
    """

    F12: float
    F1: float
    F2: float
    slack: float
    phi_combined: float
    phi_bound: float
    functional_combined: float
    min1: ParisiMinimum
    min2: ParisiMinimum
    min12: ParisiMinimum

    @property
    def holds(self) -> bool:
        return self.slack >= -SLACK_TOL

    @property
    def chain_holds(self) -> bool:
        return self.phi_combined <= self.phi_bound + SLACK_TOL and self.F12 <= self.functional_combined + SLACK_TOL

    def __iter__(self):
        return iter((self.F12, self.F1, self.F2, self.slack))


def _phi00(xi: MixtureXi, zeta: StepZeta, grid: GridConfig) -> float:
    return 0.0 if xi.is_zero else parisi_pde_solve(xi, zeta, grid).phi00


def corollary_parisi_check(
    xi1: MixtureXi, xi2: MixtureXi, k: int = 3, config: OptimizerConfig = OptimizerConfig(), n_dense: int = 128
) -> CorollaryReport:
    """Minimise the three functionals and evaluate the combined order parameter."""
    xi12 = xi1 + xi2
    m1 = parisi_minimize(xi1, k, config)
    m2 = m1 if xi2 == xi1 else parisi_minimize(xi2, k, config)
    m12 = parisi_minimize(xi12, k, config)
    grid = config.grid
    if xi12.is_zero:
        phi_c = p_c = 0.0
    else:
        zc = zeta_combine(xi1, m1.zeta, xi2, m2.zeta).to_step(n_dense)
        phi_c = _phi00(xi12, zc, grid)
        p_c = phi_c - correction_integral(xi12, zc)
    phi_bound = _phi00(xi1, m1.zeta, grid) + _phi00(xi2, m2.zeta, grid) + LOG2
    slack = m1.value + m2.value + LOG2 - m12.value
    return CorollaryReport(m12.value, m1.value, m2.value, slack, phi_c, phi_bound, p_c, m1, m2, m12)


@dataclass(frozen=True)
class CoupledPaths:
    """Per-path payoffs under the increment coupling and the worst pathwise excess."""

    x12: np.ndarray
    x1: np.ndarray
    x2: np.ndarray

    @property
    def max_excess(self) -> float:
        """``max(X12 - X1 - X2 - log 2)``; nonpositive when the pathwise bound holds."""
        return float(np.max(self.x12 - self.x1 - self.x2 - LOG2))


def coupled_payoffs(
    xi1: MixtureXi,
    zeta1: StepZeta,
    xi2: MixtureXi,
    zeta2: StepZeta,
    config: ControlConfig = ControlConfig(n_paths=4096),
    grid: GridConfig = GridConfig(dt_max=1.0 / 128),
):
    """Simulate the three payoffs on one probability space.

    ``B1`` and ``B2`` are independent; the sum model is driven by
    ``dB = sqrt(dv1 / (dv1 + dv2)) dB1 + sqrt(dv2 / (dv1 + dv2)) dB2`` per
    step, which is a standard Brownian increment.  The control is the
    feedback of the sum model at the combined order parameter, adapted to
    ``(B1, B2)``.  Returns ``(CoupledPaths, max |s12 - s1 - s2|)``.
    """
    xi12 = xi1 + xi2
    comb = zeta_combine(xi1, zeta1, xi2, zeta2)
    sol = parisi_pde_solve(xi12, comb.to_step(), grid)
    gen = rng(realization_seed(config.seed, STREAM_PATHS, 0))
    n = config.n_paths
    t = np.linspace(0.0, 1.0, config.n_steps + 1)
    dv1 = np.diff(np.asarray(xi1.d1(t), dtype=float))
    dv2 = np.diff(np.asarray(xi2.d1(t), dtype=float))
    z1 = np.asarray(zeta1(t[:-1]), dtype=float)
    z2 = np.asarray(zeta2(t[:-1]), dtype=float)
    tidx = sol.time_index(t[:-1])
    s1, s2, s12 = np.zeros(n), np.zeros(n), np.zeros(n)
    c1, c2, c12 = np.zeros(n), np.zeros(n), np.zeros(n)
    for j in range(config.n_steps):
        b1, b2 = gen.standard_normal(n), gen.standard_normal(n)
        u = sol.grad(int(tidx[j]), s12)
        w1, w2 = z1[j] * dv1[j], z2[j] * dv2[j]
        # the combined zeta times (dv1 + dv2) equals w1 + w2 by construction
        w12 = w1 + w2
        s1 += w1 * u + math.sqrt(dv1[j]) * b1
        s2 += w2 * u + math.sqrt(dv2[j]) * b2
        s12 += w12 * u + (math.sqrt(dv1[j]) * b1 + math.sqrt(dv2[j]) * b2)
        c1 += 0.5 * w1 * u**2
        c2 += 0.5 * w2 * u**2
        c12 += 0.5 * w12 * u**2
    paths = CoupledPaths(log_cosh(s12) - c12, log_cosh(s1) - c1, log_cosh(s2) - c2)
    return paths, float(np.max(np.abs(s12 - s1 - s2)))
