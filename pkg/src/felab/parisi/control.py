"""Monte Carlo evaluation of the stochastic-control payoff.

For a control ``u`` with ``|u| <= 1`` the payoff is

    X = log cosh(s_1) - (1/2) int_0^1 zeta xi'' u^2 dt,
    s_t = int_0^t zeta xi'' u ds + int_0^t sqrt(xi'') dB,

and its expectation is at most ``Phi(0, 0)`` with equality for the optimal
control.  Time is discretised on a uniform grid; over a step ``[t_j, t_{j+1}]``
the ``dt``-integrals use ``xi'(t_{j+1}) - xi'(t_j)`` in place of
``xi''(t_j) dt`` (exact for the noise variance) with ``zeta`` and ``u``
frozen at the left end.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from felab.classical.xi import MixtureXi
from felab.core.free_energy import resolve_threads
from felab.parisi.pde import GridConfig, PdeSolution, log_cosh, parisi_pde_solve
from felab.parisi.zeta import StepZeta
from felab.seeding import STREAM_PATHS, realization_seed, rng

ZERO = "zero"
CONSTANT = "constant"
PDE_FEEDBACK = "pde_feedback"
CONTROLS = (ZERO, CONSTANT, PDE_FEEDBACK)
BLOCK = 8192
FEEDBACK_DT = 1.0 / 256


@dataclass(frozen=True)
class ControlConfig:
    n_steps: int = 1000
    n_paths: int = 100_000
    seed: int = 0
    control: str = ZERO
    u0: float = 0.0
    threads: Optional[int] = None

    def __post_init__(self):
        if self.n_steps < 1000:
            raise ValueError("n_steps must be >= 1000")
        if self.n_paths < 2:
            raise ValueError("n_paths must be >= 2")
        if self.control not in CONTROLS:
            raise ValueError(f"control must be one of {CONTROLS}")
        if not abs(self.u0) <= 1.0:
            raise ValueError(f"|u0| must be <= 1, got {self.u0}")


@dataclass(frozen=True)
class ControlEstimate:
    mean: float
    stderr: float
    n_paths: int
    control: str


def _block_payoffs(xi, zeta, cfg: ControlConfig, solution: Optional[PdeSolution], block: int, size: int) -> np.ndarray:
    gen = rng(realization_seed(cfg.seed, STREAM_PATHS, block))
    t = np.linspace(0.0, 1.0, cfg.n_steps + 1)
    dv = np.diff(np.asarray(xi.d1(t), dtype=float))
    zt = np.asarray(zeta(t[:-1]), dtype=float)
    if solution is not None:
        tidx = solution.time_index(t[:-1])
    s = np.zeros(size)
    cost = np.zeros(size)
    for j in range(cfg.n_steps):
        noise = gen.standard_normal(size)
        if cfg.control == ZERO:
            u = 0.0
        elif cfg.control == CONSTANT:
            u = cfg.u0
        else:
            u = solution.grad(int(tidx[j]), s)
            if np.max(np.abs(u)) > 1.0 + 1e-12:
                raise ValueError("feedback control left [-1, 1]")
        w = zt[j] * dv[j]
        cost += 0.5 * w * np.square(u)
        s += w * u + math.sqrt(dv[j]) * noise
    return log_cosh(s) - cost


def ac_simulate(
    xi: MixtureXi,
    zeta: StepZeta,
    config: ControlConfig = ControlConfig(),
    solution: Optional[PdeSolution] = None,
    grid: GridConfig = GridConfig(dt_max=FEEDBACK_DT),
) -> ControlEstimate:
    """Mean and standard error of the payoff over ``n_paths`` paths.

    Paths are simulated in blocks of ``BLOCK`` keyed by block index, so
    results do not depend on the thread count.  The feedback control is
    ``d_x Phi`` at the stored time nearest ``t`` (solved here with
    ``grid`` unless ``solution`` is given).
    """
    if xi.is_zero:
        return ControlEstimate(0.0, 0.0, config.n_paths, config.control)
    if config.control == PDE_FEEDBACK and solution is None:
        solution = parisi_pde_solve(xi, zeta, grid)
    sizes = [min(BLOCK, config.n_paths - b * BLOCK) for b in range(math.ceil(config.n_paths / BLOCK))]

    def run(b):
        return _block_payoffs(xi, zeta, config, solution, b, sizes[b])

    workers = resolve_threads(config.threads)
    if workers == 1:
        blocks = [run(b) for b in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(run, range(len(sizes))))
    x = np.concatenate(blocks)
    mean = math.fsum(x) / x.size
    var = math.fsum((x - mean) ** 2) / (x.size - 1)
    return ControlEstimate(mean, math.sqrt(var / x.size), x.size, config.control)
