"""Minimisation of the Parisi functional over step order parameters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from felab.classical.xi import MixtureXi
from felab.parisi.pde import GridConfig, parisi_functional
from felab.parisi.zeta import StepZeta
from felab.seeding import rng

MAX_ATOMS = 4
FLAG_NOT_CONVERGED = "not_converged"
FLAG_NOT_MONOTONE = "value_increased_with_k"


@dataclass(frozen=True)
class OptimizerConfig:
    """Nelder-Mead settings; ``n_restarts`` random starts are added to the nested start."""

    n_restarts: int = 2
    max_iter: int = 600
    xatol: float = 1e-6
    fatol: float = 1e-11
    seed: int = 0
    grid: GridConfig = field(default_factory=lambda: GridConfig(nx=2049, n_nodes=64))


@dataclass(frozen=True)
class ParisiMinimum:
    """Best step order parameter found; unpacks as ``(zeta, value)``."""

    zeta: StepZeta
    value: float
    values_by_k: tuple = ()
    n_evaluations: int = 0
    flags: tuple = ()

    def __iter__(self):
        return iter((self.zeta, self.value))


def _split(raw_k: int, u: np.ndarray):
    """Raw vector ``(m_1..m_k, t_1..t_{k-1})``."""
    return u[:raw_k], u[raw_k:]


def _to_raw(zeta: StepZeta, k: int) -> np.ndarray:
    """Encode ``zeta`` with exactly ``k`` values by splitting the longest steps."""
    t = list(zeta.breakpoints)
    m = list(zeta.values)
    while len(m) < k:
        lengths = [b - a for a, b in zip(t, t[1:])]
        l = int(np.argmax(lengths))
        t.insert(l + 1, 0.5 * (t[l] + t[l + 1]))
        m.insert(l, m[l])
    return np.array(m + t[1:-1], dtype=float)


def parisi_minimize(xi: MixtureXi, k: int, config: OptimizerConfig = OptimizerConfig()) -> ParisiMinimum:
    """Minimise ``P_xi`` over step order parameters with at most ``k`` values.

    Classes are searched for ``1, ..., k`` values in turn; each search starts
    from the previous optimum (re-encoded with one more step) plus random
    starts, so the reported value never increases with ``k``.  The
    parameterisation sorts and clamps raw reals into a valid step function.
    ``zeta = 0`` and ``zeta = 1`` are always evaluated.
    """
    if not 1 <= k <= MAX_ATOMS:
        raise ValueError(f"k must lie in 1..{MAX_ATOMS}")
    if xi.is_zero:
        return ParisiMinimum(StepZeta.constant(1.0), 0.0, (0.0,) * k)
    gen = rng(config.seed)
    evals = [0]

    def objective_factory(kk):
        def f(u):
            vals, bps = _split(kk, u)
            evals[0] += 1
            return parisi_functional(xi, StepZeta.from_raw(bps, vals), config.grid)

        return f

    best_zeta, best_value = None, np.inf
    for m in (0.0, 1.0):
        z = StepZeta.constant(m)
        val = parisi_functional(xi, z, config.grid)
        evals[0] += 1
        if val < best_value:
            best_zeta, best_value = z, val

    flags = set()
    history = []
    for kk in range(1, k + 1):
        f = objective_factory(kk)
        dim = 2 * kk - 1
        starts = [_to_raw(best_zeta, kk)] if best_zeta.k <= kk else []
        starts += [np.concatenate([np.sort(gen.random(kk)), np.sort(gen.random(kk - 1))]) for _ in range(config.n_restarts)]
        for x0 in starts:
            simplex = np.vstack([x0] + [x0 + 0.1 * np.eye(dim)[i] * (1 if x0[i] < 0.5 else -1) for i in range(dim)])
            res = minimize(
                f,
                x0,
                method="Nelder-Mead",
                options={"initial_simplex": simplex, "maxiter": config.max_iter, "xatol": config.xatol, "fatol": config.fatol},
            )
            if not res.success:
                flags.add(FLAG_NOT_CONVERGED)
            if res.fun < best_value:
                vals, bps = _split(kk, res.x)
                best_zeta, best_value = StepZeta.from_raw(bps, vals), float(res.fun)
        if history and best_value > history[-1] + 1e-12:
            flags.add(FLAG_NOT_MONOTONE)
        history.append(best_value)
    return ParisiMinimum(best_zeta, best_value, tuple(history), evals[0], tuple(sorted(flags)))
