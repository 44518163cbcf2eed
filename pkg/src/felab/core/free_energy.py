"""Partition functions and disorder-averaged free energies."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from felab.core.laws import HamiltonianLaw, HamiltonianSample
from felab.core.spaces import COUNTING, PROBABILITY, StateSpace, check_convention
from felab.seeding import DISORDER, STATES, STREAM_DEFAULT, SeedLike, child, realization_seed, rng

FLAG_SINGLE = "single_realization"
FLAG_APPROX_STATE = "approximate_state_error"


class NumericalError(ArithmeticError):
    """NaN energies or other unrecoverable numerical failures."""


class LogZ(NamedTuple):
    value: float
    stderr: float = 0.0
    n_state_samples: int = 0


@dataclass(frozen=True)
class StateMC:
    """Inner Monte Carlo over states for spaces that cannot be enumerated."""

    n_state_samples: int
    chunk: int = 8192

    def __post_init__(self):
        if self.n_state_samples < 1:
            raise ValueError("n_state_samples must be >= 1")


@dataclass(frozen=True)
class FreeEnergyEstimate:
    """Disorder average of log Z.

    ``stderr`` is the disorder standard error; ``state_stderr`` the propagated
    delta-method error of the inner state Monte Carlo (0 for exact
    integration).  ``values`` keeps the per-realization log Z.
    """

    mean: float
    stderr: float
    n_disorder: int
    n_state_samples: int
    seed: int
    convention: str
    state_stderr: float = 0.0
    flags: tuple = ()
    values: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def total_stderr(self) -> float:
        return math.hypot(self.stderr, self.state_stderr)


def resolve_threads(threads: Optional[int]) -> int:
    if threads is None:
        threads = int(os.environ.get("FELAB_THREADS", "1") or 1)
    return max(1, int(threads))


def logsumexp(a: np.ndarray) -> float:
    a = np.asarray(a, dtype=float)
    if np.isnan(a).any():
        raise NumericalError("NaN energy")
    m = float(np.max(a))
    if not math.isfinite(m):
        return m
    return m + math.log(float(np.sum(np.exp(a - m))))


def log_mean_exp(a: np.ndarray) -> tuple[float, float]:
    """``log(mean(exp(a)))`` and its delta-method standard error."""
    a = np.asarray(a, dtype=float)
    if np.isnan(a).any():
        raise NumericalError("NaN energy")
    n = a.size
    m = float(np.max(a))
    w = np.exp(a - m)
    mean_w = float(np.mean(w))
    value = m + math.log(mean_w)
    if n < 2:
        return value, 0.0
    se = float(np.std(w, ddof=1)) / (math.sqrt(n) * mean_w)
    return value, se


def partition_function(
    sample: HamiltonianSample,
    space: StateSpace,
    measure: str = PROBABILITY,
    state_mc: Optional[StateMC] = None,
    seed: Optional[SeedLike] = None,
) -> LogZ:
    """log Z of one realization.

    Enumerable spaces are summed exactly with a max-shifted log-sum-exp.
    Otherwise ``state_mc`` and ``seed`` drive i.i.d. draws from the invariant
    probability measure and the log of the sample mean of ``exp(H)`` is
    returned with its delta-method standard error.
    """
    check_convention(measure)
    if space.enumerable and state_mc is None:
        value = logsumexp(sample.table(space))
        if measure == PROBABILITY:
            value -= space.log_size()
        return LogZ(value)
    if state_mc is None:
        raise ValueError(f"{space.describe()} is not enumerable; pass a StateMC config")
    if seed is None:
        raise ValueError("state Monte Carlo needs a seed")
    if measure == COUNTING and space.size is None:
        raise ValueError("counting measure is only defined on finite spaces")
    gen = rng(seed)
    parts = []
    remaining = state_mc.n_state_samples
    while remaining > 0:
        k = min(state_mc.chunk, remaining)
        parts.append(np.asarray(sample.energies(space.sample(gen, k)), dtype=float))
        remaining -= k
    value, se = log_mean_exp(np.concatenate(parts))
    if measure == COUNTING:
        value += space.log_size()
    return LogZ(value, se, state_mc.n_state_samples)


def disorder_average(
    log_z: Callable[[np.random.SeedSequence], LogZ],
    n_disorder: int,
    seed: int,
    stream: int = STREAM_DEFAULT,
    threads: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate ``log_z`` on realization seeds ``(seed, stream, r)``, r < n_disorder.

    Returns per-realization values and state standard errors in counter order,
    whatever the worker count.
    """
    if n_disorder < 1:
        raise ValueError("n_disorder must be >= 1")
    seeds = [realization_seed(seed, stream, r) for r in range(n_disorder)]
    workers = resolve_threads(threads)
    if workers == 1:
        results = [log_z(ss) for ss in seeds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(log_z, seeds))
    values = np.array([r.value for r in results], dtype=float)
    state_se = np.array([r.stderr for r in results], dtype=float)
    if not np.all(np.isfinite(values)):
        raise NumericalError("non-finite log Z in disorder average")
    return values, state_se


def summarize(
    values: np.ndarray,
    state_se: np.ndarray,
    seed: int,
    convention: str,
    n_state_samples: int = 0,
    extra_flags: tuple = (),
) -> FreeEnergyEstimate:
    n = values.size
    # fsum: correctly rounded, hence independent of accumulation order
    mean = math.fsum(values) / n
    flags = list(extra_flags)
    if n > 1 and np.all(values == values[0]):
        stderr = 0.0
    elif n > 1:
        stderr = math.sqrt(math.fsum((values - mean) ** 2) / (n - 1)) / math.sqrt(n)
    else:
        stderr = 0.0
        flags.append(FLAG_SINGLE)
    state_stderr = math.sqrt(math.fsum(state_se**2)) / n
    if n_state_samples:
        flags.append(FLAG_APPROX_STATE)
    return FreeEnergyEstimate(
        mean=mean,
        stderr=stderr,
        n_disorder=n,
        n_state_samples=n_state_samples,
        seed=int(seed),
        convention=convention,
        state_stderr=state_stderr,
        flags=tuple(flags),
        values=values,
    )


def quenched_free_energy(
    law: HamiltonianLaw,
    measure: str = PROBABILITY,
    n_disorder: int = 1000,
    seed: int = 0,
    state_mc: Optional[StateMC] = None,
    stream: int = STREAM_DEFAULT,
    threads: Optional[int] = None,
) -> FreeEnergyEstimate:
    """Monte Carlo estimate of ``E[log Z(H)]`` for ``H ~ law``.

    Realization ``r`` draws its Hamiltonian from ``child(realization_seed, 0)``
    and its states (nested MC only) from ``child(realization_seed, 1)``.
    """
    check_convention(measure)
    space = law.space
    if not space.enumerable and state_mc is None:
        raise ValueError(f"{space.describe()} is not enumerable; pass a StateMC config")

    def one(ss):
        sample = law.sample(child(ss, DISORDER))
        return partition_function(sample, space, measure, state_mc, child(ss, STATES))

    values, state_se = disorder_average(one, n_disorder, seed, stream, threads)
    return summarize(values, state_se, seed, measure, state_mc.n_state_samples if state_mc else 0)


def annealed_bound(law: HamiltonianLaw) -> float:
    """``sup_sigma log E exp(H(sigma))`` from closed-form moment generating functions."""
    if law.marginal_log_mgf is not None:
        return float(law.marginal_log_mgf(1.0))
    if law.state_log_mgf is not None and law.space.enumerable:
        return float(max(np.max(law.state_log_mgf(s)) for s in law.space.iter_states()))
    raise NotImplementedError(
        f"law {law.name!r} has no closed-form mgf; a Monte Carlo annealed estimate is not provided"
    )
