"""Statistical checks of F(L1 + L2) <= F(L1) + F(L2)."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional

import numpy as np

from felab.core.free_energy import (
    FLAG_SINGLE,
    FreeEnergyEstimate,
    StateMC,
    quenched_free_energy,
)
from felab.core.laws import HamiltonianLaw, sum_laws
from felab.core.spaces import PROBABILITY
from felab.seeding import DISORDER, STREAM_F1, STREAM_F2, STREAM_F12, child, realization_seed

HOLDS = "holds_within_CI"
VIOLATED = "violated_beyond_CI"
INCONCLUSIVE = "inconclusive"

INDEPENDENT = "independent"
COMMON = "common"


@dataclass(frozen=True)
class SubadditivityReport:
    F1: FreeEnergyEstimate
    F2: FreeEnergyEstimate
    F12: FreeEnergyEstimate
    z: float = 3.0

    @property
    def slack(self) -> float:
        return self.F1.mean + self.F2.mean - self.F12.mean

    @property
    def combined_stderr(self) -> float:
        return math.sqrt(sum(f.total_stderr**2 for f in (self.F1, self.F2, self.F12)))

    @property
    def verdict(self) -> str:
        return verdict_for(self.slack, self.combined_stderr, self.z, (self.F1, self.F2, self.F12))


def verdict_for(slack: float, combined_stderr: float, z: float, estimates=()) -> str:
    if slack < -z * combined_stderr:
        if any(FLAG_SINGLE in e.flags for e in estimates):
            return INCONCLUSIVE
        return VIOLATED
    return HOLDS


def subadditivity_report(
    law1: HamiltonianLaw,
    law2: HamiltonianLaw,
    measure: str = PROBABILITY,
    *,
    n_disorder: int = 1000,
    seed: int = 0,
    z: float = 3.0,
    state_mc: Optional[StateMC] = None,
    combined: Optional[HamiltonianLaw] = None,
    threads: Optional[int] = None,
    coupling: str = INDEPENDENT,
) -> SubadditivityReport:
    """Estimate F(L1), F(L2) and F(L1 + L2).

    With ``coupling="independent"`` the three estimates use independent seed
    streams.  With ``coupling="common"`` realization ``r`` of the sum is
    built from realization ``r`` of each summand, so deterministic identities
    such as ``F(L + 0) = F(L)`` hold exactly; the reported combined stderr is
    then only a heuristic.  ``combined`` replaces the independent sum by a
    law equal to it in distribution (e.g. the p-spin law at
    sqrt(beta1^2 + beta2^2)).

    The inequality is only guaranteed when one summand is invariant under a
    transitive group; otherwise a warning is issued and a violation is
    legitimate.
    """
    if coupling not in (INDEPENDENT, COMMON):
        raise ValueError(f"coupling must be {INDEPENDENT!r} or {COMMON!r}")
    if not (law1.invariant or law2.invariant):
        warnings.warn(
            f"neither {law1.name!r} nor {law2.name!r} is symmetric; subadditivity is not guaranteed",
            stacklevel=2,
        )
    law12 = combined if combined is not None else sum_laws(law1, law2)
    kw = dict(measure=measure, n_disorder=n_disorder, seed=seed, state_mc=state_mc, threads=threads)
    if coupling == COMMON:
        if combined is not None:
            raise ValueError("common coupling needs the independent sum, not a combined law")
        f1 = quenched_free_energy(_summand(law1, 0), stream=STREAM_F12, **kw)
        f2 = quenched_free_energy(_summand(law2, 1), stream=STREAM_F12, **kw)
    else:
        f1 = quenched_free_energy(law1, stream=STREAM_F1, **kw)
        f2 = quenched_free_energy(law2, stream=STREAM_F2, **kw)
    f12 = quenched_free_energy(law12, stream=STREAM_F12, **kw)
    return SubadditivityReport(f1, f2, f12, z)


def _summand(law: HamiltonianLaw, key: int) -> HamiltonianLaw:
    """``law`` drawn at ``child(seed, key)``, matching summand ``key`` of :func:`sum_laws`."""
    return replace(law, sampler=lambda ss: law.sample(child(ss, key)))


def two_point_counterexample(x: float) -> tuple[float, float]:
    """``(F(L1 + L2), F(L1) + F(L2))`` for the deterministic two-point pair.

    Both laws put ``H(+1) = 0`` and ``H(-1) = x`` on the uniform two-point space;
    the first value exceeds the second whenever ``x != 0``.
    """
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    rhs = 2.0 * (float(np.logaddexp(0.0, x)) - math.log(2.0))
    # lhs - rhs = log(2 (1 + e^{2x}) / (1 + e^x)^2) = log1p(tanh(x/2)^2) >= 0
    return rhs + counterexample_gap(x), rhs


def counterexample_gap(x: float) -> float:
    """``F(L1 + L2) - F(L1) - F(L2)`` for the two-point pair, free of cancellation."""
    return math.log1p(math.tanh(0.5 * float(x)) ** 2)


class TiltedMeanCheck(NamedTuple):
    lhs: float
    rhs: float
    gap: float
    stderr: float


def tilted_measure_mean_check(
    law: HamiltonianLaw,
    f: Callable[[np.ndarray], np.ndarray],
    n_disorder: int = 1000,
    seed: int = 0,
) -> TiltedMeanCheck:
    """Compare the disorder-averaged Gibbs mean of ``f`` with its plain mean.

    For a law invariant under a transitive group the expected Gibbs measure is
    the reference measure, so the gap vanishes up to Monte Carlo error.
    """
    space = law.space
    if not space.enumerable:
        raise ValueError("tilted measure check needs an enumerable space")
    if not law.invariant:
        warnings.warn(f"{law.name!r} carries no symmetry; the gap need not vanish", stacklevel=2)
    fvals = np.concatenate([np.asarray(f(s), dtype=float) * np.ones(len(s)) for s in space.iter_states()])
    rhs = math.fsum(fvals) / fvals.size
    gibbs = np.empty(n_disorder)
    for r in range(n_disorder):
        table = law.sample(child(realization_seed(seed, 0, r), DISORDER)).table(space)
        w = np.exp(table - table.max())
        gibbs[r] = float(np.sum(w * fvals) / np.sum(w))
    lhs = math.fsum(gibbs) / n_disorder
    se = float(np.std(gibbs, ddof=1) / math.sqrt(n_disorder)) if n_disorder > 1 else 0.0
    return TiltedMeanCheck(lhs, rhs, lhs - rhs, se)
