"""Step order parameters and the xi''-weighted combination of two of them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from felab.classical.xi import MixtureXi


class ZetaError(ValueError):
    pass


@dataclass(frozen=True)
class StepZeta:
    """``zeta(t) = values[l]`` on ``[breakpoints[l], breakpoints[l+1])`` and ``zeta(1) = values[-1]``.

    ``breakpoints`` runs from 0 to 1, strictly increasing.  With
    ``monotone=True`` (the default) values must be nondecreasing; the
    combined order parameter of two mixtures need not be, so it is built
    with ``monotone=False``.
    """

    breakpoints: tuple
    values: tuple
    monotone: bool = True

    def __post_init__(self):
        t = tuple(float(x) for x in self.breakpoints)
        m = tuple(float(x) for x in self.values)
        object.__setattr__(self, "breakpoints", t)
        object.__setattr__(self, "values", m)
        if len(t) != len(m) + 1 or not m:
            raise ZetaError("need k + 1 breakpoints for k values")
        if t[0] != 0.0 or t[-1] != 1.0:
            raise ZetaError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(t, t[1:])):
            raise ZetaError(f"breakpoints must be strictly increasing, got {t}")
        if any(not 0.0 <= x <= 1.0 for x in m):
            raise ZetaError(f"values must lie in [0, 1], got {m}")
        if self.monotone and any(b < a for a, b in zip(m, m[1:])):
            raise ZetaError(f"values must be nondecreasing, got {m}")

    @classmethod
    def constant(cls, m: float) -> "StepZeta":
        return cls((0.0, 1.0), (m,))

    @classmethod
    def from_raw(cls, breakpoints, values) -> "StepZeta":
        """Sort and clamp arbitrary reals into a valid monotone step function.

        ``breakpoints`` are the ``k - 1`` interior points.  Intervals of zero
        length are dropped and adjacent equal values merged.
        """
        m = np.sort(np.clip(np.asarray(values, dtype=float), 0.0, 1.0))
        t = np.concatenate([[0.0], np.sort(np.clip(np.asarray(breakpoints, dtype=float), 0.0, 1.0)), [1.0]])
        keep_t, keep_m = [0.0], []
        for l, value in enumerate(m):
            if t[l + 1] <= keep_t[-1]:
                continue
            if keep_m and keep_m[-1] == value:
                keep_t[-1] = t[l + 1]
            else:
                keep_t.append(float(t[l + 1]))
                keep_m.append(float(value))
        if not keep_m:
            keep_m = [float(m[-1])]
            keep_t = [0.0, 1.0]
        keep_t[-1] = 1.0
        return cls(tuple(keep_t), tuple(keep_m))

    @property
    def k(self) -> int:
        return len(self.values)

    def intervals(self):
        """``(t_start, t_end, m)`` per step."""
        return list(zip(self.breakpoints[:-1], self.breakpoints[1:], self.values))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0, self.k - 1)
        out = np.asarray(self.values)[idx]
        return float(out) if out.ndim == 0 else out

    def to_dict(self) -> dict:
        return {"breakpoints": list(self.breakpoints), "values": list(self.values)}


def _leading_d2(xi: MixtureXi):
    """Lowest power ``p`` with ``c_p > 0`` among ``p >= 2`` and ``p (p - 1) c_p``, or ``None``."""
    for p, c in xi.terms():
        if p >= 2:
            return p, p * (p - 1) * c
    return None


@dataclass(frozen=True)
class ZetaCombination:
    """``(zeta1 xi1'' + zeta2 xi2'') / (xi1'' + xi2'')`` as a function on [0, 1].

    Where both second derivatives vanish (only possible at ``t = 0``) the
    right limit is used.
    """

    xi1: MixtureXi
    zeta1: StepZeta
    xi2: MixtureXi
    zeta2: StepZeta

    def __post_init__(self):
        if _leading_d2(self.xi1) is None and _leading_d2(self.xi2) is None:
            raise ZetaError("xi1'' + xi2'' vanishes identically")

    def _limit_at_zero(self) -> float:
        a, b = _leading_d2(self.xi1), _leading_d2(self.xi2)
        z1, z2 = self.zeta1(0.0), self.zeta2(0.0)
        if a is None:
            return z2
        if b is None or a[0] < b[0]:
            return z1
        if b[0] < a[0]:
            return z2
        return (z1 * a[1] + z2 * b[1]) / (a[1] + b[1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        d1, d2 = np.asarray(self.xi1.d2(t)), np.asarray(self.xi2.d2(t))
        num = np.asarray(self.zeta1(t)) * d1 + np.asarray(self.zeta2(t)) * d2
        den = d1 + d2
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(den > 0, num / np.where(den > 0, den, 1.0), self._limit_at_zero())
        return float(out) if out.ndim == 0 else out

    @property
    def breakpoints(self) -> tuple:
        return tuple(sorted(set(self.zeta1.breakpoints) | set(self.zeta2.breakpoints)))

    def sampled(self) -> tuple:
        """Values at the left end of every merged interval."""
        return tuple(float(self(t)) for t in self.breakpoints[:-1])

    def to_step(self, n_dense: int = 128) -> StepZeta:
        """Step approximation on the merged breakpoints refined to at least ``n_dense`` uniform cells.

        Each cell takes the value at its midpoint.
        """
        grid = np.union1d(np.linspace(0.0, 1.0, n_dense + 1), self.breakpoints)
        mids = 0.5 * (grid[:-1] + grid[1:])
        return StepZeta(tuple(grid), tuple(np.clip(self(mids), 0.0, 1.0)), monotone=False)


def zeta_combine(xi1: MixtureXi, zeta1: StepZeta, xi2: MixtureXi, zeta2: StepZeta) -> ZetaCombination:
    return ZetaCombination(xi1, zeta1, xi2, zeta2)
