"""Scalar distributions: increment laws for tree models, spectral laws for
orthogonally invariant matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

GAUSSIAN = "gaussian"
BERNOULLI_PM = "bernoulli_pm"
UNIFORM = "uniform"
DISCRETE = "discrete"


@dataclass(frozen=True)
class IncrementLaw:
    """A distribution on R with a closed-form log moment generating function.

    ``params`` per kind: gaussian ``(mean, var)``; bernoulli_pm ``(p,)`` for
    ``P(+1) = p``, ``P(-1) = 1 - p``; uniform ``(a, b)``; discrete
    ``(atoms, weights)`` as tuples.
    """

    kind: str
    params: tuple

    def log_mgf(self, t: float) -> float:
        t = float(t)
        if self.kind == GAUSSIAN:
            mean, var = self.params
            return mean * t + 0.5 * var * t * t
        if self.kind == BERNOULLI_PM:
            (p,) = self.params
            if p == 0.0:
                return -t
            if p == 1.0:
                return t
            return float(np.logaddexp(math.log(p) + t, math.log1p(-p) - t))
        if self.kind == UNIFORM:
            a, b = self.params
            if t == 0.0 or a == b:
                return t * a
            # log((e^{tb} - e^{ta}) / (t (b - a))), shifted by the larger exponent
            d = abs(t) * (b - a)
            return max(t * a, t * b) + math.log(-math.expm1(-d)) - math.log(d)
        if self.kind == DISCRETE:
            atoms, weights = self.params
            w = np.asarray(weights, dtype=float)
            mask = w > 0
            x = t * np.asarray(atoms, dtype=float)[mask] + np.log(w[mask])
            m = float(np.max(x))
            return m + math.log(float(np.sum(np.exp(x - m))))
        raise ValueError(f"unknown increment law {self.kind!r}")

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == GAUSSIAN:
            mean, var = self.params
            return mean + math.sqrt(var) * rng.standard_normal(size)
        if self.kind == BERNOULLI_PM:
            (p,) = self.params
            return np.where(rng.random(size) < p, 1.0, -1.0)
        if self.kind == UNIFORM:
            a, b = self.params
            return rng.uniform(a, b, size)
        if self.kind == DISCRETE:
            atoms, weights = self.params
            return rng.choice(np.asarray(atoms, dtype=float), size=size, p=np.asarray(weights, dtype=float))
        raise ValueError(f"unknown increment law {self.kind!r}")

    @property
    def mean(self) -> float:
        if self.kind == GAUSSIAN:
            return self.params[0]
        if self.kind == BERNOULLI_PM:
            return 2.0 * self.params[0] - 1.0
        if self.kind == UNIFORM:
            return 0.5 * (self.params[0] + self.params[1])
        atoms, weights = self.params
        return float(np.dot(atoms, weights))

    @property
    def var(self) -> float:
        if self.kind == GAUSSIAN:
            return self.params[1]
        if self.kind == BERNOULLI_PM:
            p = self.params[0]
            return 4.0 * p * (1.0 - p)
        if self.kind == UNIFORM:
            return (self.params[1] - self.params[0]) ** 2 / 12.0
        atoms, weights = (np.asarray(x, dtype=float) for x in self.params)
        return float(np.dot(weights, (atoms - self.mean) ** 2))

    @property
    def sign_symmetric(self) -> bool:
        """True when the law of ``-x`` equals the law of ``x``."""
        if self.kind == GAUSSIAN:
            return self.params[0] == 0.0
        if self.kind == BERNOULLI_PM:
            return self.params[0] == 0.5
        if self.kind == UNIFORM:
            return self.params[0] == -self.params[1]
        atoms, weights = self.params
        mass = {}
        for a, w in zip(atoms, weights):
            mass[float(a)] = mass.get(float(a), 0.0) + float(w)
        return all(math.isclose(w, mass.get(-a, 0.0), abs_tol=1e-14) for a, w in mass.items())

    def to_dict(self) -> dict:
        params = [list(p) if isinstance(p, tuple) else p for p in self.params]
        return {"kind": self.kind, "params": params}


def gaussian(mean: float = 0.0, var: float = 1.0) -> IncrementLaw:
    if var < 0:
        raise ValueError("variance must be non-negative")
    return IncrementLaw(GAUSSIAN, (float(mean), float(var)))


def bernoulli_pm(p: float = 0.5) -> IncrementLaw:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return IncrementLaw(BERNOULLI_PM, (float(p),))


def uniform(a: float, b: float) -> IncrementLaw:
    if b < a:
        raise ValueError("uniform needs a <= b")
    return IncrementLaw(UNIFORM, (float(a), float(b)))


def discrete(atoms, weights) -> IncrementLaw:
    atoms = tuple(float(a) for a in atoms)
    weights = tuple(float(w) for w in weights)
    if len(atoms) != len(weights) or not atoms:
        raise ValueError("atoms and weights must be non-empty and of equal length")
    if min(weights) < 0 or not math.isclose(sum(weights), 1.0, rel_tol=1e-12):
        raise ValueError("weights must be a probability vector")
    return IncrementLaw(DISCRETE, (atoms, weights))


def point_mass(a: float = 0.0) -> IncrementLaw:
    return discrete([a], [1.0])


def increment_law_from_dict(spec: dict) -> IncrementLaw:
    kind = spec["kind"]
    params = spec.get("params", [])
    if kind == GAUSSIAN:
        return gaussian(*params)
    if kind == BERNOULLI_PM:
        return bernoulli_pm(*params)
    if kind == UNIFORM:
        return uniform(*params)
    if kind == DISCRETE:
        return discrete(*params)
    if kind == "point":
        return point_mass(*params)
    raise ValueError(f"unknown increment law {kind!r}")


SEMICIRCLE = "semicircle"
TWO_ATOMS = "two_atoms"
POINT = "point"
EMPIRICAL = "empirical"


@dataclass(frozen=True, eq=False)
class SpectralLaw:
    """Compactly supported law of the eigenvalues of an orthogonally invariant matrix.

    ``params``: semicircle ``(var,)`` (radius ``2 sqrt(var)``); two_atoms
    ``(a,)`` for ``+-a`` with equal weight; uniform ``(a, b)``; point ``(a,)``;
    empirical ``(values,)`` resampled with replacement.
    """

    kind: str
    params: tuple

    @property
    def support(self) -> tuple[float, float]:
        if self.kind == SEMICIRCLE:
            r = 2.0 * math.sqrt(self.params[0])
            return -r, r
        if self.kind == TWO_ATOMS:
            a = abs(self.params[0])
            return -a, a
        if self.kind == UNIFORM:
            return self.params[0], self.params[1]
        if self.kind == POINT:
            return self.params[0], self.params[0]
        if self.kind == EMPIRICAL:
            v = self.params[0]
            return float(v.min()), float(v.max())
        raise ValueError(f"unknown spectral law {self.kind!r}")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == SEMICIRCLE:
            r = 2.0 * math.sqrt(self.params[0])
            # (x + r) / 2r ~ Beta(3/2, 3/2) for the semicircle on [-r, r]
            return r * (2.0 * rng.beta(1.5, 1.5, n) - 1.0)
        if self.kind == TWO_ATOMS:
            return self.params[0] * (1.0 - 2.0 * rng.integers(0, 2, n))
        if self.kind == UNIFORM:
            return rng.uniform(self.params[0], self.params[1], n)
        if self.kind == POINT:
            return np.full(n, float(self.params[0]))
        if self.kind == EMPIRICAL:
            return rng.choice(self.params[0], size=n, replace=True)
        raise ValueError(f"unknown spectral law {self.kind!r}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == SEMICIRCLE:
            r = 2.0 * math.sqrt(self.params[0])
            if r == 0.0:
                return (x >= 0).astype(float)
            y = np.clip(x / r, -1.0, 1.0)
            return 0.5 + (y * np.sqrt(1.0 - y * y) + np.arcsin(y)) / math.pi
        if self.kind == TWO_ATOMS:
            a = abs(self.params[0])
            return 0.5 * (x >= -a) + 0.5 * (x >= a)
        if self.kind == UNIFORM:
            a, b = self.params
            if a == b:
                return (x >= a).astype(float)
            return np.clip((x - a) / (b - a), 0.0, 1.0)
        if self.kind == POINT:
            return (x >= self.params[0]).astype(float)
        if self.kind == EMPIRICAL:
            v = np.sort(self.params[0])
            return np.searchsorted(v, x, side="right") / v.size
        raise ValueError(f"unknown spectral law {self.kind!r}")

    def moment(self, k: int) -> float:
        """``E[x^k]``; exact except for the empirical law (sample moment)."""
        if self.kind == SEMICIRCLE:
            if k % 2:
                return 0.0
            m = k // 2
            return math.comb(2 * m, m) / (m + 1) * self.params[0] ** m
        if self.kind == TWO_ATOMS:
            return 0.0 if k % 2 else abs(self.params[0]) ** k
        if self.kind == UNIFORM:
            a, b = self.params
            if a == b:
                return a**k
            return (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))
        if self.kind == POINT:
            return float(self.params[0]) ** k
        return float(np.mean(self.params[0] ** k))

    def to_dict(self) -> dict:
        if self.kind == EMPIRICAL:
            return {"kind": EMPIRICAL, "n": int(self.params[0].size)}
        return {"kind": self.kind, "params": list(self.params)}


def semicircle(var: float = 1.0) -> SpectralLaw:
    if var < 0:
        raise ValueError("variance must be non-negative")
    return SpectralLaw(SEMICIRCLE, (float(var),))


def two_atoms(a: float) -> SpectralLaw:
    return SpectralLaw(TWO_ATOMS, (float(a),))


def uniform_spectrum(a: float, b: float) -> SpectralLaw:
    if b < a:
        raise ValueError("uniform needs a <= b")
    return SpectralLaw(UNIFORM, (float(a), float(b)))


def point_spectrum(a: float = 0.0) -> SpectralLaw:
    return SpectralLaw(POINT, (float(a),))


def empirical(values) -> SpectralLaw:
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise ValueError("empirical law needs finite values")
    v = v.copy()
    v.setflags(write=False)
    return SpectralLaw(EMPIRICAL, (v,))


def spectral_law_from_dict(spec: dict) -> SpectralLaw:
    kind = spec["kind"]
    params = spec.get("params", [])
    if kind == SEMICIRCLE:
        return semicircle(*params)
    if kind == TWO_ATOMS:
        return two_atoms(*params)
    if kind == UNIFORM:
        return uniform_spectrum(*params)
    if kind == POINT:
        return point_spectrum(*params)
    if kind == EMPIRICAL:
        return empirical(params)
    raise ValueError(f"unknown spectral law {kind!r}")
