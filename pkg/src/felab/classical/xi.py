"""Mixture covariance xi(x) = sum_p c_p x^p."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class MixtureXi:
    """Coefficients ``(c_1, ..., c_P)``; ``coefficients[p - 1]`` multiplies ``x**p``."""

    coefficients: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coefficients)
        if any(c < 0 for c in coeffs):
            raise ValueError(f"mixture coefficients must be non-negative, got {coeffs}")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_terms(cls, terms: dict) -> "MixtureXi":
        """``{p: c_p}`` -> MixtureXi."""
        if not terms:
            return cls(())
        P = max(int(p) for p in terms)
        coeffs = [0.0] * P
        for p, c in terms.items():
            if int(p) < 1:
                raise ValueError("powers start at 1")
            coeffs[int(p) - 1] = float(c)
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coefficients)

    def terms(self):
        return [(p, c) for p, c in enumerate(self.coefficients, start=1) if c != 0.0]

    @property
    def is_zero(self) -> bool:
        return not self.terms()

    def __call__(self, x):
        return _horner(self.coefficients, x, lambda p, c: c)

    def d1(self, x):
        return _horner(self.coefficients, x, lambda p, c: p * c, shift=1)

    def d2(self, x):
        return _horner(self.coefficients, x, lambda p, c: p * (p - 1) * c, shift=2)

    def t_d2_integral(self, a, b):
        """Closed form of int_a^b t xi''(t) dt = [t xi'(t) - xi(t)]_a^b."""
        g = lambda t: t * self.d1(t) - self(t)  # noqa: E731
        return g(b) - g(a)

    def __add__(self, other: "MixtureXi") -> "MixtureXi":
        n = max(self.degree, other.degree)
        a = list(self.coefficients) + [0.0] * (n - self.degree)
        b = list(other.coefficients) + [0.0] * (n - other.degree)
        return MixtureXi(tuple(x + y for x, y in zip(a, b)))

    def scaled(self, factor: float) -> "MixtureXi":
        return MixtureXi(tuple(factor * c for c in self.coefficients))

    def __repr__(self) -> str:
        body = " + ".join(f"{c:g}x^{p}" for p, c in self.terms()) or "0"
        return f"MixtureXi({body})"


def _horner(coeffs, x, weight, shift: int = 0):
    """Evaluate sum_p weight(p, c_p) x^(p - shift) by Horner's rule."""
    x = np.asarray(x, dtype=float)
    acc = np.zeros_like(x)
    # coefficient of x^j is weight(j + shift, c_{j + shift}); c_0 = 0
    for j in range(len(coeffs) - shift, -1, -1):
        p = j + shift
        acc = acc * x + (weight(p, coeffs[p - 1]) if p >= 1 else 0.0)
    if acc.ndim == 0:
        return float(acc)
    return acc
