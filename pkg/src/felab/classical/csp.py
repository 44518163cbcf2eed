"""Random constraint satisfaction Hamiltonians: k-SAT, NAE-k-SAT, custom
clause tables, and the Ising perceptron."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate
from scipy.stats import poisson

from felab.core.laws import ON, Z2N, HamiltonianLaw, HamiltonianSample, LawError
from felab.core.spaces import hypercube, sphere
from felab.seeding import rng

KSAT = "ksat"
NAE_KSAT = "nae_ksat"
CUSTOM = "custom"
FIXED = "fixed"
POISSON = "poisson"
POISSON_CAP_FACTOR = 10


@dataclass(frozen=True)
class ClauseModel:
    """Clause arity ``k``, density ``alpha`` and penalty ``theta``.

    ``theta`` acts on the signed literals ``y_l = s_l * sigma_{i_l}``.  Built-in
    tables penalise a violated k-SAT clause (all ``y_l = -1``) or a violated
    NAE clause (all ``y_l`` equal).  A custom ``table`` lists ``theta(y)`` for
    ``y`` in the order where bit ``k-1-l`` of the index is ``(1 - y_l) / 2``.
    """

    k: int
    alpha: float
    clause_type: str = KSAT
    table: Optional[tuple] = None
    m_mode: str = FIXED

    def __post_init__(self):
        if self.k < 1:
            raise LawError("clause arity must be >= 1")
        if self.alpha < 0:
            raise LawError("alpha must be non-negative")
        if self.m_mode not in (FIXED, POISSON):
            raise LawError(f"m_mode must be {FIXED!r} or {POISSON!r}")
        if self.clause_type == CUSTOM:
            if self.table is None or len(self.table) != 2**self.k:
                raise LawError(f"custom table needs 2^k = {2**self.k} entries")
            if min(self.table) < 0:
                raise LawError("theta must be non-negative")
        elif self.clause_type not in (KSAT, NAE_KSAT):
            raise LawError(f"unknown clause type {self.clause_type!r}")

    def theta_table(self) -> np.ndarray:
        """``theta`` over all ``2^k`` literal patterns in index order."""
        k = self.k
        if self.clause_type == CUSTOM:
            return np.asarray(self.table, dtype=float)
        idx = np.arange(2**k)
        if self.clause_type == KSAT:
            return (idx == 2**k - 1).astype(float)
        return ((idx == 0) | (idx == 2**k - 1)).astype(float)

    def clause_log_mgf(self, t: float) -> float:
        """``log E exp(-t theta(y))`` for uniform ``y``; the literal negations make it sigma-free."""
        vals = -t * self.theta_table()
        m = float(vals.max())
        return m + math.log(float(np.mean(np.exp(vals - m))))


def clause_energies(theta: np.ndarray, idx: np.ndarray, signs: np.ndarray, beta: float, states: np.ndarray) -> np.ndarray:
    """``-beta * sum_j theta(signs_j * sigma[idx_j])`` for each state row."""
    states = np.asarray(states, dtype=float)
    m, k = idx.shape
    out = np.zeros(len(states))
    if m == 0:
        return out
    weights = 1 << np.arange(k - 1, -1, -1, dtype=np.int64)
    step = max(1, (1 << 22) // (m * k))
    for start in range(0, len(states), step):
        y = states[start : start + step, idx] * signs
        bits = ((1.0 - y) * 0.5).astype(np.int64)
        out[start : start + step] = -beta * theta[bits @ weights].sum(axis=1)
    return out


def fixed_clause_sample(model: ClauseModel, idx, signs, beta: float) -> HamiltonianSample:
    """Realization for explicit clause indices ``(M, k)`` and literal signs ``(M, k)``."""
    idx = np.asarray(idx, dtype=np.int64).reshape(-1, model.k)
    signs = np.asarray(signs, dtype=float).reshape(-1, model.k)
    theta = model.theta_table()
    return HamiltonianSample(lambda states: clause_energies(theta, idx, signs, beta, states))


def csp_law(N: int, model: ClauseModel, beta: float = 1.0) -> HamiltonianLaw:
    """Random CSP on the hypercube with i.i.d. uniform indices and literal signs per clause."""
    if model.k > N:
        raise LawError("clause arity exceeds N")
    beta = float(beta)
    mean_m = model.alpha * N
    cap = int(math.ceil(POISSON_CAP_FACTOR * mean_m))
    truncation = 0.0
    if model.m_mode == POISSON and mean_m > 0:
        truncation = float(poisson.sf(cap, mean_m))
    theta = model.theta_table()

    def sampler(ss):
        gen = rng(ss)
        if model.m_mode == FIXED:
            m = int(round(mean_m))
        else:
            m = min(int(gen.poisson(mean_m)), cap) if mean_m > 0 else 0
        idx = gen.integers(0, N, size=(m, model.k))
        signs = 1.0 - 2.0 * gen.integers(0, 2, size=(m, model.k))
        return HamiltonianSample(lambda states: clause_energies(theta, idx, signs, beta, states))

    if model.m_mode == FIXED:
        m_fixed = int(round(mean_m))
        mgf = lambda t: m_fixed * model.clause_log_mgf(t * beta)  # noqa: E731
    else:
        mgf = lambda t: mean_m * math.expm1(model.clause_log_mgf(t * beta))  # noqa: E731
    return HamiltonianLaw(
        name=model.clause_type,
        space=hypercube(N),
        sampler=sampler,
        symmetry=frozenset({Z2N}),
        marginal_log_mgf=mgf,
        params={
            "N": N,
            "k": model.k,
            "alpha": model.alpha,
            "beta": beta,
            "m_mode": model.m_mode,
            "poisson_truncation_prob": truncation,
        },
    )


def _phi_zero(x):
    return np.zeros_like(x)


def _phi_square(x):
    return x * x


def _phi_relu_neg(x):
    return np.maximum(0.0, -x)


def _phi_step_neg(x):
    return (x < 0).astype(float)


PHI = {"zero": _phi_zero, "square": _phi_square, "relu_neg": _phi_relu_neg, "step_neg": _phi_step_neg}


def resolve_phi(phi) -> Callable[[np.ndarray], np.ndarray]:
    if callable(phi):
        return phi
    try:
        return PHI[phi]
    except KeyError:
        raise LawError(f"unknown phi {phi!r}; known: {sorted(PHI)}") from None


def _check_nonnegative(phi, scale: float) -> None:
    probe = np.concatenate([np.linspace(-10.0, 10.0, 401) * scale, [0.0]])
    vals = np.asarray(phi(probe), dtype=float)
    if np.any(vals < 0) or not np.all(np.isfinite(vals)):
        raise LawError("phi must be finite and non-negative")


def perceptron_law(N: int, alpha: float, phi="relu_neg", beta: float = 1.0, spherical: bool = False) -> HamiltonianLaw:
    """``H(sigma) = -beta * sum_{j <= M} phi(<g_j, sigma>)`` with ``g_j ~ N(0, I_N)``, ``M = round(alpha N)``."""
    phi_name = phi if isinstance(phi, str) else getattr(phi, "__name__", "custom")
    phi = resolve_phi(phi)
    _check_nonnegative(phi, math.sqrt(N))
    beta = float(beta)
    m = int(round(alpha * N))

    def sampler(ss):
        g = rng(ss).standard_normal((m, N))

        def energies(states):
            vals = phi(np.asarray(states, dtype=float) @ g.T)
            if np.any(vals < 0):
                raise LawError("phi returned a negative value")
            return -beta * vals.sum(axis=1)

        return HamiltonianSample(energies)

    # <g, sigma> ~ N(0, N) for every state on the cube or the radius-sqrt(N) sphere
    def clause_mgf(t):
        if m == 0 or t == 0:
            return 0.0
        sd = math.sqrt(N)

        def integrand(z):
            return math.exp(-t * beta * float(phi(np.array([sd * z]))[0]) - 0.5 * z * z)

        # split at 0, where the built-in phi have their kinks
        lo, _ = integrate.quad(integrand, -np.inf, 0.0, limit=200)
        hi, _ = integrate.quad(integrand, 0.0, np.inf, limit=200)
        return math.log((lo + hi) / math.sqrt(2 * math.pi))

    space = sphere(N) if spherical else hypercube(N)
    return HamiltonianLaw(
        name="perceptron",
        space=space,
        sampler=sampler,
        symmetry=frozenset({ON} if spherical else {Z2N}),
        marginal_log_mgf=lambda t: m * clause_mgf(t),
        params={"N": N, "alpha": alpha, "M": m, "phi": phi_name, "beta": beta, "spherical": spherical},
    )
