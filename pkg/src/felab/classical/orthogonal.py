"""Haar orthogonal matrices and orthogonally invariant quadratic Hamiltonians."""

from __future__ import annotations

import numpy as np

from felab.classical.distributions import SpectralLaw, empirical
from felab.core.laws import ON, Z2N, HamiltonianLaw, HamiltonianSample
from felab.core.spaces import hypercube
from felab.seeding import SeedLike, rng

MIN_SPECTRAL_DIM = 256


def haar_orthogonal(N: int, seed) -> np.ndarray:
    """Haar-distributed ``N x N`` orthogonal matrix.

    QR of a standard Gaussian matrix, with columns rescaled so that ``R`` has a
    positive diagonal.  ``seed`` is a seed or a ``numpy.random.Generator``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    gen = seed if isinstance(seed, np.random.Generator) else rng(seed)
    q, r = np.linalg.qr(gen.standard_normal((N, N)))
    d = np.sign(np.diag(r))
    d[d == 0] = 1.0
    return q * d


def orthogonally_invariant_matrix(gen: np.random.Generator, N: int, nu: SpectralLaw) -> np.ndarray:
    """``O diag(lambda) O^T`` with ``lambda`` i.i.d. ``nu`` (drawn first) and Haar ``O``."""
    lam = nu.sample(gen, N)
    o = haar_orthogonal(N, gen)
    a = (o * lam) @ o.T
    return 0.5 * (a + a.T)


def quadratic_energies(a: np.ndarray, states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    return np.einsum("bi,bi->b", states @ a, states)


def orth_inv_sk_law(N: int, nu: SpectralLaw, beta: float = 1.0) -> HamiltonianLaw:
    """``H(sigma) = beta <sigma, O Lambda O^T sigma>`` on the hypercube."""
    beta = float(beta)

    def sampler(ss):
        a = beta * orthogonally_invariant_matrix(rng(ss), N, nu)
        return HamiltonianSample(lambda states: quadratic_energies(a, states))

    return HamiltonianLaw(
        name="orth_inv_sk",
        space=hypercube(N),
        sampler=sampler,
        symmetry=frozenset({Z2N, ON}),
        params={"N": N, "beta": beta, "nu": nu.to_dict()},
    )


def empirical_free_convolution(nu1: SpectralLaw, nu2: SpectralLaw, N_spec: int, seed: SeedLike) -> SpectralLaw:
    """Empirical proxy for ``nu1 boxplus nu2``: the spectrum of a sum of two
    independent orthogonally invariant ``N_spec x N_spec`` matrices."""
    if N_spec < MIN_SPECTRAL_DIM:
        raise ValueError(f"N_spec must be >= {MIN_SPECTRAL_DIM}")
    gen = rng(seed)
    a1 = orthogonally_invariant_matrix(gen, N_spec, nu1)
    a2 = orthogonally_invariant_matrix(gen, N_spec, nu2)
    return empirical(np.linalg.eigvalsh(a1 + a2))
