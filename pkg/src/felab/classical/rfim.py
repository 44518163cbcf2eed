"""Random field Ising model and the spiked matrix Hamiltonian.

Both are sums of an invariant random part and a second part; the returned
law keeps the summands in ``parts`` so the pair can be fed to the
subadditivity check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from felab.classical.distributions import IncrementLaw, SpectralLaw
from felab.classical.lattice import lattice_edges
from felab.classical.orthogonal import orthogonally_invariant_matrix, quadratic_energies
from felab.core.laws import (
    ON,
    Z2N,
    HamiltonianLaw,
    HamiltonianSample,
    LawError,
    deterministic_law,
    sum_laws,
    zero_law,
)
from felab.core.spaces import HYPERCUBE, SPHERE, hypercube, sphere
from felab.seeding import rng

MAX_SITES = 22


def random_field_law(n_sites: int, h_law: IncrementLaw, beta: float = 1.0) -> HamiltonianLaw:
    """``beta * sum_v h_v sigma_v`` with i.i.d. sign-symmetric fields."""
    if not h_law.sign_symmetric:
        raise LawError("the field law must be invariant under negation")
    beta = float(beta)

    def sampler(ss):
        h = beta * h_law.sample(rng(ss), n_sites)
        return HamiltonianSample(lambda states: np.asarray(states, dtype=float) @ h)

    return HamiltonianLaw(
        name="random_field",
        space=hypercube(n_sites),
        sampler=sampler,
        symmetry=frozenset({Z2N}),
        marginal_log_mgf=lambda t: n_sites * h_law.log_mgf(t * beta),
        params={"n_sites": n_sites, "h": h_law.to_dict(), "beta": beta},
    )


def ising_law(dims, J0: float, beta: float = 1.0, periodic: bool = True) -> HamiltonianLaw:
    """Deterministic ``beta * J0 * sum_{<vw>} sigma_v sigma_w`` on a lattice."""
    edges = np.array(lattice_edges(dims, periodic), dtype=np.int64).reshape(-1, 2)
    n = int(np.prod(dims))
    scale = float(beta) * float(J0)

    def energies(states):
        states = np.asarray(states, dtype=float)
        if len(edges) == 0:
            return np.zeros(len(states))
        return scale * np.sum(states[:, edges[:, 0]] * states[:, edges[:, 1]], axis=1)

    law = deterministic_law(hypercube(n), energies, name="ising")
    return law.with_params(dims=list(dims), J0=float(J0), beta=float(beta), periodic=periodic)


def rfim_law(dims, h_law: IncrementLaw, J0: float = 1.0, beta: float = 1.0, periodic: bool = True) -> HamiltonianLaw:
    """Random field plus nearest-neighbour ferromagnet; ``parts = (field, ising)``.

    Only the field part is invariant, which is all the subadditivity
    inequality needs.
    """
    n = int(np.prod(dims))
    if n > MAX_SITES:
        raise LawError(f"lattice has {n} sites (limit {MAX_SITES})")
    field = random_field_law(n, h_law, beta)
    coupling = ising_law(dims, J0, beta, periodic)
    total = sum_laws(field, coupling)
    params = {"dims": list(dims), "h": h_law.to_dict(), "J0": float(J0), "beta": float(beta), "periodic": periodic}
    return HamiltonianLaw(
        name="rfim",
        space=total.space,
        sampler=total.sampler,
        symmetry=total.symmetry,
        marginal_log_mgf=total.marginal_log_mgf,
        state_log_mgf=total.state_log_mgf,
        params=params,
        parts=total.parts,
    )


def goe_law(N: int, beta: float = 1.0, space=None) -> HamiltonianLaw:
    """``beta <sigma, W sigma> / sqrt(N)`` with GOE ``W``: off-diagonal N(0,1), diagonal N(0,2)."""
    space = space or hypercube(N)
    beta = float(beta)

    def sampler(ss):
        g = rng(ss).standard_normal((N, N))
        a = (beta / math.sqrt(2.0 * N)) * (g + g.T)
        return HamiltonianSample(lambda states: quadratic_energies(a, states))

    # Var <sigma, W sigma> = 2 |sigma|^4 = 2 N^2 on both the cube and the sphere
    return HamiltonianLaw(
        name="goe",
        space=space,
        sampler=sampler,
        symmetry=frozenset({ON, Z2N}),
        marginal_log_mgf=lambda t: t * t * beta * beta * N,
        params={"N": N, "beta": beta},
    )


def orth_inv_noise_law(N: int, nu: SpectralLaw, beta: float = 1.0, space=None) -> HamiltonianLaw:
    space = space or hypercube(N)
    beta = float(beta)

    def sampler(ss):
        a = beta * orthogonally_invariant_matrix(rng(ss), N, nu)
        return HamiltonianSample(lambda states: quadratic_energies(a, states))

    return HamiltonianLaw(
        name="orth_inv_noise",
        space=space,
        sampler=sampler,
        symmetry=frozenset({ON, Z2N}),
        params={"N": N, "beta": beta, "nu": nu.to_dict()},
    )


UNIFORM_CUBE = "uniform_cube"
UNIFORM_SPHERE = "uniform_sphere"


def spike_law(N: int, spike: str, coefficient: float, space) -> HamiltonianLaw:
    """``coefficient * <sigma, v>^2`` with ``v`` uniform on the cube or the radius-sqrt(N) sphere."""
    c = float(coefficient)

    def sampler(ss):
        gen = rng(ss)
        if spike == UNIFORM_CUBE:
            v = 1.0 - 2.0 * gen.integers(0, 2, N)
        else:
            g = gen.standard_normal(N)
            v = g * (math.sqrt(N) / np.linalg.norm(g))
        return HamiltonianSample(lambda states: c * (np.asarray(states, dtype=float) @ v) ** 2)

    if spike == UNIFORM_CUBE and space.kind == HYPERCUBE:
        # <sigma, v> = N - 2K with K ~ Binomial(N, 1/2)
        k = np.arange(N + 1)
        logw = special.gammaln(N + 1) - special.gammaln(k + 1) - special.gammaln(N - k + 1) - N * math.log(2.0)
        s2 = (N - 2.0 * k) ** 2

        def mgf(t):
            x = logw + t * c * s2
            m = float(x.max())
            return m + math.log(float(np.sum(np.exp(x - m))))

        symmetry = frozenset({Z2N})
    else:
        # <sigma, v>^2 = N^2 u with u ~ Beta(1/2, (N-1)/2)
        def mgf(t):
            return math.log(special.hyp1f1(0.5, 0.5 * N, t * c * N * N))

        symmetry = frozenset({ON, Z2N}) if spike == UNIFORM_SPHERE else frozenset({Z2N})
    return HamiltonianLaw(
        name="spike",
        space=space,
        sampler=sampler,
        symmetry=symmetry,
        marginal_log_mgf=mgf,
        params={"N": N, "spike": spike, "coefficient": c},
    )


def spiked_matrix_law(
    N: int,
    noise="gaussian_goe",
    spike: str = UNIFORM_CUBE,
    beta: float = 1.0,
    snr: float = 1.0,
    space: str = HYPERCUBE,
) -> HamiltonianLaw:
    """``beta * (<sigma, A sigma> + snr * <sigma, v>^2)``; ``parts = (noise, spike)``.

    ``noise`` is ``"gaussian_goe"``, ``"none"``, or a :class:`SpectralLaw` for
    an orthogonally invariant ``A``.  The spike is the unnormalised
    ``<sigma, v>^2`` with ``|v|^2 = N``.
    """
    if spike not in (UNIFORM_CUBE, UNIFORM_SPHERE):
        raise LawError(f"unknown spike {spike!r}")
    sp = hypercube(N) if space == HYPERCUBE else sphere(N) if space == SPHERE else None
    if sp is None:
        raise LawError(f"unknown space {space!r}")
    beta = float(beta)
    if isinstance(noise, SpectralLaw):
        noise_law = orth_inv_noise_law(N, noise, beta, sp)
        noise_desc = noise.to_dict()
    elif noise == "gaussian_goe":
        noise_law = goe_law(N, beta, sp)
        noise_desc = noise
    elif noise in (None, "none"):
        noise_law = zero_law(sp)
        noise_desc = "none"
    else:
        raise LawError(f"unknown noise {noise!r}")
    spike_part = spike_law(N, spike, beta * float(snr), sp)
    total = sum_laws(noise_law, spike_part)
    return HamiltonianLaw(
        name="spiked_matrix",
        space=sp,
        sampler=total.sampler,
        symmetry=total.symmetry,
        marginal_log_mgf=total.marginal_log_mgf,
        params={"N": N, "noise": noise_desc, "spike": spike, "beta": beta, "snr": float(snr), "space": sp.kind},
        parts=total.parts,
    )
