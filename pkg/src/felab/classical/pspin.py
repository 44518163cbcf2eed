"""Gaussian p-spin Hamiltonians.

``H(sigma) = beta * sum_p N^{-(p-1)/2} sum_{i_1..i_p} J_{i_1..i_p} sigma_{i_1}...sigma_{i_p}``
with independent centred Gaussian couplings over all ordered index tuples.
Couplings are drawn in increasing ``p``, each tensor in C order, which the
quantum SK constructor relies on to reproduce the classical 2-spin draw.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from felab.classical.lattice import lattice_edges
from felab.classical.xi import MixtureXi
from felab.core.laws import DIAGONAL_ON, ON, PRODUCT_ON, Z2N, HamiltonianLaw, HamiltonianSample, LawError
from felab.core.spaces import HYPERCUBE, SPHERE, StateSpace, hypercube, paired_sphere, product_of_spheres, sphere
from felab.seeding import rng

MAX_TENSOR_ENTRIES = 2**25
_BATCH_ENTRIES = 2**22


def _space_for(N: int, space) -> StateSpace:
    if space is None or space == HYPERCUBE:
        return hypercube(N)
    if space == SPHERE:
        return sphere(N)
    if isinstance(space, StateSpace):
        if space.dim != N or space.kind not in (HYPERCUBE, SPHERE):
            raise LawError(f"p-spin needs a hypercube or sphere of dimension {N}")
        return space
    raise LawError(f"unsupported space {space!r}")


def _guard(N: int, powers) -> None:
    total = sum(N**p for p in powers)
    if total > MAX_TENSOR_ENTRIES:
        raise LawError(f"coupling tensors need {total} entries (limit {MAX_TENSOR_ENTRIES})")


def contract(tensor: np.ndarray, states: np.ndarray) -> np.ndarray:
    """``sum T[i_1..i_p] s_{i_1}...s_{i_p}`` for every row ``s`` of ``states``."""
    states = np.asarray(states, dtype=float)
    B, N = states.shape
    p = tensor.ndim
    if p == 1:
        return states @ tensor
    out = np.empty(B)
    step = max(1, _BATCH_ENTRIES // N ** (p - 1))
    flat = tensor.reshape(-1, N)
    for start in range(0, B, step):
        s = states[start : start + step]
        x = s @ flat.T
        for _ in range(p - 1):
            x = np.einsum("bkn,bn->bk", x.reshape(len(s), -1, N), s)
        out[start : start + step] = x.reshape(len(s))
    return out


def _sparse_energies(terms, states: np.ndarray) -> np.ndarray:
    states = np.asarray(states, dtype=float)
    out = np.zeros(len(states))
    for idx, coupling in terms:
        step = max(1, _BATCH_ENTRIES // max(1, idx.size))
        for start in range(0, len(states), step):
            s = states[start : start + step]
            out[start : start + step] += np.prod(s[:, idx], axis=2) @ coupling
    return out


def _dense_sampler(N: int, stds, beta: float):
    """``stds``: list of ``(p, std)``; ``std`` a scalar or an array of shape ``(N,)*p``."""

    def sampler(ss):
        gen = rng(ss)
        tensors = []
        for p, std in stds:
            scale = beta * N ** (-(p - 1) / 2)
            tensors.append(scale * (std * gen.standard_normal((N,) * p)))

        def energies(states):
            states = np.asarray(states, dtype=float)
            out = np.zeros(len(states))
            for t in tensors:
                out += contract(t, states)
            return out

        return HamiltonianSample(energies)

    return sampler


def mixed_pspin_law(N: int, xi: MixtureXi, beta: float = 1.0, space=None) -> HamiltonianLaw:
    """Mixed p-spin law with ``Var J = c_p``; covariance ``N xi(<s1, s2>/N)``.

    ``space`` is the hypercube (default) or ``"sphere"``.
    """
    space = _space_for(N, space)
    terms = xi.terms()
    _guard(N, [p for p, _ in terms])
    beta = float(beta)
    xi1 = float(xi(1.0))
    stds = [(p, math.sqrt(c)) for p, c in terms]
    return HamiltonianLaw(
        name="mixed_pspin",
        space=space,
        sampler=_dense_sampler(N, stds, beta),
        symmetry=frozenset({Z2N} if space.kind == HYPERCUBE else {ON}),
        marginal_log_mgf=lambda t: 0.5 * t * t * beta * beta * N * xi1,
        params={"N": N, "xi": list(xi.coefficients), "beta": beta, "space": space.kind},
    )


def _index_key(key) -> tuple:
    """``(0, 1)`` or the config spelling ``"0,1"`` -> ``(0, 1)``."""
    if isinstance(key, str):
        return tuple(int(i) for i in key.split(","))
    if isinstance(key, (int, np.integer)):
        return (int(key),)
    return tuple(int(i) for i in key)


def _normalize_variances(N: int, variances) -> tuple[list, list]:
    """Split ``{p: dense array | {tuple: var}}`` into dense and sparse term lists."""
    dense, sparse = [], []
    for p in sorted(int(k) for k in variances):
        v = variances[p] if p in variances else variances[str(p)]
        if isinstance(v, dict):
            items = sorted((_index_key(k), float(c)) for k, c in v.items())
            keys = [k for k, _ in items]
            if any(len(k) != p for k in keys):
                raise LawError(f"p={p} pattern keys must have {p} indices")
            vals = np.array([c for _, c in items])
            if np.any(vals < 0):
                raise LawError("variances must be non-negative")
            idx = np.array(keys, dtype=np.int64).reshape(len(keys), p)
            if idx.size and (idx.min() < 0 or idx.max() >= N):
                raise LawError("index out of range in variance pattern")
            sparse.append((p, idx, vals))
        else:
            arr = np.asarray(v, dtype=float)
            if arr.shape != (N,) * p:
                raise LawError(f"dense variance tensor for p={p} must have shape {(N,) * p}")
            if np.any(arr < 0):
                raise LawError("variances must be non-negative")
            dense.append((p, arr))
    return dense, sparse


def general_variance_pspin_law(N: int, variances: dict, beta: float = 1.0, space=None) -> HamiltonianLaw:
    """p-spin law with per-tuple variances ``c_{i_1..i_p}``.

    ``variances[p]`` is either a dense array of shape ``(N,)*p`` or a sparse
    ``{(i_1, ..., i_p): c}`` map.  Couplings are drawn per ``p`` in
    increasing order, dense in C order, sparse in sorted-key order.
    """
    space = _space_for(N, space)
    beta = float(beta)
    dense, sparse = _normalize_variances(N, variances)
    _guard(N, [p for p, _ in dense])

    def sampler(ss):
        gen = rng(ss)
        dense_t, sparse_t = [], []
        for p, arr in dense:
            scale = beta * N ** (-(p - 1) / 2)
            dense_t.append(scale * np.sqrt(arr) * gen.standard_normal((N,) * p))
        for p, idx, vals in sparse:
            scale = beta * N ** (-(p - 1) / 2)
            sparse_t.append((idx, scale * np.sqrt(vals) * gen.standard_normal(len(vals))))

        def energies(states):
            states = np.asarray(states, dtype=float)
            out = _sparse_energies(sparse_t, states)
            for t in dense_t:
                out += contract(t, states)
            return out

        return HamiltonianSample(energies)

    def variance(states):
        states = np.asarray(states, dtype=float)
        sq = states * states
        out = np.zeros(len(states))
        for p, arr in dense:
            out += N ** (-(p - 1)) * contract(arr, sq)
        for p, idx, vals in sparse:
            out += N ** (-(p - 1)) * (np.prod(sq[:, idx], axis=2) @ vals)
        return out

    mgf = None
    state_mgf = lambda states: 0.5 * beta * beta * variance(states)  # noqa: E731
    if space.kind == HYPERCUBE:
        v = float(variance(np.ones((1, N)))[0])
        mgf = lambda t: 0.5 * t * t * beta * beta * v  # noqa: E731
        state_mgf = None
    return HamiltonianLaw(
        name="general_pspin",
        space=space,
        sampler=sampler,
        symmetry=frozenset({Z2N}) if space.kind == HYPERCUBE else frozenset(),
        marginal_log_mgf=mgf,
        state_log_mgf=state_mgf,
        params={"N": N, "beta": beta, "space": space.kind},
    )


def ea_pattern(dims, periodic: bool = True, weight: float = 1.0) -> dict:
    """Edwards-Anderson variance pattern: ``c_{vw} = weight`` on each lattice edge ``v < w``."""
    return {2: {edge: float(weight) for edge in lattice_edges(dims, periodic)}}


def _check_species_pattern(r: int, pattern: dict) -> list:
    out = []
    for p in sorted(int(k) for k in pattern):
        arr = np.asarray(pattern[p] if p in pattern else pattern[str(p)], dtype=float)
        if arr.shape != (r,) * p:
            raise LawError(f"species pattern for p={p} must have shape {(r,) * p}")
        if np.any(arr < 0):
            raise LawError("species variances must be non-negative")
        for perm in itertools.permutations(range(p)):
            if not np.allclose(arr, arr.transpose(perm), rtol=1e-12, atol=0.0):
                raise LawError(f"species pattern for p={p} is not symmetric under index permutations")
        out.append((p, arr))
    return out


def multispecies_law(block_sizes, pattern: dict, beta: float = 1.0) -> HamiltonianLaw:
    """Spherical p-spin on a product of spheres with species-dependent variances.

    ``pattern[p]`` is an array of shape ``(r,)*p`` giving ``c_{s_1..s_p}``; the
    variance of ``J_{i_1..i_p}`` is the entry at the species of ``i_1..i_p``.
    """
    space = product_of_spheres(block_sizes)
    sizes = space.params
    r = len(sizes)
    N = sum(sizes)
    species = np.repeat(np.arange(r), sizes)
    checked = _check_species_pattern(r, pattern)
    _guard(N, [p for p, _ in checked])
    beta = float(beta)
    stds, total = [], 0.0
    for p, arr in checked:
        full = arr[np.ix_(*([species] * p))]
        if np.any(full):
            stds.append((p, np.sqrt(full)))
        total += N ** (-(p - 1)) * float(full.sum())
    return HamiltonianLaw(
        name="multispecies",
        space=space,
        sampler=_dense_sampler(N, stds, beta),
        symmetry=frozenset({PRODUCT_ON}),
        marginal_log_mgf=lambda t: 0.5 * t * t * beta * beta * total,
        params={"block_sizes": list(sizes), "beta": beta, "pattern": {p: a.tolist() for p, a in checked}},
    )


def two_replica_law(N: int, xi: MixtureXi, R: float, beta: float = 1.0) -> HamiltonianLaw:
    """``H(s1) + H(s2)`` for one spherical mixed p-spin realization on pairs with overlap ``R``."""
    space = paired_sphere(N, R)
    base = mixed_pspin_law(N, xi, beta, space=SPHERE)
    beta = float(beta)
    both = float(xi(1.0)) + float(xi(float(R)))

    def sampler(ss):
        h = base.sample(ss)

        def energies(states):
            states = np.asarray(states, dtype=float)
            return h.energies(states[:, :N]) + h.energies(states[:, N:])

        return HamiltonianSample(energies)

    return HamiltonianLaw(
        name="two_replica",
        space=space,
        sampler=sampler,
        symmetry=frozenset({DIAGONAL_ON}),
        marginal_log_mgf=lambda t: t * t * beta * beta * N * both,
        params={"N": N, "xi": list(xi.coefficients), "R": float(R), "beta": beta},
    )
