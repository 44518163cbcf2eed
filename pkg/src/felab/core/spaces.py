"""State spaces and their invariant reference measures.

Hypercube enumeration order: state ``k`` (``0 <= k < 2**N``) has
``sigma_i = 1 - 2 * bit(k, N - 1 - i)``, i.e. ``sigma_0`` is the most
significant bit and state 0 is all ``+1``.  This matches the Kronecker
ordering of :func:`felab.quantum.operators.site_operator`, so the diagonal of a
``sigma^z``-only operator lists classical energies in the same order.

Tree leaves and finite sets are represented by integer labels ``0..size-1``;
a leaf label written in base ``d`` (most significant digit first) is the
root-to-leaf path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

PROBABILITY = "probability"
COUNTING = "counting"
CONVENTIONS = (PROBABILITY, COUNTING)

MAX_ENUMERABLE = 2**24

HYPERCUBE = "hypercube"
SPHERE = "sphere"
PRODUCT_OF_SPHERES = "product_of_spheres"
TREE_LEAVES = "tree_leaves"
PAIRED_SPHERE = "paired_sphere"
FINITE_SET = "finite_set"


class SpaceError(ValueError):
    pass


@dataclass(frozen=True)
class StateSpace:
    """A compact state space with a transitive symmetry group.

    ``params`` holds the integer shape parameters of ``kind``; ``overlap`` is
    only used by ``paired_sphere``.
    """

    kind: str
    params: tuple[int, ...]
    overlap: float = 0.0

    @property
    def size(self) -> int | None:
        """Number of states for finite spaces, ``None`` for continuous ones."""
        if self.kind == HYPERCUBE:
            return 2 ** self.params[0]
        if self.kind == TREE_LEAVES:
            d, depth = self.params
            return d**depth
        if self.kind == FINITE_SET:
            return self.params[0]
        return None

    @property
    def enumerable(self) -> bool:
        size = self.size
        return size is not None and size <= MAX_ENUMERABLE

    @property
    def dim(self) -> int:
        """Length of the vector representing one state (1 for labels)."""
        if self.kind in (HYPERCUBE, SPHERE):
            return self.params[0]
        if self.kind == PRODUCT_OF_SPHERES:
            return sum(self.params)
        if self.kind == PAIRED_SPHERE:
            return 2 * self.params[0]
        return 1

    @property
    def is_labelled(self) -> bool:
        return self.kind in (TREE_LEAVES, FINITE_SET)

    def log_size(self) -> float:
        size = self.size
        if size is None:
            raise SpaceError(f"{self.kind} has no counting measure")
        return math.log(size)

    def iter_states(self, chunk: int = 1 << 16) -> Iterator[np.ndarray]:
        """Yield all states in enumeration order, ``chunk`` at a time."""
        if not self.enumerable:
            raise SpaceError(f"{self.describe()} is not enumerable")
        size = self.size
        for start in range(0, size, chunk):
            idx = np.arange(start, min(size, start + chunk), dtype=np.int64)
            yield self.states_from_index(idx)

    def states_from_index(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        if self.kind == HYPERCUBE:
            n = self.params[0]
            shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
            bits = (idx[:, None] >> shifts) & 1
            return 1.0 - 2.0 * bits
        if self.is_labelled:
            return idx
        raise SpaceError(f"{self.kind} has no index map")

    def all_states(self) -> np.ndarray:
        return np.concatenate(list(self.iter_states()))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Draw ``n`` i.i.d. states from the invariant probability measure."""
        if self.kind == HYPERCUBE:
            return 1.0 - 2.0 * rng.integers(0, 2, size=(n, self.params[0]))
        if self.is_labelled:
            return rng.integers(0, self.size, size=n)
        if self.kind == SPHERE:
            return _uniform_sphere(rng, n, self.params[0])
        if self.kind == PRODUCT_OF_SPHERES:
            return np.concatenate([_uniform_sphere(rng, n, k) for k in self.params], axis=1)
        if self.kind == PAIRED_SPHERE:
            return sample_overlap_pairs(rng, n, self.params[0], self.overlap)
        raise SpaceError(f"unknown space kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == PAIRED_SPHERE:
            return f"{self.kind}(N={self.params[0]}, R={self.overlap})"
        return f"{self.kind}{self.params}"


def hypercube(n: int) -> StateSpace:
    if n < 1:
        raise SpaceError("hypercube needs N >= 1")
    return StateSpace(HYPERCUBE, (int(n),))


def sphere(n: int) -> StateSpace:
    if n < 1:
        raise SpaceError("sphere needs N >= 1")
    return StateSpace(SPHERE, (int(n),))


def product_of_spheres(sizes) -> StateSpace:
    sizes = tuple(int(s) for s in sizes)
    if not sizes or min(sizes) < 1:
        raise SpaceError("product_of_spheres needs positive block sizes")
    return StateSpace(PRODUCT_OF_SPHERES, sizes)


def tree_leaves(d: int, depth: int) -> StateSpace:
    if d < 2 or depth < 1:
        raise SpaceError("tree needs d >= 2 and depth >= 1")
    return StateSpace(TREE_LEAVES, (int(d), int(depth)))


def paired_sphere(n: int, overlap: float) -> StateSpace:
    if abs(overlap) > 1:
        raise SpaceError(f"overlap must lie in [-1, 1], got {overlap}")
    if n < 2 and abs(overlap) < 1:
        raise SpaceError("|R| < 1 needs N >= 2")
    return StateSpace(PAIRED_SPHERE, (int(n),), float(overlap))


def finite_set(size: int) -> StateSpace:
    if size < 1:
        raise SpaceError("finite_set needs size >= 1")
    return StateSpace(FINITE_SET, (int(size),))


def check_convention(convention: str) -> str:
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    return convention


def _uniform_sphere(rng: np.random.Generator, n: int, dim: int) -> np.ndarray:
    g = rng.standard_normal((n, dim))
    return g * (math.sqrt(dim) / np.linalg.norm(g, axis=1, keepdims=True))


def sample_overlap_pairs(rng: np.random.Generator, n: int, dim: int, overlap: float) -> np.ndarray:
    """Pairs ``(s1, s2)`` on the sphere of radius sqrt(dim) with <s1, s2> = overlap*dim.

    ``s1`` is uniform; ``s2 = R s1 + sqrt(1 - R^2) tau`` where ``tau`` is uniform
    on the radius-sqrt(dim) sphere of the complement of ``s1`` (one
    Gram-Schmidt step on a fresh Gaussian).  Rows are ``concat(s1, s2)``.
    """
    s1 = _uniform_sphere(rng, n, dim)
    if abs(overlap) == 1.0:
        return np.concatenate([s1, overlap * s1], axis=1)
    g = rng.standard_normal((n, dim))
    g -= s1 * (np.sum(g * s1, axis=1, keepdims=True) / dim)
    tau = g * (math.sqrt(dim) / np.linalg.norm(g, axis=1, keepdims=True))
    s2 = overlap * s1 + math.sqrt(1.0 - overlap * overlap) * tau
    return np.concatenate([s1, s2], axis=1)
