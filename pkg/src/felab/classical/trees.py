"""Branching random walk and GREM on the leaves of a d-ary tree.

Every root-to-leaf path includes the root, so a depth-``n`` path carries
``n + 1`` increments ``x_{v_0}, ..., x_{v_n}``.
"""

from __future__ import annotations

import numpy as np

from felab.classical.distributions import IncrementLaw
from felab.core.laws import TREE_AUT, HamiltonianLaw, HamiltonianSample, LawError
from felab.core.spaces import tree_leaves
from felab.seeding import rng

MAX_LEAVES = 2**22


def _check_tree(d: int, depth: int) -> None:
    if d < 2 or depth < 1:
        raise LawError("tree needs d >= 2 and depth >= 1")
    if d**depth > MAX_LEAVES:
        raise LawError(f"d^depth = {d**depth} exceeds the {MAX_LEAVES} leaf limit")


def grem_law(d: int, depth: int, per_level_nu, beta: float = 1.0) -> HamiltonianLaw:
    """Leaf energy ``beta * sum_l x_{v_l}`` with level-``l`` increments drawn from ``per_level_nu[l]``.

    ``per_level_nu`` has ``depth + 1`` entries, level 0 being the root.
    """
    _check_tree(d, depth)
    levels = tuple(per_level_nu)
    if len(levels) != depth + 1:
        raise LawError(f"need depth + 1 = {depth + 1} level laws, got {len(levels)}")
    beta = float(beta)
    space = tree_leaves(d, depth)

    def sampler(ss):
        gen = rng(ss)
        table = np.zeros(d**depth)
        for level, nu in enumerate(levels):
            x = nu.sample(gen, d**level)
            table += np.repeat(x, d ** (depth - level))
        table *= beta
        return HamiltonianSample(lambda leaves: table[np.asarray(leaves, dtype=np.int64)], table)

    def mgf(t):
        return sum(nu.log_mgf(t * beta) for nu in levels)

    return HamiltonianLaw(
        name="grem",
        space=space,
        sampler=sampler,
        symmetry=frozenset({TREE_AUT}),
        marginal_log_mgf=mgf,
        params={"d": d, "depth": depth, "beta": beta, "levels": [nu.to_dict() for nu in levels]},
    )


def brw_law(d: int, depth: int, nu: IncrementLaw, beta: float = 1.0) -> HamiltonianLaw:
    """Branching random walk: i.i.d. ``nu`` increments on every vertex, root included."""
    law = grem_law(d, depth, [nu] * (depth + 1), beta)
    params = {"d": d, "depth": depth, "beta": float(beta), "nu": nu.to_dict()}
    return HamiltonianLaw(
        name="brw",
        space=law.space,
        sampler=law.sampler,
        symmetry=law.symmetry,
        marginal_log_mgf=law.marginal_log_mgf,
        params=params,
    )


def random_tree_automorphism(d: int, depth: int, gen: np.random.Generator) -> np.ndarray:
    """Leaf permutation induced by independently permuting the children of every vertex.

    Returns ``g`` with ``g[w]`` the image of leaf ``w``.
    """
    _check_tree(d, depth)
    leaves = np.arange(d**depth, dtype=np.int64)
    image = np.zeros_like(leaves)
    for level in range(depth):
        # children permutation of every vertex at this level, indexed by the original prefix
        perms = np.argsort(gen.random((d**level, d)), axis=1)
        prefix = leaves // d ** (depth - level)
        digit = (leaves // d ** (depth - level - 1)) % d
        image = image * d + perms[prefix, digit]
    return image
