"""Random Hamiltonian laws and their realizations."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from felab.seeding import SeedLike, as_seed_sequence, child
from felab.core.spaces import (
    FINITE_SET,
    HYPERCUBE,
    PAIRED_SPHERE,
    PRODUCT_OF_SPHERES,
    SPHERE,
    TREE_LEAVES,
    StateSpace,
    finite_set,
)

# symmetry tags
Z2N = "Z2^N"
ON = "O(N)"
PRODUCT_ON = "prod_O(N_i)"
DIAGONAL_ON = "O(N)_diagonal"
TREE_AUT = "tree_automorphisms"
SIGNED_PERMUTATIONS = "signed_permutations"
SYMMETRIC_GROUP = "S_n"

NATURAL_GROUP = {
    HYPERCUBE: Z2N,
    SPHERE: ON,
    PRODUCT_OF_SPHERES: PRODUCT_ON,
    PAIRED_SPHERE: DIAGONAL_ON,
    TREE_LEAVES: TREE_AUT,
    FINITE_SET: SYMMETRIC_GROUP,
}

EnergyFn = Callable[[np.ndarray], np.ndarray]


class LawError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class HamiltonianSample:
    """One realization ``H``.

    ``energies`` maps a batch of states (rows, or integer labels) to energies.
    ``full_table`` lists ``H`` over the enumeration order when it was cheaper
    to build it directly.
    """

    energies: EnergyFn
    full_table: Optional[np.ndarray] = None

    def evaluate(self, state) -> float:
        state = np.asarray(state)
        batch = state[None] if state.ndim >= 1 else state.reshape(1)
        return float(self.energies(batch)[0])

    def table(self, space: StateSpace, chunk: int = 1 << 16) -> np.ndarray:
        if self.full_table is not None:
            return self.full_table
        return np.concatenate([np.asarray(self.energies(s), dtype=float) for s in space.iter_states(chunk)])


@dataclass(frozen=True, eq=False)
class HamiltonianLaw:
    """A seeded sampler of Hamiltonians on ``space``.

    ``sampler`` must be a pure function of its SeedSequence.  ``symmetry`` is the
    set of group names the law is invariant under (empty means no symmetry
    claim).  ``marginal_log_mgf(t) = log E exp(t H(sigma))`` when that does not
    depend on ``sigma``; ``state_log_mgf(states)`` gives ``log E exp(H(sigma))``
    per state for laws whose marginals vary.  ``parts`` records the summands
    of a composite law.
    """

    name: str
    space: StateSpace
    sampler: Callable[[np.random.SeedSequence], HamiltonianSample]
    symmetry: frozenset = frozenset()
    marginal_log_mgf: Optional[Callable[[float], float]] = None
    state_log_mgf: Optional[Callable[[np.ndarray], np.ndarray]] = None
    params: dict = field(default_factory=dict)
    parts: tuple = ()

    def sample(self, seed: SeedLike) -> HamiltonianSample:
        return self.sampler(as_seed_sequence(seed))

    @property
    def invariant(self) -> bool:
        return bool(self.symmetry)

    def with_params(self, **params) -> "HamiltonianLaw":
        return replace(self, params={**self.params, **params})


def deterministic_law(space: StateSpace, energies, name: str = "deterministic", symmetry=frozenset()) -> HamiltonianLaw:
    """A law concentrated on one Hamiltonian.

    ``energies`` is either a table in enumeration order or a batch energy
    function.
    """
    if callable(energies):
        fn = energies
        table = None
    else:
        table = np.asarray(energies, dtype=float)
        if space.size is None or table.shape != (space.size,):
            raise LawError("energy table must match the enumerated space")
        fn = _table_lookup(space, table)
    sample = HamiltonianSample(fn, table)
    return HamiltonianLaw(
        name=name,
        space=space,
        sampler=lambda ss: sample,
        symmetry=frozenset(symmetry),
        state_log_mgf=fn,
    )


def zero_law(space: StateSpace) -> HamiltonianLaw:
    table = np.zeros(space.size) if space.enumerable else None

    def energies(states):
        return np.zeros(len(states))

    sample = HamiltonianSample(energies, table)
    return HamiltonianLaw(
        name="zero",
        space=space,
        sampler=lambda ss: sample,
        symmetry=frozenset({NATURAL_GROUP[space.kind]}),
        marginal_log_mgf=lambda t: 0.0,
    )


def two_point_law(x: float) -> HamiltonianLaw:
    """Deterministic ``H(+1) = 0``, ``H(-1) = x`` on the uniform two-point space.

    Label 0 is the state ``+1`` and label 1 the state ``-1``.
    """
    law = deterministic_law(finite_set(2), [0.0, float(x)], name="two_point")
    return law.with_params(x=float(x))


def sum_laws(law1: HamiltonianLaw, law2: HamiltonianLaw) -> HamiltonianLaw:
    """Law of ``H1 + H2`` with independent ``H1 ~ law1`` and ``H2 ~ law2``.

    A realization at seed ``s`` is ``law1`` at ``child(s, 0)`` plus ``law2`` at
    ``child(s, 1)``.
    """
    if law1.space != law2.space:
        raise LawError(f"cannot sum laws on {law1.space.describe()} and {law2.space.describe()}")

    def sampler(ss):
        h1 = law1.sample(child(ss, 0))
        h2 = law2.sample(child(ss, 1))
        table = None
        if h1.full_table is not None and h2.full_table is not None:
            table = h1.full_table + h2.full_table

        def energies(states):
            return h1.energies(states) + h2.energies(states)

        return HamiltonianSample(energies, table)

    mgf = None
    if law1.marginal_log_mgf is not None and law2.marginal_log_mgf is not None:
        f1, f2 = law1.marginal_log_mgf, law2.marginal_log_mgf
        mgf = lambda t: f1(t) + f2(t)  # noqa: E731
    state_mgf = None
    g1 = law1.state_log_mgf or (_const_state_mgf(law1.marginal_log_mgf))
    g2 = law2.state_log_mgf or (_const_state_mgf(law2.marginal_log_mgf))
    if mgf is None and g1 is not None and g2 is not None:
        state_mgf = lambda s: g1(s) + g2(s)  # noqa: E731

    return HamiltonianLaw(
        name=f"{law1.name}+{law2.name}",
        space=law1.space,
        sampler=sampler,
        symmetry=law1.symmetry & law2.symmetry,
        marginal_log_mgf=mgf,
        state_log_mgf=state_mgf,
        params={"summands": [law1.params, law2.params]},
        parts=(law1, law2),
    )


def scale_law(law: HamiltonianLaw, factor: float) -> HamiltonianLaw:
    """Law of ``factor * H``."""

    def sampler(ss):
        h = law.sample(ss)
        table = None if h.full_table is None else factor * h.full_table
        return HamiltonianSample(lambda s: factor * h.energies(s), table)

    mgf = None
    if law.marginal_log_mgf is not None:
        f = law.marginal_log_mgf
        mgf = lambda t: f(factor * t)  # noqa: E731
    return HamiltonianLaw(
        name=f"{factor:g}*{law.name}",
        space=law.space,
        sampler=sampler,
        symmetry=law.symmetry,
        marginal_log_mgf=mgf,
        params={**law.params, "scale": factor},
    )


def _table_lookup(space: StateSpace, table: np.ndarray) -> EnergyFn:
    if space.is_labelled:
        return lambda states: table[np.asarray(states, dtype=np.int64)]
    if space.kind == HYPERCUBE:
        n = space.params[0]
        weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)

        def lookup(states):
            bits = (1 - np.asarray(states)) // 2
            return table[bits.astype(np.int64) @ weights]

        return lookup
    raise LawError(f"no table lookup for {space.kind}")


def _const_state_mgf(mgf):
    if mgf is None:
        return None
    return lambda states: np.full(len(states), mgf(1.0))
