"""Random Hermitian operator laws: quantum SK, SYK and Clifford tensor mixtures."""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from felab.classical.pspin import contract
from felab.core.spaces import hypercube
from felab.quantum.clifford import (
    JORDAN_WIGNER,
    clifford_generators,
    clifford_monomial,
    even_subsets,
)
from felab.quantum.operators import MAX_SITES, OperatorError, kron_all
from felab.seeding import SeedLike, as_seed_sequence, child, rng

MAX_DIM = 4096
QSK_LOCAL = "qsk_local"
SYK_MONOMIALS = "syk_monomials"


@dataclass(frozen=True, eq=False)
class OperatorLaw:
    """A seeded sampler of Hermitian matrices of size ``dim``."""

    name: str
    dim: int
    sampler: Callable[[np.random.SeedSequence], np.ndarray]
    symmetry: frozenset = frozenset()
    params: dict = field(default_factory=dict)

    def sample(self, seed: SeedLike) -> np.ndarray:
        return self.sampler(as_seed_sequence(seed))

    @property
    def invariant(self) -> bool:
        return bool(self.symmetry)


def sum_operator_laws(a: OperatorLaw, b: OperatorLaw) -> OperatorLaw:
    """Independent sum; summand ``k`` is drawn at ``child(seed, k)`` as for classical laws."""
    if a.dim != b.dim:
        raise OperatorError(f"dimension mismatch {a.dim} vs {b.dim}")
    return OperatorLaw(
        name=f"{a.name}+{b.name}",
        dim=a.dim,
        sampler=lambda ss: a.sample(child(ss, 0)) + b.sample(child(ss, 1)),
        symmetry=a.symmetry & b.symmetry,
        params={"summands": [a.params, b.params]},
    )


def zero_operator_law(dim: int) -> OperatorLaw:
    zero = np.zeros((dim, dim), dtype=complex)
    zero.setflags(write=False)
    return OperatorLaw("zero", dim, lambda ss: zero, frozenset({"unitary"}), {"dim": dim})


def constant_operator_law(m: np.ndarray, name: str = "constant") -> OperatorLaw:
    m = np.array(m, dtype=complex)
    m.setflags(write=False)
    return OperatorLaw(name, m.shape[0], lambda ss: m, frozenset(), {})


# ---------------------------------------------------------------- quantum SK


def qsk_from_couplings(J: np.ndarray, Ji: np.ndarray, beta: float, h: float) -> np.ndarray:
    """``beta/sqrt(m) sum_{i,j} J_ij Z_i Z_j + h sum_i J_i X_i`` including ``i = j`` terms."""
    m = len(Ji)
    dim = 1 << m
    states = hypercube(m).all_states()
    diag = (beta / math.sqrt(m)) * contract(np.asarray(J, dtype=float), states)
    out = np.diag(diag.astype(complex))
    idx = np.arange(dim)
    for i in range(1, m + 1):
        flip = idx ^ (1 << (m - i))
        out[flip, idx] += h * Ji[i - 1]
    return out


def qsk_law(m: int, beta: float = 1.0, h: float = 1.0) -> OperatorLaw:
    """Quantum SK on ``m`` qubits.

    Per realization ``J`` (``m x m``, C order) is drawn before ``J_i``, the
    same stream position as the classical 2-spin couplings, so ``h = 0``
    reproduces the classical SK realization at the same seed.
    """
    if not 1 <= m <= MAX_SITES:
        raise OperatorError(f"qsk needs 1 <= m <= {MAX_SITES}")
    beta, h = float(beta), float(h)

    def sampler(ss):
        gen = rng(ss)
        J = gen.standard_normal((m, m))
        Ji = gen.standard_normal(m)
        return qsk_from_couplings(J, Ji, beta, h)

    return OperatorLaw("qsk", 1 << m, sampler, frozenset({QSK_LOCAL}), {"m": m, "beta": beta, "h": h})


def qsk_hamiltonian(m: int, beta: float, h: float, seed: SeedLike) -> np.ndarray:
    return qsk_law(m, beta, h).sample(seed)


# ---------------------------------------------------------------- SYK


def phase(q: int) -> complex:
    """``i^{q/2}`` for even ``q``."""
    return (1j) ** (q // 2)


@functools.lru_cache(maxsize=64)
def _monomial_stack(n: int, q: int, kind: str) -> np.ndarray:
    """``i^{q/2} chi_S`` for every ``q``-subset in lexicographic order, shape ``(K, d, d)``."""
    rep = clifford_generators(n, kind)
    subsets = list(even_subsets(n, q))
    stack = np.empty((len(subsets), rep.dim, rep.dim), dtype=complex)
    for k, S in enumerate(subsets):
        stack[k] = phase(q) * clifford_monomial(rep, S)
    stack.setflags(write=False)
    return stack


def _degrees(q) -> tuple:
    qs = (int(q),) if np.isscalar(q) else tuple(int(x) for x in q)
    if not qs or any(x <= 0 or x % 2 for x in qs):
        raise OperatorError(f"SYK degrees must be positive even integers, got {qs}")
    return tuple(sorted(set(qs)))


def _variances(n: int, q: int, variance_map) -> np.ndarray:
    """Per-subset variances for degree ``q``: constant ``c_q`` or a ``{subset: c}`` map."""
    count = math.comb(n, q)
    if variance_map is None:
        return np.ones(count)
    c = variance_map.get(q, variance_map.get(str(q), 0.0))
    if isinstance(c, dict):
        lookup = {tuple(int(i) for i in (k.split(",") if isinstance(k, str) else k)): float(v) for k, v in c.items()}
        out = np.array([lookup.get(S, 0.0) for S in even_subsets(n, q)])
    else:
        out = np.full(count, float(c))
    if np.any(out < 0):
        raise OperatorError("variances must be non-negative")
    return out


def syk_couplings(gen: np.random.Generator, n: int, qs: tuple, variance_map) -> dict:
    """Couplings per degree (ascending), one per subset in lexicographic order."""
    return {q: np.sqrt(_variances(n, q, variance_map)) * gen.standard_normal(math.comb(n, q)) for q in qs}


def syk_from_couplings(n: int, couplings: dict, kind: str = JORDAN_WIGNER, beta: float = 1.0) -> np.ndarray:
    """``beta * sum_q i^{q/2} sum_S J_S chi_S`` in the chosen representation."""
    rep = clifford_generators(n, kind)
    out = np.zeros((rep.dim, rep.dim), dtype=complex)
    for q, J in couplings.items():
        if q > n:
            continue
        out += np.tensordot(beta * np.asarray(J, dtype=complex), _monomial_stack(n, q, kind), axes=1)
    return out


def syk_law(n: int, q=4, variance_map: Optional[dict] = None, rep_kind: str = JORDAN_WIGNER, beta: float = 1.0) -> OperatorLaw:
    """SYK law with Gaussian couplings on even monomials of degrees ``q`` (an int or a list)."""
    qs = _degrees(q)
    if max(qs) > n:
        raise OperatorError(f"degree {max(qs)} exceeds n = {n}")
    rep = clifford_generators(n, rep_kind)
    if rep.dim > MAX_DIM:
        raise OperatorError(f"dimension {rep.dim} exceeds {MAX_DIM}")
    beta = float(beta)

    def sampler(ss):
        return syk_from_couplings(n, syk_couplings(rng(ss), n, qs, variance_map), rep_kind, beta)

    params = {"n": n, "q": list(qs), "rep": rep_kind, "beta": beta}
    return OperatorLaw("syk", rep.dim, sampler, frozenset({SYK_MONOMIALS}), params)


def syk_hamiltonian(n: int, q, variance_map=None, seed: SeedLike = 0, rep_kind: str = JORDAN_WIGNER, beta: float = 1.0) -> np.ndarray:
    return syk_law(n, q, variance_map, rep_kind, beta).sample(seed)


# ---------------------------------------------------------------- tensor products of Clifford algebras


def _block_terms(n: int, cap: int):
    """``(q, S)`` for every even ``2 <= q <= min(cap, n)`` and ``q``-subset ``S``."""
    return [(q, S) for q in range(2, min(cap, n) + 1, 2) for S in even_subsets(n, q)]


def mixed_clifford_tensor_hamiltonian_law(block_sizes, degree_caps, variance_map=None, beta: float = 1.0) -> OperatorLaw:
    """Gaussian combination of ``i^{sum q_j / 2} chi_{S_1} x ... x chi_{S_m}`` over per-block even monomials.

    Each block ``j`` has ``n_j`` generators in the Jordan-Wigner
    representation and contributes a monomial of even degree
    ``2 <= q_j <= Q_j``.  ``variance_map`` maps a degree tuple
    ``(q_1, ..., q_m)`` to the variance of every coupling of that type
    (default 1).  Couplings are drawn in ``itertools.product`` order over
    the per-block term lists.
    """
    sizes = tuple(int(n) for n in block_sizes)
    caps = tuple(int(c) for c in degree_caps)
    if len(sizes) != len(caps) or not sizes:
        raise OperatorError("need one degree cap per block")
    reps = [clifford_generators(n, JORDAN_WIGNER) for n in sizes]
    dim = int(np.prod([r.dim for r in reps]))
    if dim > MAX_DIM:
        raise OperatorError(f"dimension {dim} exceeds {MAX_DIM}")
    per_block = [_block_terms(n, c) for n, c in zip(sizes, caps)]
    if any(not t for t in per_block):
        raise OperatorError("every block needs at least one even monomial (n_j >= 2, Q_j >= 2)")
    terms = list(itertools.product(*per_block))
    std = np.empty(len(terms))
    mats = np.empty((len(terms), dim, dim), dtype=complex)
    for k, combo in enumerate(terms):
        degrees = tuple(q for q, _ in combo)
        var = 1.0 if variance_map is None else float(variance_map.get(degrees, variance_map.get(str(degrees), 0.0)))
        if var < 0:
            raise OperatorError("variances must be non-negative")
        std[k] = math.sqrt(var)
        factors = [clifford_monomial(rep, S) for rep, (_, S) in zip(reps, combo)]
        mats[k] = phase(sum(degrees)) * kron_all(factors)
    beta = float(beta)

    def sampler(ss):
        J = std * rng(ss).standard_normal(len(terms))
        return np.tensordot(beta * J.astype(complex), mats, axes=1)

    params = {"block_sizes": list(sizes), "degree_caps": list(caps), "beta": beta}
    return OperatorLaw("mixed_clifford", dim, sampler, frozenset({"clifford_tensor_monomials"}), params)


def mixed_clifford_tensor_hamiltonian(block_sizes, degree_caps, variance_map=None, seed: SeedLike = 0, beta: float = 1.0) -> np.ndarray:
    return mixed_clifford_tensor_hamiltonian_law(block_sizes, degree_caps, variance_map, beta).sample(seed)

