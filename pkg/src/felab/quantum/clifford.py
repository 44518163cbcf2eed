"""Clifford algebra generators, monomials and their sign algebra.

Generators are numbered ``1..n``.  A monomial ``chi_S`` is the product of the
generators in ``S`` in ascending order; ``S`` is also encoded as a bitmask
with bit ``i - 1`` for generator ``i``.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass

import numpy as np

from felab.quantum.operators import OperatorError, kron_all, pauli_matrices

JORDAN_WIGNER = "jordan_wigner"
LEFT_REGULAR = "left_regular"
MAX_JW = 20
MAX_LEFT_REGULAR = 10


@dataclass(frozen=True, eq=False)
class CliffordRep:
    n: int
    kind: str
    generators: tuple

    @property
    def dim(self) -> int:
        return self.generators[0].shape[0] if self.generators else 1

    def relation_residual(self) -> float:
        """Largest deviation from chi_i^dagger = chi_i, chi_i^2 = I and anticommutation."""
        eye = np.eye(self.dim)
        worst = 0.0
        for i, a in enumerate(self.generators):
            worst = max(worst, np.max(np.abs(a - a.conj().T)), np.max(np.abs(a @ a - eye)))
            for b in self.generators[i + 1 :]:
                worst = max(worst, np.max(np.abs(a @ b + b @ a)))
        return float(worst)


def _popcount(x: int) -> int:
    return bin(x).count("1")


def jordan_wigner(n: int) -> CliffordRep:
    """``ceil(n/2)`` qubits; ``chi_{2k-1} = Z..Z X I..I`` and ``chi_{2k} = Z..Z Y I..I`` (Pauli on qubit k)."""
    if not 1 <= n <= MAX_JW:
        raise OperatorError(f"jordan_wigner needs 1 <= n <= {MAX_JW}")
    sx, sy, sz = pauli_matrices()
    eye = np.eye(2, dtype=complex)
    qubits = (n + 1) // 2
    gens = []
    for i in range(1, n + 1):
        k = (i + 1) // 2
        p = sx if i % 2 else sy
        gens.append(kron_all([sz] * (k - 1) + [p] + [eye] * (qubits - k)))
    return CliffordRep(n, JORDAN_WIGNER, tuple(gens))


def left_regular(n: int) -> CliffordRep:
    """Left multiplication by ``chi_i`` on the ``2^n`` monomial basis ``{chi_S}``.

    ``chi_i chi_S = (-1)^{#{s in S : s < i}} chi_{S xor {i}}``, so every
    generator is a symmetric signed permutation matrix.
    """
    if not 1 <= n <= MAX_LEFT_REGULAR:
        raise OperatorError(f"left_regular needs 1 <= n <= {MAX_LEFT_REGULAR}")
    size = 1 << n
    masks = np.arange(size)
    gens = []
    for i in range(1, n + 1):
        bit = 1 << (i - 1)
        below = np.array([_popcount(int(s) & (bit - 1)) for s in masks])
        mat = np.zeros((size, size), dtype=complex)
        mat[masks ^ bit, masks] = (-1.0) ** below
        gens.append(mat)
    return CliffordRep(n, LEFT_REGULAR, tuple(gens))


def clifford_generators(n: int, kind: str = JORDAN_WIGNER) -> CliffordRep:
    return _cached_rep(int(n), kind)


@functools.lru_cache(maxsize=32)
def _cached_rep(n: int, kind: str) -> CliffordRep:
    if kind == JORDAN_WIGNER:
        return jordan_wigner(n)
    if kind == LEFT_REGULAR:
        return left_regular(n)
    raise OperatorError(f"unknown representation {kind!r}")


def _check_subset(n: int, S) -> tuple:
    S = tuple(int(s) for s in S)
    if any(b <= a for a, b in zip(S, S[1:])):
        raise OperatorError(f"subset {S} must be strictly increasing")
    if S and (S[0] < 1 or S[-1] > n):
        raise OperatorError(f"subset {S} out of range 1..{n}")
    return S


def clifford_monomial(rep: CliffordRep, S) -> np.ndarray:
    """Matrix of ``chi_S`` (identity for the empty set)."""
    S = _check_subset(rep.n, S)
    out = np.eye(rep.dim, dtype=complex)
    for s in S:
        out = out @ rep.generators[s - 1]
    return out


def mask_of(S) -> int:
    m = 0
    for s in S:
        m |= 1 << (int(s) - 1)
    return m


def subset_of(mask: int) -> tuple:
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def product_sign(a: int, b: int) -> int:
    """Sign in ``chi_A chi_B = sign * chi_{A xor B}`` for bitmasks ``a``, ``b``.

    Each ``t`` in ``B`` moves left past the elements of ``A`` larger than it.
    """
    swaps = 0
    for t in range(b.bit_length()):
        if b >> t & 1:
            swaps += _popcount(a >> (t + 1))
    return -1 if swaps & 1 else 1


def square_sign(k: int) -> int:
    """``chi_S^2 = (-1)^{k(k-1)/2} I`` for ``|S| = k``."""
    return -1 if (k * (k - 1) // 2) & 1 else 1


@dataclass(frozen=True, order=True)
class SignedMonomial:
    """The group element ``sign * chi_S``; ``mask`` encodes ``S``."""

    mask: int
    sign: int = 1

    @classmethod
    def of(cls, S, sign: int = 1) -> "SignedMonomial":
        return cls(mask_of(S), int(sign))

    @property
    def subset(self) -> tuple:
        return subset_of(self.mask)

    def __mul__(self, other: "SignedMonomial") -> "SignedMonomial":
        s = self.sign * other.sign * product_sign(self.mask, other.mask)
        return SignedMonomial(self.mask ^ other.mask, s)

    def inverse(self) -> "SignedMonomial":
        return SignedMonomial(self.mask, self.sign * square_sign(_popcount(self.mask)))

    def matrix(self, rep: CliffordRep) -> np.ndarray:
        return self.sign * clifford_monomial(rep, self.subset)


IDENTITY = SignedMonomial(0, 1)


def signed_monomial_group(n: int) -> list:
    """All ``2^{n+1}`` elements ``+-chi_S``, sorted."""
    if not 0 <= n <= 14:
        raise OperatorError("signed_monomial_group needs n <= 14")
    return [SignedMonomial(mask, sign) for mask in range(1 << n) for sign in (-1, 1)]


def relabel(g: SignedMonomial, perm) -> SignedMonomial:
    """Image of ``g`` under ``chi_i -> chi_{perm[i-1]}`` (``perm`` a permutation of 1..n).

    The relabelled generators still satisfy the Clifford relations, so the
    image is again a signed monomial; its sign comes from re-sorting.
    """
    out = SignedMonomial(0, g.sign)
    for s in g.subset:
        out = out * SignedMonomial(1 << (perm[s - 1] - 1), 1)
    return out


def conjugation_sign(g: SignedMonomial, S) -> int:
    """``epsilon`` in ``g chi_S g^{-1} = epsilon chi_S``: ``(-1)^{|T||S| - |T cap S|}`` for ``g = +-chi_T``."""
    s_mask = S if isinstance(S, int) else mask_of(S)
    t = g.mask
    k = _popcount(t) * _popcount(s_mask) - _popcount(t & s_mask)
    return -1 if k & 1 else 1


def conjugation_sign_matrix(rep: CliffordRep, g: SignedMonomial, S) -> int:
    """Matrix-level value of :func:`conjugation_sign`, for cross-checks."""
    gm = g.matrix(rep)
    ginv = g.inverse().matrix(rep)
    chi = clifford_monomial(rep, S)
    conj = gm @ chi @ ginv
    for eps in (1, -1):
        if np.allclose(conj, eps * chi, atol=1e-12, rtol=0):
            return eps
    raise OperatorError("conjugate is not +-chi_S")


def even_subsets(n: int, q: int):
    """Strictly increasing ``q``-subsets of ``1..n`` in lexicographic order."""
    return itertools.combinations(range(1, n + 1), q)
