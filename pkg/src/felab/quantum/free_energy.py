"""Quantum free energies, Golden-Thompson, and symmetrizer averages."""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from felab.core.free_energy import FreeEnergyEstimate, NumericalError, logsumexp, resolve_threads, summarize
from felab.core.laws import SIGNED_PERMUTATIONS
from felab.core.subadditivity import COMMON, INDEPENDENT, SubadditivityReport
from felab.quantum.clifford import JORDAN_WIGNER, clifford_generators, clifford_monomial, square_sign, subset_of
from felab.quantum.hamiltonians import MAX_DIM, QSK_LOCAL, SYK_MONOMIALS, OperatorLaw, sum_operator_laws
from felab.quantum.operators import OperatorError, check_hermitian, pauli_matrices
from felab.seeding import DISORDER, STREAM_DEFAULT, STREAM_F1, STREAM_F2, STREAM_F12, child, realization_seed, rng

FLAG_SKIPPED = "skipped_realizations"


def quantum_log_z(m: np.ndarray) -> float:
    """``log(Tr e^M / dim)`` from the eigenvalues of the Hermitian ``m``."""
    return logsumexp(np.linalg.eigvalsh(m)) - math.log(m.shape[0])


def quantum_free_energy(
    law: OperatorLaw,
    n_disorder: int = 1000,
    seed: int = 0,
    stream: int = STREAM_DEFAULT,
    threads: Optional[int] = None,
) -> FreeEnergyEstimate:
    """``E log(Tr e^M / dim)`` with the classical seed scheme.

    Realizations whose eigendecomposition fails are skipped; the count is
    reported in the flags.
    """
    if law.dim > MAX_DIM:
        raise OperatorError(f"dimension {law.dim} exceeds {MAX_DIM}")
    if n_disorder < 1:
        raise ValueError("n_disorder must be >= 1")

    def one(r):
        try:
            return quantum_log_z(law.sample(child(realization_seed(seed, stream, r), DISORDER)))
        except np.linalg.LinAlgError:
            return None

    workers = resolve_threads(threads)
    if workers == 1:
        results = [one(r) for r in range(n_disorder)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(n_disorder)))
    kept = np.array([v for v in results if v is not None], dtype=float)
    skipped = n_disorder - kept.size
    if kept.size == 0:
        raise NumericalError("every eigendecomposition failed")
    if not np.all(np.isfinite(kept)):
        raise NumericalError("non-finite log Z")
    flags = (f"{FLAG_SKIPPED}={skipped}",) if skipped else ()
    return summarize(kept, np.zeros(kept.size), seed, "probability", extra_flags=flags)


def quantum_subadditivity_report(
    law1: OperatorLaw,
    law2: OperatorLaw,
    *,
    n_disorder: int = 1000,
    seed: int = 0,
    z: float = 3.0,
    combined: Optional[OperatorLaw] = None,
    threads: Optional[int] = None,
    coupling: str = INDEPENDENT,
) -> SubadditivityReport:
    """Quantum analogue of :func:`felab.core.subadditivity_report`."""
    if law1.dim != law2.dim:
        raise OperatorError("laws act on spaces of different dimension")
    if not (law1.invariant or law2.invariant):
        warnings.warn("neither operator law carries a symmetrizing group", stacklevel=2)
    law12 = combined if combined is not None else sum_operator_laws(law1, law2)
    kw = dict(n_disorder=n_disorder, seed=seed, threads=threads)
    if coupling == COMMON:
        if combined is not None:
            raise ValueError("common coupling needs the independent sum")
        f1 = quantum_free_energy(_summand(law1, 0), stream=STREAM_F12, **kw)
        f2 = quantum_free_energy(_summand(law2, 1), stream=STREAM_F12, **kw)
    elif coupling == INDEPENDENT:
        f1 = quantum_free_energy(law1, stream=STREAM_F1, **kw)
        f2 = quantum_free_energy(law2, stream=STREAM_F2, **kw)
    else:
        raise ValueError(f"unknown coupling {coupling!r}")
    f12 = quantum_free_energy(law12, stream=STREAM_F12, **kw)
    return SubadditivityReport(f1, f2, f12, z)


def _summand(law: OperatorLaw, key: int) -> OperatorLaw:
    return OperatorLaw(law.name, law.dim, lambda ss: law.sample(child(ss, key)), law.symmetry, law.params)


def _expm_h(m: np.ndarray, shift: float) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.exp(w - shift)) @ v.conj().T


def golden_thompson_gap(m1: np.ndarray, m2: np.ndarray) -> tuple[float, float, float]:
    """``(Tr e^{M1+M2}, Tr(e^{M1} e^{M2}), rhs - lhs)``.

    Raises :class:`NumericalError` if the gap is below ``-1e-9 |rhs|``.
    """
    m1, m2 = check_hermitian(m1), check_hermitian(m2)
    if m1.shape != m2.shape:
        raise OperatorError("operators must have the same dimension")
    c1 = float(np.max(np.linalg.eigvalsh(m1)))
    c2 = float(np.max(np.linalg.eigvalsh(m2)))
    scale = math.exp(c1 + c2)
    lhs = float(np.sum(np.exp(np.linalg.eigvalsh(m1 + m2) - c1 - c2))) * scale
    rhs = float(np.real(np.trace(_expm_h(m1, c1) @ _expm_h(m2, c2)))) * scale
    gap = rhs - lhs
    if gap < -1e-9 * abs(rhs):
        raise NumericalError(f"Golden-Thompson violated: gap {gap} for rhs {rhs}")
    return lhs, rhs, gap


def symmetrizer_average(group: str, m: np.ndarray, n_generators: Optional[int] = None, rep_kind: str = JORDAN_WIGNER) -> np.ndarray:
    """Exact ``E_g[g M g^{-1}]`` over a finite unitary group.

    ``signed_permutations``: diagonal signs kill off-diagonal entries, then
    permutations average the diagonal.  ``qsk_local``: per site, the average
    over ``{I, X, Y, Z}`` conjugations (signs and phases cancel), applied
    factor by factor.  ``syk_monomials``: average of ``chi_S M chi_S^{-1}``
    over all ``2^n`` subsets in the given representation; ``n`` defaults to
    twice the number of qubits.
    """
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    if group == SIGNED_PERMUTATIONS:
        return np.eye(dim) * (np.trace(m) / dim)
    if group == QSK_LOCAL:
        qubits = dim.bit_length() - 1
        if 1 << qubits != dim:
            raise OperatorError("qsk_local needs a power-of-two dimension")
        out = m
        paulis = (np.eye(2, dtype=complex),) + pauli_matrices()
        for site in range(qubits):
            t = out.reshape((2**site, 2, dim // 2 ** (site + 1)) * 2)
            acc = np.zeros_like(t)
            for p in paulis:
                acc += np.einsum("ab,ibjkcl,cd->iajkdl", p, t, p.conj().T)
            out = (acc / 4).reshape(dim, dim)
        return out
    if group == SYK_MONOMIALS:
        n = n_generators if n_generators is not None else 2 * (dim.bit_length() - 1)
        rep = clifford_generators(n, rep_kind)
        if rep.dim != dim:
            raise OperatorError(f"{rep_kind} rep of {n} generators has dimension {rep.dim}, not {dim}")
        acc = np.zeros_like(m)
        for mask in range(1 << n):
            S = subset_of(mask)
            chi = clifford_monomial(rep, S)
            acc += square_sign(len(S)) * (chi @ m @ chi)
        return acc / (1 << n)
    raise OperatorError(f"unsupported group {group!r}")


def sampled_symmetrizer_average(group: str, m: np.ndarray, n_samples: int, seed) -> tuple[np.ndarray, np.ndarray]:
    """Monte Carlo ``E_g[g M g^{-1}]`` with entrywise standard errors (signed permutations only)."""
    if group != SIGNED_PERMUTATIONS:
        raise OperatorError("sampling is implemented for signed permutations")
    m = np.asarray(m, dtype=complex)
    dim = m.shape[0]
    gen = rng(seed)
    total = np.zeros_like(m)
    total_sq = np.zeros(m.shape)
    for _ in range(n_samples):
        perm = gen.permutation(dim)
        signs = 1.0 - 2.0 * gen.integers(0, 2, dim)
        # g = P D with (P D) e_j = signs_j e_perm(j)
        conj = np.empty_like(m)
        conj[np.ix_(perm, perm)] = m * np.outer(signs, signs)
        total += conj
        total_sq += np.abs(conj) ** 2
    mean = total / n_samples
    var = np.maximum(total_sq / n_samples - np.abs(mean) ** 2, 0.0)
    return mean, np.sqrt(var / max(1, n_samples - 1))
