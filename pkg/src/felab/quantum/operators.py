"""Dense Hermitian operators on qubit registers.

Factor order: in ``site_operator(m, i, .)`` site 1 is the leftmost Kronecker
factor, i.e. the most significant bit of the basis index.  Hence
``sigma^z_i`` has diagonal entry ``1 - 2 * bit(b, m - i)`` at basis index
``b``, which is spin ``i - 1`` of hypercube state ``b`` in
:mod:`felab.core.spaces` order.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

MAX_SITES = 12
HERMITIAN_TOL = 1e-10


class OperatorError(ValueError):
    pass


def pauli_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    sx = np.array([[0, 1], [1, 0]], dtype=complex)
    sy = np.array([[0, -1j], [1j, 0]], dtype=complex)
    sz = np.array([[1, 0], [0, -1]], dtype=complex)
    return sx, sy, sz


_PAULI = dict(zip("xyz", pauli_matrices()))


def kron_all(factors) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        out = np.kron(out, f)
    return out


def site_operator(m: int, i: int, which: str) -> np.ndarray:
    """``I x ... x sigma^which x ... x I`` with the Pauli matrix on factor ``i`` (1-based)."""
    if not 1 <= i <= m <= MAX_SITES:
        raise OperatorError(f"need 1 <= i <= m <= {MAX_SITES}, got i={i}, m={m}")
    if which not in _PAULI:
        raise OperatorError(f"which must be one of x, y, z; got {which!r}")
    eye = np.eye(2, dtype=complex)
    return kron_all([_PAULI[which] if k == i else eye for k in range(1, m + 1)])


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = 1.0 + (float(np.max(np.abs(m))) if m.size else 0.0)
    return hermiticity_residual(m) <= tol * scale


def check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = np.asarray(m)
    if not is_hermitian(m, tol):
        raise OperatorError("operator is not Hermitian within tolerance")
    return m


def random_hermitian(dim: int, gen: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """GUE-type matrix ``scale * (G + G^dagger) / 2`` with complex Gaussian ``G``."""
    g = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    return 0.5 * scale * (g + g.conj().T)


def dump_operator(m: np.ndarray, path) -> None:
    """One JSON header line, then raw little-endian complex128 entries in row-major order."""
    m = np.ascontiguousarray(m, dtype="<c16")
    header = {"dtype": "complex128", "byteorder": "little", "order": "row-major", "shape": list(m.shape)}
    with open(Path(path), "wb") as fh:
        fh.write((json.dumps(header, sort_keys=True) + "\n").encode())
        fh.write(m.tobytes(order="C"))


def load_operator(path) -> np.ndarray:
    with open(Path(path), "rb") as fh:
        header = json.loads(fh.readline().decode())
        data = fh.read()
    return np.frombuffer(data, dtype="<c16").reshape(header["shape"]).astype(complex)
