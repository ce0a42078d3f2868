"""Dense multi-qubit operator kernel.

Qubit 0 is the leftmost tensor factor and the most significant bit of a
basis index, so party A of ``|abcd>`` is qubit 0. Everything here works on
plain ``numpy`` arrays; dimensions never exceed 16 so nothing is sparse.
"""

from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, X, Y, Z)


def n_qubits(m: np.ndarray) -> int:
    """Number of qubits of a square ``2**n`` matrix."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    dim = m.shape[0]
    n = dim.bit_length() - 1
    if dim < 1 or 1 << n != dim:
        raise ValidationError(f"dimension {dim} is not a power of two")
    return n


def tensor(*ops: np.ndarray) -> np.ndarray:
    """Kronecker product, leftmost argument = most significant qubits."""
    if not ops:
        raise ValidationError("tensor() needs at least one operand")
    return reduce(np.kron, (np.asarray(o, dtype=complex) for o in ops))


def pauli_string(labels: Sequence[int]) -> np.ndarray:
    """``sigma_{l0} (x) sigma_{l1} (x) ...`` for labels in {0, 1, 2, 3}."""
    for mu in labels:
        if mu not in (0, 1, 2, 3):
            raise ValidationError(f"Pauli label {mu!r} not in 0..3")
    return tensor(*(PAULIS[mu] for mu in labels))


def _check_subset(subset: Iterable[int], n: int) -> list[int]:
    idx = [int(q) for q in subset]
    if len(set(idx)) != len(idx):
        raise ValidationError(f"qubit subset {idx} has repeated entries")
    for q in idx:
        if not 0 <= q < n:
            raise ValidationError(f"qubit {q} out of range for {n} qubits")
    return idx


def permute_qubits(m: np.ndarray, perm: Sequence[int]) -> np.ndarray:
    """Relabel tensor factors so that qubit ``i`` ends up at position ``perm[i]``."""
    n = n_qubits(m)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(n)):
        raise ValidationError(f"{perm} is not a permutation of 0..{n - 1}")
    inv = [0] * n
    for i, p in enumerate(perm):
        inv[p] = i
    axes = inv + [n + a for a in inv]
    t = np.asarray(m).reshape((2,) * (2 * n))
    return t.transpose(axes).reshape(m.shape)


def partial_transpose(m: np.ndarray, subset: Iterable[int]) -> np.ndarray:
    """Transpose the tensor factors listed in ``subset``."""
    n = n_qubits(m)
    idx = _check_subset(subset, n)
    axes = list(range(2 * n))
    for q in idx:
        axes[q], axes[n + q] = axes[n + q], axes[q]
    t = np.asarray(m).reshape((2,) * (2 * n))
    return t.transpose(axes).reshape(m.shape)


def partial_trace(m: np.ndarray, keep: Iterable[int]) -> np.ndarray:
    """Trace out every qubit not in ``keep``; kept qubits come out in the given order."""
    n = n_qubits(m)
    keep = _check_subset(keep, n)
    rest = [q for q in range(n) if q not in keep]
    perm = [0] * n
    for pos, q in enumerate(keep + rest):
        perm[q] = pos
    dk, dr = 2 ** len(keep), 2 ** len(rest)
    t = permute_qubits(m, perm).reshape(dk, dr, dk, dr)
    return np.trace(t, axis1=1, axis2=3)


def hermitian_eigenvalues(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Ascending real eigenvalues of a Hermitian matrix.

    The input is symmetrised before solving; a deviation from Hermiticity
    larger than ``tol`` (entrywise) is an error.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if dev > tol:
        raise ValidationError(f"matrix is not Hermitian (max |M - M^H| = {dev:.3g})")
    return np.linalg.eigvalsh((m + m.conj().T) / 2)


def hs_inner(a: np.ndarray, b: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product Tr(a^H b)."""
    return complex(np.vdot(a, b))


def hs_norm(a: np.ndarray) -> float:
    return float(np.sqrt(hs_inner(a, a).real))


def validate_density_matrix(rho: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Return ``rho`` as a complex array after checking Hermiticity, trace and positivity."""
    rho = np.asarray(rho, dtype=complex)
    n_qubits(rho)
    evals = hermitian_eigenvalues(rho, tol=max(tol, HERMITIAN_TOL))
    tr = np.trace(rho)
    if abs(tr - 1) > tol:
        raise ValidationError(f"trace is {tr.real:.12g}, expected 1")
    if evals[0] < -tol:
        raise ValidationError(f"matrix is not positive semidefinite (min eigenvalue {evals[0]:.3g})")
    return rho


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())
