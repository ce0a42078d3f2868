"""Entanglement certification for reconstructed or model states.

Covers the Smolin witness ``W = I - XXXX - YYYY - ZZZZ``, the minimum
eigenvalue of the partial transpose over the three two-two cuts, Uhlmann
fidelity, two-qubit tangle, and a seesaw search over states of the form
``|alpha>_A (x) |phi>_BCD`` used to check the witness bound.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import ValidationError
from .linalg import (
    PAULIS,
    X,
    Y,
    Z,
    hermitian_eigenvalues,
    hs_inner,
    hs_norm,
    n_qubits,
    partial_transpose,
    pauli_string,
    tensor,
)
from .states import noisy_smolin, smolin

PARTY_NAMES = "ABCD"


@dataclass(frozen=True)
class BipartiteCut:
    left: tuple[int, ...]
    right: tuple[int, ...]

    def __post_init__(self):
        both = set(self.left) | set(self.right)
        if not self.left or not self.right or set(self.left) & set(self.right) or both != set(range(len(both))):
            raise ValidationError(f"{self.left}:{self.right} is not a bipartition of the qubits")

    @property
    def name(self) -> str:
        return "".join(PARTY_NAMES[q] for q in self.left) + ":" + "".join(PARTY_NAMES[q] for q in self.right)


TWO_TWO_CUTS = (
    BipartiteCut((0, 1), (2, 3)),
    BipartiteCut((0, 2), (1, 3)),
    BipartiteCut((0, 3), (1, 2)),
)
TWO_QUBIT_CUT = BipartiteCut((0,), (1,))


def cuts_for(rho: np.ndarray) -> tuple[BipartiteCut, ...]:
    n = n_qubits(rho)
    if n == 4:
        return TWO_TWO_CUTS
    if n == 2:
        return (TWO_QUBIT_CUT,)
    raise ValidationError(f"PT analysis supports 2 or 4 qubits, got {n}")


def witness_operator() -> np.ndarray:
    return np.eye(16) - sum(tensor(s, s, s, s) for s in (X, Y, Z))


def witness_expectation(rho: np.ndarray) -> float:
    """Tr(W rho) for a four-qubit state."""
    if n_qubits(rho) != 4:
        raise ValidationError("the witness is defined on four qubits")
    return float(np.real(np.trace(witness_operator() @ rho)))


def pt_spectrum(rho: np.ndarray, cut: BipartiteCut) -> np.ndarray:
    return hermitian_eigenvalues(partial_transpose(rho, cut.left))


def min_pt_eigenvalue(rho: np.ndarray) -> tuple[float, BipartiteCut]:
    """Smallest partial-transpose eigenvalue over all two-two cuts, and the cut attaining it."""
    best = None
    for cut in cuts_for(rho):
        lo = float(pt_spectrum(rho, cut)[0])
        if best is None or lo < best[0]:
            best = (lo, cut)
    return best


# eigenvalues this far below the largest are rounding noise; their square
# roots (~1e-8) would otherwise leak into fidelities of pure states
_REL_ZERO = 1e-14


def _clip_small(w: np.ndarray) -> np.ndarray:
    return np.where(w < _REL_ZERO * max(w.max(), 0.0), 0.0, w)


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh((m + m.conj().T) / 2)
    return (v * np.sqrt(_clip_small(w))) @ v.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray, psd_tol: float = 1e-8) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2."""
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValidationError(f"dimension mismatch {rho.shape} vs {sigma.shape}")
    for m in (rho, sigma):
        if hermitian_eigenvalues(m, tol=psd_tol)[0] < -psd_tol:
            raise ValidationError("fidelity needs positive semidefinite inputs")
    s = _psd_sqrt(rho)
    w = np.linalg.eigvalsh(s @ sigma @ s)
    # rounding leaves tiny negatives on rank-deficient inputs
    w = _clip_small(w)
    return float(np.sum(np.sqrt(w)) ** 2)


def concurrence(rho: np.ndarray) -> float:
    """Wootters concurrence of a two-qubit state."""
    if n_qubits(rho) != 2:
        raise ValidationError("concurrence is defined for two qubits")
    yy = np.kron(Y, Y)
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.clip(np.linalg.eigvals(r).real, 0, None))
    lam = np.sort(lam)[::-1]
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def tangle(rho: np.ndarray) -> float:
    return concurrence(rho) ** 2


def pauli_expectation(rho: np.ndarray, labels) -> float:
    return float(np.real(np.trace(pauli_string(labels) @ rho)))


# --- product-state overlap search -------------------------------------------------


def haar_kets(dim: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` Haar-random unit vectors of length ``dim`` (rows)."""
    z = rng.standard_normal((size, dim)) + 1j * rng.standard_normal((size, dim))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_product_kets(n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Fully product pure states, one Haar-random factor per qubit."""
    out = haar_kets(2, size, rng)
    for _ in range(n - 1):
        f = haar_kets(2, size, rng)
        out = (out[:, :, None] * f[:, None, :]).reshape(size, -1)
    return out


def _seesaw(rho: np.ndarray, rng: np.random.Generator, maximize: bool, tol: float, max_sweeps: int) -> float:
    t = rho.reshape(2, 8, 2, 8)
    pick = -1 if maximize else 0
    alpha = haar_kets(2, 1, rng)[0]
    prev = None
    for _ in range(max_sweeps):
        m_bcd = np.einsum("a,aibj,b->ij", alpha.conj(), t, alpha)
        w, v = np.linalg.eigh(m_bcd)
        phi = v[:, pick]
        m_a = np.einsum("i,aibj,j->ab", phi.conj(), t, phi)
        w, v = np.linalg.eigh(m_a)
        alpha = v[:, pick]
        val = float(w[pick])
        if prev is not None and abs(val - prev) < tol:
            break
        prev = val
    # value actually attained by the final product state
    ket = np.kron(alpha, phi)
    return float(np.real(ket.conj() @ rho @ ket))


def _product_overlap(rho, restarts, rng, maximize, tol, max_sweeps):
    if n_qubits(rho) != 4:
        raise ValidationError("product-overlap search is defined on four qubits")
    if restarts < 1:
        raise ValidationError("restarts must be >= 1")
    rng = np.random.default_rng(rng)
    vals = [_seesaw(rho, rng, maximize, tol, max_sweeps) for _ in range(restarts)]
    return max(vals) if maximize else min(vals)


def max_product_overlap(rho, restarts: int = 50, rng=None, tol: float = 1e-10, max_sweeps: int = 500) -> float:
    """Largest Tr(rho tau) found over tau = |alpha><alpha|_A (x) |phi><phi|_BCD.

    Each restart is an alternating eigen-maximisation from a random
    ``alpha``. The result is attained by an explicit product state, so it
    is a lower bound on the true maximum. Restarts are drawn sequentially
    from ``rng``, so more restarts never give a smaller value.
    """
    return _product_overlap(np.asarray(rho, dtype=complex), restarts, rng, True, tol, max_sweeps)


def min_product_overlap(rho, restarts: int = 50, rng=None, tol: float = 1e-10, max_sweeps: int = 500) -> float:
    """Like :func:`max_product_overlap` but descending; an upper bound on the minimum."""
    return _product_overlap(np.asarray(rho, dtype=complex), restarts, rng, False, tol, max_sweeps)


def witness_geometry_check(tol: float = 1e-12) -> dict:
    """Numerically confirm the nearest-separable-state construction of the witness.

    Checks that c0 = Tr(rho(2/3) (rho_S - rho(2/3))) equals 1/24, that
    24 (c0 I + rho(2/3) - rho_S) equals W, that the partial transpose on A
    satisfies rho_S^{T_A} = (Y (x) I)(I/8 - rho_S)(Y (x) I), and that the
    Hilbert-Schmidt norm matches sqrt(Tr X^H X) on a few test matrices.
    """
    rs = smolin()
    r23 = noisy_smolin(2 / 3)
    c0 = hs_inner(r23, rs - r23).real
    w_tilde = c0 * np.eye(16) + r23 - rs
    w_err = float(np.max(np.abs(24 * w_tilde - witness_operator())))

    ya = tensor(Y, PAULIS[0], PAULIS[0], PAULIS[0])
    pt_err = float(np.max(np.abs(partial_transpose(rs, [0]) - ya @ (np.eye(16) / 8 - rs) @ ya)))

    rng = np.random.default_rng(0)
    tests = [np.eye(16), rs, rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))]
    hs_err = max(abs(hs_norm(m) - np.sqrt(np.trace(m.conj().T @ m).real)) for m in tests)

    checks = {
        "c0": c0,
        "c0_error": abs(c0 - 1 / 24),
        "witness_error": w_err,
        "pt_identity_error": pt_err,
        "hs_norm_identity_error": float(hs_err),
        "hs_norm_identity16": hs_norm(np.eye(16)),
    }
    checks["passed"] = bool(
        checks["c0_error"] <= tol and w_err <= tol and pt_err <= tol and hs_err <= tol
    )
    return checks


# --- reports ------------------------------------------------------------------------


@dataclass
class Estimate:
    value: float
    sigma: Optional[float] = None

    def __str__(self):
        if self.sigma is None:
            return f"{self.value:.6g}"
        return f"{self.value:.6g} +/- {self.sigma:.2g}"


@dataclass
class AnalysisReport:
    """Certification summary for one state; uncertainties are None when not computed."""

    n_qubits: int
    min_pt_eig: Estimate
    min_pt_cut: str
    witness: Optional[Estimate] = None
    witness_sum: Optional[Estimate] = None
    fidelity_with_target: Optional[Estimate] = None
    tangle: Optional[Estimate] = None
    extra: dict = field(default_factory=dict)

    @property
    def ppt(self) -> bool:
        return self.min_pt_eig.value >= 0

    @property
    def witness_detects(self) -> Optional[bool]:
        w = self.witness_sum or self.witness
        return None if w is None else w.value < 0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ppt"] = self.ppt
        d["entangled_by_witness"] = self.witness_detects
        return d


def analyze_state(rho: np.ndarray, target: Optional[np.ndarray] = None) -> AnalysisReport:
    """Point estimates (no uncertainties) for a 2- or 4-qubit density matrix."""
    n = n_qubits(rho)
    lo, cut = min_pt_eigenvalue(rho)
    report = AnalysisReport(n_qubits=n, min_pt_eig=Estimate(lo), min_pt_cut=cut.name)
    if n == 4:
        report.witness = Estimate(witness_expectation(rho))
    if n == 2:
        report.tangle = Estimate(tangle(rho))
    if target is not None:
        report.fidelity_with_target = Estimate(fidelity(rho, target))
    return report
