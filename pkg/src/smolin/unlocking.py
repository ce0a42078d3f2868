"""Bell-state projection of two parties and the simulated unlocking run."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import NullProjectionError, ValidationError
from .linalg import n_qubits, partial_trace, permute_qubits, tensor, I2
from .states import SourceModel, bell_projector, source_state
from .tomography import CountTable, basis_settings, expected_counts, simulate_counts

MIN_PROBABILITY = 1e-14


@dataclass(frozen=True)
class BellProjectionSpec:
    """Which two parties are jointly measured and on which Bell state.

    ``visibility`` < 1 models imperfect two-photon interference: the
    heralded POVM element loses its coherence between the two
    correlated-polarisation terms. ``chi`` applies ``diag(1, e^{i chi})``
    to the first party before projecting.
    """

    parties: tuple[int, int] = (0, 2)
    mu: int = 3
    visibility: float = 1.0
    chi: Optional[float] = None

    def __post_init__(self):
        if len(self.parties) != 2 or self.parties[0] == self.parties[1]:
            raise ValidationError(f"need two distinct parties, got {self.parties}")
        if self.mu not in (0, 1, 2, 3):
            raise ValidationError(f"Pauli label {self.mu!r} not in 0..3")
        if not 0.0 <= self.visibility <= 1.0:
            raise ValidationError(f"visibility {self.visibility} outside [0, 1]")


def bell_povm_element(mu: int, visibility: float = 1.0) -> np.ndarray:
    """V |Psi_mu><Psi_mu| + (1 - V) * (incoherent mixture of the two terms of Psi_mu)."""
    proj = bell_projector(mu)
    if visibility == 1.0:
        return proj
    incoherent = np.zeros((4, 4))
    idx = (0, 3) if mu in (0, 3) else (1, 2)
    for i in idx:
        incoherent[i, i] = 0.5
    return visibility * proj + (1 - visibility) * incoherent


def bell_project(rho: np.ndarray, spec: BellProjectionSpec) -> tuple[np.ndarray, float]:
    """Post-measurement state of the two unmeasured parties and the outcome probability.

    The remaining parties come out in ascending qubit order.
    """
    n = n_qubits(rho)
    if n != 4:
        raise ValidationError("Bell projection is defined on four-qubit states")
    for q in spec.parties:
        if not 0 <= q < 4:
            raise ValidationError(f"party {q} out of range")
    rest = [q for q in range(4) if q not in spec.parties]
    perm = [0] * 4
    for pos, q in enumerate(list(spec.parties) + rest):
        perm[q] = pos
    r = permute_qubits(np.asarray(rho, dtype=complex), perm)
    if spec.chi is not None:
        u = tensor(np.diag([1, np.exp(1j * spec.chi)]), I2, I2, I2)
        r = u @ r @ u.conj().T
    e = np.kron(bell_povm_element(spec.mu, spec.visibility), np.eye(4))
    prob = float(np.real(np.trace(e @ r)))
    if prob < MIN_PROBABILITY:
        raise NullProjectionError(f"projection probability {prob:.3g} is zero")
    out = partial_trace(e @ r, [2, 3]) / prob
    return (out + out.conj().T) / 2, prob


def unlocked_state(
    p: float,
    sources: Sequence = (SourceModel(), SourceModel()),
    spec: BellProjectionSpec = BellProjectionSpec(),
) -> tuple[np.ndarray, float]:
    """Two-qubit state left after projecting the prepared four-qubit state."""
    rho = source_state(p, sources[0], sources[1])
    return bell_project(rho, spec)


def simulate_unlocking_run(
    p: float,
    sources: Sequence = (SourceModel(), SourceModel()),
    spec: BellProjectionSpec = BellProjectionSpec(),
    mean_total_per_setting: float = 4.0e4,
    rng=None,
    expected: bool = False,
) -> list[CountTable]:
    """Tomography tables for the two unmeasured parties after a Bell projection.

    Emits the 9 two-qubit basis settings with 4 outcomes each, i.e. the 36
    analyzer combinations of the published two-qubit table. ``sources`` is a
    pair of :class:`SourceModel` (or per-label mappings of them). With
    ``expected=True`` the tables hold mean counts instead of Poisson draws.
    """
    rho_out, _ = unlocked_state(p, sources, spec)
    settings = basis_settings(2)
    if expected:
        return expected_counts(rho_out, settings, mean_total_per_setting)
    return simulate_counts(rho_out, settings, mean_total_per_setting, np.random.default_rng(rng))
