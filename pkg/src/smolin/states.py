"""State constructors: Bell pairs, the Smolin family, Werner states, and
imperfect two-photon sources.

Bell-state convention (``bell_state(mu) = (s_mu (x) I)|phi+>``, with the
``mu = 2`` case multiplied by ``i`` so that all amplitudes are real)::

    mu = 0  ->  (|00> + |11>)/sqrt2   phi+
    mu = 1  ->  (|01> + |10>)/sqrt2   psi+
    mu = 2  ->  (|01> - |10>)/sqrt2   psi-
    mu = 3  ->  (|00> - |11>)/sqrt2   phi-
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from typing import Mapping, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import InfeasibleSourceError, ValidationError
from .linalg import I2, PAULIS, Y, ket_to_dm, n_qubits, tensor

SOURCE_KINDS = ("ideal", "werner", "colored")

# Table IV row order (LCR1, LCR2) -> Pauli label of the resulting Bell state.
LCR_ROW_LABELS = {"phi+": 0, "phi-": 3, "psi+": 1, "psi-": 2}


def _check_label(mu: int) -> int:
    if mu not in (0, 1, 2, 3):
        raise ValidationError(f"Pauli label {mu!r} not in 0..3")
    return int(mu)


def _check_prob(x: float, name: str) -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"{name} = {x} outside [0, 1]")
    return x


def bell_state(mu: int) -> np.ndarray:
    """Amplitudes of the Bell state with Pauli label ``mu`` (see module docstring)."""
    mu = _check_label(mu)
    phi_plus = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)
    op = 1j * Y if mu == 2 else PAULIS[mu]
    return np.kron(op, I2) @ phi_plus


def bell_projector(mu: int) -> np.ndarray:
    return ket_to_dm(bell_state(mu))


def smolin() -> np.ndarray:
    """The four-qubit Smolin state, 1/4 sum_mu |Psi_mu><Psi_mu|_AB (x) |Psi_mu><Psi_mu|_CD."""
    return sum(np.kron(bell_projector(mu), bell_projector(mu)) for mu in range(4)) / 4


def noisy_smolin(p: float) -> np.ndarray:
    """(1 - p) rho_S + p I/16."""
    p = _check_prob(p, "p")
    return (1 - p) * smolin() + p * np.eye(16) / 16


def werner_state(v: float, mu: int = 0) -> np.ndarray:
    """v |Psi_mu><Psi_mu| + (1 - v) I/4."""
    v = _check_prob(v, "v")
    return v * bell_projector(mu) + (1 - v) * np.eye(4) / 4


def apply_local_pauli(state: np.ndarray, assignments: Sequence[tuple[int, int]]) -> np.ndarray:
    """Conjugate ``state`` by a product of single-qubit Paulis.

    ``assignments`` lists ``(qubit, mu)`` pairs; unlisted qubits get the identity.
    """
    n = n_qubits(state)
    ops = [I2] * n
    seen = set()
    for q, mu in assignments:
        if not 0 <= q < n:
            raise ValidationError(f"qubit {q} out of range for {n} qubits")
        if q in seen:
            raise ValidationError(f"qubit {q} assigned twice")
        seen.add(q)
        ops[q] = PAULIS[_check_label(mu)]
    u = tensor(*ops)
    return u @ state @ u.conj().T


def twirl_sample(p: float, rng: np.random.Generator, size: int | None = None):
    """Draw Pauli labels (mu1, mu2) for the two sources.

    With probability ``1 - p`` both sources get the same uniformly drawn label,
    otherwise the labels are independent and uniform. Each simulated
    coincidence event draws its own labels; switching in real time is not
    modelled. With ``size`` given, returns two integer arrays.
    """
    p = _check_prob(p, "p")
    n = 1 if size is None else int(size)
    mu1 = rng.integers(0, 4, size=n)
    uncorrelated = rng.random(n) < p
    mu2 = np.where(uncorrelated, rng.integers(0, 4, size=n), mu1)
    if size is None:
        return int(mu1[0]), int(mu2[0])
    return mu1, mu2


def twirl_weights(p: float) -> np.ndarray:
    """4x4 table of label-pair probabilities: (1-p)/4 delta + p/16."""
    p = _check_prob(p, "p")
    return (1 - p) / 4 * np.eye(4) + p / 16


def twirled_state(p: float, source1: Sequence[np.ndarray], source2: Sequence[np.ndarray]) -> np.ndarray:
    """Ensemble four-qubit state (qubits A, B, C, D) from per-label source states.

    ``source1[mu]`` is the AB pair emitted while the LCRs of source 1 are set
    to label ``mu`` (it already includes the rotation), likewise for CD.
    For ideal sources this is exactly :func:`noisy_smolin`.
    """
    if len(source1) != 4 or len(source2) != 4:
        raise ValidationError("need one two-qubit state per Pauli label for each source")
    w = twirl_weights(p)
    out = np.zeros((16, 16), dtype=complex)
    for m1 in range(4):
        for m2 in range(4):
            out += w[m1, m2] * np.kron(source1[m1], source2[m2])
    return out


@dataclass(frozen=True)
class SourceModel:
    """Two-photon source imperfection model.

    ``colored`` mixes a phase-miscalibrated Bell state with white noise,
    ``v |psi_chi><psi_chi| + (1 - v) I/4`` with
    ``|psi_chi> = (|00> + e^{i chi}|11>)/sqrt2``; ``v`` is fixed by the
    tangle and ``chi`` by the fidelity. ``phase_sign`` picks the sign of chi.
    """

    kind: str = "ideal"
    fidelity: float = 1.0
    tangle: float | None = None
    phase_sign: int = 1

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValidationError(f"unknown source kind {self.kind!r}; expected one of {SOURCE_KINDS}")
        _check_prob(self.fidelity, "fidelity")
        if self.tangle is not None:
            _check_prob(self.tangle, "tangle")
        if self.phase_sign not in (1, -1):
            raise ValidationError("phase_sign must be +1 or -1")
        if self.kind == "ideal" and (self.fidelity != 1.0 or self.tangle not in (None, 1.0)):
            raise ValidationError("an ideal source has fidelity 1 and tangle 1")
        if self.kind == "colored" and self.tangle is None:
            raise ValidationError("colored source needs a target tangle")

    @classmethod
    def from_dict(cls, d: Mapping) -> "SourceModel":
        unknown = set(d) - {"kind", "fidelity", "tangle", "phase_sign"}
        if unknown:
            raise ValidationError(f"unknown source-model keys {sorted(unknown)}")
        kind = d.get("kind", "ideal")
        return cls(
            kind=kind,
            fidelity=float(d.get("fidelity", 1.0)),
            tangle=None if d.get("tangle") is None else float(d["tangle"]),
            phase_sign=int(d.get("phase_sign", 1)),
        )

    def to_dict(self) -> dict:
        return {"kind": self.kind, "fidelity": self.fidelity, "tangle": self.tangle, "phase_sign": self.phase_sign}


def _phase_bell(chi: float) -> np.ndarray:
    return np.array([1, 0, 0, np.exp(1j * chi)], dtype=complex) / np.sqrt(2)


def colored_source_state(v: float, chi: float) -> np.ndarray:
    return v * ket_to_dm(_phase_bell(chi)) + (1 - v) * np.eye(4) / 4


def imperfect_source(model: SourceModel) -> np.ndarray:
    """Two-qubit state emitted by a source aligned to |phi+>, matching the model targets."""
    from .analysis import fidelity, tangle

    target = bell_projector(0)
    if model.kind == "ideal":
        return target
    if model.kind == "werner":
        if model.fidelity < 0.25:
            raise InfeasibleSourceError(f"Werner fidelity {model.fidelity} below 1/4")
        return werner_state((4 * model.fidelity - 1) / 3, 0)

    f_target, t_target = model.fidelity, model.tangle
    if t_target <= 0:
        raise InfeasibleSourceError("colored family needs a strictly positive tangle")
    # tangle does not depend on chi; it rises monotonically in v above v = 1/3
    v = brentq(lambda v: tangle(colored_source_state(v, 0.0)) - t_target, 1 / 3, 1.0, xtol=1e-15)
    f_hi = fidelity(colored_source_state(v, 0.0), target)
    f_lo = fidelity(colored_source_state(v, np.pi), target)
    if not f_lo - 1e-12 <= f_target <= f_hi + 1e-12:
        raise InfeasibleSourceError(
            f"fidelity {f_target} unreachable at tangle {t_target}: "
            f"family spans [{f_lo:.6f}, {f_hi:.6f}]"
        )
    if f_target >= f_hi:
        chi = 0.0
    else:
        chi = brentq(lambda c: fidelity(colored_source_state(v, c), target) - f_target, 0.0, np.pi, xtol=1e-14)
    return colored_source_state(v, model.phase_sign * chi)


def lcr_source_states(models: SourceModel | Mapping[int, SourceModel]) -> list[np.ndarray]:
    """States emitted for each LCR setting ``mu``: (s_mu (x) I) rho_mu (s_mu (x) I).

    A single model is used for all four settings.
    """
    if isinstance(models, SourceModel):
        models = {mu: models for mu in range(4)}
    out = []
    for mu in range(4):
        if mu not in models:
            raise ValidationError(f"missing source model for Pauli label {mu}")
        u = np.kron(PAULIS[mu], I2)
        out.append(u @ imperfect_source(models[mu]) @ u.conj().T)
    return out


def source_state(p: float, models1, models2) -> np.ndarray:
    """Four-qubit noisy Smolin state prepared from imperfect sources at noise level ``p``."""
    return twirled_state(p, lcr_source_states(models1), lcr_source_states(models2))


# Default phase-error signs per Pauli label. The characterisation table only
# constrains |chi|; this pattern is the one whose p = 0 state is not PPT.
DEFAULT_PHASE_SIGNS = {0: 1, 1: -1, 2: 1, 3: -1}


def fitted_source_models(source: int, phase_signs: Mapping[int, int] | None = None) -> dict[int, SourceModel]:
    """Colored source models fitted to the bundled source-characterisation table.

    Returns ``{mu: SourceModel}`` for ``source`` in {1, 2}.
    """
    if source not in (1, 2):
        raise ValidationError("source must be 1 or 2")
    signs = DEFAULT_PHASE_SIGNS if phase_signs is None else phase_signs
    with resources.files("smolin.data").joinpath("table4_sources.json").open() as fh:
        rows = json.load(fh)["rows"]
    out = {}
    for row in rows:
        mu = LCR_ROW_LABELS[row["ideal_state"]]
        out[mu] = SourceModel(
            kind="colored",
            fidelity=row[f"fidelity_{source}"],
            tangle=row[f"tangle_{source}"],
            phase_sign=int(signs[mu]),
        )
    return out
