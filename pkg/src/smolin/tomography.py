"""Polarisation measurement model and count tables.

Analyzer labels are ``H V P M R L`` (``P``/``M`` stand for +/-). A
measurement *setting* assigns one label per qubit and, because both PBS
outputs are monitored, yields all ``2**n`` outcomes of the corresponding
basis pair. Setting ``HHHH`` and ``VVVV`` therefore measure the same
projectors with transmitted and reflected ports swapped; summing them
(:func:`combine_complementary`) cancels unequal port efficiencies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import ValidationError
from .linalg import n_qubits

LABELS = "HVPMRL"
BASIS_OF = {"H": "H", "V": "H", "P": "P", "M": "P", "R": "R", "L": "R"}
PAIR_OF = {"H": "HV", "P": "PM", "R": "RL"}
SIGN_OF = {"H": 1, "V": -1, "P": 1, "M": -1, "R": 1, "L": -1}
# which Pauli a basis measures
PAULI_OF_BASIS = {"H": 3, "P": 1, "R": 2}

_S = 1 / np.sqrt(2)
_KETS = {
    "H": np.array([1, 0], dtype=complex),
    "V": np.array([0, 1], dtype=complex),
    "P": np.array([_S, _S], dtype=complex),
    "M": np.array([_S, -_S], dtype=complex),
    "R": np.array([_S, 1j * _S], dtype=complex),
    "L": np.array([_S, -1j * _S], dtype=complex),
}


def check_labels(s: str, n: Optional[int] = None) -> str:
    s = str(s).upper().replace("+", "P").replace("-", "M")
    bad = [c for c in s if c not in LABELS]
    if bad or not s:
        raise ValidationError(f"invalid analyzer string {s!r}; labels are {LABELS}")
    if n is not None and len(s) != n:
        raise ValidationError(f"{s!r} has {len(s)} labels, expected {n}")
    return s


def analyzer_ket(label: str) -> np.ndarray:
    if len(str(label)) != 1:
        raise ValidationError(f"expected a single analyzer label, got {label!r}")
    return _KETS[check_labels(label)].copy()


def analyzer_projector(label: str) -> np.ndarray:
    k = analyzer_ket(label)
    return np.outer(k, k.conj())


@lru_cache(maxsize=None)
def outcome_ket(outcome: str) -> np.ndarray:
    ket = np.ones(1, dtype=complex)
    for c in outcome:
        ket = np.kron(ket, _KETS[c])
    ket.setflags(write=False)
    return ket


def basis_of(setting: str) -> str:
    """Canonical basis label string (``H``, ``P`` or ``R`` per qubit)."""
    return "".join(BASIS_OF[c] for c in check_labels(setting))


def outcome_strings(setting: str) -> list[str]:
    """All outcomes of the basis pairs of ``setting``, in lexicographic H<V, P<M, R<L order."""
    return ["".join(t) for t in itertools.product(*(PAIR_OF[b] for b in basis_of(setting)))]


def setting_outcomes(setting: str) -> list[tuple[str, np.ndarray]]:
    """``(outcome, projector)`` for every outcome of a setting; projectors sum to identity."""
    out = []
    for o in outcome_strings(setting):
        k = outcome_ket(o)
        out.append((o, np.outer(k, k.conj())))
    return out


def basis_settings(n: int) -> list[str]:
    """The ``3**n`` canonical basis settings (Z, X, Y per qubit)."""
    return ["".join(t) for t in itertools.product("HPR", repeat=n)]


def overcomplete_settings(n: int) -> list[str]:
    """All ``6**n`` analyzer settings."""
    return ["".join(t) for t in itertools.product(LABELS, repeat=n)]


def witness_settings() -> list[str]:
    """The three four-qubit settings needed for the witness: ZZZZ, XXXX, YYYY."""
    return ["HHHH", "PPPP", "RRRR"]


@dataclass
class CountTable:
    """Coincidence counts for one measurement setting.

    ``counts`` maps outcome strings to non-negative counts. Counts are
    integers for measured or sampled data; expected-value tables may hold
    floats. ``duration`` is the integration time in seconds, if known.
    """

    setting: str
    counts: dict = field(default_factory=dict)
    duration: Optional[float] = None

    def __post_init__(self):
        self.setting = check_labels(self.setting)
        n = len(self.setting)
        allowed = set(outcome_strings(self.setting))
        clean = {}
        for o, c in self.counts.items():
            o = check_labels(o, n)
            if o not in allowed:
                raise ValidationError(f"outcome {o} is not in the basis of setting {self.setting}")
            if c < 0 or not np.isfinite(c):
                raise ValidationError(f"count for {o} must be a finite non-negative number, got {c}")
            clean[o] = c
        self.counts = clean

    @property
    def n_qubits(self) -> int:
        return len(self.setting)

    @property
    def basis(self) -> str:
        return basis_of(self.setting)

    @property
    def total(self) -> float:
        return sum(self.counts.values())

    def is_complete(self) -> bool:
        return set(self.counts) == set(outcome_strings(self.setting))

    def vector(self) -> np.ndarray:
        """Counts in :func:`outcome_strings` order (missing outcomes are zero)."""
        return np.array([self.counts.get(o, 0) for o in outcome_strings(self.setting)], dtype=float)

    def with_counts(self, values: Sequence[float]) -> "CountTable":
        outs = outcome_strings(self.setting)
        if len(values) != len(outs):
            raise ValidationError("wrong number of counts for this setting")
        return CountTable(self.setting, dict(zip(outs, values)), self.duration)


def outcome_probabilities(rho: np.ndarray, setting: str) -> np.ndarray:
    """Born probabilities in :func:`outcome_strings` order."""
    setting = check_labels(setting, n_qubits(rho))
    kets = np.array([outcome_ket(o) for o in outcome_strings(setting)])
    p = np.real(np.einsum("ki,ij,kj->k", kets.conj(), rho, kets))
    return np.clip(p, 0, None)


def _port_efficiency(setting: str, outcome: str, efficiencies) -> float:
    eta_t, eta_r = efficiencies
    eff = 1.0
    for s, o in zip(setting, outcome):
        eff *= eta_t if s == o else eta_r
    return eff


def expected_counts(
    rho: np.ndarray,
    settings: Iterable[str],
    mean_total_per_setting: float,
    efficiencies: tuple[float, float] = (1.0, 1.0),
) -> list[CountTable]:
    """Noise-free mean counts ``N * Tr(rho Pi) * efficiency`` for each setting.

    ``efficiencies`` are the (transmitted, reflected) port detection
    efficiencies; the label in the setting is the transmitted one.
    """
    if mean_total_per_setting <= 0:
        raise ValidationError("mean_total_per_setting must be positive")
    tables = []
    for s in settings:
        s = check_labels(s, n_qubits(rho))
        probs = outcome_probabilities(rho, s)
        means = {
            o: mean_total_per_setting * pr * _port_efficiency(s, o, efficiencies)
            for o, pr in zip(outcome_strings(s), probs)
        }
        tables.append(CountTable(s, means))
    return tables


def simulate_counts(
    rho: np.ndarray,
    settings: Iterable[str],
    mean_total_per_setting: float,
    rng: np.random.Generator,
    efficiencies: tuple[float, float] = (1.0, 1.0),
) -> list[CountTable]:
    """Independent Poisson counts with the means of :func:`expected_counts`.

    Per-event twirl labels drawn iid from a Poisson number of events thin
    into independent Poisson counts, so sampling from the ensemble state is
    exact for the twirled source.
    """
    rng = np.random.default_rng(rng)
    out = []
    for t in expected_counts(rho, settings, mean_total_per_setting, efficiencies):
        lam = t.vector()
        out.append(t.with_counts([int(c) for c in rng.poisson(lam)]))
    return out


def resample_poisson(tables: Sequence[CountTable], rng: np.random.Generator) -> list[CountTable]:
    """Replace every count ``c`` by a draw from Poisson(c)."""
    return [t.with_counts([int(c) for c in rng.poisson(t.vector())]) for t in tables]


def pauli_expectation_from_counts(table: CountTable) -> tuple[float, float]:
    """Parity estimate of the Pauli product measured by ``table``, with Poisson error.

    value = sum_o s(o) c_o / sum_o c_o, where s(o) is -1 to the number of
    V/M/L labels in ``o``. The error propagates independent Poisson
    fluctuations of each count through the ratio.
    """
    if not table.is_complete():
        raise ValidationError(f"table for {table.setting} does not cover every outcome of its basis")
    outs = outcome_strings(table.setting)
    c = table.vector()
    total = c.sum()
    if total <= 0:
        raise ValidationError(f"table for {table.setting} has zero total counts")
    s = np.array([np.prod([SIGN_OF[x] for x in o]) for o in outs], dtype=float)
    value = float(s @ c / total)
    sigma = float(np.sqrt(np.sum((s - value) ** 2 * c)) / total)
    return value, sigma


def witness_from_counts(z_table: CountTable, x_table: CountTable, y_table: CountTable) -> tuple[float, float]:
    """Direct witness estimate 1 - <ZZZZ> - <XXXX> - <YYYY> from the three parity tables."""
    for t, b in ((z_table, "HHHH"), (x_table, "PPPP"), (y_table, "RRRR")):
        if t.basis != b:
            raise ValidationError(f"expected a {b}-basis table, got setting {t.setting}")
    vals = [pauli_expectation_from_counts(t) for t in (z_table, x_table, y_table)]
    value = 1.0 - sum(v for v, _ in vals)
    sigma = float(np.sqrt(sum(s**2 for _, s in vals)))
    return value, sigma


def find_witness_tables(tables: Sequence[CountTable]) -> Optional[tuple[CountTable, CountTable, CountTable]]:
    """Pick (combined) Z, X, Y four-qubit parity tables out of a table set, or None."""
    combined = {t.basis: t for t in combine_all(tables)}
    try:
        return combined["HHHH"], combined["PPPP"], combined["RRRR"]
    except KeyError:
        return None


def combine_complementary(table_a: CountTable, table_b: CountTable) -> CountTable:
    """Add two tables of the same basis taken with (some) port roles swapped.

    Outcomes are stored under their physical analyzer labels, so the role
    swap only changes which port recorded each outcome and the combination
    is an outcome-wise sum. The result is labelled with the canonical basis.
    """
    if table_a.n_qubits != table_b.n_qubits or table_a.basis != table_b.basis:
        raise ValidationError(f"settings {table_a.setting} and {table_b.setting} are not complementary")
    counts = dict(table_a.counts)
    for o, c in table_b.counts.items():
        counts[o] = counts.get(o, 0) + c
    duration = None
    if table_a.duration is not None and table_b.duration is not None:
        duration = table_a.duration + table_b.duration
    return CountTable(table_a.basis, counts, duration)


def combine_all(tables: Sequence[CountTable]) -> list[CountTable]:
    """Merge every group of tables sharing a basis; order follows first appearance."""
    merged: dict[str, CountTable] = {}
    for t in tables:
        if t.basis in merged:
            merged[t.basis] = combine_complementary(merged[t.basis], t)
        else:
            merged[t.basis] = CountTable(t.basis, dict(t.counts), t.duration)
    return list(merged.values())


def tables_from_mapping(data: Mapping[str, Mapping[str, float]]) -> list[CountTable]:
    return [CountTable(s, dict(c)) for s, c in data.items()]
