"""Maximum-likelihood state reconstruction from count tables.

:func:`mle_reconstruct` is the iterative R rho R fixed-point scheme of
Jezek, Fiurasek and Hradil. :func:`independent_mle_oracle` maximises the
same likelihood by a completely different route (Cholesky-factor
parameterisation and quasi-Newton ascent) and exists only to cross-check
the first one on two-qubit data.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import NotInformationallyCompleteError, NumericalError, ValidationError
from .tomography import CountTable, analyzer_projector, outcome_ket, outcome_strings

log = logging.getLogger(__name__)


@dataclass
class ReconstructionConfig:
    max_iterations: int = 500
    stop_delta: float = 1e-10
    probability_floor: float = 1e-12
    dilution: float = 0.1

    def __post_init__(self):
        if self.max_iterations < 1 or self.stop_delta <= 0 or self.probability_floor <= 0:
            raise ValidationError("reconstruction limits must be positive")
        if not 0 < self.dilution <= 1:
            raise ValidationError("dilution must lie in (0, 1]")


@dataclass
class MleResult:
    rho: np.ndarray
    iterations: int
    converged: bool
    log_likelihood: list = field(default_factory=list)
    diluted_steps: int = 0


@dataclass
class _Design:
    kets: np.ndarray  # (J, d) outcome kets
    counts: np.ndarray  # (J,)
    dim: int


def _design(tables: Sequence[CountTable]) -> _Design:
    if not tables:
        raise ValidationError("no count tables given")
    n = tables[0].n_qubits
    kets, counts = [], []
    for t in tables:
        if t.n_qubits != n:
            raise ValidationError("count tables mix different qubit numbers")
        if not t.is_complete():
            raise ValidationError(f"table {t.setting} does not list every outcome of its basis")
        for o in outcome_strings(t.setting):
            kets.append(outcome_ket(o))
            counts.append(float(t.counts[o]))
    counts = np.array(counts)
    if counts.sum() <= 0:
        raise NumericalError("all counts are zero")
    return _Design(np.array(kets), counts, 2**n)


@lru_cache(maxsize=64)
def _span_rank(outcomes: tuple[str, ...]) -> int:
    kets = np.array([outcome_ket(o) for o in outcomes])
    projs = np.einsum("ki,kj->kij", kets, kets.conj()).reshape(len(kets), -1)
    return int(np.linalg.matrix_rank(projs, tol=1e-9))


def check_informationally_complete(tables: Sequence[CountTable]) -> None:
    """Raise unless the measured projectors span all d x d Hermitian operators."""
    design = _design(tables)
    # Monte-Carlo resamples share the layout, so the rank is cached on it
    outcomes = tuple(o for t in tables for o in outcome_strings(t.setting))
    rank = _span_rank(outcomes)
    if rank < design.dim**2:
        raise NotInformationallyCompleteError(
            f"measurement projectors span {rank} of {design.dim**2} operator dimensions"
        )


def _probs(kets: np.ndarray, rho: np.ndarray, kets_conj: np.ndarray | None = None) -> np.ndarray:
    if kets_conj is None:
        kets_conj = kets.conj()
    return np.einsum("ki,ki->k", kets_conj @ rho, kets).real


def _loglik(counts, probs, floor) -> float:
    return float(counts @ np.log(np.maximum(probs, floor)))


def _normalize(m: np.ndarray) -> np.ndarray:
    m = (m + m.conj().T) / 2
    return m / np.trace(m).real


def mle_reconstruct(tables: Sequence[CountTable], config: ReconstructionConfig | None = None, full_output: bool = False):
    """Iterative maximum-likelihood density matrix.

    Each table is one multinomial block whose outcome projectors sum to the
    identity; its frequencies are ``f_j = c_j / N_block`` and blocks are
    weighted by ``N_block / N``, so that

        R(rho) = sum_j (N_block / N) f_j / Tr(rho Pi_j) Pi_j

    and the iteration is ``rho <- R rho R / Tr(R rho R)`` from the maximally
    mixed state. A step that lowers the log-likelihood is replaced by the
    diluted update ``(I + eps R) rho (I + eps R)`` with ``eps`` halved until
    the likelihood does not decrease. Stops when the per-count log-likelihood
    changes by less than ``stop_delta`` or after ``max_iterations``.

    Returns the density matrix, or an :class:`MleResult` with ``full_output``.
    """
    cfg = config or ReconstructionConfig()
    check_informationally_complete(tables)
    design = _design(tables)
    kets, counts, dim = design.kets, design.counts, design.dim
    kc = kets.conj()
    kt = kets.T.copy()
    total = counts.sum()
    weights = counts / total
    floor = cfg.probability_floor
    eye = np.eye(dim)

    rho = eye / dim
    p = _probs(kets, rho, kc)
    ll = _loglik(weights, p, floor)
    history = [ll]
    converged = False
    diluted = 0
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        r_op = (kt * (weights / np.maximum(p, floor))) @ kc
        new = _normalize(r_op @ rho @ r_op)
        new_p = _probs(kets, new, kc)
        new_ll = _loglik(weights, new_p, floor)
        if new_ll < ll:
            eps = cfg.dilution
            while True:
                g = eye + eps * r_op
                new = _normalize(g @ rho @ g)
                new_p = _probs(kets, new, kc)
                new_ll = _loglik(weights, new_p, floor)
                if new_ll >= ll or eps < 1e-12:
                    break
                eps /= 2
            diluted += 1
            if new_ll < ll:
                # no ascent direction left at numerical precision
                converged = True
                break
        delta = new_ll - ll
        rho, p, ll = new, new_p, new_ll
        history.append(ll)
        if delta < cfg.stop_delta:
            converged = True
            break
    log.debug("MLE stopped after %d iterations (converged=%s, diluted=%d)", it, converged, diluted)
    if full_output:
        return MleResult(rho, it, converged, history, diluted)
    return rho


def log_likelihood(tables: Sequence[CountTable], rho: np.ndarray, floor: float = 1e-12) -> float:
    """Per-count multinomial log-likelihood sum_j (c_j / N) log Tr(rho Pi_j)."""
    design = _design(tables)
    return _loglik(design.counts / design.counts.sum(), _probs(design.kets, rho), floor)


# --- independent oracle ---------------------------------------------------------


def _cholesky_state(params: np.ndarray, dim: int) -> np.ndarray:
    t = np.zeros((dim, dim), dtype=complex)
    t[np.diag_indices(dim)] = params[:dim]
    rows, cols = np.tril_indices(dim, -1)
    k = len(rows)
    t[rows, cols] = params[dim : dim + k] + 1j * params[dim + k :]
    rho = t.conj().T @ t
    return rho / np.trace(rho).real


def independent_mle_oracle(tables: Sequence[CountTable], budget: int = 20000) -> np.ndarray:
    """Likelihood maximiser over rho = T^H T / Tr(T^H T), T lower triangular.

    Two-qubit data only (16 real parameters). Projectors are rebuilt here
    from single-qubit analyzer projectors and the optimiser is BFGS on
    finite-difference gradients, so nothing is shared with
    :func:`mle_reconstruct` beyond the count tables.
    """
    if not tables:
        raise ValidationError("no count tables given")
    n = tables[0].n_qubits
    dim = 2**n
    if dim > 4:
        raise ValidationError("the oracle is limited to two qubits")
    projs, counts = [], []
    for t in tables:
        for o, c in t.counts.items():
            p = analyzer_projector(o[0])
            for lab in o[1:]:
                p = np.kron(p, analyzer_projector(lab))
            projs.append(p)
            counts.append(float(c))
    projs = np.array(projs)
    counts = np.array(counts)
    flat = projs.reshape(len(projs), -1)
    if np.linalg.matrix_rank(flat, tol=1e-9) < dim * dim:
        raise NotInformationallyCompleteError("oracle input is not informationally complete")
    if counts.sum() <= 0:
        raise NumericalError("all counts are zero")

    # per block normalisation: each table's outcome probabilities sum to one
    def neg_ll(x):
        rho = _cholesky_state(x, dim)
        pr = np.real(np.einsum("kij,ji->k", projs, rho))
        return -float(counts @ np.log(np.maximum(pr, 1e-300))) / counts.sum()

    x0 = np.concatenate([np.ones(dim), np.zeros(dim * (dim - 1))])
    res = minimize(neg_ll, x0, method="BFGS", options={"maxiter": budget, "gtol": 1e-10})
    # polish from the optimum; BFGS on FD gradients can stall early
    res = minimize(neg_ll, res.x, method="Nelder-Mead", options={"maxiter": budget, "xatol": 1e-10, "fatol": 1e-14})
    return _cholesky_state(res.x, dim)
