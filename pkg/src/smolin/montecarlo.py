"""Monte-Carlo error propagation by Poisson resampling of count tables."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from . import analysis
from .errors import ValidationError
from .mle import ReconstructionConfig, mle_reconstruct
from .tomography import CountTable, find_witness_tables, resample_poisson, witness_from_counts

# statistics evaluated on the reconstructed state
_STATE_STATISTICS: dict[str, Callable] = {
    "witness": lambda rho, target: analysis.witness_expectation(rho),
    "min_pt_eig": lambda rho, target: analysis.min_pt_eigenvalue(rho)[0],
    "fidelity": lambda rho, target: analysis.fidelity(rho, target),
    "tangle": lambda rho, target: analysis.tangle(rho),
    "trace": lambda rho, target: float(np.trace(rho).real),
}
# statistics evaluated directly on the counts
_COUNT_STATISTICS = ("witness_sum",)
STATISTICS = tuple(_STATE_STATISTICS) + _COUNT_STATISTICS


@dataclass
class McConfig:
    iterations: int = 500
    seed: Optional[int] = None
    workers: int = 1

    def __post_init__(self):
        if self.iterations < 1:
            raise ValidationError("Monte-Carlo iterations must be >= 1")
        if self.workers < 1:
            raise ValidationError("workers must be >= 1")


@dataclass
class McResult:
    statistic: str
    mean: float
    std: float
    samples: np.ndarray = field(repr=False)
    bin_edges: np.ndarray = field(repr=False)
    hist: np.ndarray = field(repr=False)

    def fraction(self, predicate) -> float:
        return float(np.mean(predicate(self.samples)))

    def to_dict(self, include_samples: bool = False) -> dict:
        d = {
            "statistic": self.statistic,
            "mean": self.mean,
            "std": self.std,
            "iterations": int(self.samples.size),
            "histogram": {"bin_edges": self.bin_edges.tolist(), "counts": self.hist.tolist()},
        }
        if include_samples:
            d["samples"] = self.samples.tolist()
        return d


def histogram(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Freedman-Diaconis binning; a constant sample gets one unit-width bin."""
    samples = np.asarray(samples, dtype=float)
    if np.ptp(samples) == 0:
        edges = np.array([samples[0] - 0.5, samples[0] + 0.5])
    else:
        edges = np.histogram_bin_edges(samples, bins="fd")
    hist, edges = np.histogram(samples, bins=edges)
    return edges, hist


def _evaluate(tables, statistics, target, recon_config) -> list[float]:
    rho = None
    out = []
    for name in statistics:
        if name == "witness_sum":
            found = find_witness_tables(tables)
            if found is None:
                raise ValidationError("witness_sum needs HHHH, PPPP and RRRR tables")
            out.append(witness_from_counts(*found)[0])
            continue
        if rho is None:
            rho = mle_reconstruct(tables, recon_config)
        out.append(float(_STATE_STATISTICS[name](rho, target)))
    return out


def monte_carlo(
    tables: Sequence[CountTable],
    statistics: Sequence[str],
    config: McConfig | None = None,
    target: Optional[np.ndarray] = None,
    recon_config: ReconstructionConfig | None = None,
) -> dict[str, McResult]:
    """Resample every count from Poisson(c) and recompute each statistic.

    One reconstruction per iteration is shared by all state-based
    statistics. Iteration ``k`` draws from its own child of the seed
    sequence and results are collected in iteration order, so a fixed seed
    gives identical output for any number of workers.
    """
    cfg = config or McConfig()
    statistics = list(statistics)
    for name in statistics:
        if name not in STATISTICS:
            raise ValidationError(f"unknown statistic {name!r}; choose from {STATISTICS}")
        if name == "fidelity" and target is None:
            raise ValidationError("fidelity statistic needs a target state")
    children = np.random.SeedSequence(cfg.seed).spawn(cfg.iterations)

    def one(child):
        return _evaluate(resample_poisson(tables, np.random.default_rng(child)), statistics, target, recon_config)

    if cfg.workers == 1:
        rows = [one(c) for c in children]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(one, children))
    data = np.array(rows, dtype=float).reshape(cfg.iterations, len(statistics))

    results = {}
    for j, name in enumerate(statistics):
        col = data[:, j]
        edges, hist = histogram(col)
        std = float(np.std(col, ddof=1)) if col.size > 1 else 0.0
        results[name] = McResult(name, float(np.mean(col)), std, col, edges, hist)
    return results


def monte_carlo_errors(
    tables: Sequence[CountTable],
    statistic: str,
    config: McConfig | None = None,
    target: Optional[np.ndarray] = None,
    recon_config: ReconstructionConfig | None = None,
) -> McResult:
    """Single-statistic form of :func:`monte_carlo`."""
    return monte_carlo(tables, [statistic], config, target, recon_config)[statistic]
