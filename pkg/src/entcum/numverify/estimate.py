"""Plug-in cumulant estimates with batch-jackknife standard errors."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from ..combinat import cumulants_from_moments
from .sampling import SampleBatch

MIN_SAMPLES = 1000
MAX_ORDER = 6
DEFAULT_BATCHES = 50


class InsufficientSamples(ValueError):
    pass


@dataclass(frozen=True)
class CumulantEstimates:
    values: tuple[float, ...]  # entry i is order i + 1
    stderr: tuple[float, ...]
    count: int
    batches: int

    def estimate(self, order: int) -> float:
        return self.values[order - 1]

    def error(self, order: int) -> float:
        return self.stderr[order - 1]


def _cumulants_from_sums(total: float, sums: np.ndarray, shift: float, L: int) -> list[float]:
    """Plug-in cumulants from power sums sums[j] = sum (x - shift)^j, j = 0..L."""
    mean_off = sums[1] / total  # sample mean minus shift
    raw = sums[1:] / total  # moments about shift
    central = [0.0]
    for j in range(2, L + 1):
        # moments about the sample mean, by binomial re-centring
        acc = 0.0
        for i in range(j + 1):
            mom = 1.0 if i == 0 else raw[i - 1]
            acc += comb(j, i) * mom * (-mean_off) ** (j - i)
        central.append(acc)
    kappa = cumulants_from_moments(central[:L])
    kappa[0] = shift + mean_off
    return [float(k) for k in kappa]


def estimate_cumulants(batch, L: int, batches: int = DEFAULT_BATCHES) -> CumulantEstimates:
    """Cumulant estimates of orders 1..L; ``batch`` is a SampleBatch or a 1-d array."""
    x = np.asarray(batch.values if isinstance(batch, SampleBatch) else batch, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    if not 1 <= L <= MAX_ORDER:
        raise ValueError(f"order must lie in 1..{MAX_ORDER}, got {L}")
    N = x.size
    if N < MIN_SAMPLES:
        raise InsufficientSamples(f"need at least {MIN_SAMPLES} samples, got {N}")
    if batches < 50:
        raise ValueError("the jackknife needs at least 50 batches")
    if N < batches:
        raise InsufficientSamples(f"{N} samples cannot fill {batches} batches")

    shift = float(np.mean(x))
    d = x - shift
    powers = np.vstack([d**j for j in range(L + 1)])  # (L+1, N)
    edges = np.linspace(0, N, batches + 1).astype(np.int64)
    per_batch = np.add.reduceat(powers, edges[:-1], axis=1)  # (L+1, batches)
    totals = per_batch.sum(axis=1)

    full = _cumulants_from_sums(float(N), totals, shift, L)
    loo = np.empty((batches, L))
    for b in range(batches):
        rest = totals - per_batch[:, b]
        loo[b] = _cumulants_from_sums(float(rest[0]), rest, shift, L)
    spread = loo - loo.mean(axis=0)
    var = (batches - 1) / batches * np.sum(spread * spread, axis=0)
    return CumulantEstimates(tuple(full), tuple(float(v) for v in np.sqrt(var)), N, batches)
