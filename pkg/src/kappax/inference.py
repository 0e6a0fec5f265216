"""Cluster-bootstrap confidence intervals for the generalized kappa.

Subjects are resampled with replacement; raters and categories stay fixed.
Replicate ``b`` draws from its own generator seeded with ``(seed, b)``, so
results do not depend on how replicates are scheduled across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .data import ClassificationTensor
from .errors import AllReplicatesDegenerate, KappaxError, TooFewReplicates
from .hierarchy import AvailabilityRule
from .kappa import generalized_kappa

MIN_REPLICATES = 100


@dataclass(frozen=True)
class BootstrapConfig:
    replicates: int = 1000
    seed: int = 0
    confidence: float = 0.95

    def __post_init__(self):
        if self.replicates < MIN_REPLICATES:
            raise TooFewReplicates(f"need at least {MIN_REPLICATES} replicates, got {self.replicates}")
        if not 0 <= self.seed < 2**64:
            raise KappaxError("seed must be a 64-bit unsigned integer")
        if not 0 < self.confidence < 1:
            raise KappaxError("confidence must lie in (0, 1)")


@dataclass(frozen=True)
class BootstrapResult:
    point: float
    lower: float
    upper: float
    replicates_used: int
    replicates_degenerate: int


def _replicate(tensor, rules, weights, seed, b) -> float:
    rng = np.random.default_rng([seed, b])
    idx = rng.integers(0, len(tensor.subjects), size=len(tensor.subjects))
    try:
        return generalized_kappa(tensor.take_subjects(idx), rules, weights).overall
    except KappaxError:
        # a resample can lose every informative subject
        return math.nan


def bootstrap_ci(tensor: ClassificationTensor, config: BootstrapConfig,
                 rules: Sequence[AvailabilityRule] | None = None, weights=None,
                 workers: int = 1) -> BootstrapResult:
    """Percentile interval from ``config.replicates`` subject resamples.

    The hierarchy's availability counts are recomputed on every resample.
    Resamples whose kappa is undefined are counted and left out.
    """
    point = generalized_kappa(tensor, rules, weights).overall
    reps = range(config.replicates)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            values = list(pool.map(lambda b: _replicate(tensor, rules, weights, config.seed, b), reps))
    else:
        values = [_replicate(tensor, rules, weights, config.seed, b) for b in reps]
    values = np.array(values)
    ok = values[~np.isnan(values)]
    if ok.size == 0:
        raise AllReplicatesDegenerate("kappa was undefined in every bootstrap resample")
    alpha = 1 - config.confidence
    lower, upper = np.quantile(ok, [alpha / 2, 1 - alpha / 2])
    return BootstrapResult(point, float(lower), float(upper), int(ok.size), int(values.size - ok.size))
