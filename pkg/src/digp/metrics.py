"""Recovery quality metrics and an iteration-bound diagnostic.

SRER pools signal and error energy over every (node, realization) pair
before taking the ratio; ASCE averages per-pair support miss fractions.
Both feed from MetricsAccumulator so parallel workers can be merged.
"""

import itertools
import math
from dataclasses import dataclass

import numpy as np


@dataclass
class MetricsAccumulator:
    """Running sums for pooled SRER and averaged support distortion."""

    sum_signal_energy: float = 0.0
    sum_error_energy: float = 0.0
    sum_distortion: float = 0.0
    count: int = 0

    def add(self, x_true, x_hat, true_support, estimated_support):
        """Account one recovered signal against its ground truth."""
        x_true = np.asarray(x_true, dtype=np.float64)
        x_hat = np.asarray(x_hat, dtype=np.float64)
        true_support = np.asarray(true_support, dtype=np.int64)
        estimated_support = np.asarray(estimated_support, dtype=np.int64)
        if true_support.size == 0:
            raise ValueError("true support must be nonempty")
        self.sum_signal_energy += float(x_true @ x_true)
        err = x_true - x_hat
        self.sum_error_energy += float(err @ err)
        hits = np.intersect1d(true_support, estimated_support).size
        self.sum_distortion += 1.0 - hits / true_support.size
        self.count += 1

    def merge(self, other):
        """Pure combination of two accumulators (parallel reduction)."""
        out = MetricsAccumulator(
            self.sum_signal_energy + other.sum_signal_energy,
            self.sum_error_energy + other.sum_error_energy,
            self.sum_distortion + other.sum_distortion,
            self.count + other.count,
        )
        return out

    @property
    def mean_distortion(self):
        if self.count == 0:
            raise ValueError("no pairs accumulated")
        return self.sum_distortion / self.count


def srer(accumulator):
    """Signal-to-reconstruction-error ratio, pooled over all pairs.

    Returns ``(linear, db)``; exact recovery (zero pooled error) reports
    the infinity sentinel in both.
    """
    if accumulator.count == 0:
        raise ValueError("no pairs accumulated")
    if accumulator.sum_error_energy == 0.0:
        return math.inf, math.inf
    linear = accumulator.sum_signal_energy / accumulator.sum_error_energy
    return linear, 10.0 * math.log10(linear)


def asce(pairs):
    """Average support-set cardinality error: mean of 1 - |T ∩ T̂| / |T|."""
    total = 0.0
    n_pairs = 0
    for true_support, estimated_support in pairs:
        true_support = np.asarray(true_support, dtype=np.int64)
        estimated_support = np.asarray(estimated_support, dtype=np.int64)
        if true_support.size == 0:
            raise ValueError("true support must be nonempty")
        hits = np.intersect1d(true_support, estimated_support).size
        total += 1.0 - hits / true_support.size
        n_pairs += 1
    if n_pairs == 0:
        raise ValueError("no pairs given")
    return total / n_pairs


def modsp_iteration_bound(x, initial_support, A, w, k):
    """Worst-case iteration count diagnostic for seeded subspace pursuit.

    Evaluates ceil(log2(||x off the seed|| / max_T ||A_T^T w||)) where the
    max runs over all k-subsets of columns by exhaustive search — small
    instances only. Returns 0 when the seed already covers the signal (or
    the log is nonpositive) and an infinity sentinel for noiseless w. A
    diagnostic, not a guarantee: the isometry hypothesis behind it is not
    checked here.
    """
    x = np.asarray(x, dtype=np.float64)
    A = np.asarray(A, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    initial_support = np.asarray(initial_support, dtype=np.int64)
    masked = x.copy()
    if initial_support.size:
        masked[initial_support] = 0.0
    numerator = float(np.linalg.norm(masked))
    if numerator == 0.0:
        return 0
    if not np.any(w):
        return math.inf
    best = 0.0
    for combo in itertools.combinations(range(A.shape[1]), int(k)):
        best = max(best, float(np.linalg.norm(A[:, combo].T @ w)))
    ratio = numerator / best
    return max(0, math.ceil(math.log2(ratio)))
