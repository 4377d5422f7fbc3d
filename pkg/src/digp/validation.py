"""Shared argument checking helpers.

Everything here raises ValueError with a readable message; the numerical
modules stay free of ad-hoc shape juggling.
"""

import numpy as np


def as_matrix(A, name="A"):
    A = np.asarray(A, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got ndim={A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains non-finite entries")
    return A


def as_vector(y, length=None, name="y"):
    y = np.asarray(y, dtype=np.float64)
    if y.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got ndim={y.ndim}")
    if length is not None and y.size != length:
        raise ValueError(f"{name} has length {y.size}, expected {length}")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"{name} contains non-finite entries")
    return y


def check_support(support, n, name="support"):
    """Canonicalize a support set: sorted, unique, int64, within [0, n)."""
    if support is None:
        return np.empty(0, dtype=np.int64)
    support = np.asarray(support)
    if support.size == 0:
        return np.empty(0, dtype=np.int64)
    if support.ndim != 1:
        raise ValueError(f"{name} must be 1-d")
    if not np.issubdtype(support.dtype, np.integer):
        rounded = np.rint(support)
        if not np.array_equal(rounded, support):
            raise ValueError(f"{name} must contain integers")
        support = rounded
    support = support.astype(np.int64)
    if support.min() < 0 or support.max() >= n:
        raise ValueError(f"{name} has entries outside [0, {n})")
    out = np.unique(support)
    if out.size != support.size:
        raise ValueError(f"{name} contains duplicate indices")
    return out


def check_count(value, low, high, name="k"):
    value = int(value)
    if not (low <= value <= high):
        raise ValueError(f"{name}={value} outside allowed range [{low}, {high}]")
    return value
