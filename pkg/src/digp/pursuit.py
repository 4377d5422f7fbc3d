"""Greedy pursuit primitives and the three local sparse solvers.

The primitives (residual projection, amplitude selection, least squares on a
support) are shared by everything else in the package. On top of them sit
mod_omp and mod_sp -- orthogonal matching pursuit and subspace pursuit, each
generalized to start from a caller-supplied partial support -- and frogs, a
forward-reverse greedy search that climbs through support cardinalities and
backtracks whenever shrinking a support improves the fit at the smaller size.

All supports are 0-based, sorted, duplicate-free int64 arrays.
"""

from dataclasses import dataclass

import numpy as np

from .validation import as_matrix, as_vector, check_support

# Cutoff for np.linalg.lstsq; keeps rank-deficient subproblems on the
# minimum-norm solution instead of blowing up.
LSTSQ_RCOND = 1e-10


@dataclass
class PursuitResult:
    """Outcome of one local solve.

    support        sorted int64 indices of the selected columns
    estimate       full-length coefficient vector, zero off the support
    residual_norm  l2 norm of y - A @ estimate
    n_iterations   solver-specific iteration count (greedy steps for
                   mod_omp, expand/prune rounds for mod_sp, forward-probe
                   passes for frogs)
    """

    support: np.ndarray
    estimate: np.ndarray
    residual_norm: float
    n_iterations: int


def resid(y, B):
    """Residual of y after least-squares projection onto the columns of B."""
    y = as_vector(y)
    B = as_matrix(B, name="B")
    if B.shape[0] != y.size:
        raise ValueError(f"B has {B.shape[0]} rows, y has length {y.size}")
    if B.shape[1] > B.shape[0]:
        raise ValueError("B has more columns than rows")
    if B.shape[1] == 0:
        return y.copy()
    coef, *_ = np.linalg.lstsq(B, y, rcond=LSTSQ_RCOND)
    return y - B @ coef


def max_indices(x, k):
    """Indices of the k largest-amplitude entries of x, sorted ascending.

    Ties break toward the lowest index.
    """
    x = as_vector(x, name="x")
    k = int(k)
    if k < 0 or k > x.size:
        raise ValueError(f"k={k} outside [0, {x.size}]")
    if k == 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-np.abs(x), kind="stable")[:k]
    return np.sort(order).astype(np.int64)


def supp_accumulate(scores, support):
    """Return a copy of the score vector with +1 at every support index."""
    scores = np.asarray(scores)
    support = check_support(support, scores.size)
    out = scores.copy()
    out[support] += 1
    return out


def least_squares_on_support(A, y, support):
    """Full-length coefficient vector fitted on the given columns only."""
    A = as_matrix(A)
    y = as_vector(y, length=A.shape[0])
    support = check_support(support, A.shape[1])
    if support.size > A.shape[0]:
        raise ValueError(
            f"support of size {support.size} exceeds {A.shape[0]} measurements"
        )
    x = np.zeros(A.shape[1])
    if support.size:
        coef, *_ = np.linalg.lstsq(A[:, support], y, rcond=LSTSQ_RCOND)
        x[support] = coef
    return x


def _masked_argmax(A, r, support):
    """Best matched-filter index outside the current support.

    Restricting the argmax keeps the support growing by exactly one per
    step even when the residual is numerically zero.
    """
    mag = np.abs(A.T @ r)
    mag[support] = -1.0
    return int(np.argmax(mag))


def mod_omp(A, k_max, y, initial_support=None):
    """Orthogonal matching pursuit warm-started from a partial support.

    Grows the support one matched-filter maximum at a time until it holds
    exactly ``k_max`` indices, then reports the least-squares fit on it.

    Parameters
    ----------
    A : (M, N) array
        Sensing matrix.
    k_max : int
        Target support size, at most M.
    y : (M,) array
        Measurement vector.
    initial_support : array of int, optional
        Indices assumed active before the first greedy step. They are never
        removed.

    Returns
    -------
    PursuitResult
        ``n_iterations`` equals ``k_max - len(initial_support)``.
    """
    A = as_matrix(A)
    m, n = A.shape
    y = as_vector(y, length=m)
    support = check_support(initial_support, n, name="initial_support")
    k_max = int(k_max)
    if k_max < 0 or k_max > m:
        raise ValueError(f"k_max={k_max} outside [0, {m}]")
    if k_max > n:
        raise ValueError(f"k_max={k_max} exceeds the dictionary size {n}")
    if support.size > k_max:
        raise ValueError(
            f"initial support of size {support.size} exceeds k_max={k_max}"
        )

    r = y - A[:, support] @ np.linalg.lstsq(A[:, support], y, rcond=LSTSQ_RCOND)[0] \
        if support.size else y.copy()
    n_iter = 0
    while support.size < k_max:
        tau = _masked_argmax(A, r, support)
        support = np.sort(np.append(support, tau))
        coef, *_ = np.linalg.lstsq(A[:, support], y, rcond=LSTSQ_RCOND)
        r = y - A[:, support] @ coef
        n_iter += 1

    estimate = least_squares_on_support(A, y, support)
    return PursuitResult(support, estimate, float(np.linalg.norm(y - A @ estimate)), n_iter)


def _truncate_candidate(candidate, matched_filter, m):
    """Cap an expand-step candidate set at m indices.

    Keeps the m entries with the largest matched-filter amplitude from the
    current step, ties toward the lowest index.
    """
    if candidate.size <= m:
        return candidate
    scores = np.abs(matched_filter[candidate])
    order = np.argsort(-scores, kind="stable")[:m]
    return np.sort(candidate[order])


def mod_sp(A, k_max, y, initial_support=None, trace=None):
    """Subspace pursuit warm-started from a partial support.

    Each round expands the working support with the ``k_max`` strongest
    matched-filter indices, refits, prunes back to the ``k_max`` largest
    coefficients, and stops as soon as the residual norm fails to decrease
    strictly; the previous (best) iterate is reported.

    Parameters
    ----------
    A : (M, N) array
        Sensing matrix.
    k_max : int
        Support size of every iterate, at most M.
    y : (M,) array
        Measurement vector.
    initial_support : array of int, optional
        Extra indices unioned into the first expand step.
    trace : list, optional
        If given, one dict per round is appended with the candidate
        residual norm, for diagnostics.

    Returns
    -------
    PursuitResult
        ``n_iterations`` counts executed rounds including the final
        rejected one. A hard cap of 100 rounds guards against limit
        cycles; the best iterate so far is returned if it triggers.
    """
    A = as_matrix(A)
    m, n = A.shape
    y = as_vector(y, length=m)
    seed = check_support(initial_support, n, name="initial_support")
    k_max = int(k_max)
    if k_max < 0 or k_max > m:
        raise ValueError(f"k_max={k_max} outside [0, {m}]")
    if k_max > n:
        raise ValueError(f"k_max={k_max} exceeds the dictionary size {n}")
    if seed.size > k_max:
        raise ValueError(f"initial support of size {seed.size} exceeds k_max={k_max}")
    if k_max == 0:
        return PursuitResult(np.empty(0, dtype=np.int64), np.zeros(n),
                             float(np.linalg.norm(y)), 0)

    mf = A.T @ y
    candidate = _truncate_candidate(np.union1d(max_indices(mf, k_max), seed), mf, m)
    x_hat = least_squares_on_support(A, y, candidate)
    support = max_indices(x_hat, k_max)
    r = resid(y, A[:, support])
    best_norm = float(np.linalg.norm(r))

    n_iter = 0
    for n_iter in range(1, 101):
        mf = A.T @ r
        candidate = _truncate_candidate(np.union1d(max_indices(mf, k_max), support), mf, m)
        x_hat = least_squares_on_support(A, y, candidate)
        new_support = max_indices(x_hat, k_max)
        new_r = resid(y, A[:, new_support])
        new_norm = float(np.linalg.norm(new_r))
        if trace is not None:
            trace.append({"round": n_iter, "residual_norm": new_norm})
        if new_norm >= best_norm:
            break
        support, r, best_norm = new_support, new_r, new_norm

    estimate = least_squares_on_support(A, y, support)
    return PursuitResult(support, estimate, best_norm, n_iter)


def forward_add(A, y, r_current, support):
    """One forward step: add the strongest unused index, refit the residual.

    Returns ``(r_next, support_next)`` where the new support has exactly one
    more index than the old one.
    """
    A = as_matrix(A)
    m, n = A.shape
    y = as_vector(y, length=m)
    r_current = as_vector(r_current, length=m, name="r_current")
    support = check_support(support, n)
    if support.size >= m:
        raise ValueError("support already uses every measurement degree of freedom")
    tau = _masked_argmax(A, r_current, support)
    support_next = np.sort(np.append(support, tau))
    r_next = resid(y, A[:, support_next])
    return r_next, support_next


def reverse_fetch(A, y, support_plus, k):
    """One reverse step: refit on ``support_plus`` and keep the k strongest.

    ``support_plus`` must hold exactly ``k + 1`` indices; the returned
    support is its subset of the ``k`` largest refitted coefficients.
    """
    A = as_matrix(A)
    m, n = A.shape
    y = as_vector(y, length=m)
    support_plus = check_support(support_plus, n, name="support_plus")
    k = int(k)
    if support_plus.size != k + 1:
        raise ValueError(
            f"support_plus has {support_plus.size} indices, expected k+1={k + 1}"
        )
    x_tilde = least_squares_on_support(A, y, support_plus)
    vals = np.abs(x_tilde[support_plus])
    order = np.argsort(-vals, kind="stable")[:k]
    support = np.sort(support_plus[order])
    r = resid(y, A[:, support])
    return r, support


def frogs(A, k_max, y, initial_support=None, trace=None):
    """Forward-reverse greedy search over support cardinalities.

    Starts from the mod_omp solution, lays down a ladder of best-fit
    supports of every size up to ``k_max``, then repeatedly probes one
    index beyond the current size and accepts reverse (shrinking) steps
    whenever they beat the stored fit at the smaller size. Terminates when
    a forward probe from the top size yields no accepted reverse step.

    Parameters
    ----------
    A : (M, N) array
        Sensing matrix.
    k_max : int
        Target support size; must be strictly less than M so the forward
        probe has room.
    y : (M,) array
        Measurement vector.
    initial_support : array of int, optional
        Passed through to the mod_omp initialization.
    trace : list, optional
        If given, one dict per ladder write is appended
        (``cardinality``, ``residual_norm``, ``kind``), for diagnostics.

    Returns
    -------
    PursuitResult
        ``n_iterations`` counts forward probes; it exceeds 1 only when
        reverse steps were accepted.  The residual norm never exceeds the
        mod_omp fit the search started from.
    """
    A = as_matrix(A)
    m, n = A.shape
    y = as_vector(y, length=m)
    k_max = int(k_max)
    if k_max >= m:
        raise ValueError(f"k_max={k_max} must be below the measurement count "
                         f"(n_samples = {m})")
    if k_max > n:
        raise ValueError(f"k_max={k_max} exceeds the dictionary size {n}")

    base = mod_omp(A, k_max, y, initial_support)

    # With k_max == n the size-k_max support is the whole dictionary, so
    # there is nothing to search: no size-(k_max + 1) support exists for the
    # forward probe. The least-squares fit on the full support is the answer.
    if k_max == n:
        return PursuitResult(support=base.support, estimate=base.estimate,
                             residual_norm=base.residual_norm, n_iterations=0)

    supports = [None] * (k_max + 2)
    resids = [None] * (k_max + 2)
    supports[0] = np.empty(0, dtype=np.int64)
    resids[0] = y.copy()
    if trace is not None:
        trace.append({"cardinality": 0, "residual_norm": float(np.linalg.norm(y)),
                      "kind": "ladder"})
    for size in range(1, k_max + 1):
        supports[size] = max_indices(base.estimate, size)
        resids[size] = resid(y, A[:, supports[size]])
        if trace is not None:
            trace.append({"cardinality": size,
                          "residual_norm": float(np.linalg.norm(resids[size])),
                          "kind": "ladder"})

    k = k_max
    n_outer = 0
    while True:
        n_outer += 1
        r_next, T_next = forward_add(A, y, resids[k], supports[k])
        supports[k + 1] = T_next
        resids[k + 1] = r_next
        if trace is not None:
            trace.append({"cardinality": k + 1,
                          "residual_norm": float(np.linalg.norm(r_next)),
                          "kind": "forward"})
        while k > 0:
            r_prime, T_prime = reverse_fetch(A, y, supports[k + 1], k)
            if np.linalg.norm(r_prime) < np.linalg.norm(resids[k]):
                supports[k] = T_prime
                resids[k] = r_prime
                if trace is not None:
                    trace.append({"cardinality": k,
                                  "residual_norm": float(np.linalg.norm(r_prime)),
                                  "kind": "reverse"})
                k -= 1
            else:
                break
        k += 1
        if k == k_max + 1:
            break

    searched_norm = float(np.linalg.norm(resids[k_max]))
    # Accepted reverse corrections rebuild the rungs above them through
    # chained forward extensions, and the rebuilt top rung is not guaranteed
    # to beat the greedy fit it replaced.  Keep whichever of the two is
    # better, so the search can only improve on its starting point.
    if base.residual_norm < searched_norm:
        return PursuitResult(base.support, base.estimate,
                             base.residual_norm, n_outer)
    support = supports[k_max]
    estimate = least_squares_on_support(A, y, support)
    return PursuitResult(support, estimate, searched_norm, n_outer)
