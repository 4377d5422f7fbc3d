"""Jointly sparse ensembles: signals, sensing matrices, measurements.

Every node observes its own sparse vector through its own sensing matrix.
The sparse vectors share a *common* support (values still differ per node)
and each carries a *private* support of its own; the two parts may overlap,
in which case their coefficient values add. Measurement noise is calibrated
from a requested signal-to-measurement-noise ratio using the analytic
expected signal energy, so the noise variance is one constant per ensemble.
"""

import struct
from dataclasses import dataclass, field

import numpy as np

_KINDS = ("gaussian", "binary")
_MAGIC = b"DGPE"
_FORMAT_VERSION = 1


@dataclass
class ModelParams:
    """Dimensions and distributions for one ensemble family.

    n                ambient dimension of every sparse vector
    n_nodes          number of sensing nodes
    k_common         shared support size
    k_private        per-node private support size (one int for all nodes)
    coefficient_kind "gaussian" (i.i.d. standard normal nonzeros) or
                     "binary" (all nonzeros set to one)
    smnr_db          signal-to-measurement-noise ratio in dB, or the literal
                     string "clean" for noise-free measurements
    alpha            measurement fraction; alpha * n must be an integer
    """

    n: int
    n_nodes: int
    k_common: int
    k_private: int
    coefficient_kind: str = "gaussian"
    smnr_db: object = "clean"
    alpha: float = 0.15

    def __post_init__(self):
        self.n = int(self.n)
        self.n_nodes = int(self.n_nodes)
        self.k_common = int(self.k_common)
        self.k_private = int(self.k_private)
        self.alpha = float(self.alpha)
        if self.n < 1 or self.n_nodes < 1:
            raise ValueError("n and n_nodes must be positive")
        if self.k_common < 0 or self.k_private < 0:
            raise ValueError("support sizes must be nonnegative")
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha={self.alpha} outside (0, 1]")
        m = self.alpha * self.n
        if abs(m - round(m)) > 1e-9:
            raise ValueError(
                f"alpha={self.alpha} gives non-integral measurement count {m}"
            )
        if self.coefficient_kind not in _KINDS:
            raise ValueError(
                f"coefficient_kind must be one of {_KINDS}, "
                f"got {self.coefficient_kind!r}"
            )
        if isinstance(self.smnr_db, str):
            if self.smnr_db != "clean":
                raise ValueError(
                    f'smnr_db must be a number or "clean", got {self.smnr_db!r}'
                )
        else:
            self.smnr_db = float(self.smnr_db)
            if not np.isfinite(self.smnr_db):
                raise ValueError("smnr_db must be finite")
        if self.k_common + self.k_private > self.m:
            raise ValueError(
                f"k_common + k_private = {self.k_common + self.k_private} "
                f"exceeds measurement count {self.m}"
            )
        if self.m > self.n:
            raise ValueError("measurement count exceeds ambient dimension")

    @property
    def m(self):
        """Measurement count per node."""
        return int(round(self.alpha * self.n))

    @property
    def is_clean(self):
        return isinstance(self.smnr_db, str)


@dataclass
class NodeProblem:
    """One node's sensing matrix, sparse signal, and noisy measurement."""

    sensing: np.ndarray
    signal: np.ndarray
    measurement: np.ndarray
    common_support: np.ndarray
    private_support: np.ndarray
    noise_variance: float


@dataclass
class Ensemble:
    """All node problems of one trial; every node shares the common support."""

    problems: list
    seed: int = 0

    @property
    def n_nodes(self):
        return len(self.problems)

    @property
    def common_support(self):
        return self.problems[0].common_support


def expected_signal_energy(params):
    """Analytic E{||x||^2} for one node's sparse vector.

    Gaussian nonzeros: each active index contributes unit variance and the
    common/private cross terms vanish in expectation. Binary nonzeros: an
    index active in both parts holds the value 2, and the expected overlap
    count is k_common * k_private / n, each overlap adding 2 to the energy
    (2^2 versus 1 + 1).
    """
    base = params.k_common + params.k_private
    if params.coefficient_kind == "binary":
        base += 2.0 * params.k_common * params.k_private / params.n
    return float(base)


def calibrate_noise(params):
    """Noise variance that realizes the requested SMNR in expectation."""
    if params.is_clean:
        return 0.0
    smnr_linear = 10.0 ** (params.smnr_db / 10.0)
    if smnr_linear <= 0.0:
        raise ValueError(f"SMNR must be positive, got {smnr_linear}")
    return expected_signal_energy(params) / (smnr_linear * params.m)


def generate_sensing_matrix(m, n, rng):
    """Gaussian matrix, entries i.i.d. N(0, 1/m), columns scaled to unit norm."""
    m, n = int(m), int(n)
    if m < 1 or m > n:
        raise ValueError(f"need 1 <= m <= n, got m={m}, n={n}")
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    return A / np.linalg.norm(A, axis=0)


def generate_signal(params, rng, common_support=None):
    """One node's sparse vector.

    Draws the private support uniformly; the common support is drawn
    uniformly unless supplied by the caller (ensemble generation shares one
    across nodes). Overlapping indices receive the sum of both parts.

    Returns ``(x, common_support, private_support)``.
    """
    if common_support is None:
        common_support = np.sort(rng.choice(params.n, size=params.k_common,
                                            replace=False))
    private_support = np.sort(rng.choice(params.n, size=params.k_private,
                                         replace=False))
    x = np.zeros(params.n)
    if params.coefficient_kind == "gaussian":
        x[common_support] += rng.standard_normal(params.k_common)
        x[private_support] += rng.standard_normal(params.k_private)
    else:
        x[common_support] += 1.0
        x[private_support] += 1.0
    return x, common_support.astype(np.int64), private_support.astype(np.int64)


def generate_matrices(params, rng):
    """One sensing matrix per node, drawn from split child streams."""
    children = rng.spawn(params.n_nodes)
    return [generate_sensing_matrix(params.m, params.n, child)
            for child in children]


def generate_ensemble(params, rng, matrices=None, seed=0):
    """Draw one full trial: shared common support, per-node everything else.

    Parameters
    ----------
    params : ModelParams
    rng : numpy Generator
        Parent stream; per-node work runs on spawned child streams so node
        problems are independent.
    matrices : list of arrays, optional
        Reuse existing sensing matrices (one per node) instead of drawing
        fresh ones — the benchmark schedule pairs several signal draws with
        each matrix draw. Matrices are copied defensively.
    seed : int
        Opaque label stored on the ensemble (and in dumps) for provenance.
    """
    common = np.sort(rng.choice(params.n, size=params.k_common, replace=False))
    common = common.astype(np.int64)
    sigma2 = calibrate_noise(params)
    if matrices is not None and len(matrices) != params.n_nodes:
        raise ValueError(
            f"got {len(matrices)} matrices for {params.n_nodes} nodes"
        )
    problems = []
    for l, child in enumerate(rng.spawn(params.n_nodes)):
        if matrices is None:
            A = generate_sensing_matrix(params.m, params.n, child)
        else:
            A = np.array(matrices[l], dtype=np.float64)
            if A.shape != (params.m, params.n):
                raise ValueError(
                    f"matrix {l} has shape {A.shape}, "
                    f"expected {(params.m, params.n)}"
                )
        x, _, private = generate_signal(params, child, common_support=common)
        y = A @ x
        if sigma2 > 0.0:
            y = y + child.normal(0.0, np.sqrt(sigma2), size=params.m)
        problems.append(NodeProblem(A, x, y, common, private, sigma2))
    return Ensemble(problems, seed=int(seed))


# ---------------------------------------------------------------------------
# fixture dump format
#
# Little-endian throughout. Header:
#   bytes 0..3    magic "DGPE"
#   bytes 4..7    format version, uint32
#   bytes 8..23   L, N, M, k_common as uint32
#   bytes 24..31  seed, uint64
#   bytes 32..39  noise variance, float64
#   then the shared common support, uint32[k_common], 1-based indices
# Per node, in node order:
#   k_private uint32, private support uint32[k_private] (1-based),
#   sensing matrix float64[M*N] row-major, signal float64[N],
#   measurement float64[M]
# ---------------------------------------------------------------------------

def save_ensemble(ensemble, path):
    """Write an ensemble as a versioned little-endian binary fixture."""
    problems = ensemble.problems
    first = problems[0]
    m, n = first.sensing.shape
    k_common = first.common_support.size
    parts = [
        _MAGIC,
        struct.pack("<IIIII", _FORMAT_VERSION, len(problems), n, m, k_common),
        struct.pack("<Q", ensemble.seed & 0xFFFFFFFFFFFFFFFF),
        struct.pack("<d", first.noise_variance),
        (first.common_support + 1).astype("<u4").tobytes(),
    ]
    for prob in problems:
        parts.append(struct.pack("<I", prob.private_support.size))
        parts.append((prob.private_support + 1).astype("<u4").tobytes())
        parts.append(np.ascontiguousarray(prob.sensing, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(prob.signal, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(prob.measurement, dtype="<f8").tobytes())
    with open(path, "wb") as fh:
        fh.write(b"".join(parts))


def load_ensemble(path):
    """Read back a fixture written by save_ensemble."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != _MAGIC:
        raise ValueError(f"{path}: not an ensemble dump (bad magic)")
    version, n_nodes, n, m, k_common = struct.unpack_from("<IIIII", raw, 4)
    if version != _FORMAT_VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    seed = struct.unpack_from("<Q", raw, 24)[0]
    sigma2 = struct.unpack_from("<d", raw, 32)[0]
    offset = 40
    common = np.frombuffer(raw, dtype="<u4", count=k_common, offset=offset)
    common = common.astype(np.int64) - 1
    offset += 4 * k_common
    problems = []
    for _ in range(n_nodes):
        (k_private,) = struct.unpack_from("<I", raw, offset)
        offset += 4
        private = np.frombuffer(raw, dtype="<u4", count=k_private, offset=offset)
        private = private.astype(np.int64) - 1
        offset += 4 * k_private
        A = np.frombuffer(raw, dtype="<f8", count=m * n, offset=offset)
        A = A.reshape(m, n).copy()
        offset += 8 * m * n
        x = np.frombuffer(raw, dtype="<f8", count=n, offset=offset).copy()
        offset += 8 * n
        y = np.frombuffer(raw, dtype="<f8", count=m, offset=offset).copy()
        offset += 8 * m
        problems.append(NodeProblem(A, x, y, common.copy(), private, sigma2))
    if offset != len(raw):
        raise ValueError(f"{path}: {len(raw) - offset} trailing bytes")
    return Ensemble(problems, seed=int(seed))
