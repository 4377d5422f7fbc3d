"""Benchmark sweeps: configuration, execution, CSV and plot-data output.

A run is a grid of cells (measurement fraction x algorithm x topology).
Every cell sees the same data: for each alpha, Q sensing-matrix draws each
paired with P signal/noise draws, all derived from the master seed through
fixed spawn keys, so results are reproducible bit for bit no matter which
cells are requested, in which order, or across how many workers.
"""

import json
import math
import os
import time
from dataclasses import dataclass

import numpy as np

from .distributed import simulate
from .metrics import MetricsAccumulator, srer
from .pursuit import frogs, mod_omp, mod_sp
from .signals import ModelParams, generate_ensemble, generate_matrices
from .topology import random_topology, ring_topology, watts_strogatz

STANDALONE_SOLVERS = {"omp": mod_omp, "sp": mod_sp, "frogs": frogs}
DISTRIBUTED_ALGORITHMS = ("diomp", "disp", "difrogs")
ALGORITHMS = tuple(STANDALONE_SOLVERS) + DISTRIBUTED_ALGORITHMS

CSV_HEADER = ("alpha,algorithm,topology,smnr_db,signal,srer_db,asce,"
              "outer_mean,outer_std,inner_mean,inner_std,realizations,"
              "wall_seconds")

# Disjoint first components keep the seed streams for matrices, signals,
# and topology draws from ever colliding.
_MATRIX_STREAM = 1
_SIGNAL_STREAM = 2
_RANDTOP_STREAM = 3
_WATTS_STREAM = 4


def default_alphas(n):
    """The 0.10..0.25 grid, thinned to fractions that give integral M."""
    grid = [round(0.10 + 0.01 * i, 2) for i in range(16)]
    return tuple(a for a in grid if abs(a * n - round(a * n)) < 1e-9)


@dataclass
class ExperimentConfig:
    """Everything one benchmark run needs; JSON- and CLI-friendly."""

    n: int = 500
    n_nodes: int = 10
    k_common: int = 10
    k_private: int = 10
    signal: str = "gaussian"
    smnr: object = 20.0
    alphas: tuple = ()
    topology: str = "ring:2"
    algorithms: tuple = ("diomp", "disp", "difrogs")
    q_trials: int = 10
    p_trials: int = 10
    seed: int = 0
    out: str = "results"
    round_cap: int = 50
    jobs: int = 1

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        for alg in self.algorithms:
            if alg not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {alg!r}, "
                                 f"expected a subset of {ALGORITHMS}")
        if not self.algorithms:
            raise ValueError("no algorithms requested")
        if self.q_trials < 1 or self.p_trials < 1:
            raise ValueError("q_trials and p_trials must be at least 1")
        self.alphas = tuple(float(a) for a in self.alphas)
        if not self.alphas:
            self.alphas = default_alphas(self.n)
        for alpha in self.alphas:
            if abs(alpha * self.n - round(alpha * self.n)) > 1e-9:
                raise ValueError(
                    f"alpha={alpha} gives non-integral measurement count "
                    f"{alpha * self.n} at n={self.n}"
                )
        # Validate model parameters and the topology string right away so a
        # bad config fails before any compute happens.
        self.model_params(self.alphas[0])
        parse_topology_spec(self.topology, self.n_nodes)

    def model_params(self, alpha):
        return ModelParams(n=self.n, n_nodes=self.n_nodes,
                           k_common=self.k_common, k_private=self.k_private,
                           coefficient_kind=self.signal, smnr_db=self.smnr,
                           alpha=alpha)

    def to_dict(self):
        return {
            "n": self.n, "n_nodes": self.n_nodes,
            "k_common": self.k_common, "k_private": self.k_private,
            "signal": self.signal, "smnr": self.smnr,
            "alphas": list(self.alphas), "topology": self.topology,
            "algorithms": list(self.algorithms),
            "q_trials": self.q_trials, "p_trials": self.p_trials,
            "seed": self.seed, "out": self.out,
            "round_cap": self.round_cap, "jobs": self.jobs,
        }

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


@dataclass
class TopologySpec:
    """One requested topology: a label plus how to build it."""

    label: str
    kind: str           # "ring" | "rand" | "watts"
    degree: int = 0     # ring / rand
    ws_q: int = 0       # watts
    ws_p: float = 0.0   # watts


def parse_topology_spec(spec, n_nodes):
    """Expand a topology string into TopologySpec entries.

    Grammar: entries joined by "+"; each entry is ``ring:D``, ``rand:D``,
    or ``watts:Q,P`` where D is an integer, a comma list (``ring:0,2,9``),
    or an inclusive range (``ring:0..9``).
    """
    specs = []
    for entry in str(spec).split("+"):
        entry = entry.strip()
        if not entry:
            continue
        kind, sep, arg = entry.partition(":")
        kind = kind.strip()
        arg = arg.strip()
        if not sep or not arg:
            raise ValueError(f"malformed topology entry {entry!r}")
        if kind in ("ring", "rand"):
            if ".." in arg:
                lo, _, hi = arg.partition("..")
                degrees = range(int(lo), int(hi) + 1)
            else:
                degrees = [int(tok) for tok in arg.split(",")]
            low = 2 if kind == "rand" else 0
            for d in degrees:
                if not low <= d <= n_nodes - 1:
                    raise ValueError(
                        f"{kind} degree {d} outside {low}..{n_nodes - 1}"
                    )
                specs.append(TopologySpec(f"{kind}:{d}", kind, degree=d))
        elif kind == "watts":
            try:
                q_str, p_str = arg.split(",")
                ws_q, ws_p = int(q_str), float(p_str)
            except ValueError:
                raise ValueError(f"malformed watts entry {entry!r}; "
                                 "expected watts:Q,P") from None
            if not 1 <= ws_q or 2 * ws_q > n_nodes - 1:
                raise ValueError(f"watts q={ws_q} outside "
                                 f"1..{(n_nodes - 1) // 2}")
            if not 0.0 <= ws_p <= 1.0:
                raise ValueError(f"watts p={ws_p} outside [0, 1]")
            specs.append(TopologySpec(f"watts:{ws_q},{ws_p:g}", "watts",
                                      ws_q=ws_q, ws_p=ws_p))
        else:
            raise ValueError(f"unknown topology kind {kind!r} in {entry!r}")
    if not specs:
        raise ValueError(f"empty topology spec {spec!r}")
    labels = [s.label for s in specs]
    if len(set(labels)) != len(labels):
        raise ValueError(f"duplicate topology entries in {spec!r}")
    return specs


def resolve_topology(spec, n_nodes, master_seed, spec_index,
                     alpha_index=0, q=0, p=0):
    """Build the concrete graph for one trial.

    Rings are deterministic. A Watts-Strogatz graph is one realization per
    run (it ignores the trial indices). A random topology is redrawn for
    every Monte-Carlo point, from a stream keyed by the trial indices.
    """
    if spec.kind == "ring":
        return ring_topology(n_nodes, spec.degree)
    if spec.kind == "watts":
        rng = np.random.default_rng(np.random.SeedSequence(
            master_seed, spawn_key=(_WATTS_STREAM, spec_index)))
        return watts_strogatz(n_nodes, spec.ws_q, spec.ws_p, rng)
    rng = np.random.default_rng(np.random.SeedSequence(
        master_seed, spawn_key=(_RANDTOP_STREAM, spec_index,
                                alpha_index, q, p)))
    return random_topology(n_nodes, spec.degree, rng)


class _Stat:
    """Streaming mean/std over scalar samples, mergeable across workers."""

    __slots__ = ("n", "total", "total_sq")

    def __init__(self, n=0, total=0.0, total_sq=0.0):
        self.n = n
        self.total = total
        self.total_sq = total_sq

    def extend(self, values):
        for v in values:
            self.n += 1
            self.total += float(v)
            self.total_sq += float(v) * float(v)

    def merge(self, other):
        return _Stat(self.n + other.n, self.total + other.total,
                     self.total_sq + other.total_sq)

    @property
    def mean(self):
        return self.total / self.n if self.n else 0.0

    @property
    def std(self):
        if not self.n:
            return 0.0
        return math.sqrt(max(0.0, self.total_sq / self.n - self.mean ** 2))


class _CellStats:
    """All per-cell aggregates: recovery metrics, iteration stats, timing."""

    def __init__(self):
        self.metrics = MetricsAccumulator()
        self.outer = _Stat()
        self.inner = _Stat()
        self.wall = 0.0

    def merge(self, other):
        out = _CellStats()
        out.metrics = self.metrics.merge(other.metrics)
        out.outer = self.outer.merge(other.outer)
        out.inner = self.inner.merge(other.inner)
        out.wall = self.wall + other.wall
        return out


def _cell_keys(config, topo_specs):
    """Cells in deterministic output order."""
    keys = []
    for alpha_index in range(len(config.alphas)):
        for alg in config.algorithms:
            if alg in STANDALONE_SOLVERS:
                keys.append((alpha_index, alg, "none"))
            else:
                for spec in topo_specs:
                    keys.append((alpha_index, alg, spec.label))
    return keys


def _run_block(config, topo_specs, alpha_index, q):
    """All work for one (alpha, sensing-matrix draw) pair."""
    alpha = config.alphas[alpha_index]
    params = config.model_params(alpha)
    cells = {}

    def cell(alg, label):
        key = (alpha_index, alg, label)
        if key not in cells:
            cells[key] = _CellStats()
        return cells[key]

    matrix_rng = np.random.default_rng(np.random.SeedSequence(
        config.seed, spawn_key=(_MATRIX_STREAM, alpha_index, q)))
    matrices = generate_matrices(params, matrix_rng)

    distributed = [alg for alg in config.algorithms
                   if alg not in STANDALONE_SOLVERS]
    standalone = [alg for alg in config.algorithms
                  if alg in STANDALONE_SOLVERS]

    for p in range(config.p_trials):
        signal_rng = np.random.default_rng(np.random.SeedSequence(
            config.seed, spawn_key=(_SIGNAL_STREAM, alpha_index, q, p)))
        trial_tag = (alpha_index << 40) | (q << 20) | p
        ensemble = generate_ensemble(params, signal_rng, matrices=matrices,
                                     seed=trial_tag)
        true_supports = [np.union1d(prob.common_support, prob.private_support)
                         for prob in ensemble.problems]

        for spec_index, spec in enumerate(topo_specs):
            if not distributed:
                break
            topology = resolve_topology(spec, config.n_nodes, config.seed,
                                        spec_index, alpha_index, q, p)
            for alg in distributed:
                stats = cell(alg, spec.label)
                start = time.perf_counter()
                results, trace = simulate(ensemble, topology, alg,
                                          round_cap=config.round_cap,
                                          run_id=trial_tag)
                stats.wall += time.perf_counter() - start
                for l, res in enumerate(results):
                    stats.metrics.add(ensemble.problems[l].signal,
                                      res.estimate, true_supports[l],
                                      res.support)
                stats.outer.extend(trace.outer_rounds)
                stats.inner.extend(trace.inner_iteration_samples())

        for alg in standalone:
            solver = STANDALONE_SOLVERS[alg]
            stats = cell(alg, "none")
            start = time.perf_counter()
            for l, prob in enumerate(ensemble.problems):
                k_max = prob.common_support.size + prob.private_support.size
                res = solver(prob.sensing, k_max, prob.measurement, None)
                stats.metrics.add(prob.signal, res.estimate,
                                  true_supports[l], res.support)
                stats.outer.extend([0])
                stats.inner.extend([res.n_iterations])
            stats.wall += time.perf_counter() - start

    return cells


def run_experiment(config, progress=None):
    """Execute every cell of the configured sweep.

    Returns one result dict per cell, in deterministic order (alpha, then
    algorithm as configured, then topology as configured). ``progress``,
    if given, is called with a line of text after each block completes.
    """
    topo_specs = parse_topology_spec(config.topology, config.n_nodes)
    blocks = [(alpha_index, q)
              for alpha_index in range(len(config.alphas))
              for q in range(config.q_trials)]

    if config.jobs != 1:
        from joblib import Parallel, delayed
        partials = Parallel(n_jobs=config.jobs)(
            delayed(_run_block)(config, topo_specs, alpha_index, q)
            for alpha_index, q in blocks)
    else:
        partials = []
        for alpha_index, q in blocks:
            partials.append(_run_block(config, topo_specs, alpha_index, q))
            if progress is not None:
                progress(f"alpha={config.alphas[alpha_index]} "
                         f"matrix-draw {q + 1}/{config.q_trials} done")

    merged = {}
    for partial in partials:
        for key, stats in partial.items():
            merged[key] = merged[key].merge(stats) if key in merged else stats

    smnr_label = config.smnr if isinstance(config.smnr, str) else float(config.smnr)
    rows = []
    for key in _cell_keys(config, topo_specs):
        alpha_index, alg, label = key
        stats = merged[key]
        _, db = srer(stats.metrics)
        rows.append({
            "alpha": float(config.alphas[alpha_index]),
            "algorithm": alg,
            "topology": label,
            "smnr_db": smnr_label,
            "signal": config.signal,
            "srer_db": db,
            "asce": stats.metrics.mean_distortion,
            "outer_mean": stats.outer.mean,
            "outer_std": stats.outer.std,
            "inner_mean": stats.inner.mean,
            "inner_std": stats.inner.std,
            "realizations": stats.metrics.count,
            "wall_seconds": stats.wall,
        })
    return rows


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def _format_value(key, value):
    if key in ("alpha", "srer_db", "asce", "outer_mean", "outer_std",
               "inner_mean", "inner_std", "wall_seconds"):
        return repr(float(value))
    return str(value)


def emit_csv(rows, path):
    """Write result rows with the fixed header; refuses an empty set."""
    if not rows:
        raise ValueError("no result rows to write")
    columns = CSV_HEADER.split(",")
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(",".join(_format_value(col, row[col]) for col in columns))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _curve_tag(row):
    smnr = row["smnr_db"]
    smnr_part = smnr if isinstance(smnr, str) else f"{smnr:g}db"
    topo = str(row["topology"]).replace(":", "").replace(",", "-")
    topo = topo.replace(".", "p")
    return f"{row['algorithm']}_{topo}_{smnr_part}_{row['signal']}"


def emit_plotdata(rows, out_dir):
    """Split rows into per-curve files matching the benchmark's plot axes.

    ``srer_vs_alpha/`` and ``asce_vs_alpha/`` hold one file per
    (algorithm, topology, noise, signal) curve; when ring topologies of
    several degrees are present, ``iterations_vs_connectivity/`` holds one
    file per (algorithm, alpha) with per-degree iteration statistics.
    Returns the list of written paths.
    """
    if not rows:
        raise ValueError("no result rows to write")
    written = []

    for metric, folder in (("srer_db", "srer_vs_alpha"),
                           ("asce", "asce_vs_alpha")):
        curves = {}
        for row in rows:
            curves.setdefault(_curve_tag(row), []).append(row)
        directory = os.path.join(out_dir, folder)
        os.makedirs(directory, exist_ok=True)
        for tag, members in sorted(curves.items()):
            members = sorted(members, key=lambda r: r["alpha"])
            path = os.path.join(directory, f"{tag}.csv")
            with open(path, "w") as fh:
                fh.write(f"alpha,{metric}\n")
                for row in members:
                    fh.write(f"{_format_value('alpha', row['alpha'])},"
                             f"{_format_value(metric, row[metric])}\n")
            written.append(path)

    ring_rows = [row for row in rows
                 if str(row["topology"]).startswith("ring:")]
    if ring_rows:
        curves = {}
        for row in ring_rows:
            alpha_tag = f"{row['alpha']:g}".replace(".", "p")
            key = (f"{row['algorithm']}_alpha{alpha_tag}", row["alpha"])
            curves.setdefault(key, []).append(row)
        directory = os.path.join(out_dir, "iterations_vs_connectivity")
        os.makedirs(directory, exist_ok=True)
        for (tag, _), members in sorted(curves.items()):
            members = sorted(members,
                             key=lambda r: int(r["topology"].split(":")[1]))
            path = os.path.join(directory, f"{tag}.csv")
            with open(path, "w") as fh:
                fh.write("degree,outer_mean,outer_std,inner_mean,inner_std\n")
                for row in members:
                    degree = row["topology"].split(":")[1]
                    fh.write(",".join([degree] + [
                        _format_value(col, row[col])
                        for col in ("outer_mean", "outer_std",
                                    "inner_mean", "inner_std")]) + "\n")
            written.append(path)
    return written


def write_summary(rows, path, baseline="sp"):
    """Human-readable overview; runtimes appear only as ratios.

    The baseline algorithm's pooled wall time defines 1.0x; every other
    algorithm is shown relative to it. Falls back to the first algorithm
    present when the requested baseline was not part of the run.
    """
    if not rows:
        raise ValueError("no result rows to write")
    algorithms = []
    for row in rows:
        if row["algorithm"] not in algorithms:
            algorithms.append(row["algorithm"])
    if baseline not in algorithms:
        baseline = algorithms[0]
    walls = {alg: 0.0 for alg in algorithms}
    for row in rows:
        walls[row["algorithm"]] += row["wall_seconds"]

    lines = ["# Benchmark summary", ""]
    lines.append(f"{'alpha':>6} {'algorithm':>10} {'topology':>12} "
                 f"{'srer_db':>9} {'asce':>7} {'outer':>6} {'inner':>6}")
    for row in rows:
        srer_txt = ("inf" if math.isinf(row["srer_db"])
                    else f"{row['srer_db']:.2f}")
        lines.append(f"{row['alpha']:>6g} {row['algorithm']:>10} "
                     f"{row['topology']:>12} {srer_txt:>9} "
                     f"{row['asce']:>7.3f} {row['outer_mean']:>6.2f} "
                     f"{row['inner_mean']:>6.2f}")
    lines.append("")
    lines.append(f"## Runtime ratios (relative to {baseline}; "
                 "hardware-independent comparisons only)")
    base_wall = walls[baseline]
    for alg in algorithms:
        if base_wall > 0:
            lines.append(f"{alg:>10}: {walls[alg] / base_wall:.3f}x")
        else:
            lines.append(f"{alg:>10}: n/a")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

_ALL = ("omp", "sp", "frogs", "diomp", "disp", "difrogs")

PRESETS = {
    "fig2": {
        "description": "iteration profiles vs connectivity (ring degrees "
                       "0-9) for disp/difrogs at four alphas",
        "overrides": {"algorithms": ("disp", "difrogs"),
                      "topology": "ring:0..9",
                      "alphas": (0.10, 0.15, 0.20, 0.25), "smnr": 20.0},
    },
    "fig3": {
        "description": "recovery vs alpha for each ring degree 0-9, all "
                       "three distributed algorithms",
        "overrides": {"algorithms": ("diomp", "disp", "difrogs"),
                      "topology": "ring:0..9",
                      "alphas": tuple(round(0.10 + 0.01 * i, 2)
                                      for i in range(11)),
                      "smnr": 20.0},
    },
    "fig4": {
        "description": "fixed degree-2 ring vs per-trial random degree-2 "
                       "network",
        "overrides": {"algorithms": ("diomp", "disp", "difrogs"),
                      "topology": "ring:2+rand:2", "smnr": 20.0},
    },
    "fig5": {
        "description": "gaussian signals, clean measurements: disconnected "
                       "vs degree-2 vs fully connected",
        "overrides": {"algorithms": _ALL, "topology": "ring:2+ring:9",
                      "smnr": "clean"},
    },
    "fig6": {
        "description": "gaussian signals at 20 dB SMNR: disconnected vs "
                       "degree-2 vs fully connected",
        "overrides": {"algorithms": _ALL, "topology": "ring:2+ring:9",
                      "smnr": 20.0},
    },
    "fig7": {
        "description": "binary signals, clean measurements: disconnected "
                       "vs degree-2 vs fully connected",
        "overrides": {"algorithms": _ALL, "topology": "ring:2+ring:9",
                      "smnr": "clean", "signal": "binary"},
    },
    "fig8": {
        "description": "binary signals at 20 dB SMNR: disconnected vs "
                       "degree-2 vs fully connected",
        "overrides": {"algorithms": _ALL, "topology": "ring:2+ring:9",
                      "smnr": 20.0, "signal": "binary"},
    },
    "net100": {
        "description": "100-node small-world network (watts:3,0.3), all "
                       "algorithms, reduced trials",
        "overrides": {"algorithms": _ALL, "topology": "watts:3,0.3",
                      "n_nodes": 100, "q_trials": 2, "p_trials": 2,
                      "smnr": 20.0},
    },
}


def preset_config(name, **extra):
    """Config for a named preset, with optional field overrides on top."""
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; "
                         f"available: {sorted(PRESETS)}")
    merged = dict(PRESETS[name]["overrides"])
    merged.update(extra)
    return ExperimentConfig(**merged)
