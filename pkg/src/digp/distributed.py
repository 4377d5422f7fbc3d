"""Distributed recovery: support voting plus a synchronous round engine.

Every node runs a local greedy solver; once per round all nodes broadcast
their current support estimate along their out-edges, each node votes over
what it received (itself included) to form a common-support guess of fixed
size, and re-solves locally seeded with that guess.

Three wrappers share the engine. "diomp" grows the voted support one index
per round and runs exactly k_common rounds. "disp" and "difrogs" vote at
full common cardinality every round and stop per node once the fit stops
improving and nothing around it changed; their per-node state keeps the
best result seen so far and reverts to it whenever a re-solve comes back
worse. Messages carry support indices only, never signal values.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .pursuit import frogs, max_indices, mod_omp, mod_sp, supp_accumulate
from .validation import check_support

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("run_id", "node", "round", "eta", "support_overlap",
                 "inner_iters")

_SOLVERS = {"diomp": mod_omp, "disp": mod_sp, "difrogs": frogs}


def vote(supports, q, n):
    """Majority vote over support sets: the q most-seen indices.

    Each received support scores +1 on its members; the q highest scores
    win, ties toward the lowest index. When fewer than q indices scored at
    all, zero-score indices pad the result (flagged at debug level), so
    the output always has exactly q members.
    """
    scores = np.zeros(n, dtype=np.float64)
    for support in supports:
        scores = supp_accumulate(scores, check_support(support, n))
    winners = max_indices(scores, q)
    if winners.size and scores[winners].min() == 0:
        padded = int(np.sum(scores[winners] == 0))
        logger.debug("vote padded %d zero-score indices into a q=%d result",
                     padded, q)
    return winners


@dataclass
class RoundTrace:
    """Per-node per-round history of one simulation run.

    rows hold dicts keyed by TRACE_COLUMNS (plus a private "active" flag
    marking rounds where the node actually solved); outer_rounds gives each
    node's last active round; converged says whether every node reached its
    stopping rule before the round cap.
    """

    rows: list = field(default_factory=list)
    converged: bool = True
    n_rounds: int = 0
    outer_rounds: list = field(default_factory=list)

    def add(self, run_id, node, rnd, eta, support_overlap, inner_iters,
            active=True):
        self.rows.append({
            "run_id": run_id,
            "node": int(node),
            "round": int(rnd),
            "eta": float(eta),
            "support_overlap": int(support_overlap),
            "inner_iters": int(inner_iters),
            "active": bool(active),
        })

    def inner_iteration_samples(self):
        """Iteration counts of every executed local solve."""
        return [row["inner_iters"] for row in self.rows if row["active"]]

    def to_csv(self, path):
        lines = [",".join(TRACE_COLUMNS)]
        for row in self.rows:
            lines.append(",".join([
                str(row["run_id"]),
                str(row["node"]),
                str(row["round"]),
                repr(row["eta"]),
                str(row["support_overlap"]),
                str(row["inner_iters"]),
            ]))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _overlap(support, true_support):
    return np.intersect1d(support, true_support).size


def simulate(ensemble, topology, algorithm, round_cap=50, run_id=0):
    """Run one distributed recovery to completion in lockstep rounds.

    Parameters
    ----------
    ensemble : Ensemble
        One problem per node; the common-support size sets the vote
        cardinality and (with each node's private size) the local solver's
        target support size.
    topology : Topology
        Connectivity; must have ensemble.n_nodes nodes.
    algorithm : {"diomp", "disp", "difrogs"}
    round_cap : int
        Hard stop for the convergence-driven algorithms; hitting it marks
        the trace non-converged and returns the best partial results.
    run_id : value stamped on trace rows.

    Returns
    -------
    (results, trace) : list of PursuitResult, RoundTrace
        For "disp"/"difrogs" every reported result is the node's best
        (lowest-residual) state over the whole run.
    """
    if algorithm not in _SOLVERS:
        raise ValueError(
            f"unknown algorithm {algorithm!r}, expected one of "
            f"{sorted(_SOLVERS)}"
        )
    solver = _SOLVERS[algorithm]
    n_nodes = ensemble.n_nodes
    if topology.n_nodes != n_nodes:
        raise ValueError(
            f"topology has {topology.n_nodes} nodes, ensemble has {n_nodes}"
        )
    problems = ensemble.problems
    k_common = ensemble.common_support.size
    n = problems[0].signal.size
    k_max = [k_common + prob.private_support.size for prob in problems]
    true_supports = [np.union1d(prob.common_support, prob.private_support)
                     for prob in problems]
    in_nb = [topology.in_neighbors(l) for l in range(n_nodes)]

    trace = RoundTrace()
    current = []
    for l in range(n_nodes):
        res = solver(problems[l].sensing, k_max[l], problems[l].measurement,
                     None)
        current.append(res)
        trace.add(run_id, l, 0, res.residual_norm,
                  _overlap(res.support, true_supports[l]), res.n_iterations)

    if algorithm == "diomp":
        for rnd in range(1, k_common + 1):
            board = [res.support for res in current]
            fresh = []
            for l in range(n_nodes):
                seed = vote((board[src] for src in in_nb[l]), rnd, n)
                res = solver(problems[l].sensing, k_max[l],
                             problems[l].measurement, seed)
                fresh.append(res)
                trace.add(run_id, l, rnd, res.residual_norm,
                          _overlap(res.support, true_supports[l]),
                          res.n_iterations)
            current = fresh
        trace.n_rounds = k_common
        trace.outer_rounds = [k_common] * n_nodes
        trace.converged = True
        return current, trace

    # disp / difrogs: convergence-driven with a best-so-far revert rule.
    # A node stops once a re-solve no longer improves on its best state AND
    # the supports it received — its own broadcast included — repeat the
    # previous round's exactly. Comparing received (pre-solve) supports
    # rather than the fresh post-solve one matters: a node whose re-solve
    # keeps returning a different-but-worse support reverts each round and
    # re-broadcasts the same set, which this predicate recognizes as
    # settled one round later, where a post-solve comparison would spin
    # against the round cap forever.
    old = list(current)
    received_prev = [{src: np.empty(0, dtype=np.int64) for src in in_nb[l]}
                     for l in range(n_nodes)]
    converged = [False] * n_nodes
    stop_round = [0] * n_nodes

    rnd = 0
    while not all(converged) and rnd < round_cap:
        rnd += 1
        for l in range(n_nodes):
            if converged[l]:
                continue
            if current[l].residual_norm > old[l].residual_norm:
                current[l] = old[l]  # revert to the best state
            old[l] = current[l]

        board = [res.support for res in current]

        for l in range(n_nodes):
            if converged[l]:
                trace.add(run_id, l, rnd, current[l].residual_norm,
                          _overlap(current[l].support, true_supports[l]),
                          0, active=False)
                continue
            received = {src: board[src] for src in in_nb[l]}
            seed = vote(received.values(), k_common, n)
            res = solver(problems[l].sensing, k_max[l],
                         problems[l].measurement, seed)
            arrivals_stable = all(
                np.array_equal(received[src], received_prev[l][src])
                for src in received)
            done = (res.residual_norm >= old[l].residual_norm
                    and arrivals_stable)
            received_prev[l] = received
            if done:
                converged[l] = True
                stop_round[l] = rnd
                current[l] = old[l]  # freeze the best state
            else:
                current[l] = res
            report = (current[l]
                      if current[l].residual_norm <= old[l].residual_norm
                      else old[l])
            trace.add(run_id, l, rnd, report.residual_norm,
                      _overlap(report.support, true_supports[l]),
                      res.n_iterations)

    for l in range(n_nodes):
        if not converged[l]:
            stop_round[l] = rnd
            if old[l].residual_norm < current[l].residual_norm:
                current[l] = old[l]

    trace.converged = all(converged)
    if not trace.converged:
        stuck = sum(1 for c in converged if not c)
        logger.warning("round cap %d reached with %d of %d nodes still "
                       "active", round_cap, stuck, n_nodes)
    trace.n_rounds = rnd
    trace.outer_rounds = stop_round
    return current, trace
