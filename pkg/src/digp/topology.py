"""Directed network topologies for the distributed solvers.

Edges are stored without self-loops, but every neighbor query includes the
node itself: a node always hears its own broadcast. Node ids are 0-based
everywhere, including the text format.
"""

import numpy as np


class Topology:
    """Immutable directed graph with self-inclusive neighbor queries."""

    def __init__(self, out_edges):
        self.out_edges = tuple(tuple(int(d) for d in dests)
                               for dests in out_edges)
        n = len(self.out_edges)
        for src, dests in enumerate(self.out_edges):
            if len(set(dests)) != len(dests):
                raise ValueError(f"node {src} has duplicate out-edges")
            for dst in dests:
                if not 0 <= dst < n:
                    raise ValueError(f"node {src} points at {dst}, "
                                     f"outside 0..{n - 1}")
                if dst == src:
                    raise ValueError(f"node {src} has an explicit self-loop")
        in_lists = [[] for _ in range(n)]
        for src, dests in enumerate(self.out_edges):
            for dst in dests:
                in_lists[dst].append(src)
        self._in_edges = tuple(tuple(srcs) for srcs in in_lists)

    @property
    def n_nodes(self):
        return len(self.out_edges)

    def external_out(self, node):
        """Out-edges excluding the node itself (the stored edge set)."""
        return self.out_edges[node]

    def out_neighbors(self, node):
        """Destinations of this node's broadcast, itself included."""
        return sorted((node,) + self.out_edges[node])

    def in_neighbors(self, node):
        """Sources this node hears from, itself included."""
        return sorted((node,) + self._in_edges[node])

    def to_text(self):
        """One line per node: ``node: dst dst ...`` (external edges only)."""
        lines = []
        for src, dests in enumerate(self.out_edges):
            tail = " ".join(str(d) for d in dests)
            lines.append(f"{src}: {tail}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        entries = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            head, _, tail = line.partition(":")
            src = int(head)
            if src in entries:
                raise ValueError(f"node {src} listed twice")
            entries[src] = tuple(int(tok) for tok in tail.split())
        n = len(entries)
        if sorted(entries) != list(range(n)):
            raise ValueError("node ids must be exactly 0..L-1")
        return cls([entries[src] for src in range(n)])

    def __eq__(self, other):
        return isinstance(other, Topology) and self.out_edges == other.out_edges

    def __repr__(self):
        edges = sum(len(d) for d in self.out_edges)
        return f"Topology(n_nodes={self.n_nodes}, directed_edges={edges})"


def ring_topology(n_nodes, degree):
    """Each node points at its next ``degree`` neighbors around a ring.

    degree 0 is the disconnected baseline; degree L-1 is fully connected.
    """
    n_nodes = int(n_nodes)
    degree = int(degree)
    if n_nodes < 1:
        raise ValueError("n_nodes must be positive")
    if not 0 <= degree <= n_nodes - 1:
        raise ValueError(f"degree={degree} outside 0..{n_nodes - 1}")
    return Topology([tuple((l + j) % n_nodes for j in range(1, degree + 1))
                     for l in range(n_nodes)])


def random_topology(n_nodes, degree, rng):
    """Directed ring backbone plus ``degree - 1`` random out-edges per node.

    Every node ends up with exactly ``degree`` distinct external out-edges;
    in-degrees vary. Defined for degree >= 2 (below that there is nothing
    random to add).
    """
    n_nodes = int(n_nodes)
    degree = int(degree)
    if not 2 <= degree <= n_nodes - 1:
        raise ValueError(f"degree={degree} outside 2..{n_nodes - 1}")
    edges = []
    for l in range(n_nodes):
        ring_next = (l + 1) % n_nodes
        pool = np.setdiff1d(np.arange(n_nodes), [l, ring_next])
        extra = rng.choice(pool, size=degree - 1, replace=False)
        edges.append((ring_next,) + tuple(int(e) for e in np.sort(extra)))
    return Topology(edges)


def watts_strogatz(n_nodes, q, p, rng):
    """Small-world graph: ring lattice with q neighbors per side, each edge
    rewired with probability p; every undirected link becomes two directed
    edges.

    Rewiring moves the far endpoint and keeps the near one; a draw that
    would create a self-loop or duplicate link is redrawn, so the edge
    count is exactly ``n_nodes * q`` undirected links. A node already
    linked to everyone keeps its edge (nowhere left to rewire to).
    """
    n_nodes = int(n_nodes)
    q = int(q)
    p = float(p)
    if n_nodes < 3:
        raise ValueError("need at least 3 nodes")
    if not 1 <= q or 2 * q > n_nodes - 1:
        raise ValueError(f"q={q} outside 1..{(n_nodes - 1) // 2}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p={p} outside [0, 1]")

    adjacency = [set() for _ in range(n_nodes)]

    def link(u, v):
        adjacency[u].add(v)
        adjacency[v].add(u)

    def unlink(u, v):
        adjacency[u].discard(v)
        adjacency[v].discard(u)

    for l in range(n_nodes):
        for j in range(1, q + 1):
            link(l, (l + j) % n_nodes)

    for l in range(n_nodes):
        for j in range(1, q + 1):
            far = (l + j) % n_nodes
            # Only rewire links that still exist in their lattice position.
            if far not in adjacency[l]:
                continue
            if rng.random() >= p:
                continue
            if len(adjacency[l]) >= n_nodes - 1:
                continue  # saturated: keep the edge
            while True:
                target = int(rng.integers(n_nodes))
                if target != l and target not in adjacency[l]:
                    break
            unlink(l, far)
            link(l, target)

    return Topology([tuple(sorted(adjacency[l])) for l in range(n_nodes)])
