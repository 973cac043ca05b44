"""Graph ingestion and exact clique ground truth for small graphs.

Vertices are 1-indexed in every external format (DIMACS convention) and
0-indexed internally.  Graphs are stored as dense 0/1 adjacency matrices.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceeded, GraphParseError, ValidationError

#: Largest vertex count accepted by the exhaustive clique search.
CLIQUE_BUDGET = 20


class Verdict(str, enum.Enum):
    YES = "YES"
    NO = "NO"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph held as a read-only symmetric 0/1 matrix."""

    adj: np.ndarray

    def __post_init__(self):
        adj = np.array(self.adj, dtype=np.int8)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ValidationError("adjacency matrix must be square and non-empty")
        if not np.isin(adj, (0, 1)).all():
            raise ValidationError("adjacency entries must be 0 or 1")
        if not (adj == adj.T).all():
            raise ValidationError("adjacency matrix must be symmetric")
        if np.diag(adj).any():
            raise ValidationError("self-loops are not allowed in a simple graph")
        adj.setflags(write=False)
        object.__setattr__(self, "adj", adj)

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adj, other.adj)

    def __hash__(self):
        return hash((self.n, self.adj.tobytes()))

    @property
    def n(self) -> int:
        return self.adj.shape[0]

    @property
    def edge_count(self) -> int:
        return int(self.adj.sum()) // 2

    def edges(self) -> list[tuple[int, int]]:
        """0-indexed edges ``(s, t)`` with ``s < t`` in lexicographic order."""
        s, t = np.nonzero(np.triu(self.adj, 1))
        return list(zip(s.tolist(), t.tolist()))

    @classmethod
    def from_edges(cls, n: int, edges, one_indexed: bool = False) -> "Graph":
        adj = np.zeros((n, n), dtype=np.int8)
        shift = 1 if one_indexed else 0
        for u, v in edges:
            u, v = int(u) - shift, int(v) - shift
            if u == v:
                raise ValidationError(f"self-loop at vertex {u + shift}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValidationError(f"edge ({u + shift}, {v + shift}) out of range for n={n}")
            adj[u, v] = adj[v, u] = 1
        return cls(adj)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(np.ones((n, n), dtype=np.int8) - np.eye(n, dtype=np.int8))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(np.zeros((n, n), dtype=np.int8))


@dataclass(frozen=True)
class CliqueInstance:
    graph: Graph
    c: int

    def __post_init__(self):
        if not (1 <= self.c <= self.graph.n):
            raise ValidationError(f"clique size c={self.c} must lie in [1, n={self.graph.n}]")


def parse_graph(text: str) -> Graph:
    """Parse a DIMACS edge file or a JSON graph document.

    JSON documents look like ``{"n": 3, "edges": [[1, 2], [2, 3]]}`` and may
    carry an ``"adj"`` matrix instead of ``"edges"``.  Duplicate edges are
    collapsed; self-loops are rejected.
    """
    if text.lstrip().startswith("{"):
        return _parse_json_graph(text)
    return _parse_dimacs(text)


def _parse_json_graph(text: str) -> Graph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphParseError(exc.msg, line=exc.lineno) from exc
    if "adj" in doc:
        return Graph(np.asarray(doc["adj"]))
    try:
        n = int(doc["n"])
        edges = doc.get("edges", [])
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphParseError(f"JSON graph needs integer 'n' and 'edges': {exc}") from exc
    if n < 1:
        raise GraphParseError("vertex count must be positive")
    return Graph.from_edges(n, edges, one_indexed=True)


def _parse_dimacs(text: str) -> Graph:
    n = None
    edges: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        kind = tokens[0]
        if kind == "p":
            if len(tokens) != 4 or tokens[1] not in ("edge", "col"):
                raise GraphParseError("expected 'p edge <n> <m>'", line=lineno)
            if n is not None:
                raise GraphParseError("duplicate problem line", line=lineno)
            try:
                n = int(tokens[2])
                int(tokens[3])
            except ValueError:
                raise GraphParseError("non-integer size in problem line", line=lineno) from None
            if n < 1:
                raise GraphParseError("vertex count must be positive", line=lineno)
        elif kind == "e":
            if len(tokens) != 3:
                raise GraphParseError("expected 'e <u> <v>'", line=lineno)
            try:
                u, v = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise GraphParseError("non-integer vertex", line=lineno) from None
            if u == v:
                raise ValidationError(f"line {lineno}: self-loop at vertex {u}")
            if u < 1 or v < 1:
                raise GraphParseError("vertices are 1-indexed", line=lineno)
            edges.append((u, v, lineno))
        else:
            raise GraphParseError(f"unknown record type {kind!r}", line=lineno)
    if n is None:
        if not edges:
            raise GraphParseError("empty graph document")
        n = max(max(u, v) for u, v, _ in edges)
    adj = np.zeros((n, n), dtype=np.int8)
    for u, v, lineno in edges:
        if u > n or v > n:
            raise GraphParseError(f"vertex out of range 1..{n}", line=lineno)
        adj[u - 1, v - 1] = adj[v - 1, u - 1] = 1
    return Graph(adj)


def format_dimacs(g: Graph) -> str:
    lines = [f"p edge {g.n} {g.edge_count}"]
    lines += [f"e {s + 1} {t + 1}" for s, t in g.edges()]
    return "\n".join(lines) + "\n"


def maximum_clique(g: Graph) -> tuple[int, tuple[int, ...]]:
    """Exact clique number and a witness clique (0-indexed vertices).

    Enumerates every clique level by level, extending each k-clique only by
    vertices larger than its current maximum, so each vertex subset that
    forms a clique is visited exactly once.
    """
    if g.n > CLIQUE_BUDGET:
        raise BudgetExceeded(f"exhaustive clique search refused for n={g.n} > {CLIQUE_BUDGET}")
    nbr = [sum(1 << int(j) for j in np.flatnonzero(g.adj[i])) for i in range(g.n)]
    # level entries: (common neighbours with larger index, members)
    level = [(nbr[i] & ~((1 << (i + 1)) - 1), (i,)) for i in range(g.n)]
    best = level[0][1]
    while level:
        best = level[0][1]
        nxt = []
        for cand, members in level:
            while cand:
                low = cand & -cand
                j = low.bit_length() - 1
                cand ^= low
                nxt.append((cand & nbr[j], members + (j,)))
        level = nxt
    return len(best), best


def max_clique_bruteforce(g: Graph) -> int:
    return maximum_clique(g)[0]


def solve_clique(inst: CliqueInstance) -> Verdict:
    return Verdict.YES if max_clique_bruteforce(inst.graph) >= inst.c else Verdict.NO


def random_graph(n: int, p: float, rng: np.random.Generator) -> Graph:
    """G(n, p) sample."""
    upper = np.triu(rng.random((n, n)) < p, 1)
    return Graph((upper | upper.T).astype(np.int8))


def canonical_corpus(max_n: int, min_n: int = 1) -> list[Graph]:
    """Every simple graph on ``min_n..max_n`` vertices up to isomorphism (n <= 7)."""
    import networkx as nx

    if max_n > 7:
        raise BudgetExceeded("the graph atlas only covers n <= 7")
    out = []
    for h in nx.graph_atlas_g():
        k = h.number_of_nodes()
        if min_n <= k <= max_n:
            out.append(Graph(nx.to_numpy_array(h, nodelist=sorted(h.nodes()), dtype=np.int8)))
    return out
