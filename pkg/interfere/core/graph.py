"""Graph representation, ingestion, generation, distance shells and summaries"""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .exceptions import GraphError, GraphFormatError, ParameterError
from .rng import STREAM_SAMPLING, int_seed, make_rng

logger = logging.getLogger(__name__)

GENERATOR_KINDS = ['erdos_renyi', 'watts_strogatz', 'barabasi_albert']

SUMMARY_COLUMNS = ['network', 'nodes', 'edges', 'avg_degree', 'avg_pairwise_dist', 'diameter']

# Sources per BFS block; bounds the dense distance block at BFS_CHUNK x n
BFS_CHUNK = 256


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph on dense node ids 0..n-1.

    ``adjacency[i]`` is the sorted, duplicate-free neighbor array of node i.
    ``id_map[i]`` is the original id of node i (identity for generated graphs).
    Instances are immutable and safe to share across threads.
    """
    n: int
    adjacency: Tuple[np.ndarray, ...]
    id_map: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise GraphError(f"adjacency has {len(self.adjacency)} rows for {self.n} nodes")
        if not self.id_map:
            object.__setattr__(self, 'id_map', tuple(range(self.n)))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Tuple[int, int]], id_map: Sequence[int] = ()) -> 'Graph':
        """Build from an edge iterable; duplicates and self-loops are ignored"""
        neighbor_sets: List[set] = [set() for _ in range(n)]
        for i, j in edges:
            if i == j:
                continue
            if not (0 <= i < n and 0 <= j < n):
                raise GraphError(f"edge ({i}, {j}) outside 0..{n - 1}")
            neighbor_sets[i].add(j)
            neighbor_sets[j].add(i)
        adjacency = tuple(np.array(sorted(s), dtype=np.int64) for s in neighbor_sets)
        return cls(n=n, adjacency=adjacency, id_map=tuple(id_map))

    @classmethod
    def from_networkx(cls, nx_graph: nx.Graph) -> 'Graph':
        nodes = sorted(nx_graph.nodes())
        index = {node: k for k, node in enumerate(nodes)}
        edges = ((index[u], index[v]) for u, v in nx_graph.edges())
        return cls.from_edges(len(nodes), edges, id_map=nodes)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges())
        return g

    def neighbors(self, i: int) -> np.ndarray:
        return self.adjacency[i]

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    @cached_property
    def num_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    def edges(self) -> List[Tuple[int, int]]:
        return [(i, int(j)) for i in range(self.n) for j in self.adjacency[i] if i < j]

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix"""
        indptr = np.concatenate([[0], np.cumsum(self.degrees)]).astype(np.int64)
        indices = np.concatenate(self.adjacency) if self.n else np.zeros(0, dtype=np.int64)
        data = np.ones(len(indices), dtype=np.float64)
        return sparse.csr_matrix((data, indices, indptr), shape=(self.n, self.n))


@dataclass(frozen=True)
class EdgeListResult:
    """Parsed edge list plus the cleanup counts reported to the caller"""
    graph: Graph
    duplicates_dropped: int
    self_loops_dropped: int

    @property
    def id_map(self) -> Tuple[int, ...]:
        return self.graph.id_map


def load_edge_list(text: str) -> EdgeListResult:
    """Parse whitespace-separated ``u v`` lines into a simple undirected graph.

    Text after ``#`` is ignored. Node ids are compacted to 0..n-1 in
    ascending order of original id; the original ids stay in ``graph.id_map``.
    """
    pairs: List[Tuple[int, int]] = []
    seen = set()
    nodes = set()
    duplicates = 0
    self_loops = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"expected 2 tokens, got {len(tokens)}", line_no)
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"non-integer node id in {line!r}", line_no)
        nodes.add(u)
        nodes.add(v)
        if u == v:
            self_loops += 1
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            duplicates += 1
            continue
        seen.add(key)
        pairs.append(key)

    if not nodes:
        raise GraphFormatError("empty edge list")

    if duplicates or self_loops:
        logger.warning("Dropped %d duplicate edge(s) and %d self-loop(s)", duplicates, self_loops)

    original_ids = sorted(nodes)
    index = {node: k for k, node in enumerate(original_ids)}
    graph = Graph.from_edges(len(original_ids), ((index[u], index[v]) for u, v in pairs), id_map=original_ids)
    return EdgeListResult(graph=graph, duplicates_dropped=duplicates, self_loops_dropped=self_loops)


def read_edge_list(path: str) -> EdgeListResult:
    file_path = Path(path)
    if not file_path.exists():
        raise GraphError(f"Edge list not found: {path}")
    return load_edge_list(file_path.read_text())


def write_edge_list(graph: Graph, original_ids: bool = True) -> str:
    ids = graph.id_map if original_ids else range(graph.n)
    lines = [f"# nodes {graph.n} edges {graph.num_edges}"]
    lines.extend(f"{ids[i]} {ids[j]}" for i, j in graph.edges())
    return '\n'.join(lines) + '\n'


def induced_subgraph(graph: Graph, nodes: Sequence[int]) -> Graph:
    """Subgraph on ``nodes`` (kept in ascending order); id_map carries original ids"""
    nodes = sorted(int(v) for v in nodes)
    index = {v: k for k, v in enumerate(nodes)}
    edges = ((index[i], index[int(j)]) for i in nodes for j in graph.adjacency[i] if int(j) in index and i < j)
    return Graph.from_edges(len(nodes), edges, id_map=[graph.id_map[v] for v in nodes])


def connected_components(graph: Graph) -> Tuple[int, np.ndarray]:
    return csgraph.connected_components(graph.csr, directed=False)


def largest_connected_component(graph: Graph) -> Graph:
    """Induced subgraph on the largest component.

    Ties go to the component holding the smallest original node id.
    """
    count, labels = connected_components(graph)
    if count <= 1:
        return graph
    sizes = np.bincount(labels, minlength=count)
    original = np.asarray(graph.id_map)
    best = None
    for label in range(count):
        members = np.flatnonzero(labels == label)
        key = (-int(sizes[label]), int(original[members].min()))
        if best is None or key < best[0]:
            best = (key, members)
    return induced_subgraph(graph, best[1])


def _validate_generator(kind: str, n: int, p: Optional[float], k: Optional[int],
                        beta: Optional[float], m: Optional[int]) -> None:
    errors = []
    if kind not in GENERATOR_KINDS:
        raise GraphError(f"Unknown generator '{kind}', expected one of {', '.join(GENERATOR_KINDS)}")
    if not isinstance(n, (int, np.integer)) or n < 1:
        errors.append(f"n must be a positive integer, got {n}")
    if kind == 'erdos_renyi':
        if p is None or not 0.0 <= p <= 1.0:
            errors.append(f"erdos_renyi needs 0 <= p <= 1, got {p}")
    elif kind == 'watts_strogatz':
        if k is None or k < 0 or k % 2 != 0 or k >= n:
            errors.append(f"watts_strogatz needs even k < n, got k={k}")
        if beta is None or not 0.0 <= beta <= 1.0:
            errors.append(f"watts_strogatz needs 0 <= beta <= 1, got {beta}")
    elif kind == 'barabasi_albert':
        if m is None or m < 1 or m >= n:
            errors.append(f"barabasi_albert needs 1 <= m < n, got m={m}")
    if errors:
        raise GraphError('; '.join(errors))


def gen_random_graph(kind: str, n: int, seed: int, p: Optional[float] = None, k: Optional[int] = None,
                     beta: Optional[float] = None, m: Optional[int] = None) -> Graph:
    """Seeded synthetic graph; identical output for identical (kind, params, n, seed)"""
    _validate_generator(kind, n, p, k, beta, m)
    nx_seed = int_seed(seed)
    if kind == 'erdos_renyi':
        nx_graph = nx.gnp_random_graph(n, p, seed=nx_seed)
    elif kind == 'watts_strogatz':
        nx_graph = nx.watts_strogatz_graph(n, k, beta, seed=nx_seed)
    else:
        nx_graph = nx.barabasi_albert_graph(n, m, seed=nx_seed)
    return Graph.from_networkx(nx_graph)


def bfs_distances(graph: Graph, sources: Sequence[int], limit: Optional[int] = None) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield ``(source_block, distance_block)`` for blocks of BFS sources.

    Distances are hop counts; unreachable nodes (or nodes beyond ``limit``)
    are ``inf``.
    """
    sources = np.asarray(sources, dtype=np.int64)
    kwargs = {} if limit is None else {'limit': float(limit)}
    for start in range(0, len(sources), BFS_CHUNK):
        block = sources[start:start + BFS_CHUNK]
        dist = csgraph.dijkstra(graph.csr, directed=False, indices=block, unweighted=True, **kwargs)
        yield block, np.atleast_2d(dist)


@dataclass(frozen=True, eq=False)
class DistanceShells:
    """Nodes at exact geodesic distance rho from each node, for rho in 1..rho_max.

    ``matrices[rho - 1]`` is a 0/1 CSR matrix whose row i marks shell(i, rho);
    the matrices are symmetric and never mark the diagonal.
    """
    n: int
    rho_max: int
    matrices: Tuple[sparse.csr_matrix, ...]

    def shell(self, i: int, rho: int) -> np.ndarray:
        if rho < 1 or rho > self.rho_max:
            return np.zeros(0, dtype=np.int64)
        m = self.matrices[rho - 1]
        return m.indices[m.indptr[i]:m.indptr[i + 1]].astype(np.int64)

    @cached_property
    def sizes(self) -> np.ndarray:
        """Array of shape (rho_max + 1, n); row 0 is the ego and always zero"""
        out = np.zeros((self.rho_max + 1, self.n), dtype=np.int64)
        for rho, m in enumerate(self.matrices, start=1):
            out[rho] = np.diff(m.indptr)
        return out

    @cached_property
    def nonempty_fraction(self) -> np.ndarray:
        """phi[rho]: fraction of nodes whose rho-shell is nonempty"""
        if self.n == 0:
            return np.zeros(self.rho_max + 1)
        return (self.sizes > 0).mean(axis=1)


def distance_shells(graph: Graph, rho_max: int) -> DistanceShells:
    """Per-node BFS truncated at depth ``rho_max``"""
    if rho_max < 0:
        raise ParameterError(f"rho_max must be >= 0, got {rho_max}")
    n = graph.n
    if rho_max == 0 or n == 0:
        return DistanceShells(n=n, rho_max=rho_max, matrices=tuple(
            sparse.csr_matrix((n, n)) for _ in range(rho_max)))

    rows: List[List[np.ndarray]] = [[] for _ in range(rho_max)]
    cols: List[List[np.ndarray]] = [[] for _ in range(rho_max)]
    for block, dist in bfs_distances(graph, np.arange(n), limit=rho_max):
        for rho in range(1, rho_max + 1):
            r, c = np.nonzero(dist == rho)
            rows[rho - 1].append(block[r])
            cols[rho - 1].append(c)

    matrices = []
    for rho in range(rho_max):
        r = np.concatenate(rows[rho])
        c = np.concatenate(cols[rho])
        m = sparse.csr_matrix((np.ones(len(r)), (r, c)), shape=(n, n))
        m.sort_indices()
        matrices.append(m)
    return DistanceShells(n=n, rho_max=rho_max, matrices=tuple(matrices))


@dataclass(frozen=True)
class GraphSummary:
    nodes: int
    edges: int
    avg_degree: float
    avg_pairwise_distance: float
    diameter: int
    diameter_is_lower_bound: bool = False
    distances_on_lcc: bool = False
    lcc_nodes: int = 0

    def as_row(self, label: str) -> Dict[str, object]:
        return {
            'network': label,
            'nodes': self.nodes,
            'edges': self.edges,
            'avg_degree': round(self.avg_degree, 2),
            'avg_pairwise_dist': round(self.avg_pairwise_distance, 2),
            'diameter': self.diameter,
        }


def graph_summary(graph: Graph, exact_distances: bool = True, sample_size: int = 64, seed: int = 0) -> GraphSummary:
    """Node/edge counts, average degree, average pairwise distance and diameter.

    Distances are computed on the largest connected component. With
    ``exact_distances`` every node is a BFS source; otherwise ``sample_size``
    uniformly drawn sources estimate the average distance and give a lower
    bound on the diameter.
    """
    if graph.n == 0:
        raise GraphError("cannot summarise an empty graph")

    lcc = largest_connected_component(graph)
    on_lcc = lcc.n < graph.n
    if on_lcc:
        logger.warning("Graph is disconnected; distance statistics use the largest component (%d of %d nodes)",
                       lcc.n, graph.n)

    if exact_distances or sample_size >= lcc.n:
        sources = np.arange(lcc.n)
        lower_bound = False
    else:
        if sample_size < 1:
            raise ParameterError(f"sample_size must be >= 1, got {sample_size}")
        rng = make_rng(seed, STREAM_SAMPLING)
        sources = np.sort(rng.choice(lcc.n, size=sample_size, replace=False))
        lower_bound = True
        logger.info("Diameter from %d sampled sources is a lower bound", sample_size)

    total = 0.0
    pairs = 0
    diameter = 0
    for block, dist in bfs_distances(lcc, sources):
        total += float(dist.sum())
        pairs += dist.shape[0] * (lcc.n - 1)
        diameter = max(diameter, int(dist.max()))

    return GraphSummary(
        nodes=graph.n,
        edges=graph.num_edges,
        avg_degree=2.0 * graph.num_edges / graph.n,
        avg_pairwise_distance=total / pairs if pairs else 0.0,
        diameter=diameter,
        diameter_is_lower_bound=lower_bound,
        distances_on_lcc=on_lcc,
        lcc_nodes=lcc.n,
    )
