"""Dependency graphs, degree-rate diagnostics, Stein bound terms and discrete derivatives.

Degree convention: ``d`` counts neighbors only, so ``d = 0`` means the
units are mutually independent.
"""

import csv
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from .estimators import ENUMERATION_BLOCK, Assignment, Design, draw_assignment_block, validate_pi
from .exceptions import DegenerateAssignmentError, EnumerationLimitError, ParameterError
from .executor import SERIAL, ReplicateExecutor
from .graph import Graph, bfs_distances
from .outcomes import OutcomeOracle
from .rng import STREAM_DIAGNOSTIC, make_rng

logger = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 14

CONSTRUCTIONS = ['analytic_decay', 'brute_force']

BOUND_LABEL = 'bound shape, constants unspecified'


@dataclass(frozen=True, eq=False)
class DependencyGraph:
    """Symmetric dependency graph stored as a boolean CSR matrix without diagonal"""
    n: int
    matrix: sparse.csr_matrix
    construction: str

    def __post_init__(self):
        if self.construction not in CONSTRUCTIONS:
            raise ParameterError(f"unknown construction {self.construction!r}")
        coo = sparse.coo_matrix(self.matrix)
        keep = (coo.row != coo.col) & (coo.data != 0)
        m = sparse.csr_matrix((np.ones(int(keep.sum()), dtype=bool), (coo.row[keep], coo.col[keep])),
                              shape=(self.n, self.n))
        m.sort_indices()
        object.__setattr__(self, 'matrix', m)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.matrix.indptr).astype(np.int64)

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if self.n else 0

    def neighbors(self, i: int) -> np.ndarray:
        return self.matrix.indices[self.matrix.indptr[i]:self.matrix.indptr[i + 1]].astype(np.int64)

    def neighborhoods(self) -> List[np.ndarray]:
        return [self.neighbors(i) for i in range(self.n)]

    def edges(self) -> List[Tuple[int, int]]:
        upper = sparse.triu(self.matrix, k=1).tocoo()
        return sorted(zip(upper.row.tolist(), upper.col.tolist()))

    def same_edges(self, other: 'DependencyGraph') -> bool:
        return self.n == other.n and (self.matrix != other.matrix).nnz == 0

    def to_edge_list(self) -> str:
        lines = [f"# dependency graph ({self.construction}) nodes {self.n} max_degree {self.max_degree}"]
        lines.extend(f"{i} {j}" for i, j in self.edges())
        return '\n'.join(lines) + '\n'


def dependency_from_decay_model(graph: Graph, rho_max: int) -> DependencyGraph:
    """Edge (i, j) iff 0 < dist(i, j) <= 2 * rho_max.

    Unit k influences i iff dist(k, i) <= rho_max, so i and j share an
    influencer exactly when they are within 2 * rho_max of each other.
    """
    if rho_max < 0:
        raise ParameterError(f"rho_max must be >= 0, got {rho_max}")
    n = graph.n
    if rho_max == 0 or n == 0:
        return DependencyGraph(n=n, matrix=sparse.csr_matrix((n, n), dtype=bool), construction='analytic_decay')

    rows, cols = [], []
    for block, dist in bfs_distances(graph, np.arange(n), limit=2 * rho_max):
        r, c = np.nonzero((dist > 0) & (dist <= 2 * rho_max))
        rows.append(block[r])
        cols.append(c)
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    matrix = sparse.csr_matrix((np.ones(len(r), dtype=bool), (r, c)), shape=(n, n))
    return DependencyGraph(n=n, matrix=matrix, construction='analytic_decay')


def _decode(codes: np.ndarray, n: int) -> np.ndarray:
    bits = np.arange(n, dtype=np.int64)
    return ((codes[:, None] >> bits[None, :]) & 1).astype(np.int8)


def influence_matrix(oracle: OutcomeOracle, cap: int = BRUTE_FORCE_CAP,
                     executor: ReplicateExecutor = SERIAL) -> np.ndarray:
    """I[l, j] is True iff flipping w_l changes Y_j for some base assignment; I[l, l] is True"""
    n = oracle.n
    if n > cap:
        raise EnumerationLimitError(f"brute-force search over 2^{n} assignments exceeds the cap n <= {cap}")

    def flips(start: int, stop: int) -> np.ndarray:
        found = np.zeros((n, n), dtype=bool)
        base = _decode(np.arange(start, stop, dtype=np.int64), n)
        for l in range(n):
            low = base[base[:, l] == 0]
            if not len(low):
                continue
            high = low.copy()
            high[:, l] = 1
            found[l] |= (oracle.evaluate_batch(low) != oracle.evaluate_batch(high)).any(axis=0)
        return found

    blocks = ReplicateExecutor(executor.max_workers, chunk_size=ENUMERATION_BLOCK).map_chunks(flips, 1 << n)
    influence = np.logical_or.reduce(blocks)
    np.fill_diagonal(influence, True)
    return influence


def dependency_brute_force(oracle: OutcomeOracle, cap: int = BRUTE_FORCE_CAP,
                           executor: ReplicateExecutor = SERIAL) -> DependencyGraph:
    """Edge (i, j) iff some unit l influences both i and j"""
    influence = influence_matrix(oracle, cap, executor).astype(np.int64)
    shared = (influence.T @ influence) > 0
    np.fill_diagonal(shared, False)
    return DependencyGraph(n=oracle.n, matrix=sparse.csr_matrix(shared), construction='brute_force')


@dataclass(frozen=True)
class DegreeRateReport:
    """Degree growth against n^(1/4) and n^(1/3).

    A finite sequence cannot verify a limit; the flags are advisory.
    """
    n: Tuple[int, ...]
    d: Tuple[int, ...]
    ratio_quarter: Tuple[float, ...]
    ratio_third: Tuple[float, ...]
    slope: Optional[float]
    flag_quarter: bool
    flag_third: bool

    NOTE = 'advisory: a finite sequence cannot verify an asymptotic rate'

    @property
    def trend_quarter(self) -> str:
        return 'non-decreasing' if self.flag_quarter else 'decreasing'

    @property
    def trend_third(self) -> str:
        return 'non-decreasing' if self.flag_third else 'decreasing'

    def rows(self) -> List[Dict[str, Any]]:
        return [{'n': n, 'd': d, 'ratio_quarter': round(q, 6), 'ratio_third': round(t, 6)}
                for n, d, q, t in zip(self.n, self.d, self.ratio_quarter, self.ratio_third)]


def degree_rate_report(d_seq: Sequence[Tuple[int, int]]) -> DegreeRateReport:
    """Tabulate d_n / n^(1/4) and d_n / n^(1/3) and flag non-decreasing trends.

    The trend is the slope of a least-squares fit of log d_n on log n; a
    ratio d_n / n^a is flagged when the slope is at least a. Entries with
    d_n = 0 are left out of the fit.
    """
    if not d_seq:
        raise ParameterError("degree sequence is empty")
    ns = np.array([int(n) for n, _ in d_seq], dtype=np.float64)
    ds = np.array([int(d) for _, d in d_seq], dtype=np.float64)
    if (ns <= 0).any() or (ds < 0).any():
        raise ParameterError("n must be positive and d non-negative")
    if (np.diff(ns) <= 0).any():
        raise ParameterError("n values must be strictly increasing")

    positive = ds > 0
    slope = None
    if positive.sum() >= 2:
        slope = float(np.polyfit(np.log(ns[positive]), np.log(ds[positive]), 1)[0])

    return DegreeRateReport(
        n=tuple(int(v) for v in ns),
        d=tuple(int(v) for v in ds),
        ratio_quarter=tuple((ds / ns ** 0.25).tolist()),
        ratio_third=tuple((ds / ns ** (1.0 / 3.0)).tolist()),
        slope=slope,
        flag_quarter=slope is not None and slope >= 0.25,
        flag_third=slope is not None and slope >= 1.0 / 3.0,
    )


@dataclass(frozen=True)
class SteinBoundReport:
    d: int
    sigma_sq: float
    term1: float
    term2: float
    c1: float = 1.0
    c2: float = 1.0
    label: str = BOUND_LABEL

    @property
    def bound(self) -> float:
        return self.c1 * self.term1 + self.c2 * self.term2

    def to_dict(self) -> Dict[str, Any]:
        return {'d': self.d, 'sigma_sq': self.sigma_sq, 'term1': self.term1, 'term2': self.term2,
                'c1': self.c1, 'c2': self.c2, 'bound': self.bound, 'label': self.label}


def stein_bound_terms(x_moments, d: int, sigma_sq: float, c1: float = 1.0, c2: float = 1.0) -> SteinBoundReport:
    """Dependency-graph Wasserstein bound for a sum of dependent summands.

    ``x_moments`` has one ``(E X_i^4, E|X_i|^3)`` row per summand. Returns
    term1 = d^(3/2) / sigma^2 * sqrt(sum E X^4) and
    term2 = d^2 / sigma^3 * sum E|X|^3.
    """
    if sigma_sq <= 0:
        raise ParameterError(f"sigma_sq must be > 0, got {sigma_sq}")
    if d < 0:
        raise ParameterError(f"d must be >= 0, got {d}")
    if c1 < 0 or c2 < 0:
        raise ParameterError("bound constants must be non-negative")
    moments = np.asarray(x_moments, dtype=np.float64).reshape(-1, 2)
    if (moments < 0).any():
        raise ParameterError("moments must be non-negative")
    fourth = math.fsum(moments[:, 0])
    third = math.fsum(moments[:, 1])
    term1 = d ** 1.5 / sigma_sq * math.sqrt(fourth)
    term2 = d ** 2 / sigma_sq ** 1.5 * third
    return SteinBoundReport(d=int(d), sigma_sq=sigma_sq, term1=term1, term2=term2, c1=c1, c2=c2)


@dataclass(frozen=True)
class SummandMoments:
    """Moments of X_i = n^(-1/2) (psi_i - E psi_i) for the Horvitz-Thompson summands psi_i"""
    fourth: np.ndarray
    third_abs: np.ndarray
    sigma_sq: float
    replicates: int

    def as_pairs(self) -> np.ndarray:
        return np.column_stack([self.fourth, self.third_abs])


def ht_summand_moments(oracle: OutcomeOracle, pi: float, replicates: int, seed: int,
                       executor: ReplicateExecutor = SERIAL) -> SummandMoments:
    """Monte Carlo moments of the centred, scaled Horvitz-Thompson summands.

    sqrt(n) (tau_tilde - tau) = sum_i X_i, so sigma_sq is the variance of
    that sum across replicates.
    """
    if replicates < 2:
        raise ParameterError(f"need at least 2 replicates, got {replicates}")
    pi = validate_pi(pi)
    design = Design(pi=pi, seed=seed)
    n = oracle.n

    def chunk(start: int, stop: int) -> np.ndarray:
        w_block = draw_assignment_block(design, n, start, stop)
        y = oracle.evaluate_batch(w_block)
        return np.where(w_block == 1, y / pi, -y / (1.0 - pi))

    psi = np.concatenate(executor.map_chunks(chunk, replicates))
    x = (psi - psi.mean(axis=0)) / math.sqrt(n)
    totals = x.sum(axis=1)
    return SummandMoments(
        fourth=(x ** 4).mean(axis=0),
        third_abs=(np.abs(x) ** 3).mean(axis=0),
        sigma_sq=float(np.var(totals, ddof=1)),
        replicates=replicates,
    )


@dataclass(frozen=True)
class DerivativeReport:
    i: int
    delta_f_direct: float
    a_term: float
    b_terms: np.ndarray

    @property
    def decomposed(self) -> float:
        n = self.b_terms.size
        return math.sqrt(n) * (self.a_term + math.fsum(self.b_terms))

    @property
    def identity_residual(self) -> float:
        return abs(self.delta_f_direct - self.decomposed)


def discrete_derivative(oracle: OutcomeOracle, w: Assignment, w_prime_i: int, i: int, pi: float) -> DerivativeReport:
    """Delta_i f_n = f_n(W) - f_n(W^i) for f_n = sqrt(n) (tau_hat - tau).

    W^i is W with unit i set to ``w_prime_i``. tau cancels in the difference
    and is never computed; ``pi`` is only validated. ``b_terms[i]`` is zero.
    """
    validate_pi(pi)
    if w_prime_i not in (0, 1):
        raise ParameterError(f"w_prime_i must be 0 or 1, got {w_prime_i}")
    n = oracle.n
    if w.n != n:
        raise ParameterError(f"assignment has {w.n} units, oracle has {n}")
    if not 0 <= i < n:
        raise ParameterError(f"unit {i} outside 0..{n - 1}")

    w_i = int(w.w[i])
    w_alt = w.flipped(i, w_prime_i)
    n1, n0 = w.n1, w.n0
    n1_alt, n0_alt = w_alt.n1, w_alt.n0
    if min(n1, n0, n1_alt, n0_alt) < 1:
        raise DegenerateAssignmentError(
            f"both arms must be nonempty before and after the perturbation (N1={n1}, N0={n0}, "
            f"N1'={n1_alt}, N0'={n0_alt})")

    y = oracle.evaluate(w.w)
    y_alt = oracle.evaluate(w_alt.w)
    y0_i, y1_i = (v[i] for v in oracle.potential_outcomes(w.w))

    tau_hat = y[w.w == 1].mean() - y[w.w == 0].mean()
    tau_hat_alt = y_alt[w_alt.w == 1].mean() - y_alt[w_alt.w == 0].mean()
    direct = math.sqrt(n) * (tau_hat - tau_hat_alt)

    a_term = (w_i / n1 - w_prime_i / n1_alt) * y1_i - ((1 - w_i) / n0 - (1 - w_prime_i) / n0_alt) * y0_i
    wr = w.w.astype(np.float64)
    b_terms = (wr / n1 * y - wr / n1_alt * y_alt) - ((1 - wr) / n0 * y - (1 - wr) / n0_alt * y_alt)
    b_terms[i] = 0.0
    return DerivativeReport(i=i, delta_f_direct=float(direct), a_term=float(a_term), b_terms=b_terms)


def radius_neighborhoods(graph: Graph, h: int) -> List[np.ndarray]:
    """Nodes within distance h of each node, ego excluded"""
    if h < 0:
        raise ParameterError(f"h must be >= 0, got {h}")
    if h == 0:
        return [np.zeros(0, dtype=np.int64) for _ in range(graph.n)]
    out: List[np.ndarray] = []
    for block, dist in bfs_distances(graph, np.arange(graph.n), limit=h):
        for row in dist:
            out.append(np.flatnonzero((row > 0) & (row <= h)))
    return out


@dataclass(frozen=True)
class WeakInterferenceReport:
    """Per-node max over samples of the outside-neighborhood interference sums"""
    per_node: np.ndarray
    samples: int

    @property
    def maximum(self) -> float:
        return float(self.per_node.max()) if self.per_node.size else 0.0

    @property
    def mean(self) -> float:
        return float(self.per_node.mean()) if self.per_node.size else 0.0


def ego_flip_effects(oracle: OutcomeOracle, w: np.ndarray) -> np.ndarray:
    """E[i, r] = Y_r(w with w_i = 1) - Y_r(w with w_i = 0)"""
    n = oracle.n
    high = np.tile(np.asarray(w, dtype=np.int8), (n, 1))
    np.fill_diagonal(high, 1)
    low = high.copy()
    np.fill_diagonal(low, 0)
    return oracle.evaluate_batch(high) - oracle.evaluate_batch(low)


def weak_interference_diagnostic(oracle: OutcomeOracle, neighborhoods: Sequence[np.ndarray], samples: int,
                                 seed: int, pi: float = 0.5) -> WeakInterferenceReport:
    """max{sum_{r not in N_i} |Delta_i Y_r|, sum_{r not in N_i} |Delta_r Y_i|} per node.

    Neighborhoods exclude the ego, and r = i is never counted.
    """
    n = oracle.n
    if len(neighborhoods) != n:
        raise ParameterError(f"expected {n} neighborhoods, got {len(neighborhoods)}")
    if samples < 1:
        raise ParameterError(f"samples must be >= 1, got {samples}")
    pi = validate_pi(pi)

    outside = np.ones((n, n), dtype=bool)
    np.fill_diagonal(outside, False)
    for i, nodes in enumerate(neighborhoods):
        outside[i, np.asarray(nodes, dtype=np.int64)] = False

    per_node = np.zeros(n)
    for s in range(samples):
        w = (make_rng(seed, STREAM_DIAGNOSTIC, s).random(n) < pi).astype(np.int8)
        effects = np.abs(ego_flip_effects(oracle, w))
        sent = np.where(outside, effects, 0.0).sum(axis=1)
        received = np.where(outside, effects.T, 0.0).sum(axis=1)
        per_node = np.maximum(per_node, np.maximum(sent, received))
    logger.debug("Weak interference diagnostic over %d samples: max %.3e", samples, per_node.max())
    return WeakInterferenceReport(per_node=per_node, samples=samples)


def read_moments_csv(path: str) -> np.ndarray:
    """Rows of ``E X^4, E|X|^3``; a non-numeric first row is a header"""
    file_path = Path(path)
    if not file_path.exists():
        raise ParameterError(f"File not found: {path}")
    rows = []
    with open(file_path, newline='') as f:
        for row_no, row in enumerate(csv.reader(f), start=1):
            if not row or not ''.join(row).strip():
                continue
            try:
                rows.append([float(row[0]), float(row[1])])
            except (ValueError, IndexError):
                if row_no == 1:
                    continue
                raise ParameterError(f"{path}: row {row_no} needs two numeric columns")
    return np.asarray(rows, dtype=np.float64).reshape(-1, 2)
