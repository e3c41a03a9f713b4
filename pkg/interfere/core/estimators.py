"""Bernoulli designs and the difference-in-means / Horvitz-Thompson estimators"""

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterator, List, Tuple

import numpy as np

from .exceptions import DegenerateAssignmentError, EnumerationLimitError, ParameterError, RedrawBudgetExceeded
from .executor import SERIAL, ReplicateExecutor
from .rng import STREAM_ASSIGNMENT, make_rng

ENUMERATION_CAP = 20
ENUMERATION_BLOCK = 4096


def validate_pi(pi: float) -> float:
    if not 0.0 < pi < 1.0:
        raise ParameterError(f"treatment probability must lie in (0, 1), got {pi}")
    return float(pi)


@dataclass(frozen=True, eq=False)
class Assignment:
    """Binary treatment vector W with arm counts N1 and N0"""
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w)
        if w.ndim != 1:
            raise ParameterError("assignment must be a 1-d vector")
        if w.size and not np.isin(w, (0, 1)).all():
            raise ParameterError("assignment entries must be 0 or 1")
        object.__setattr__(self, 'w', w.astype(np.int8))

    @property
    def n(self) -> int:
        return int(self.w.size)

    @cached_property
    def n1(self) -> int:
        return int(self.w.sum())

    @property
    def n0(self) -> int:
        return self.n - self.n1

    def flipped(self, i: int, value: int) -> 'Assignment':
        w = self.w.copy()
        w[i] = value
        return Assignment(w)


@dataclass(frozen=True)
class Design:
    """Bernoulli(pi) design; every unit treated independently"""
    pi: float
    seed: int = 0

    def __post_init__(self):
        validate_pi(self.pi)


def _draw(rng: np.random.Generator, n: int, pi: float) -> np.ndarray:
    return (rng.random(n) < pi).astype(np.int8)


def draw_assignment(design: Design, n: int, replicate_index: int) -> Assignment:
    """First draw of the replicate's own stream; identical across runs and threads"""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    return Assignment(_draw(make_rng(design.seed, STREAM_ASSIGNMENT, replicate_index), n, design.pi))


def draw_nondegenerate(design: Design, n: int, replicate_index: int, min_arm: int = 1,
                       budget: int = 100) -> Tuple[Assignment, int]:
    """Draw until both arms hold at least ``min_arm`` units.

    Returns the assignment and the number of redraws it took. The first
    draw equals ``draw_assignment(design, n, replicate_index)``. ``budget``
    caps this replicate alone; callers running a whole cell also pass the
    cell total through ``check_redraw_budget``.
    """
    rng = make_rng(design.seed, STREAM_ASSIGNMENT, replicate_index)
    redraws = 0
    while True:
        w = _draw(rng, n, design.pi)
        n1 = int(w.sum())
        if n1 >= min_arm and n - n1 >= min_arm:
            return Assignment(w), redraws
        redraws += 1
        if redraws > budget:
            raise RedrawBudgetExceeded(
                f"replicate {replicate_index}: {redraws} degenerate draws exceed the budget of {budget}")


def check_redraw_budget(redraws: int, budget: int, replicates: int) -> None:
    """Fail a cell whose degenerate redraws, summed over all replicates, exceed ``budget``"""
    if redraws > budget:
        raise RedrawBudgetExceeded(
            f"{redraws} degenerate draws over {replicates} replicates exceed the cell budget of {budget}")


def check_outcome_length(a: Assignment, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (a.n,):
        raise ParameterError(f"outcome vector has shape {y.shape}, assignment has {a.n} units")
    return y


def require_arms(a: Assignment, min_arm: int = 1) -> None:
    if a.n1 < min_arm or a.n0 < min_arm:
        raise DegenerateAssignmentError(
            f"need at least {min_arm} unit(s) per arm, got N1={a.n1}, N0={a.n0}")


def arm_means(a: Assignment, y: np.ndarray) -> Tuple[float, float]:
    y = check_outcome_length(a, y)
    require_arms(a)
    treated = a.w == 1
    return float(y[treated].mean()), float(y[~treated].mean())


def diff_in_means(a: Assignment, y: np.ndarray) -> float:
    """(1/N1) sum W_i Y_i - (1/N0) sum (1 - W_i) Y_i"""
    mean1, mean0 = arm_means(a, y)
    return mean1 - mean0


def horvitz_thompson(a: Assignment, y: np.ndarray, pi: float) -> float:
    """Difference in means with the design sample sizes n*pi and n*(1 - pi)"""
    pi = validate_pi(pi)
    y = check_outcome_length(a, y)
    treated = a.w == 1
    return float(y[treated].sum() / (a.n * pi) - y[~treated].sum() / (a.n * (1.0 - pi)))


def enumerate_assignments(n: int, pi: float, cap: int = ENUMERATION_CAP) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
    """Yield ``(W_block, probabilities)`` over all 2**n assignments.

    Row k of the full enumeration is the binary expansion of k (unit 0 is
    the least significant bit).
    """
    pi = validate_pi(pi)
    if n > cap:
        raise EnumerationLimitError(
            f"exhaustive enumeration over 2^{n} assignments exceeds the cap n <= {cap}; use Monte Carlo instead")
    bits = np.arange(n, dtype=np.int64)
    total = 1 << n
    for start in range(0, total, ENUMERATION_BLOCK):
        codes = np.arange(start, min(start + ENUMERATION_BLOCK, total), dtype=np.int64)
        block = ((codes[:, None] >> bits[None, :]) & 1).astype(np.int8)
        k = block.sum(axis=1)
        yield block, pi ** k * (1.0 - pi) ** (n - k)


def design_expectation(oracle, pi: float, estimator: Callable[[Assignment, np.ndarray], float],
                       cap: int = ENUMERATION_CAP) -> float:
    """Exact expectation of ``estimator(W, Y(W))`` under the Bernoulli(pi) design"""
    terms: List[float] = []
    for block, probs in enumerate_assignments(oracle.n, pi, cap):
        outcomes = oracle.evaluate_batch(block)
        for w, y, p in zip(block, outcomes, probs):
            terms.append(p * estimator(Assignment(w), y))
    return float(np.sum(terms))


def read_column_csv(path: str) -> np.ndarray:
    """First column of a CSV file as floats; a non-numeric first row is a header"""
    file_path = Path(path)
    if not file_path.exists():
        raise ParameterError(f"File not found: {path}")
    values = []
    with open(file_path, newline='') as f:
        for row_no, row in enumerate(csv.reader(f), start=1):
            if not row or not row[0].strip():
                continue
            try:
                values.append(float(row[0]))
            except ValueError:
                if row_no == 1:
                    continue
                raise ParameterError(f"{path}: row {row_no} is not numeric: {row[0]!r}")
    return np.asarray(values, dtype=np.float64)


def read_assignment_csv(path: str) -> Assignment:
    return Assignment(read_column_csv(path))


def write_assignment_csv(a: Assignment, path: str, header: str = 'w') -> None:
    with open(path, 'w', newline='') as f:
        writer = csv.writer(f)
        writer.writerow([header])
        writer.writerows([int(v)] for v in a.w)


def shifted_variance(values: np.ndarray, ddof: int = 1) -> float:
    """Sample variance computed on ``values - values[0]``.

    Exactly zero for constant input.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.size <= ddof:
        raise ParameterError(f"need more than {ddof} value(s) for a variance, got {values.size}")
    shifted = values - values[0]
    return float(np.var(shifted, ddof=ddof))


def draw_assignment_block(design: Design, n: int, start: int, stop: int) -> np.ndarray:
    """Rows ``start..stop-1`` are ``draw_assignment(design, n, r).w``"""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    block = np.empty((stop - start, n), dtype=np.int8)
    for k, r in enumerate(range(start, stop)):
        block[k] = _draw(make_rng(design.seed, STREAM_ASSIGNMENT, r), n, design.pi)
    return block


def draw_nondegenerate_block(design: Design, n: int, start: int, stop: int, min_arm: int = 1,
                             budget: int = 100) -> Tuple[np.ndarray, int]:
    """Block version of ``draw_nondegenerate``; returns the rows and the total redraw count"""
    block = np.empty((stop - start, n), dtype=np.int8)
    redraws = 0
    for k, r in enumerate(range(start, stop)):
        a, extra = draw_nondegenerate(design, n, r, min_arm=min_arm, budget=budget)
        block[k] = a.w
        redraws += extra
    return block, redraws


def batch_diff_in_means(w_block: np.ndarray, y_block: np.ndarray) -> np.ndarray:
    """Row-wise difference in means; every row must have both arms"""
    treated = w_block == 1
    n1 = treated.sum(axis=1)
    n0 = w_block.shape[1] - n1
    if (n1 == 0).any() or (n0 == 0).any():
        raise DegenerateAssignmentError("assignment block contains a row with an empty arm")
    return np.where(treated, y_block, 0.0).sum(axis=1) / n1 - np.where(treated, 0.0, y_block).sum(axis=1) / n0


def batch_horvitz_thompson(w_block: np.ndarray, y_block: np.ndarray, pi: float) -> np.ndarray:
    pi = validate_pi(pi)
    n = w_block.shape[1]
    treated = w_block == 1
    return np.where(treated, y_block, 0.0).sum(axis=1) / (n * pi) - \
        np.where(treated, 0.0, y_block).sum(axis=1) / (n * (1.0 - pi))


def simulate_diff_in_means(oracle, design: Design, replicates: int, redraw_budget: int = 100,
                           executor: ReplicateExecutor = SERIAL) -> Tuple[np.ndarray, int]:
    """tau_hat for each replicate draw, in replicate order, plus the redraw count.

    ``redraw_budget`` bounds the redraws of all replicates together.
    """
    if replicates < 1:
        raise ParameterError(f"replicates must be >= 1, got {replicates}")

    def chunk(start: int, stop: int) -> Tuple[np.ndarray, int]:
        w_block, redraws = draw_nondegenerate_block(design, oracle.n, start, stop, budget=redraw_budget)
        return batch_diff_in_means(w_block, oracle.evaluate_batch(w_block)), redraws

    chunks = executor.map_chunks(chunk, replicates)
    redraws = sum(c[1] for c in chunks)
    check_redraw_budget(redraws, redraw_budget, replicates)
    return np.concatenate([c[0] for c in chunks]), redraws
