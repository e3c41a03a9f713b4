"""Potential-outcome oracles, the distance-decay model and EATE computation"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from .estimators import (ENUMERATION_CAP, Assignment, Design, draw_assignment_block, enumerate_assignments,
                         shifted_variance, validate_pi)
from .exceptions import ConfigValidationError, ParameterError
from .executor import SERIAL, ReplicateExecutor
from .graph import DistanceShells, Graph, distance_shells
from .rng import STREAM_ALPHA, make_rng

logger = logging.getLogger(__name__)

DEFAULT_MEAN_TREATED = 1 / 0.3
DEFAULT_MEAN_CONTROL = 2.0

DIRECT_EFFECT_KINDS = ['independent', 'constant']

EATE_METHODS = ['closed_form', 'enumeration', 'monte_carlo']


def _as_matrix(w: np.ndarray, n: int) -> np.ndarray:
    w = np.asarray(w)
    if w.ndim == 1:
        w = w[None, :]
    if w.ndim != 2 or w.shape[1] != n:
        raise ParameterError(f"assignment block has shape {w.shape}, expected (*, {n})")
    return w


class OutcomeOracle(ABC):
    """Deterministic map from a full assignment to the outcome vector.

    Subclasses implement ``evaluate_batch``. The counterfactual accessors
    default to forcing each ego bit and re-evaluating against the same
    ``w_{-i}``, which costs 2n evaluations per assignment.
    """

    n: int

    @abstractmethod
    def evaluate_batch(self, w_block: np.ndarray) -> np.ndarray:
        """Outcomes for each row of a (B, n) 0/1 block, shape (B, n)"""

    def evaluate(self, w) -> np.ndarray:
        if isinstance(w, Assignment):
            w = w.w
        return self.evaluate_batch(_as_matrix(w, self.n))[0]

    def potential_outcomes_batch(self, w_block: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """``(Y0, Y1)`` with ``Y_s[b, i] = Y_i^(s)(w_{-i})`` for row b"""
        w_block = _as_matrix(w_block, self.n)
        y0 = np.empty(w_block.shape, dtype=np.float64)
        y1 = np.empty(w_block.shape, dtype=np.float64)
        for i in range(self.n):
            forced = w_block.copy()
            forced[:, i] = 0
            y0[:, i] = self.evaluate_batch(forced)[:, i]
            forced[:, i] = 1
            y1[:, i] = self.evaluate_batch(forced)[:, i]
        return y0, y1

    def potential_outcomes(self, w) -> Tuple[np.ndarray, np.ndarray]:
        if isinstance(w, Assignment):
            w = w.w
        y0, y1 = self.potential_outcomes_batch(_as_matrix(w, self.n))
        return y0[0], y1[0]


class FunctionOracle(OutcomeOracle):
    """Wrap a black-box callable ``fn(w) -> Y(w)``"""

    def __init__(self, n: int, fn: Callable[[np.ndarray], np.ndarray]):
        if n < 1:
            raise ParameterError(f"n must be >= 1, got {n}")
        self.n = n
        self.fn = fn

    def evaluate_batch(self, w_block: np.ndarray) -> np.ndarray:
        w_block = _as_matrix(w_block, self.n)
        out = np.empty(w_block.shape, dtype=np.float64)
        for b, w in enumerate(w_block):
            y = np.asarray(self.fn(w.copy()), dtype=np.float64)
            if y.shape != (self.n,):
                raise ParameterError(f"oracle returned shape {y.shape}, expected ({self.n},)")
            out[b] = y
        return out


class SutvaOracle(OutcomeOracle):
    """No interference: Y_i^(s) = alpha_i^(s) whatever the other units do"""

    def __init__(self, alpha0: np.ndarray, alpha1: np.ndarray):
        self.alpha0 = np.asarray(alpha0, dtype=np.float64)
        self.alpha1 = np.asarray(alpha1, dtype=np.float64)
        if self.alpha0.shape != self.alpha1.shape or self.alpha0.ndim != 1:
            raise ParameterError("alpha0 and alpha1 must be 1-d vectors of equal length")
        self.n = self.alpha0.size

    def potential_outcomes_batch(self, w_block):
        w_block = _as_matrix(w_block, self.n)
        rows = w_block.shape[0]
        return np.tile(self.alpha0, (rows, 1)), np.tile(self.alpha1, (rows, 1))

    def evaluate_batch(self, w_block):
        w_block = _as_matrix(w_block, self.n)
        return np.where(w_block == 1, self.alpha1, self.alpha0)


def exposure_operator(shells: DistanceShells, weights: np.ndarray) -> sparse.csr_matrix:
    """Sparse M with ``(M @ w)[i] = sum_rho weights[rho] * Z[rho][i]``"""
    n = shells.n
    total = sparse.csr_matrix((n, n))
    for rho, m in enumerate(shells.matrices, start=1):
        if weights[rho] == 0:
            continue
        sizes = shells.sizes[rho]
        scale = np.divide(weights[rho], sizes, out=np.zeros(n), where=sizes > 0)
        total = total + sparse.diags(scale) @ m
    return total.tocsr()


def exposure_fractions(shells: DistanceShells, w) -> np.ndarray:
    """Z[rho][i]: treated fraction of shell(i, rho); 0 for empty shells. Row 0 is unused."""
    if isinstance(w, Assignment):
        w = w.w
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (shells.n,):
        raise ParameterError(f"assignment has shape {w.shape}, graph has {shells.n} nodes")
    z = np.zeros((shells.rho_max + 1, shells.n))
    for rho, m in enumerate(shells.matrices, start=1):
        sizes = shells.sizes[rho]
        np.divide(m @ w, sizes, out=z[rho], where=sizes > 0)
    return z


@dataclass(frozen=True, eq=False)
class DecayModel(OutcomeOracle):
    """Y_i^(s) = alpha_i^(s) + sum_{rho=1}^{rho_max} beta_rho^(s) Z_{rho,i}.

    beta_rho^(1) = 2 gamma^rho and beta_rho^(0) = gamma^rho.
    """
    shells: DistanceShells
    alpha0: np.ndarray
    alpha1: np.ndarray
    gamma: float
    alpha_means: Optional[Tuple[float, float]] = None
    seed: Optional[int] = None
    direct_effect: str = 'independent'

    def __post_init__(self):
        alpha0 = np.asarray(self.alpha0, dtype=np.float64)
        alpha1 = np.asarray(self.alpha1, dtype=np.float64)
        if alpha0.shape != (self.shells.n,) or alpha1.shape != (self.shells.n,):
            raise ParameterError(f"alpha vectors must have length {self.shells.n}")
        if not 0.0 < self.gamma < 1.0:
            raise ParameterError(f"gamma must lie in (0, 1), got {self.gamma}")
        object.__setattr__(self, 'alpha0', alpha0)
        object.__setattr__(self, 'alpha1', alpha1)

    @property
    def n(self) -> int:
        return self.shells.n

    @property
    def rho_max(self) -> int:
        return self.shells.rho_max

    def beta(self, s: int) -> np.ndarray:
        """Coefficients beta_rho^(s) for rho = 0..rho_max (entry 0 is 0)"""
        rho = np.arange(self.rho_max + 1)
        out = (2.0 if s else 1.0) * self.gamma ** rho
        out[0] = 0.0
        return out

    @cached_property
    def spillover_operator(self) -> sparse.csr_matrix:
        """Control-arm spillover operator; the treated arm uses twice this"""
        return exposure_operator(self.shells, self.beta(0))

    def spillover_batch(self, w_block: np.ndarray) -> np.ndarray:
        w_block = _as_matrix(w_block, self.n)
        if self.rho_max == 0:
            return np.zeros(w_block.shape)
        return np.asarray(self.spillover_operator @ w_block.T.astype(np.float64)).T

    def potential_outcomes_batch(self, w_block):
        spill = self.spillover_batch(w_block)
        return self.alpha0 + spill, self.alpha1 + 2.0 * spill

    def evaluate_batch(self, w_block):
        w_block = _as_matrix(w_block, self.n)
        y0, y1 = self.potential_outcomes_batch(w_block)
        return np.where(w_block == 1, y1, y0)

    def to_config(self) -> Dict[str, Any]:
        section: Dict[str, Any] = {'gamma': self.gamma, 'rho_max': self.rho_max}
        if self.alpha_means is not None:
            section['alpha_means'] = list(self.alpha_means)
        if self.seed is not None:
            section['seed'] = self.seed
        section['direct_effect'] = self.direct_effect
        return section

    @classmethod
    def from_config(cls, graph: Graph, section: Dict[str, Any], instance: int = 0,
                    shells: Optional[DistanceShells] = None) -> 'DecayModel':
        """Build from a ``model:`` section with keys gamma, rho_max, alpha_means, seed, direct_effect"""
        missing = [key for key in ('gamma', 'rho_max', 'seed') if key not in section]
        if missing:
            raise ConfigValidationError(f"model section is missing: {', '.join(missing)}")
        means = section.get('alpha_means', [DEFAULT_MEAN_TREATED, DEFAULT_MEAN_CONTROL])
        if not isinstance(means, (list, tuple)) or len(means) != 2:
            raise ConfigValidationError("alpha_means must be a pair [treated, control]")
        try:
            return build_decay_model(graph, int(section['rho_max']), float(section['gamma']),
                                     seed=int(section['seed']), instance=instance,
                                     mean_treated=float(means[0]), mean_control=float(means[1]),
                                     direct_effect=section.get('direct_effect', 'independent'), shells=shells)
        except ParameterError as e:
            raise ConfigValidationError(f"invalid model section: {e}")


def decay_outcomes(model: DecayModel, w) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(Y0, Y1, observed Y) for a single assignment"""
    if isinstance(w, Assignment):
        w = w.w
    w = np.asarray(w)
    if w.shape != (model.n,):
        raise ParameterError(f"assignment has shape {w.shape}, model has {model.n} nodes")
    y0, y1 = model.potential_outcomes(w)
    return y0, y1, np.where(w == 1, y1, y0)


def sample_direct_effects(n: int, mean_treated: float = DEFAULT_MEAN_TREATED,
                          mean_control: float = DEFAULT_MEAN_CONTROL, seed: int = 0,
                          instance: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """Independent exponential direct effects; returns ``(alpha0, alpha1)``"""
    if mean_treated <= 0 or mean_control <= 0:
        raise ParameterError(f"exponential means must be positive, got {mean_treated}, {mean_control}")
    rng = make_rng(seed, STREAM_ALPHA, instance)
    alpha1 = rng.exponential(mean_treated, size=n)
    alpha0 = rng.exponential(mean_control, size=n)
    return alpha0, alpha1


def sample_constant_effects(n: int, effect: float, mean_control: float = DEFAULT_MEAN_CONTROL, seed: int = 0,
                            instance: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """alpha0 exponential, alpha1 = alpha0 + effect for every unit"""
    if mean_control <= 0:
        raise ParameterError(f"exponential mean must be positive, got {mean_control}")
    alpha0 = make_rng(seed, STREAM_ALPHA, instance).exponential(mean_control, size=n)
    return alpha0, alpha0 + effect


def build_decay_model(graph: Graph, rho_max: int, gamma: float, seed: int, instance: int = 0,
                      mean_treated: float = DEFAULT_MEAN_TREATED, mean_control: float = DEFAULT_MEAN_CONTROL,
                      direct_effect: str = 'independent', shells: Optional[DistanceShells] = None) -> DecayModel:
    """Decay model on ``graph`` with direct effects drawn from instance ``instance`` of ``seed``"""
    if direct_effect not in DIRECT_EFFECT_KINDS:
        raise ParameterError(f"direct_effect must be one of {', '.join(DIRECT_EFFECT_KINDS)}, got {direct_effect!r}")
    if shells is None:
        shells = distance_shells(graph, rho_max)
    elif shells.rho_max != rho_max or shells.n != graph.n:
        raise ParameterError(f"shells were built for rho_max={shells.rho_max}, n={shells.n}")
    if direct_effect == 'independent':
        alpha0, alpha1 = sample_direct_effects(graph.n, mean_treated, mean_control, seed, instance)
    else:
        alpha0, alpha1 = sample_constant_effects(graph.n, mean_treated - mean_control, mean_control, seed, instance)
    return DecayModel(shells=shells, alpha0=alpha0, alpha1=alpha1, gamma=gamma,
                      alpha_means=(mean_treated, mean_control), seed=seed, direct_effect=direct_effect)


@dataclass(frozen=True)
class EateEstimate:
    value: float
    method: str
    mc_standard_error: Optional[float] = None
    replicates: Optional[int] = None

    def __post_init__(self):
        if self.method not in EATE_METHODS:
            raise ParameterError(f"unknown EATE method {self.method!r}")
        if (self.mc_standard_error is not None) != (self.method == 'monte_carlo'):
            raise ParameterError("mc_standard_error is reported for monte_carlo estimates only")

    def to_dict(self) -> Dict[str, Any]:
        return {'value': self.value, 'method': self.method,
                'mc_standard_error': self.mc_standard_error, 'replicates': self.replicates}


def eate_closed_form(model: DecayModel, pi: float) -> EateEstimate:
    """mean(alpha1 - alpha0) + sum_rho gamma^rho * pi * phi_rho.

    Uses E[Z_{rho,i}] = pi on nonempty shells; phi_rho is the fraction of
    nodes with a nonempty rho-shell.
    """
    pi = validate_pi(pi)
    direct = float(np.mean(model.alpha1 - model.alpha0))
    phi = model.shells.nonempty_fraction
    indirect = math.fsum((model.beta(1)[rho] - model.beta(0)[rho]) * pi * phi[rho]
                         for rho in range(1, model.rho_max + 1))
    return EateEstimate(value=direct + indirect, method='closed_form')


def eate_enumeration(oracle: OutcomeOracle, pi: float, cap: int = ENUMERATION_CAP) -> EateEstimate:
    """Exact sum over all 2**n assignments of P(w) * mean_i(Y_i^(1) - Y_i^(0))"""
    terms = []
    for block, probs in enumerate_assignments(oracle.n, pi, cap):
        y0, y1 = oracle.potential_outcomes_batch(block)
        terms.extend(probs * (y1 - y0).mean(axis=1))
    return EateEstimate(value=math.fsum(terms), method='enumeration')


def eate_monte_carlo(oracle: OutcomeOracle, pi: float, replicates: int, seed: int,
                     executor: ReplicateExecutor = SERIAL) -> EateEstimate:
    if replicates < 2:
        raise ParameterError(f"Monte Carlo EATE needs at least 2 replicates, got {replicates}")
    design = Design(pi=validate_pi(pi), seed=seed)

    def chunk(start: int, stop: int) -> np.ndarray:
        y0, y1 = oracle.potential_outcomes_batch(draw_assignment_block(design, oracle.n, start, stop))
        return (y1 - y0).mean(axis=1)

    diffs = np.concatenate(executor.map_chunks(chunk, replicates))
    se = math.sqrt(shifted_variance(diffs) / replicates)
    logger.debug("Monte Carlo EATE over %d replicates: %.6f (s.e. %.2e)", replicates, diffs.mean(), se)
    return EateEstimate(value=float(diffs.mean()), method='monte_carlo', mc_standard_error=se, replicates=replicates)
