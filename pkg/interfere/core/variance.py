"""Variance components, the Neyman and plug-in variance estimators and confidence intervals.

Two moment conventions live here and are kept apart:

* population components (sigma1_sq, sigma0_sq, sigma01) centre each
  potential-outcome vector at its own mean and divide by n;
* within-arm sample variances used by ``neyman_sutva_variance`` divide by
  N_s - 1.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import ndtri

from .estimators import (Assignment, Design, arm_means, batch_diff_in_means, batch_horvitz_thompson,
                         check_outcome_length, check_redraw_budget, draw_nondegenerate_block, require_arms,
                         shifted_variance, validate_pi)
from .exceptions import ParameterError
from .executor import SERIAL, ReplicateExecutor
from .outcomes import OutcomeOracle

logger = logging.getLogger(__name__)

TABLE_COLUMNS = ['rho_max', 'gamma', 'sutva', 'expected', 'observed', 'ratio_expected', 'ratio_observed']


@dataclass(frozen=True)
class VarianceComponents:
    """Finite-n variance components averaged over Monte Carlo replicates.

    All variances are on the n * Var scale.
    """
    sigma1_sq: float
    sigma0_sq: float
    sigma01: float
    sigma_tau_sq: float
    observed_var_dm: float
    replicates: int
    n: int = 0
    pi: float = 0.5
    observed_var_dm_se: float = 0.0
    observed_var_ht: float = 0.0
    redraws: int = 0
    sigma_sutva_sq: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, 'sigma_sutva_sq', self.sigma1_sq + self.sigma0_sq + 2.0 * self.sigma01)

    @property
    def expected(self) -> float:
        return asymptotic_variance(self, self.pi)

    @property
    def sutva(self) -> float:
        """SUTVA part of the asymptotic variance at this design's pi.

        ((1-pi)/pi) s1 + (pi/(1-pi)) s0 + 2 s01; this equals
        ``sigma_sutva_sq`` (s1 + s0 + 2 s01) only when pi = 0.5.
        """
        return self.expected - self.sigma_tau_sq

    @property
    def ratio_expected(self) -> float:
        return _ratio(self.expected, self.sutva)

    @property
    def ratio_observed(self) -> float:
        return _ratio(self.observed_var_dm, self.sutva)

    @property
    def ratio_observed_se(self) -> float:
        return _ratio(self.observed_var_dm_se, self.sutva)

    def as_row(self, rho_max: int, gamma: float) -> Dict[str, Any]:
        return {
            'rho_max': rho_max,
            'gamma': gamma,
            'sutva': round(self.sutva, 3),
            'expected': round(self.expected, 3),
            'observed': round(self.observed_var_dm, 3),
            'ratio_expected': round(self.ratio_expected, 3),
            'ratio_observed': round(self.ratio_observed, 3),
        }


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return float('nan')
    return num / den


@dataclass(frozen=True)
class ConfidenceInterval:
    center: float
    half_width: float
    level: float
    variance_used: float

    @property
    def lower(self) -> float:
        return self.center - self.half_width

    @property
    def upper(self) -> float:
        return self.center + self.half_width

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper

    def to_dict(self) -> Dict[str, float]:
        return {'lower': self.lower, 'upper': self.upper, 'center': self.center,
                'half_width': self.half_width, 'level': self.level, 'variance_used': self.variance_used}


def neyman_sutva_variance(a: Assignment, y: np.ndarray) -> float:
    """S1^2/N1 + S0^2/N0 with within-arm sample variances"""
    y = check_outcome_length(a, y)
    require_arms(a, 2)
    treated = a.w == 1
    s1 = float(np.var(y[treated], ddof=1))
    s0 = float(np.var(y[~treated], ddof=1))
    return s1 / a.n1 + s0 / a.n0


def vtau_plugin(a: Assignment, y: np.ndarray) -> float:
    """Ybar1^2 + Ybar0^2 - 2 Ybar1 Ybar0 - tau_hat^2, evaluated term by term.

    The expression is algebraically zero because tau_hat = Ybar1 - Ybar0;
    only rounding error survives.
    """
    mean1, mean0 = arm_means(a, y)
    tau_hat = mean1 - mean0
    return mean1 ** 2 + mean0 ** 2 - 2.0 * mean1 * mean0 - tau_hat ** 2


def combined_variance(a: Assignment, y: np.ndarray) -> float:
    return neyman_sutva_variance(a, y) + vtau_plugin(a, y)


def normal_quantile(level: float) -> float:
    """Two-sided critical value z_{alpha/2} for a ``level`` interval"""
    if not 0.0 < level < 1.0:
        raise ParameterError(f"confidence level must lie in (0, 1), got {level}")
    return float(ndtri(0.5 + level / 2.0))


def confidence_interval(tau_hat: float, variance: float, level: float = 0.95) -> ConfidenceInterval:
    if variance < 0 or math.isnan(variance):
        raise ParameterError(f"variance must be >= 0, got {variance}")
    z = normal_quantile(level)
    return ConfidenceInterval(center=tau_hat, half_width=z * math.sqrt(variance), level=level,
                              variance_used=variance)


def asymptotic_variance(c: VarianceComponents, pi: float) -> float:
    """((1-pi)/pi) s1 + (pi/(1-pi)) s0 + 2 s01 + s_tau"""
    pi = validate_pi(pi)
    return (1.0 - pi) / pi * c.sigma1_sq + pi / (1.0 - pi) * c.sigma0_sq + 2.0 * c.sigma01 + c.sigma_tau_sq


def _replicate_moments(oracle: OutcomeOracle, design: Design, min_arm: int, budget: int,
                       start: int, stop: int) -> Dict[str, np.ndarray]:
    w_block, redraws = draw_nondegenerate_block(design, oracle.n, start, stop, min_arm=min_arm, budget=budget)
    y0, y1 = oracle.potential_outcomes_batch(w_block)
    c1 = y1 - y1.mean(axis=1, keepdims=True)
    c0 = y0 - y0.mean(axis=1, keepdims=True)
    y = np.where(w_block == 1, y1, y0)
    return {
        'w': w_block,
        'y': y,
        'm1': (c1 ** 2).mean(axis=1),
        'm0': (c0 ** 2).mean(axis=1),
        'm01': (c1 * c0).mean(axis=1),
        'unit_effect': (y1 - y0).mean(axis=1),
        'dm': batch_diff_in_means(w_block, y),
        'ht': batch_horvitz_thompson(w_block, y, design.pi),
        'redraws': np.array([redraws]),
    }


def _collect(chunks: List[Dict[str, np.ndarray]], key: str) -> np.ndarray:
    return np.concatenate([chunk[key] for chunk in chunks])


def variance_components_mc(oracle: OutcomeOracle, pi: float, replicates: int, seed: int,
                           redraw_budget: int = 100, executor: ReplicateExecutor = SERIAL) -> VarianceComponents:
    """Monte Carlo ground truth for the variance components of an oracle.

    Each replicate draws W, evaluates Y^(1) and Y^(0), and records the
    centred population moments, Ybar^(1) - Ybar^(0) and tau_hat. Degenerate
    draws are redrawn; ``redraw_budget`` bounds the total over all replicates.
    """
    if replicates < 2:
        raise ParameterError(f"variance components need at least 2 replicates, got {replicates}")
    design = Design(pi=validate_pi(pi), seed=seed)
    chunks = executor.map_chunks(
        lambda start, stop: _replicate_moments(oracle, design, 1, redraw_budget, start, stop), replicates)

    n = oracle.n
    dm = _collect(chunks, 'dm')
    observed = n * shifted_variance(dm)
    redraws = int(_collect(chunks, 'redraws').sum())
    check_redraw_budget(redraws, redraw_budget, replicates)
    if redraws:
        logger.warning("Redrew %d degenerate assignment(s) over %d replicates", redraws, replicates)

    return VarianceComponents(
        sigma1_sq=float(_collect(chunks, 'm1').mean()),
        sigma0_sq=float(_collect(chunks, 'm0').mean()),
        sigma01=float(_collect(chunks, 'm01').mean()),
        sigma_tau_sq=n * shifted_variance(_collect(chunks, 'unit_effect')),
        observed_var_dm=observed,
        # normal-theory standard error of a sample variance
        observed_var_dm_se=observed * math.sqrt(2.0 / (replicates - 1)),
        observed_var_ht=n * shifted_variance(_collect(chunks, 'ht')),
        replicates=replicates,
        n=n,
        pi=pi,
        redraws=redraws,
    )


@dataclass(frozen=True)
class CoverageResult:
    """Empirical coverage of intervals built around tau_hat over replicates"""
    tau: float
    replicates: int
    level: float
    coverage_sutva: float
    coverage_combined: float
    coverage_oracle: Optional[float]
    mean_half_width_sutva: float
    redraws: int = 0

    def as_row(self, rho_max: int, gamma: float) -> Dict[str, Any]:
        return {
            'rho_max': rho_max,
            'gamma': gamma,
            'tau': round(self.tau, 6),
            'replicates': self.replicates,
            'coverage_sutva': round(self.coverage_sutva, 4),
            'coverage_combined': round(self.coverage_combined, 4),
            'coverage_oracle': '' if self.coverage_oracle is None else round(self.coverage_oracle, 4),
            'mean_half_width_sutva': round(self.mean_half_width_sutva, 6),
        }


COVERAGE_COLUMNS = ['rho_max', 'gamma', 'tau', 'replicates', 'coverage_sutva', 'coverage_combined',
                    'coverage_oracle', 'mean_half_width_sutva']


def _interval_chunk(oracle: OutcomeOracle, design: Design, budget: int, start: int,
                    stop: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, int]:
    w_block, redraws = draw_nondegenerate_block(design, oracle.n, start, stop, min_arm=2, budget=budget)
    y = oracle.evaluate_batch(w_block)
    treated = w_block == 1
    n1 = treated.sum(axis=1)
    n0 = oracle.n - n1
    mean1 = np.where(treated, y, 0.0).sum(axis=1) / n1
    mean0 = np.where(treated, 0.0, y).sum(axis=1) / n0
    s1 = np.where(treated, (y - mean1[:, None]) ** 2, 0.0).sum(axis=1) / (n1 - 1)
    s0 = np.where(treated, 0.0, (y - mean0[:, None]) ** 2).sum(axis=1) / (n0 - 1)
    tau_hat = mean1 - mean0
    v_sutva = s1 / n1 + s0 / n0
    v_tau = mean1 ** 2 + mean0 ** 2 - 2.0 * mean1 * mean0 - tau_hat ** 2
    return tau_hat, v_sutva, v_tau, redraws


def interval_coverage(oracle: OutcomeOracle, pi: float, tau: float, replicates: int, seed: int,
                      level: float = 0.95, sigma_tau_sq: Optional[float] = None, redraw_budget: int = 100,
                      executor: ReplicateExecutor = SERIAL) -> CoverageResult:
    """Coverage of tau by Neyman, combined and oracle-adjusted intervals.

    The oracle-adjusted interval adds ``sigma_tau_sq / n`` (a Monte Carlo
    ground-truth quantity, not an estimator) to the Neyman variance.
    """
    if replicates < 1:
        raise ParameterError(f"replicates must be >= 1, got {replicates}")
    z = normal_quantile(level)
    design = Design(pi=validate_pi(pi), seed=seed)
    chunks = executor.map_chunks(
        lambda start, stop: _interval_chunk(oracle, design, redraw_budget, start, stop), replicates)

    tau_hat = np.concatenate([c[0] for c in chunks])
    v_sutva = np.concatenate([c[1] for c in chunks])
    v_combined = np.maximum(v_sutva + np.concatenate([c[2] for c in chunks]), 0.0)
    redraws = sum(c[3] for c in chunks)
    check_redraw_budget(redraws, redraw_budget, replicates)

    def coverage(variance: np.ndarray) -> float:
        return float(np.mean(np.abs(tau_hat - tau) <= z * np.sqrt(variance)))

    oracle_cov = None
    if sigma_tau_sq is not None:
        oracle_cov = coverage(v_sutva + sigma_tau_sq / oracle.n)

    return CoverageResult(
        tau=tau,
        replicates=replicates,
        level=level,
        coverage_sutva=coverage(v_sutva),
        coverage_combined=coverage(v_combined),
        coverage_oracle=oracle_cov,
        mean_half_width_sutva=float(np.mean(z * np.sqrt(v_sutva))),
        redraws=redraws,
    )
