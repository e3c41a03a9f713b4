"""Shapiro-Wilk test (Royston AS R94) and sample summaries for replicate distributions"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P
from scipy import stats
from scipy.special import ndtri

from .exceptions import SampleError

SW_MIN_N = 3
SW_MAX_N = 5000
SMALL = 1e-19

# Polynomial coefficients, lowest degree first
C1 = [0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056]
C2 = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633]
G = [-2.273, 0.459]
C3 = [0.544, -0.39978, 0.025054, -6.714e-4]
C4 = [1.3822, -0.77857, 0.062767, -0.0020322]
C5 = [-1.5861, -0.31082, -0.083751, 0.0038915]
C6 = [-0.4803, -0.082676, 0.0030302]


@dataclass(frozen=True)
class SwResult:
    statistic: float
    p_value: float
    n: int


def sw_coefficients(n: int) -> np.ndarray:
    """Full antisymmetric coefficient vector a_1..a_n for ascending order statistics"""
    half = n // 2
    if n == 3:
        upper = np.array([math.sqrt(0.5)])
    else:
        m = ndtri((np.arange(1, half + 1) - 0.375) / (n + 0.25))
        summ2 = 2.0 * float(np.sum(m ** 2))
        ssumm2 = math.sqrt(summ2)
        rsn = 1.0 / math.sqrt(n)
        a1 = P.polyval(rsn, C1) - m[0] / ssumm2
        if n > 5:
            a2 = -m[1] / ssumm2 + P.polyval(rsn, C2)
            fac = math.sqrt((summ2 - 2 * m[0] ** 2 - 2 * m[1] ** 2) / (1 - 2 * a1 ** 2 - 2 * a2 ** 2))
            upper = -m / fac
            upper[1] = a2
        else:
            fac = math.sqrt((summ2 - 2 * m[0] ** 2) / (1 - 2 * a1 ** 2))
            upper = -m / fac
        upper[0] = a1

    a = np.zeros(n)
    a[n - half:] = upper[::-1]
    a[:half] = -upper
    return a


def _p_value(w: float, w1: float, n: int) -> float:
    if n == 3:
        pw = 6.0 / math.pi * (math.asin(math.sqrt(w)) - math.pi / 3.0)
        return min(max(pw, 0.0), 1.0)
    if w1 <= 0.0:
        return 1.0
    y = math.log(w1)
    if n <= 11:
        gamma = P.polyval(n, G)
        if y >= gamma:
            return SMALL
        y = -math.log(gamma - y)
        m = P.polyval(n, C3)
        s = math.exp(P.polyval(n, C4))
    else:
        xx = math.log(n)
        m = P.polyval(xx, C5)
        s = math.exp(P.polyval(xx, C6))
    return float(stats.norm.sf((y - m) / s))


def shapiro_wilk(sample: Sequence[float]) -> SwResult:
    """W statistic and p-value for a sample of 3..5000 values.

    W is the squared correlation between the sorted sample and the
    coefficients; 1 - W is computed directly to keep precision near W = 1.
    """
    x = np.sort(np.asarray(sample, dtype=np.float64), kind='stable')
    n = x.size
    if not SW_MIN_N <= n <= SW_MAX_N:
        raise SampleError(f"Shapiro-Wilk needs {SW_MIN_N} <= n <= {SW_MAX_N}, got {n}")
    if not np.isfinite(x).all():
        raise SampleError("sample contains non-finite values")
    spread = x[-1] - x[0]
    if spread < SMALL or spread <= 1e-15 * max(abs(x[0]), abs(x[-1])):
        raise SampleError("sample has zero variance")

    a = sw_coefficients(n)
    xs = x / spread
    xs = xs - xs.mean()
    ssa = float(np.dot(a, a))
    ssx = float(np.dot(xs, xs))
    sax = float(np.dot(a, xs))
    ssassx = math.sqrt(ssa * ssx)
    w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx)
    w = 1.0 - w1
    return SwResult(statistic=w, p_value=_p_value(w, w1, n), n=n)


@dataclass(frozen=True)
class SampleMoments:
    mean: float
    variance: float
    skewness: float
    kurtosis: float


def empirical_moments(sample: Sequence[float]) -> SampleMoments:
    """Mean, variance (divisor n - 1), bias-corrected skewness and excess kurtosis.

    Skewness needs n >= 3 and kurtosis n >= 4; they are NaN below that and
    for constant samples.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.size < 2:
        raise SampleError(f"need at least 2 values, got {x.size}")
    variance = float(np.var(x - x[0], ddof=1))
    skewness = kurtosis = float('nan')
    if variance > 0:
        if x.size >= 3:
            skewness = float(stats.skew(x, bias=False))
        if x.size >= 4:
            kurtosis = float(stats.kurtosis(x, fisher=True, bias=False))
    return SampleMoments(mean=float(np.mean(x)), variance=variance, skewness=skewness, kurtosis=kurtosis)


def ks_uniformity(p_values: Sequence[float]) -> float:
    """KS p-value of the sample against U(0, 1)"""
    p = np.asarray(p_values, dtype=np.float64)
    if p.size < 1:
        raise SampleError("no p-values to test")
    return float(stats.kstest(p, 'uniform').pvalue)


def wasserstein_to_gaussian(sample: Sequence[float]) -> float:
    """W1 distance between the standardized sample and standard normal quantiles"""
    x = np.asarray(sample, dtype=np.float64)
    if x.size < 2:
        raise SampleError(f"need at least 2 values, got {x.size}")
    sd = float(np.std(x, ddof=1))
    if sd == 0:
        raise SampleError("sample has zero variance")
    z = (x - x.mean()) / sd
    grid = ndtri((np.arange(1, x.size + 1) - 0.5) / x.size)
    return float(stats.wasserstein_distance(z, grid))
