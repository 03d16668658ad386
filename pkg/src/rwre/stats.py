"""Heavy-tail and distributional estimators for the limit-theorem checks.

The tail exponent of per-block quenched quantities is estimated two ways
(Hill on upper order statistics, least squares on the log-log survival
curve) so the verification never leans on a single estimator.  The tail
constant is reported but never asserted: lattice laws make it oscillate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .rng import STREAM_BOOTSTRAP, generator


@dataclass(frozen=True)
class TailFit:
    """Hill fit of a power-law tail index."""

    n_samples: int
    k_order: int
    s_hat: float
    ci_low: float
    ci_high: float
    k_inf_hat: float  # x^s_hat * empirical survival at the k-th order stat


@dataclass(frozen=True)
class LogLogFit:
    """Least-squares fit of log survival against log value."""

    slope: float         # estimates -s
    intercept: float     # estimates log of the tail constant
    curvature_stat: float
    power_law_ok: bool
    n_points: int


def _hill_once(sorted_desc: np.ndarray, k: int) -> float:
    spacings = np.log(sorted_desc[:k]) - math.log(sorted_desc[k])
    total = float(np.sum(spacings))
    if total <= 0.0:
        raise ValueError("degenerate sample: zero log spacings")
    return k / total


def hill_estimate(samples: Sequence[float], k_order: Optional[int] = None,
                  n_boot: int = 200, seed: int = 0,
                  ci_level: float = 0.95) -> TailFit:
    """Hill estimator s_hat = k / sum log(X_(i) / X_(k+1)) on the k largest
    order statistics, with a bootstrap percentile confidence interval.

    k defaults to floor(sqrt(n)), the usual bias/variance compromise.
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 8:
        raise ValueError("need at least 8 samples")
    if np.any(x <= 0.0):
        raise ValueError("samples must be positive")
    k = int(math.isqrt(n)) if not k_order else int(k_order)
    if k < 1 or k >= n // 2:
        raise ValueError(f"k_order {k} out of range for n = {n}")
    desc = np.sort(x)[::-1]
    s_hat = _hill_once(desc, k)

    gen = generator(seed, STREAM_BOOTSTRAP)
    boots = np.empty(n_boot)
    for b in range(n_boot):
        res = np.sort(x[gen.integers(0, n, size=n)])[::-1]
        try:
            boots[b] = _hill_once(res, k)
        except ValueError:
            boots[b] = np.nan
    boots = boots[~np.isnan(boots)]
    alpha = 0.5 * (1.0 - ci_level)
    lo, hi = np.quantile(boots, [alpha, 1.0 - alpha]) if boots.size else (s_hat, s_hat)
    k_inf = (k / n) * desc[k] ** s_hat
    return TailFit(n_samples=n, k_order=k, s_hat=float(s_hat),
                   ci_low=float(min(lo, s_hat)), ci_high=float(max(hi, s_hat)),
                   k_inf_hat=float(k_inf))


def std_normal_cdf(x: float) -> float:
    """Phi(x) through the complementary error integral (|err| <= 1e-10)."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def ks_distance(sample: Sequence[float], reference_cdf: Callable[[float], float]) -> float:
    """sup |ECDF - F| for a callable reference distribution function."""
    x = np.sort(np.asarray(sample, dtype=float))
    n = x.size
    if n == 0:
        raise ValueError("empty sample")
    cdf = np.asarray([reference_cdf(v) for v in x], dtype=float)
    up = np.arange(1, n + 1) / n - cdf
    dn = cdf - np.arange(0, n) / n
    return float(max(np.max(up), np.max(dn), 0.0))


def ks_two_sample(a: Sequence[float], b: Sequence[float]) -> float:
    """sup distance between two empirical distribution functions."""
    xa = np.sort(np.asarray(a, dtype=float))
    xb = np.sort(np.asarray(b, dtype=float))
    if xa.size == 0 or xb.size == 0:
        raise ValueError("empty sample")
    allx = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, allx, side="right") / xa.size
    fb = np.searchsorted(xb, allx, side="right") / xb.size
    return float(np.max(np.abs(fa - fb)))


def ecdf(sample: Sequence[float]) -> Callable[[float], float]:
    """The empirical distribution function of `sample` as a callable."""
    xs = np.sort(np.asarray(sample, dtype=float))

    def cdf(v: float) -> float:
        return float(np.searchsorted(xs, v, side="right")) / xs.size

    return cdf


def scaling_stability(sample_n: Sequence[float], sample_2n: Sequence[float],
                      s: float, ratio: float = 2.0) -> float:
    """Self-similarity check for an s-stable scaling limit.

    If both samples are sums at sizes n and ratio*n of the same law in the
    s-stable domain, rescaling the larger by ratio^(-1/s) should reproduce
    the smaller; the returned two-sample KS distance is small exactly when
    the common index is s (no evaluation of the limit law needed).
    """
    if s <= 0.0:
        raise ValueError("s must be positive")
    a = np.asarray(sample_n, dtype=float)
    b = np.asarray(sample_2n, dtype=float) * ratio ** (-1.0 / s)
    if np.any(a <= 0.0) or np.any(b <= 0.0):
        raise ValueError("samples must be positive")
    return ks_two_sample(a, b)


def survival_loglog_fit(samples: Sequence[float],
                        quantile_range: Tuple[float, float] = (0.90, 0.99),
                        curvature_threshold: float = 0.15) -> LogLogFit:
    """Least squares of log empirical survival on log value over an upper
    quantile band (default top 10 percent down to top 1 percent).

    The curvature statistic |c2| * span / |c1| from a quadratic refit flags
    samples whose survival curve is not a power law (e.g. exponential).
    """
    x = np.asarray(samples, dtype=float)
    n = x.size
    if n < 1000:
        raise ValueError("need at least 1e3 samples for a tail fit")
    if np.any(x <= 0.0):
        raise ValueError("samples must be positive")
    q_lo, q_hi = quantile_range
    if not (0.0 < q_lo < q_hi < 1.0):
        raise ValueError("degenerate quantile range")
    xs = np.sort(x)
    i_lo = int(q_lo * n)
    i_hi = min(int(q_hi * n), n - 1)
    pts_x = xs[i_lo:i_hi]
    surv = 1.0 - (np.arange(i_lo, i_hi) + 1.0) / n
    keep = (surv > 0) & (pts_x > 0)
    u = np.log(pts_x[keep])
    v = np.log(surv[keep])
    if u.size < 8 or np.ptp(u) <= 0.0:
        raise ValueError("degenerate tail: too few distinct upper order statistics")
    c1, c0 = np.polyfit(u, v, 1)
    q2, _, _ = np.polyfit(u, v, 2)
    span = float(np.ptp(u))
    curvature = abs(q2) * span / max(abs(c1), 1e-12)
    return LogLogFit(slope=float(c1), intercept=float(c0),
                     curvature_stat=float(curvature),
                     power_law_ok=bool(curvature <= curvature_threshold),
                     n_points=int(u.size))
