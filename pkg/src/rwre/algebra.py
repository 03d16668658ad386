"""Products and potential sums of the odds ratios rho_i.

Everything quenched reduces to the products Pi_{i,j} = rho_i ... rho_j and
the potential sums

    W_j = sum_{k <= j} Pi_{k,j}        (left tail, backward recursion)
    R_i = sum_{j >= i} Pi_{i,j}        (right tail, forward recursion)

plus the variance companion V_j = sum_{i<j} Pi_{i+1,j} (W_i + W_i^2).
Infinite tails are truncated once the running product falls below
``tol`` times the partial sum; for a right-transient law the omitted mass
is then below tol/(1 - e^c) with c the mean of log rho.
"""

from __future__ import annotations

import math
from typing import Optional, Tuple

import numpy as np

from . import kernels
from .environment import Environment
from .laws import RegimeError

DEFAULT_TOL = 1e-12
EXTENSION_GUARD = 10 ** 6

# Extra decades demanded of seed truncation so that downstream forward
# recursions keep full 1e-12 accuracy.
_SEED_SAFETY = 1e-4


def log_pi_product(env: Environment, i: int, j: int) -> float:
    """log Pi_{i,j}; the empty product (i == j + 1) gives 0."""
    if i > j + 1:
        raise ValueError(f"empty-beyond range: i={i} > j+1={j + 1}")
    if i == j + 1:
        return 0.0
    return float(np.sum(env.log_rho_view(i, j)))


def pi_product(env: Environment, i: int, j: int) -> float:
    """Pi_{i,j} with the empty convention Pi_{j+1,j} = 1.

    Evaluated in log space whenever a partial product would leave the
    comfortable double range; a reflecting site inside the range gives 0.
    """
    if i > j + 1:
        raise ValueError(f"empty-beyond range: i={i} > j+1={j + 1}")
    if i == j + 1:
        return 1.0
    rho = env.rho_view(i, j)
    if np.any(rho == 0.0):
        return 0.0
    logs = np.log(rho)
    total = float(np.sum(logs))
    running = np.cumsum(logs)
    if np.max(np.abs(running)) < 690.0:
        return float(np.prod(rho))
    return math.exp(total) if total < 709.0 else math.inf


def w_value(env: Environment, j: int, tol: float = DEFAULT_TOL,
            reflect_site: Optional[int] = None,
            guard: int = EXTENSION_GUARD) -> float:
    """W_j by backward accumulation of the products Pi_{k,j}.

    Walks k leftward from j, extending the environment on demand, until the
    running product drops below tol times the partial sum (or a reflecting
    site kills the remaining terms exactly).
    """
    total = 0.0
    term = 1.0
    k = j
    while True:
        if reflect_site is not None and k == reflect_site:
            break
        if k < env.lo and not _can_extend_left(env):
            break
        r = env.rho(k)
        if r == 0.0:
            break
        term *= r
        total += term
        if term < tol * total:
            break
        k -= 1
        if j - k > guard:
            raise RegimeError(
                "W sum failed to converge within the extension guard "
                "(mean log rho is likely >= 0)")
    return total


def r_value(env: Environment, i: int, k: Optional[int] = None,
            tol: float = DEFAULT_TOL, guard: int = EXTENSION_GUARD) -> float:
    """R_{i,k} = sum_{j=i}^{k} Pi_{i,j}; k=None gives the infinite variant
    with the same truncation contract as :func:`w_value`."""
    total = 0.0
    term = 1.0
    j = i
    while True:
        if k is not None and j > k:
            break
        r = env.rho(j)
        term *= r
        total += term
        if term == 0.0:
            break
        if k is None and term < tol * total:
            break
        j += 1
        if k is None and j - i > guard:
            raise RegimeError(
                "R sum failed to converge within the extension guard "
                "(walk is not transient to the right)")
    return total


def _can_extend_left(env: Environment) -> bool:
    return env.left_mode in ("plain_P", "conditioned_Q")


def _trunc_start(env: Environment, j0: int, tol: float,
                 reflect_site: Optional[int] = None,
                 guard: int = EXTENSION_GUARD) -> int:
    """Leftmost site from which forward recursions seeded with zero are
    accurate to `tol` at j0 and beyond; clamps at reflecting sites and
    non-extendable window edges."""
    if reflect_site is not None and reflect_site >= j0:
        return reflect_site
    total = 0.0
    term = 1.0
    k = j0
    while True:
        if reflect_site is not None and k == reflect_site:
            return k
        if k < env.lo and not _can_extend_left(env):
            return env.lo
        r = env.rho(k)
        if r == 0.0:
            return k
        term *= r
        total += term
        if term < tol * max(total, 1.0):
            return k
        k -= 1
        if j0 - k > guard:
            raise RegimeError(
                "left-tail truncation failed to converge within the guard")


def w_profile(env: Environment, lo_site: int, hi_site: int,
              tol: float = DEFAULT_TOL,
              reflect_site: Optional[int] = None) -> np.ndarray:
    """W_j for all j in [lo_site, hi_site] in a single forward pass."""
    w, _ = wv_profile(env, lo_site, hi_site, tol, reflect_site, want_v=False)
    return w


def wv_profile(env: Environment, lo_site: int, hi_site: int,
               tol: float = DEFAULT_TOL,
               reflect_site: Optional[int] = None,
               want_v: bool = True) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """W_j and V_j over [lo_site, hi_site] by one forward recursion.

    The recursion starts at a left truncation point deep enough that zero
    seeds there leave relative errors below `tol` across the profile (exact
    when the truncation point is a reflecting site).
    """
    if hi_site < lo_site:
        empty = np.empty(0)
        return empty, (np.empty(0) if want_v else None)
    start = _trunc_start(env, lo_site - 1, tol * _SEED_SAFETY, reflect_site)
    start = min(start, lo_site)
    rho = np.array(env.rho_view(start, hi_site), dtype=float)
    if reflect_site is not None and start <= reflect_site <= hi_site:
        rho[reflect_site - start] = 0.0
    w_out = np.empty(rho.size)
    if want_v:
        v_out = np.empty(rho.size)
        kernels.wv_forward(rho, 0.0, 0.0, w_out, v_out)
    else:
        v_out = None
        kernels.w_forward(rho, 0.0, w_out)
    off = lo_site - start
    return w_out[off:], (v_out[off:] if want_v else None)
