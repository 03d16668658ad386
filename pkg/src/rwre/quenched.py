"""Closed-form quenched expectations, variances, and exit probabilities.

For a fixed environment the crossing of site j takes expected time
1 + 2 W_j, and the crossings of distinct sites are independent, so hitting
means and variances are site sums:

    E^a T_b          = sum_{j=a}^{b-1} (1 + 2 W_j)
    Var(T_b - T_a)   = sum_{j=a}^{b-1} [ 4 (W_j + W_j^2) + 8 V_j ]

with W, V the potential sums of :mod:`rwre.algebra`.  Reflections (a site
with omega = 1 exactly) zero the odds ratio there and truncate every sum;
the backtrack-limited walk reflects each block b ladder points back, which
is what :func:`block_crossing_stats` evaluates per block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import logsumexp

from . import kernels
from .algebra import DEFAULT_TOL, _trunc_start, w_value, wv_profile
from .environment import Environment
from .ladders import LadderIndex

ORACLE_SITE_CAP = 10 ** 4


def reflection_radius(n: int) -> int:
    """Backtrack allowance in ladder blocks for a walk of scale n:
    floor(log(n)^2), natural log."""
    if n < 1:
        raise ValueError("scale must be >= 1")
    return int(math.log(n) ** 2)


@dataclass(frozen=True)
class CrossingStats:
    """Per-block crossing mean (mu) and variance (sigma2).

    Blocks first_block .. first_block + len(mu) - 1 of the given ladder
    index.  reflect_radius is the backtrack allowance in blocks (None for
    the unreflected walk); block i then reflects at nu[i - 1 - radius],
    falling back to the window's own left truncation for early blocks.
    """

    first_block: int
    mu: np.ndarray
    sigma2: np.ndarray
    reflect_radius: Optional[int]
    n_for_reflection: Optional[int]

    def to_csv(self, ladder: LadderIndex, path) -> None:
        from .reporting import emit_csv
        rows = []
        for k in range(len(self.mu)):
            b = self.first_block + k
            rows.append((b, int(ladder.nu[b - 1]), int(ladder.nu[b]),
                         float(ladder.block_max[b - 1]),
                         float(self.mu[k]), float(self.sigma2[k])))
        emit_csv(rows, ("block", "nu_start", "nu_end", "M", "mu", "sigma2"), path)


def expected_crossing(env: Environment, j: int, tol: float = DEFAULT_TOL,
                      reflect_site: Optional[int] = None) -> float:
    """Expected time to step from j to j+1: 1 + 2 W_j."""
    return 1.0 + 2.0 * w_value(env, j, tol, reflect_site)


def expected_hitting(env: Environment, frm: int, to: int,
                     tol: float = DEFAULT_TOL,
                     reflect_site: Optional[int] = None,
                     reflect_radius: Optional[int] = None,
                     ladder: Optional[LadderIndex] = None) -> float:
    """Expected hitting time of `to` from `frm` (site sums of 1 + 2 W_j).

    `reflect_site` truncates every W at a fixed site; `reflect_radius`
    applies the per-block sliding reflection of the backtrack-limited walk
    (requires `ladder`).
    """
    if to < frm:
        raise ValueError("target must be right of the start")
    if to == frm:
        return 0.0
    if reflect_radius is not None:
        mu, _ = _radius_block_sums(env, ladder, reflect_radius, frm, to, tol,
                                   want_sigma=False)
        return float(np.sum(mu))
    w, _ = wv_profile(env, frm, to - 1, tol, reflect_site, want_v=False)
    return float(to - frm) + 2.0 * float(np.sum(w))


def crossing_variance(env: Environment, j: int, tol: float = DEFAULT_TOL,
                      reflect_site: Optional[int] = None) -> float:
    """Quenched variance of the crossing T_{j+1} - T_j:
    4 (W_j + W_j^2) + 8 V_j, sums truncated like the expectations."""
    w, v = wv_profile(env, j, j, tol, reflect_site)
    return 4.0 * (w[0] + w[0] ** 2) + 8.0 * v[0]


def hitting_variance(env: Environment, frm: int, to: int,
                     tol: float = DEFAULT_TOL,
                     reflect_site: Optional[int] = None,
                     reflect_radius: Optional[int] = None,
                     ladder: Optional[LadderIndex] = None) -> float:
    """Var(T_to - T_frm): crossings are independent given the environment."""
    if to < frm:
        raise ValueError("target must be right of the start")
    if to == frm:
        return 0.0
    if reflect_radius is not None:
        _, sig = _radius_block_sums(env, ladder, reflect_radius, frm, to, tol,
                                    want_sigma=True)
        return float(np.sum(sig))
    w, v = wv_profile(env, frm, to - 1, tol, reflect_site)
    return float(np.sum(4.0 * (w + w * w) + 8.0 * v))


def _radius_block_sums(env: Environment, ladder: Optional[LadderIndex],
                       radius: int, frm: int, to: int, tol: float,
                       want_sigma: bool) -> Tuple[np.ndarray, np.ndarray]:
    """Per-block mu/sigma2 contributions restricted to sites [frm, to)."""
    if ladder is None:
        raise ValueError("reflect_radius needs a ladder index")
    nu = ladder.nu
    if to > nu[-1]:
        raise ValueError("ladder does not cover the target")
    first = int(np.searchsorted(nu, frm, side="right"))
    last = int(np.searchsorted(nu, to - 1, side="right"))
    return _block_tables(env, ladder, radius, first, last, tol,
                         site_lo=frm, site_hi=to - 1)


def block_crossing_stats(env: Environment, ladder: LadderIndex,
                         n_for_reflection: Optional[int],
                         tol: float = DEFAULT_TOL, first_block: int = 1,
                         n_blocks: Optional[int] = None) -> CrossingStats:
    """mu_i and sigma2_i per ladder block.

    n_for_reflection sets the backtrack allowance b = floor(log^2 n); None
    gives the unreflected crossing statistics.  Block variances add, so the
    per-block sums reproduce the hitting moments exactly.
    """
    if n_blocks is None:
        n_blocks = ladder.count - first_block + 1
    last = first_block + n_blocks - 1
    if last > ladder.count:
        raise ValueError("ladder does not cover the requested blocks")
    if n_for_reflection is None:
        nu = ladder.nu
        w, v = wv_profile(env, int(nu[first_block - 1]), int(nu[last]) - 1, tol)
        bounds = (nu[first_block - 1:last + 1] - nu[first_block - 1]).astype(np.intp)
        lens = np.diff(bounds).astype(float)
        mu = lens + 2.0 * np.add.reduceat(w, bounds[:-1])
        sig = np.add.reduceat(4.0 * (w + w * w) + 8.0 * v, bounds[:-1])
        radius = None
    else:
        radius = reflection_radius(n_for_reflection)
        mu, sig = _block_tables(env, ladder, radius, first_block, last, tol,
                                site_lo=None, site_hi=None)
    return CrossingStats(first_block=first_block, mu=np.asarray(mu),
                         sigma2=np.asarray(sig), reflect_radius=radius,
                         n_for_reflection=n_for_reflection)


def _block_tables(env: Environment, ladder: LadderIndex, radius: int,
                  first: int, last: int, tol: float,
                  site_lo: Optional[int], site_hi: Optional[int]):
    """Assemble kernel inputs for per-block reflected recursions."""
    nu = ladder.nu
    n = last - first + 1
    starts = np.empty(n, dtype=np.int64)
    blk_lo = np.empty(n, dtype=np.int64)
    blk_hi = np.empty(n, dtype=np.int64)
    w_seeds = np.zeros(n, dtype=float)
    v_seeds = np.zeros(n, dtype=float)
    extra_mu = np.zeros(n, dtype=float)

    for idx, i in enumerate(range(first, last + 1)):
        m_i = int(nu[i - 1])
        e_i = int(nu[i]) - 1
        lo_i = m_i if site_lo is None else max(site_lo, m_i)
        hi_i = e_i if site_hi is None else min(site_hi, e_i)
        r_idx = i - 1 - radius
        if r_idx >= 0:
            r_site = int(nu[r_idx])
            starts[idx] = r_site + 1
            if r_site >= lo_i:
                # reflection inside the accounted range (radius 0 only):
                # the reflected site itself crosses in exactly one step
                extra_mu[idx] = 1.0
                starts[idx] = r_site + 1
        else:
            s = _trunc_start(env, lo_i - 1, tol * 1e-4)
            starts[idx] = min(s, lo_i)
        blk_lo[idx] = lo_i
        blk_hi[idx] = hi_i

    arr_lo = int(min(starts.min(), blk_lo.min()))
    arr_hi = int(blk_hi.max())
    rho = np.ascontiguousarray(env.rho_view(arr_lo, arr_hi))
    mu = np.empty(n, dtype=float)
    sig = np.empty(n, dtype=float)
    kernels.block_stats(rho, starts - arr_lo, w_seeds, v_seeds,
                        blk_lo - arr_lo, blk_hi - arr_lo, mu, sig)
    return mu + extra_mu, sig


def exit_probability(env: Environment, a: int, i: int, b: int) -> float:
    """P^i(T_b < T_a) for a <= i <= b, the inhomogeneous ruin formula

        sum_{j=a}^{i-1} Pi_{a+1,j} / sum_{j=a}^{b-1} Pi_{a+1,j}

    (empty products are 1).  Evaluated as log-sum-exp, so deep traps and
    reflecting sites are safe.
    """
    if not (a <= i <= b) or a >= b:
        raise ValueError("need a <= i <= b with a < b")
    if i == a:
        return 0.0
    if i == b:
        return 1.0
    cum = _prefix_log_products(env, a, b)
    num = logsumexp(cum[: i - a])
    den = logsumexp(cum)
    return float(math.exp(num - den))


def return_probability(env: Environment, a: int, b: int) -> float:
    """P^a(walk revisits a before reaching b) = 1 - (1 - omega_a) / R_{a,b-1}."""
    if b <= a:
        raise ValueError("need b > a")
    cum = _prefix_log_products(env, a, b)
    denom = float(math.exp(logsumexp(cum)))  # 1 + R_{a+1,b-1}
    return 1.0 - env.omega(a) / denom


def _prefix_log_products(env: Environment, a: int, b: int) -> np.ndarray:
    """log Pi_{a+1,j} for j = a .. b-1 (first entry the empty product)."""
    if b == a + 1:
        return np.zeros(1)
    lr = env.log_rho_view(a + 1, b - 1)
    return np.concatenate([[0.0], np.cumsum(lr)])


def hitting_oracle(env: Environment, frm: int, to: int,
                   reflect_site: int) -> Tuple[float, float]:
    """First-step linear systems for the hitting mean and variance.

    Solves the tridiagonal systems for f_i = E^i T_to and g_i = E^i T_to^2
    on the chain [reflect_site, to] with the left boundary forced
    reflecting.  Independent of the recursion route; used as the test
    oracle for the closed forms.
    """
    if not (reflect_site <= frm <= to):
        raise ValueError("need reflect_site <= frm <= to")
    if frm == to:
        return 0.0, 0.0
    n = to - reflect_site + 1
    if n > ORACLE_SITE_CAP:
        raise ValueError(f"oracle capped at {ORACLE_SITE_CAP} sites")
    omega = np.array(env.view(reflect_site, to), dtype=float)
    omega[0] = 1.0

    # rows 0..n-2: -(1-w_i) f_{i-1} + f_i - w_i f_{i+1} = rhs_i; row n-1: f = 0
    ab = np.zeros((3, n))
    ab[1, :] = 1.0
    ab[0, 1:] = -omega[:-1]          # superdiagonal (column-shifted)
    ab[2, :-1] = -(1.0 - omega[1:])  # subdiagonal
    ab[2, n - 2] = 0.0               # absorbing row keeps f_{n-1} = 0
    rhs = np.ones(n)
    rhs[n - 1] = 0.0
    try:
        f = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - defensive
        raise RuntimeError("singular first-step system") from exc

    rhs2 = np.empty(n)
    rhs2[0] = 1.0 + 2.0 * f[1]
    rhs2[1:n - 1] = 1.0 + 2.0 * (omega[1:n - 1] * f[2:n]
                                 + (1.0 - omega[1:n - 1]) * f[0:n - 2])
    rhs2[n - 1] = 0.0
    g = solve_banded((1, 1), ab, rhs2)

    idx = frm - reflect_site
    mean = float(f[idx])
    var = float(g[idx] - mean * mean)
    return mean, var
