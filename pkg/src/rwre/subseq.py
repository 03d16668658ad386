"""Doubly-exponential schedules and environment-dependent event detectors.

The verification campaigns scan environments for two kinds of random
events: *localization blocks*, where one ladder block is so deep that the
walk parks there for a long stretch of times, and *flat windows*, where no
block dominates and centered hitting times are approximately Gaussian.
Both detectors evaluate their defining inequalities literally and report
enough data to recheck them from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import kernels
from .algebra import w_value
from .environment import Environment
from .ladders import LadderIndex, ladder_locations
from .quenched import CrossingStats, block_crossing_stats, reflection_radius

SCHEDULE_INT_CAP = 10 ** 18


def _a_of_k(k: int) -> int:
    """floor(log log k) or 1, whichever is larger (natural logs)."""
    if k < 3:
        return 1
    return max(1, int(math.floor(math.log(math.log(k)))))


@dataclass(frozen=True)
class PlanRow:
    k: int
    n_prev: int        # schedule value one step back
    n: int
    d: int             # n - n_prev
    b_d: int           # backtrack allowance floor(log^2 d)
    a: int
    delta: float       # 1 / a
    c_k: int
    alpha: int         # window bookkeeping in block indices
    beta: int
    gamma: int
    feasible: bool


@dataclass(frozen=True)
class SubseqPlan:
    """Schedule n_k = ceil(c^(r^k)) with per-row window bookkeeping.

    The classical choice is c = r = 2 (n_k exactly 2^(2^k), integer
    arithmetic); desk-scale experiments flatten the growth with smaller r,
    which only shortens the windows being tested.
    """

    c: float
    r: float
    sim_cap: int
    rows: Tuple[PlanRow, ...]

    def row(self, k: int) -> PlanRow:
        for row in self.rows:
            if row.k == k:
                return row
        raise KeyError(f"plan has no row k = {k}")

    def feasible_rows(self) -> List[PlanRow]:
        return [row for row in self.rows if row.feasible]

    def to_csv(self, path) -> None:
        from .reporting import emit_csv
        rows = [(r.k, r.n, r.d, r.b_d, r.a, r.delta, r.c_k, r.alpha, r.beta,
                 r.gamma, int(r.feasible)) for r in self.rows]
        emit_csv(rows, ("k", "n", "d", "b_d", "a", "delta", "c_k",
                        "alpha", "beta", "gamma", "feasible"), path)


def _schedule_value(c: float, r: float, k: int) -> int:
    if float(c).is_integer() and float(r).is_integer():
        return int(c) ** (int(r) ** k)  # exact integers for the classical case
    return int(math.ceil(c ** (r ** k)))


def build_plan(c: float = 2.0, r: float = 2.0, k_max: int = 4,
               c_k: int = 2, sim_cap: int = 10 ** 7) -> SubseqPlan:
    """Schedule rows 1..k_max; rows with n_k beyond `sim_cap` are flagged
    infeasible for simulation but keep exact integer bookkeeping."""
    if not (c >= 2.0 or (c > 1.0 and r >= 2.0)):
        raise ValueError("need c >= 2, or c > 1 with r >= 2")
    if c_k < 1:
        raise ValueError("c_k must be >= 1")
    rows = []
    n_prev = _schedule_value(c, r, 0)
    for k in range(1, k_max + 1):
        n = _schedule_value(c, r, k)
        if n > SCHEDULE_INT_CAP:
            raise ValueError(
                f"schedule overflow at k = {k}; largest feasible k_max = {k - 1}")
        d = n - n_prev
        a = _a_of_k(k)
        delta = 1.0 / a
        alpha = n_prev
        beta = alpha + int(math.floor(delta * d))
        gamma = alpha + c_k * d
        rows.append(PlanRow(k=k, n_prev=n_prev, n=n, d=d,
                            b_d=reflection_radius(max(d, 1)), a=a,
                            delta=delta, c_k=c_k, alpha=alpha, beta=beta,
                            gamma=gamma, feasible=(n <= sim_cap)))
        n_prev = n
    return SubseqPlan(c=c, r=r, sim_cap=sim_cap, rows=tuple(rows))


# ---------------------------------------------------------------------------
# localization detector
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalizationHit:
    """A block whose trap depth dwarfs the expected time to reach it.

    margin = M_j / (m^2 E), at least 1 by definition of a hit; t_m = M_j/m
    is the probe time and u_m the site the walk should occupy then.
    """

    m: int
    j: int
    t_m: float
    u_m: int
    margin: float


def reflected_hitting_profile(env: Environment, ladder: LadderIndex,
                              n_blocks: Optional[int] = None,
                              tol: float = 1e-12) -> np.ndarray:
    """E[j] = expected hitting time of ladder point j-1 from the origin for
    the walk reflected floor(log^2 j) blocks back, j = 2..n_blocks.

    One O(total sites) sweep: per-block local sums plus carried cross-block
    products; radii changes re-run only the carry recursion.
    """
    J = n_blocks if n_blocks is not None else ladder.count
    if J > ladder.count:
        raise ValueError("ladder does not cover the requested blocks")
    nu = ladder.nu
    rho = np.ascontiguousarray(env.rho_view(0, int(nu[J]) - 1))
    bounds = np.ascontiguousarray(nu[:J + 1], dtype=np.int64)

    wend = np.empty(J)
    suml = np.empty(J)
    sumpi = np.empty(J)
    pip = np.empty(J)
    kernels.block_local_sums(rho, bounds, wend, suml, sumpi, pip)
    if np.any(pip == 0.0):
        raise ValueError("profile requires rho > 0 over the scanned blocks "
                         "(no reflecting sites)")

    # 1-based padding so block i lives at index i
    pad = lambda arr: np.concatenate([[0.0], arr])
    wend1, suml1, sumpi1, pip1 = map(pad, (wend, suml, sumpi, pip))
    lens1 = pad(np.diff(nu[:J + 1]).astype(float))
    with np.errstate(divide="ignore"):
        plog = np.concatenate([[0.0], np.cumsum(np.log(pip))])

    cinf = np.zeros(J + 1)
    cinf[1] = w_value(env, -1, tol) if env.lo < 0 else 0.0
    for i in range(2, J + 1):
        cinf[i] = wend1[i - 1] + pip1[i - 1] * cinf[i - 1]

    ks = np.arange(J + 1, dtype=float)
    with np.errstate(divide="ignore"):
        b_of = np.floor(np.log(np.maximum(ks, 1.0)) ** 2).astype(np.int64)

    e_out = np.zeros(J + 1)
    kernels.localization_expectations(lens1, suml1, sumpi1, wend1, pip1,
                                      plog, cinf, b_of, e_out)
    return e_out


def detect_localization(env: Environment, ladder: LadderIndex,
                        m_range: Sequence[int] = range(2, 11),
                        n_blocks: Optional[int] = None,
                        tol: float = 1e-12) -> List[LocalizationHit]:
    """All (m, j) with M_j >= m^2 * (reflected expected hitting of nu[j-1]).

    Hits come back sorted by block index then m; an empty list is a valid
    outcome (e.g. any environment without deep traps).
    """
    J = n_blocks if n_blocks is not None else ladder.count
    e = reflected_hitting_profile(env, ladder, J, tol)
    mlog = ladder.block_max_log
    hits: List[LocalizationHit] = []
    with np.errstate(divide="ignore"):
        loge = np.log(e[2:J + 1])
    for m in m_range:
        thresh = 2.0 * math.log(m) + loge
        js = np.nonzero(mlog[1:J] >= thresh)[0]
        for idx in js:
            j = int(idx) + 2
            lm = float(mlog[j - 1])
            margin = math.exp(lm - 2.0 * math.log(m) - math.log(e[j]))
            with np.errstate(over="ignore"):
                t_m = math.exp(lm) / m
            hits.append(LocalizationHit(m=m, j=j, t_m=t_m,
                                        u_m=int(ladder.nu[j - 1]),
                                        margin=margin))
    hits.sort(key=lambda h: (h.j, h.m))
    return hits


# ---------------------------------------------------------------------------
# flat (Gaussian) windows
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FlatWindowReport:
    flat: bool
    count: int          # blocks with mu^2 inside the band
    band_lo: float      # d^(2/s)
    tail_ok: bool
    tail_sum: float


@dataclass(frozen=True)
class GaussianWindow:
    k: int
    alpha: int
    beta: int
    gamma: int
    v: float            # sum of mu^2 over blocks (alpha, beta]
    flat: bool
    tail_ok: bool
    count: int

    def csv_row(self) -> tuple:
        return (self.k, self.alpha, self.beta, self.gamma, self.v,
                int(self.flat), int(self.tail_ok))


def _stats_slice(stats: CrossingStats, lo_block: int, hi_block: int) -> np.ndarray:
    i0 = lo_block - stats.first_block
    i1 = hi_block - stats.first_block + 1
    if i0 < 0 or i1 > len(stats.mu):
        raise ValueError("stats do not cover the requested blocks")
    return stats.mu[i0:i1]


def detect_flat_window(stats: CrossingStats, row: PlanRow,
                       s: float) -> FlatWindowReport:
    """Literal window predicates at scale n = d_k.

    Flat: exactly 2 a_k of the blocks in (alpha, beta] have mu^2 inside
    [n^(2/s), 2 n^(2/s)) and none reaches 2 n^(2/s).  Tail: the mu-sum over
    (beta, gamma] stays below 2 n^(1/s).
    """
    n = row.d
    band_lo = float(n) ** (2.0 / s)
    mu_win = _stats_slice(stats, row.alpha + 1, row.beta)
    mu2 = mu_win * mu_win
    count = int(np.count_nonzero((mu2 >= band_lo) & (mu2 < 2.0 * band_lo)))
    flat = (count == 2 * row.a) and bool(np.all(mu2 < 2.0 * band_lo))
    mu_tail = _stats_slice(stats, row.beta + 1, row.gamma)
    tail_sum = float(np.sum(mu_tail))
    tail_ok = tail_sum <= 2.0 * float(n) ** (1.0 / s)
    return FlatWindowReport(flat=flat, count=count, band_lo=band_lo,
                            tail_ok=tail_ok, tail_sum=tail_sum)


def gaussian_window(stats: CrossingStats, row: PlanRow, s: float) -> GaussianWindow:
    """Assemble the window quantities for one plan row: the variance proxy
    v = sum of mu^2 over (alpha, beta] plus the flat/tail flags.  Any
    target site between nu[beta] and nu[gamma] shares the same limit."""
    rep = detect_flat_window(stats, row, s)
    mu_win = _stats_slice(stats, row.alpha + 1, row.beta)
    v = float(np.sum(mu_win * mu_win))
    return GaussianWindow(k=row.k, alpha=row.alpha, beta=row.beta,
                          gamma=row.gamma, v=v, flat=rep.flat,
                          tail_ok=rep.tail_ok, count=rep.count)


# ---------------------------------------------------------------------------
# planted windows (synthetic, predicates satisfied by construction)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PlantedWindow:
    env: Environment
    ladder: LadderIndex
    stats: CrossingStats
    window: GaussianWindow
    row: PlanRow
    sigma_ratio: float  # total sigma^2 over blocks <= gamma, divided by v


_SMALL = 2.0 / 3.0   # rho = 1/2, one-site descending block
_CLIMB = 1.0 / 3.0   # rho = 2
_LEVEL = 0.5         # rho = 1 keeps the prefix product flat


def _trap_sites(depth: int, plateau: int) -> List[float]:
    return [_CLIMB] * depth + [_LEVEL] * plateau + [_SMALL] * (depth + 1)


def _trap_mu(depth: int, plateau: int) -> float:
    """Exact crossing mean of an isolated trap block entered with no carry."""
    rho = np.array([(1.0 - w) / w for w in _trap_sites(depth, plateau)])
    w_out = np.empty(rho.size)
    kernels.w_forward(rho, 0.0, w_out)
    return rho.size + 2.0 * float(np.sum(w_out))


def _tune_trap(mu2_lo: float, mu2_hi: float) -> List[float]:
    """Trap geometry whose isolated mu^2 lands inside [mu2_lo, mu2_hi)."""
    target = math.sqrt(0.5 * (mu2_lo + mu2_hi))
    depth = max(2, int(math.log2(max(target, 8.0)) - 3))
    while _trap_mu(depth, 0) > target and depth > 2:
        depth -= 1
    while _trap_mu(depth + 1, 0) < target:
        depth += 1
    best = None
    for p in range(0, 6 * depth + 6):
        mu = _trap_mu(depth, p)
        if mu * mu >= mu2_hi:
            break
        if mu * mu >= mu2_lo:
            best = p
            break
    if best is None:
        raise RuntimeError("could not tune a trap into the requested band")
    return _trap_sites(depth, best)


def plant_gaussian_window(row: PlanRow, s: float, n_filler: int = 26,
                          filler_level: float = 0.72,
                          tail_margin_sites: int = 0) -> PlantedWindow:
    """Build a synthetic environment whose window satisfies the flat and
    tail predicates by construction.

    Layout: a reflecting origin, alpha one-site blocks, then the window
    (alpha, beta] holding exactly 2 a_k trap blocks with mu^2 inside the
    band plus `n_filler` blocks just below it (they fatten v so no single
    block dominates), then small blocks through gamma.  `tail_margin_sites`
    appends extra small blocks past nu[gamma] for fixed-time experiments.
    """
    n = row.d
    band_lo = float(n) ** (2.0 / s)
    n_band = 2 * row.a
    width = row.beta - row.alpha
    if width < 2 * (n_band + n_filler):
        raise ValueError("window too narrow for the requested planting")

    band_sites = _tune_trap(1.05 * band_lo, 1.9 * band_lo)
    filler_sites = _tune_trap(filler_level * 0.9 * band_lo,
                              filler_level * 1.1 * band_lo)

    omega: List[float] = [1.0]          # reflecting origin, block 1
    omega.extend([_SMALL] * (row.alpha - 1))
    special = n_band + n_filler
    gap = width // (special + 1)
    placed = 0
    for idx in range(width):
        if placed < special and (idx + 1) % gap == 0 and width - idx > special - placed:
            omega.extend(band_sites if placed < n_band else filler_sites)
            placed += 1
        else:
            omega.append(_SMALL)
    if placed < special:
        raise RuntimeError("failed to place all planted blocks")
    omega.extend([_SMALL] * (row.gamma - row.beta))
    if tail_margin_sites > 0:
        omega.extend([_SMALL] * tail_margin_sites)

    env = Environment.from_values(omega, lo=0)
    ladder = ladder_locations(env, row.gamma)
    stats = block_crossing_stats(env, ladder, n_for_reflection=n)
    window = gaussian_window(stats, row, s)
    if not (window.flat and window.tail_ok):
        raise RuntimeError(
            f"planted window failed its own predicates: flat={window.flat} "
            f"count={window.count} tail_ok={window.tail_ok}")
    sig_total = float(np.sum(stats.sigma2[:row.gamma - stats.first_block + 1]))
    return PlantedWindow(env=env, ladder=ladder, stats=stats, window=window,
                         row=row, sigma_ratio=sig_total / window.v)
