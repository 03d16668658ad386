"""Ladder decomposition of an environment.

Ladder points are the sites where the running product of odds ratios first
drops strictly below 1 since the previous ladder point; the environment
blocks between consecutive ladder points are i.i.d. under the conditioned
measure, which is what makes per-block statistics meaningful.  The strict
inequality matters for lattice laws, where the product hits exactly 1 with
positive probability; comparisons run on log sums with a tie band so a
numerical 1 never closes a block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .environment import LOG_TIE_TOL, Environment
from .laws import EnvLaw
from .rng import generator

_SCAN_CHUNK = 1 << 16


@dataclass(frozen=True)
class LadderIndex:
    """Ladder points nu[0] = 0 < nu[1] < ... with per-block maxima.

    block k (1-based) spans sites [nu[k-1], nu[k]); block_max_log[k-1] is
    the log of M_k, the largest prefix product within the block.  M_k can
    be below 1 only for one-site blocks.
    """

    nu: np.ndarray
    block_max_log: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=np.int64))
        object.__setattr__(self, "block_max_log",
                           np.asarray(self.block_max_log, dtype=float))

    @property
    def count(self) -> int:
        return len(self.nu) - 1

    @property
    def block_len(self) -> np.ndarray:
        return np.diff(self.nu)

    @property
    def block_max(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.block_max_log)

    def index_of_site(self, x: int) -> int:
        """Largest k with nu[k] <= x (the ladder count attained at x)."""
        return int(np.searchsorted(self.nu, x, side="right")) - 1


def ladder_locations(env: Environment, count: int,
                     scan_cap: int = 10 ** 9) -> LadderIndex:
    """First `count` ladder points of `env`, scanning rightward from 0.

    Fails with a diagnostic if `scan_cap` sites pass without producing the
    requested ladders (the signature of a recurrent law).
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    nu = [0]
    mlog: list = []
    site = 0
    cum = 0.0
    blockmax = -math.inf
    nu_buf = np.empty(_SCAN_CHUNK, dtype=np.int64)
    m_buf = np.empty(_SCAN_CHUNK, dtype=float)
    extendable = env.left_mode != "fixed"
    while len(nu) <= count:
        if site > scan_cap:
            raise RuntimeError(
                f"ladder scan passed {scan_cap} sites with only "
                f"{len(nu) - 1} ladders found; the law looks recurrent")
        hi = site + _SCAN_CHUNK - 1
        if not extendable:
            hi = min(hi, env.hi)
            if hi < site:
                raise RuntimeError(
                    f"fixed window exhausted with only {len(nu) - 1} of "
                    f"{count} ladders found")
        logrho = np.ascontiguousarray(env.log_rho_view(site, hi))
        need = count - (len(nu) - 1)
        found, cum, blockmax, consumed = kernels.ladder_scan(
            logrho, LOG_TIE_TOL, cum, blockmax, nu_buf, m_buf, need)
        for idx in range(found):
            nu.append(site + int(nu_buf[idx]))
            mlog.append(float(m_buf[idx]))
        site += consumed
    return LadderIndex(np.asarray(nu[:count + 1]), np.asarray(mlog[:count]))


def ladder_covering(env: Environment, site: int, chunk: int = 256,
                    scan_cap: int = 10 ** 9) -> LadderIndex:
    """Smallest ladder index whose last point passes `site`."""
    count = max(4, chunk)
    while True:
        idx = ladder_locations(env, count, scan_cap=scan_cap)
        if idx.nu[-1] > site:
            return idx
        count *= 2


@dataclass(frozen=True)
class BlockIIDReport:
    """KS distances between consecutive-block and independent-block samples."""

    n_blocks: int
    ks_length: float
    ks_log_max: float
    ks_crossing: float


def block_iid_check(law: EnvLaw, n_blocks: int, seed: int,
                    left_depth_tol: float = 1e-9) -> BlockIIDReport:
    """Compare per-block (length, max, expected crossing) between
    consecutive blocks of one long conditioned environment and the first
    blocks of independent conditioned environments."""
    from .environment import sample_environment
    from .quenched import block_crossing_stats
    from .stats import ks_two_sample

    env = sample_environment(law, seed, "conditioned_Q",
                             left_depth_tol=left_depth_tol)
    ladder = ladder_locations(env, n_blocks)
    stats = block_crossing_stats(env, ladder, None)
    cons = (ladder.block_len.astype(float), ladder.block_max_log, stats.mu)

    lens = np.empty(n_blocks)
    mlogs = np.empty(n_blocks)
    mus = np.empty(n_blocks)
    base = generator(seed, 17).integers(0, 2 ** 62, size=n_blocks)
    for i in range(n_blocks):
        env_i = sample_environment(law, int(base[i]), "conditioned_Q",
                                   left_depth_tol=left_depth_tol)
        lad_i = ladder_locations(env_i, 1)
        stats_i = block_crossing_stats(env_i, lad_i, None)
        lens[i] = lad_i.block_len[0]
        mlogs[i] = lad_i.block_max_log[0]
        mus[i] = stats_i.mu[0]

    return BlockIIDReport(
        n_blocks=n_blocks,
        ks_length=ks_two_sample(cons[0], lens),
        ks_log_max=ks_two_sample(cons[1], mlogs),
        ks_crossing=ks_two_sample(cons[2], mus),
    )
