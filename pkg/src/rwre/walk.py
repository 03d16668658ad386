"""Seeded Monte Carlo of the quenched walk.

Trajectories are exact nearest-neighbor chains driven by one uniform per
step from a counter-based stream, so a (environment, seed) pair fixes the
path bit-for-bit on either kernel backend and under any thread count.  A
step cap marks rather than discards long paths: with a stability index
below 1 hitting times have infinite mean, so capping policy must stay
visible in every aggregate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import kernels
from .environment import Environment
from .ladders import LadderIndex, ladder_covering
from .quenched import reflection_radius
from .rng import STREAM_WALK, bit_generator

DEFAULT_CAP = 10 ** 9
_LEFT_MARGIN = 64


@dataclass(frozen=True)
class HitSample:
    """One simulated first passage."""

    target: int
    steps: int
    capped: bool
    min_site: int
    max_site: int
    n_t_max: Optional[int] = None  # ladder count attained, when a ladder is given


@dataclass(frozen=True)
class CoupledSample:
    """Plain walk and backtrack-limited companion on one random stream."""

    t_plain: int
    t_reflected: int
    divergence_step: Optional[int]
    capped_plain: bool
    capped_reflected: bool
    violations: int  # steps with companion strictly below the plain walk


@dataclass(frozen=True)
class PositionSample:
    """State after running the chain an exact number of steps."""

    time: int
    x: int
    min_site: int
    max_site: int
    n_t: Optional[int] = None
    ladder_gap: Optional[int] = None  # nu[n_t] - x


def _window(env: Environment, start: int, margin: int) -> int:
    if env.left_mode in ("plain_P", "conditioned_Q"):
        return min(start, 0) - margin
    return env.lo


def simulate_hit(env: Environment, start: int, target: int, seed: int,
                 cap: int = DEFAULT_CAP,
                 ladder: Optional[LadderIndex] = None) -> HitSample:
    """First passage from `start` to `target` (exact chain, deterministic
    in (env, seed)).  Reaching the cap yields a capped sample, not an error."""
    if target <= start:
        raise ValueError("target must be right of the start")
    margin = _LEFT_MARGIN
    while True:
        lo = _window(env, start, margin)
        env.ensure(lo, target)
        omega = np.ascontiguousarray(env.view(env.lo, target))
        bg = bit_generator(seed, STREAM_WALK)
        pos, steps, mn, mx, status = kernels.walk_hit(
            omega, env.lo, start, target, cap, bg)
        if status == kernels.LEFT_EXHAUSTED:
            if env.left_mode in ("plain_P", "conditioned_Q"):
                margin *= 4
                continue
            raise RuntimeError(
                f"walk left the {env.left_mode} window at site {pos}")
        n_t = ladder.index_of_site(mx) if ladder is not None else None
        return HitSample(target=target, steps=int(steps),
                         capped=(status == kernels.CAPPED),
                         min_site=int(mn), max_site=int(mx), n_t_max=n_t)


def simulate_coupled(env: Environment, ladder: LadderIndex, n: int,
                     start: int, target: int, seed: int,
                     cap: int = DEFAULT_CAP) -> CoupledSample:
    """Couple the plain walk with the walk that cannot backtrack more than
    floor(log^2 n) ladder points; the companion dominates pathwise."""
    if target <= start:
        raise ValueError("target must be right of the start")
    if ladder.nu[-1] < target:
        raise ValueError("ladder must cover the target")
    b = reflection_radius(n)
    nu = np.ascontiguousarray(ladder.nu, dtype=np.int64)
    margin = _LEFT_MARGIN
    while True:
        lo = _window(env, start, margin)
        env.ensure(lo, target)
        omega = np.ascontiguousarray(env.view(env.lo, target))
        bg = bit_generator(seed, STREAM_WALK)
        (t_plain, t_ref, div, _mn, _mx, viol,
         st_p, st_r) = kernels.walk_coupled(
            omega, env.lo, nu, b, start, target, cap, bg)
        if st_p == kernels.LEFT_EXHAUSTED or st_r == kernels.LEFT_EXHAUSTED:
            if env.left_mode in ("plain_P", "conditioned_Q"):
                margin *= 4
                continue
            raise RuntimeError("coupled walk left a fixed window")
        return CoupledSample(
            t_plain=int(t_plain), t_reflected=int(t_ref),
            divergence_step=(None if div < 0 else int(div)),
            capped_plain=(st_p == kernels.CAPPED),
            capped_reflected=(st_r == kernels.CAPPED),
            violations=int(viol))


def position_at(env: Environment, time: int, seed: int,
                ladder: Optional[LadderIndex] = None,
                track_ladder: bool = True) -> PositionSample:
    """Run the chain exactly `time` steps from the origin; reports the
    position, the ladder count attained, and the gap back to the furthest
    ladder point."""
    if time < 0:
        raise ValueError("time must be >= 0")
    margin = _LEFT_MARGIN
    hi_needed = max(8, time)  # position after t steps cannot exceed t
    while True:
        lo = _window(env, 0, margin)
        env.ensure(lo, hi_needed)
        omega = np.ascontiguousarray(env.view(env.lo, hi_needed))
        bg = bit_generator(seed, STREAM_WALK)
        pos, _t, mn, mx, status = kernels.walk_fixed(
            omega, env.lo, 0, time, bg)
        if status == kernels.LEFT_EXHAUSTED:
            if env.left_mode in ("plain_P", "conditioned_Q"):
                margin *= 4
                continue
            raise RuntimeError("walk left a fixed window")
        if not track_ladder:
            return PositionSample(time=time, x=int(pos), min_site=int(mn),
                                  max_site=int(mx))
        lad = ladder if ladder is not None else ladder_covering(env, int(mx))
        n_t = lad.index_of_site(int(mx))
        gap = int(lad.nu[n_t]) - int(pos)
        return PositionSample(time=time, x=int(pos), min_site=int(mn),
                              max_site=int(mx), n_t=n_t, ladder_gap=gap)
