"""Realized environments: site probabilities over an integer window.

An Environment is value-immutable: omega at a site never changes once drawn,
and widening the window never perturbs existing sites (each side is a fixed
Philox stream, so any snapshot's overlap with a later one is bit-identical).
The window itself grows lazily on demand.

Left-hand modes:

* ``plain_P``       -- i.i.d. sites on both half-lines.
* ``conditioned_Q`` -- the negative half-line is rejection-sampled so that
  every prefix product rho_{-k} ... rho_{-1} stays strictly below 1 (the
  conditioning that makes blocks between ascending-ladder points i.i.d.).
  Sampling stops once the running product drops below ``left_depth_tol``;
  deeper sites, when requested, continue the same stream under the same
  constraint (the conditioning on sites beyond that depth is within
  O(left_depth_tol^s) of unconditioned i.i.d., so the splice is harmless at
  any tolerance used here).
* ``reflecting``    -- omega = 1 exactly at ``reflect_at`` (<= 0); the walk
  and every potential sum terminate there.
* ``fixed``         -- explicit omega array, no extension (test/synthetic
  environments).
"""

from __future__ import annotations

import threading
from typing import Optional

import numpy as np

from .laws import EnvLaw, RegimeError
from .rng import STREAM_LEFT, STREAM_RIGHT, generator

# Comparisons of log prefix products against 0 use this tie band: lattice
# laws hit products exactly equal to 1 with positive probability, and a
# product numerically indistinguishable from 1 must not count as < 1.
LOG_TIE_TOL = 1e-9

_CHUNK = 256


class Environment:
    """A realized window of omega over [lo, hi] (value-immutable, growable)."""

    def __init__(self, law: Optional[EnvLaw], seed: int, left_mode: str, *,
                 left_depth_tol: float = 1e-12, reflect_at: int = 0,
                 rejection_budget: int = 10 ** 6,
                 _omega: Optional[np.ndarray] = None, _lo: int = 0):
        if left_mode not in ("plain_P", "conditioned_Q", "reflecting", "fixed"):
            raise ValueError(f"unknown left_mode {left_mode!r}")
        self.law = law
        self.seed = int(seed)
        self.left_mode = left_mode
        self.left_depth_tol = float(left_depth_tol)
        self.reflect_at = int(reflect_at)
        self.rejection_budget = int(rejection_budget)
        self._lock = threading.RLock()

        if left_mode == "fixed":
            omega = np.ascontiguousarray(_omega, dtype=float)
            if omega.ndim != 1 or omega.size == 0:
                raise ValueError("fixed environment needs a 1-d omega array")
            if _lo > 0 or _lo + omega.size - 1 < 0:
                raise ValueError("window must contain site 0")
            self._buf = omega.copy()
            self._origin = -_lo
            self._lo = _lo
            self._hi = _lo + omega.size - 1
            self._gen_right = None
            self._gen_left = None
            self._left_cumlog = np.array([], dtype=float)
            return

        if law is None:
            raise ValueError("sampled environments need a law")
        if left_mode == "reflecting" and reflect_at > 0:
            raise ValueError("reflection point must be <= 0")

        self._gen_right = generator(self.seed, STREAM_RIGHT)
        self._gen_left = generator(self.seed, STREAM_LEFT)

        cap = 1024
        self._buf = np.empty(cap, dtype=float)
        self._origin = 256
        self._lo = 0
        self._hi = -1
        self._left_cumlog = np.array([], dtype=float)
        self._materialize_right(0)

        if left_mode == "conditioned_Q":
            self._init_left_conditioned()
        elif left_mode == "reflecting":
            self._init_left_reflecting()
        # plain_P: left sites drawn lazily

    # -- construction helpers ----------------------------------------------

    @classmethod
    def from_values(cls, omega, lo: int = 0, law: Optional[EnvLaw] = None) -> "Environment":
        """Fixed window from explicit omega values (omega[0] sits at `lo`)."""
        return cls(law, 0, "fixed", _omega=np.asarray(omega, dtype=float), _lo=lo)

    # -- storage -------------------------------------------------------------

    def _grow(self, lo: int, hi: int) -> None:
        need_lo = self._origin + lo
        need_hi = self._origin + hi
        if need_lo >= 0 and need_hi < self._buf.size:
            return
        span = hi - lo + 1
        cap = max(2 * self._buf.size, 2 * span + 512)
        newbuf = np.empty(cap, dtype=float)
        margin = (cap - (self._hi - self._lo + 1)) // 2
        new_origin = margin - self._lo
        if self._hi >= self._lo:
            newbuf[new_origin + self._lo: new_origin + self._hi + 1] = \
                self._buf[self._origin + self._lo: self._origin + self._hi + 1]
        self._buf = newbuf
        self._origin = new_origin
        self._grow(lo, hi)

    def _put(self, site: int, value: float) -> None:
        self._grow(min(site, self._lo), max(site, self._hi))
        self._buf[self._origin + site] = value

    def _materialize_right(self, hi: int) -> None:
        if hi <= self._hi:
            return
        n = hi - self._hi
        draws = self.law.sample(self._gen_right, n)
        self._grow(self._lo, hi)
        self._buf[self._origin + self._hi + 1: self._origin + hi + 1] = draws
        self._hi = hi

    def _init_left_reflecting(self) -> None:
        r = self.reflect_at
        if r < -1:
            draws = self.law.sample(self._gen_left, -1 - r)
            for k, w in enumerate(draws):  # draws fill sites -1, -2, ..., r+1
                self._put(-1 - k, w)
        if r < 0:
            self._put(r, 1.0)
        else:
            # reflection at the origin overrides the site-0 draw
            self._buf[self._origin] = 1.0
        self._lo = r

    def _init_left_conditioned(self) -> None:
        target = np.log(self.left_depth_tol)
        for _ in range(self.rejection_budget):
            vals, logs = self._try_left_run(0.0, target)
            if vals is not None:
                for k, w in enumerate(vals):
                    self._put(-1 - k, w)
                self._lo = -len(vals)
                self._left_cumlog = np.asarray(logs, dtype=float)
                return
        raise RegimeError("rejection budget exhausted sampling the conditioned "
                          "left half (law too close to recurrent)")

    def _try_left_run(self, base_log: float, stop_log: float):
        """One attempt at a run of left sites keeping every prefix product
        below 1; returns (values, cumlogs) or (None, None) on rejection."""
        vals: list = []
        logs: list = []
        cum = base_log
        while cum > stop_log:
            draws = self.law.sample(self._gen_left, _CHUNK)
            for w in draws:
                cum += np.log((1.0 - w) / w)
                vals.append(w)
                logs.append(cum)
                if cum > -LOG_TIE_TOL:
                    return None, None
                if cum <= stop_log:
                    return vals, logs
        return vals, logs

    def _extend_left(self, lo: int) -> None:
        if lo >= self._lo:
            return
        if self.left_mode in ("reflecting", "fixed"):
            raise IndexError(
                f"site {lo} is outside this {self.left_mode} environment "
                f"(window [{self._lo}, {self._hi}])")
        if self.left_mode == "plain_P":
            n = self._lo - lo
            draws = self.law.sample(self._gen_left, n)
            for k, w in enumerate(draws):
                self._put(self._lo - 1 - k, w)
            self._lo = lo
            return
        # conditioned_Q: continue under the same prefix constraint, restarting
        # only the extension segment on a violation.
        base = float(self._left_cumlog[-1]) if self._left_cumlog.size else 0.0
        while self._lo > lo:
            stop = base - 1.0  # extend roughly one e-fold per accepted run
            for _ in range(self.rejection_budget):
                vals, logs = self._try_left_run(base, stop)
                if vals is not None:
                    break
            else:
                raise RegimeError("rejection budget exhausted extending the "
                                  "conditioned left half")
            for k, w in enumerate(vals):
                self._put(self._lo - 1 - k, w)
            self._lo -= len(vals)
            self._left_cumlog = np.concatenate(
                [self._left_cumlog, np.asarray(logs, dtype=float)])
            base = float(self._left_cumlog[-1])

    # -- public API ------------------------------------------------------

    @property
    def lo(self) -> int:
        return self._lo

    @property
    def hi(self) -> int:
        return self._hi

    def ensure(self, lo: int, hi: int) -> "Environment":
        """Materialize [lo, hi]; returns self (values of existing sites are
        untouched, so any earlier view stays bit-identical)."""
        with self._lock:
            if hi > self._hi:
                if self.left_mode == "fixed":
                    raise IndexError(f"site {hi} is outside this fixed environment")
                self._materialize_right(hi)
            if lo < self._lo:
                self._extend_left(lo)
        return self

    def omega(self, i: int) -> float:
        if i < self._lo or i > self._hi:
            self.ensure(min(i, self._lo), max(i, self._hi))
        return float(self._buf[self._origin + i])

    def rho(self, i: int) -> float:
        w = self.omega(i)
        return (1.0 - w) / w

    def view(self, lo: int, hi: int) -> np.ndarray:
        """omega over [lo, hi] as a contiguous array (read-only view)."""
        if hi < lo:
            return np.empty(0, dtype=float)
        self.ensure(lo, hi)
        v = self._buf[self._origin + lo: self._origin + hi + 1]
        v = v.view()
        v.flags.writeable = False
        return v

    def rho_view(self, lo: int, hi: int) -> np.ndarray:
        w = self.view(lo, hi)
        return (1.0 - w) / w

    def log_rho_view(self, lo: int, hi: int) -> np.ndarray:
        w = self.view(lo, hi)
        with np.errstate(divide="ignore"):
            return np.log1p(-w) - np.log(w)

    def left_prefix_logs(self) -> np.ndarray:
        """cum log prefix products log Pi_{-k,-1}, k = 1..-lo (Q mode)."""
        if self.left_mode == "conditioned_Q":
            return self._left_cumlog.copy()
        lr = self.log_rho_view(self._lo, -1)[::-1]
        return np.cumsum(lr)

    def to_csv(self, path) -> None:
        """Debug dump of the materialized window as (site, omega)."""
        from .reporting import emit_csv
        rows = [(i, self.omega(i)) for i in range(self._lo, self._hi + 1)]
        emit_csv(rows, ("site", "omega"), path)

    def __repr__(self) -> str:
        return (f"Environment(mode={self.left_mode}, seed={self.seed}, "
                f"window=[{self._lo}, {self._hi}])")


def sample_environment(law: EnvLaw, seed: int, left_mode: str = "plain_P", *,
                       left_depth_tol: float = 1e-12, reflect_at: int = 0,
                       rejection_budget: int = 10 ** 6,
                       right_sites: int = 0) -> Environment:
    """Draw an environment; site 0 (and `right_sites` more) materialized."""
    env = Environment(law, seed, left_mode, left_depth_tol=left_depth_tol,
                      reflect_at=reflect_at, rejection_budget=rejection_budget)
    if right_sites > 0:
        env.ensure(env.lo, right_sites)
    return env
