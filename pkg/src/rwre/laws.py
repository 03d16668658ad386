"""Site laws for the environment and the stability index.

The environment assigns every site an independent right-step probability
omega drawn from a common law P.  The odds ratio rho = (1 - omega)/omega
controls everything: the walk is transient to the right iff E_P log rho < 0,
its speed vanishes iff additionally E_P rho >= 1, and the unique positive
root s of E_P rho^s = 1 is the stability index governing the hitting-time
tails.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy import integrate
from scipy.stats import beta as beta_dist

PROB_SUM_TOL = 1e-12
GAMMA_HI = 64.0


class RegimeError(ValueError):
    """Raised when an operation requires right-transience the law lacks."""


@dataclass(frozen=True)
class EnvLaw:
    """Marginal distribution of a single site probability omega.

    kind "discrete": atoms `values` (each strictly inside (0,1)) with
    weights `probs`.  kind "beta": Beta(a, b) clamped into
    [eps, 1 - eps]; the clamp mass sits as atoms at the edges.
    """

    kind: str
    values: tuple = ()
    probs: tuple = ()
    a: float = 0.0
    b: float = 0.0
    eps: float = 0.0
    _cum: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.kind == "discrete":
            vals = np.asarray(self.values, dtype=float)
            pr = np.asarray(self.probs, dtype=float)
            if vals.size == 0 or vals.size != pr.size:
                raise ValueError("discrete law needs matching values/probs")
            if np.any(vals <= 0.0) or np.any(vals >= 1.0):
                raise ValueError("omega atoms must lie strictly inside (0,1)")
            if np.any(pr < 0.0) or abs(pr.sum() - 1.0) > PROB_SUM_TOL:
                raise ValueError("probs must be nonnegative and sum to 1 within 1e-12")
            object.__setattr__(self, "values", tuple(vals))
            object.__setattr__(self, "probs", tuple(pr))
            object.__setattr__(self, "_cum", np.cumsum(pr))
        elif self.kind == "beta":
            if self.a <= 0 or self.b <= 0:
                raise ValueError("beta shapes must be positive")
            if not (0.0 < self.eps < 0.5):
                raise ValueError("beta truncation eps must be in (0, 0.5)")
        else:
            raise ValueError(f"unknown law kind {self.kind!r}")

    # -- constructors ---------------------------------------------------

    @classmethod
    def discrete(cls, values: Sequence[float], probs: Sequence[float]) -> "EnvLaw":
        return cls(kind="discrete", values=tuple(values), probs=tuple(probs))

    @classmethod
    def two_point(cls, q: float) -> "EnvLaw":
        """rho in {2, 1/2} with P(rho = 2) = q, i.e. omega in {1/3, 2/3}.

        Lattice in log rho; fine for exponent checks, the tail constant
        oscillates.
        """
        if not (0.0 < q < 1.0):
            raise ValueError("q must be in (0,1)")
        return cls.discrete((1.0 / 3.0, 2.0 / 3.0), (q, 1.0 - q))

    @classmethod
    def three_point_nonlattice(cls, drift: float = 0.36) -> "EnvLaw":
        """Three omega atoms with incommensurate log rho values.

        `drift` is the weight on the descending atom; larger drift means
        faster transience (larger s).  Default keeps s below 1.
        """
        if not (0.0 < drift < 1.0):
            raise ValueError("drift must be in (0,1)")
        rest = 1.0 - drift
        return cls.discrete((0.25, 0.45, 0.70), (0.40 * rest, 0.60 * rest, drift))

    @classmethod
    def beta_law(cls, a: float, b: float, eps: float = 1e-4) -> "EnvLaw":
        return cls(kind="beta", a=float(a), b=float(b), eps=float(eps))

    # -- sampling ---------------------------------------------------------

    def sample(self, gen: np.random.Generator, n: int) -> np.ndarray:
        """n i.i.d. omega draws; consumes the stream one uniform per site
        (discrete) or one beta variate per site."""
        if self.kind == "discrete":
            idx = np.searchsorted(self._cum, gen.random(n), side="right")
            idx = np.minimum(idx, len(self.values) - 1)
            return np.asarray(self.values, dtype=float)[idx]
        draws = gen.beta(self.a, self.b, n)
        return np.clip(draws, self.eps, 1.0 - self.eps)

    # -- moments of rho = (1-omega)/omega ---------------------------------

    def _rho_atoms(self):
        vals = np.asarray(self.values, dtype=float)
        return (1.0 - vals) / vals

    def moment_rho(self, gamma: float) -> float:
        """E_P rho^gamma; exact sum for discrete laws, adaptive quadrature
        plus clamp atoms for beta laws."""
        if self.kind == "discrete":
            rho = self._rho_atoms()
            return float(np.dot(np.asarray(self.probs), rho ** gamma))
        return self._beta_expect(lambda x: ((1.0 - x) / x) ** gamma)

    def mean_log_rho(self) -> float:
        if self.kind == "discrete":
            rho = self._rho_atoms()
            return float(np.dot(np.asarray(self.probs), np.log(rho)))
        return self._beta_expect(lambda x: np.log((1.0 - x) / x))

    def mean_rho(self) -> float:
        return self.moment_rho(1.0)

    def _beta_expect(self, f) -> float:
        lo, hi = self.eps, 1.0 - self.eps
        dist = beta_dist(self.a, self.b)
        mid, err = integrate.quad(lambda x: f(x) * dist.pdf(x), lo, hi, limit=200)
        # clamp mass collapses onto the edge atoms
        p_lo = dist.cdf(lo)
        p_hi = dist.sf(hi)
        return float(mid + p_lo * f(lo) + p_hi * f(hi))

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        if self.kind == "discrete":
            return {"kind": "discrete", "values": list(self.values),
                    "probs": list(self.probs)}
        return {"kind": "beta", "a": self.a, "b": self.b, "eps": self.eps}

    @classmethod
    def from_json(cls, obj: dict) -> "EnvLaw":
        if obj["kind"] == "discrete":
            return cls.discrete(obj["values"], obj["probs"])
        if obj["kind"] == "beta":
            return cls.beta_law(obj["a"], obj["b"], obj.get("eps", 1e-4))
        raise ValueError(f"unknown law kind {obj['kind']!r}")

    def dumps(self) -> str:
        return json.dumps(self.to_json())


@dataclass(frozen=True)
class StabilityReport:
    """Regime classification of a law plus its stability index.

    s solves E_P rho^s = 1 (None when the walk is not right-transient or no
    root exists below the search ceiling).  v_P is the almost-sure speed
    1/(1 + 2 E_P W_0) with E_P W_0 the geometric series in E_P rho; it is 0
    whenever E_P rho >= 1.
    """

    s: Optional[float]
    e_log_rho: float
    e_rho: float
    v_p: float
    regime: str  # recurrent | transient_positive_speed | transient_zero_speed
    phi_at_s: Optional[float] = None


def solve_stability_index(law: EnvLaw, tol: float = 1e-10) -> StabilityReport:
    """Root of phi(gamma) = E_P rho^gamma on (0, 64] by bisection.

    phi is convex with phi(0) = 1 and phi'(0) = E_P log rho, so for a
    right-transient law (E_P log rho < 0) phi dips below 1 and a root > 0
    exists iff phi ever climbs back above 1.  Laws with E_P log rho >= 0 get
    a regime-only report (recurrent covers the boundary and the left-
    transient case; no right-transient quantities make sense there).
    """
    e_log = law.mean_log_rho()
    e_rho = law.mean_rho()
    if e_rho < 1.0:
        ew0 = e_rho / (1.0 - e_rho)
        v_p = 1.0 / (1.0 + 2.0 * ew0)
    else:
        v_p = 0.0
    if e_log >= 0.0:
        return StabilityReport(s=None, e_log_rho=e_log, e_rho=e_rho,
                               v_p=0.0, regime="recurrent")
    regime = "transient_zero_speed" if e_rho >= 1.0 else "transient_positive_speed"

    phi = law.moment_rho
    hi = 1.0
    while phi(hi) <= 1.0:
        hi *= 2.0
        if hi > GAMMA_HI:
            return StabilityReport(s=None, e_log_rho=e_log, e_rho=e_rho,
                                   v_p=v_p, regime=regime)
    lo = hi / 2.0 if hi > 1.0 else tol
    while phi(lo) >= 1.0:
        lo /= 2.0
        if lo < 1e-14:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = phi(mid)
        if abs(val - 1.0) <= tol:
            return StabilityReport(s=mid, e_log_rho=e_log, e_rho=e_rho,
                                   v_p=v_p, regime=regime, phi_at_s=val)
        if val < 1.0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    return StabilityReport(s=mid, e_log_rho=e_log, e_rho=e_rho,
                           v_p=v_p, regime=regime, phi_at_s=phi(mid))


def two_point_s(q: float) -> float:
    """Closed form for the two-point law: s = log2((1-q)/q) for q < 1/2."""
    if not (0.0 < q < 0.5):
        raise ValueError("closed form needs q in (0, 1/2)")
    return math.log2((1.0 - q) / q)
