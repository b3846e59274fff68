"""Innovation families in the domain of attraction of an alpha-stable law.

Two families are provided, both mean zero by construction:

    ExactStable  -- wraps a StandardStable law, sampled exactly (CMS).
    ParetoTail   -- tails realized exactly: P(e > x) = s2*x^-a*h(x) and
                    P(e <= -x) = s1*x^-a*h(x) for all x >= x1, where
                    x1 = kappa * x_t, x_t solves (s1+s2)*x_t^-a*h(x_t) = 1 and
                    kappa >= 2 is the smallest power of two for which the
                    interior balance fits (see below).  The remaining interior
                    mass sits uniformly on an interval inside (-x1, x1) whose
                    midpoint zeroes the mean, so the law is mean zero by
                    construction with no centering shift distorting the tails
                    (an additive shift would bias finite-quantile tail-constant
                    recovery).  Exact tails are what make the stored constants
                    empirically recoverable; x0 is a floor the threshold must
                    clear (x_t >= x0 is validated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy.integrate import quad

from .slowly_varying import SlowlyVaryingSpec, constant, eval_sv
from .stable_law import (
    GAUSSIAN_ALPHA_CUTOFF,
    SkewedStableParams,
    StandardStable,
    from_tail_constants,
    sample,
    stable_tail_constant,
)

__all__ = [
    "ExactStable",
    "ParetoTail",
    "InnovationSpec",
    "exact_stable",
    "TailConstants",
    "tail_constants",
    "innovation_cf_params",
    "ParetoLayout",
    "pareto_layout",
    "sample_innovations",
]


@dataclass(frozen=True)
class ExactStable:
    law: StandardStable


def exact_stable(alpha: float, beta: float, scale: float) -> ExactStable:
    return ExactStable(StandardStable(alpha, beta, scale))


@dataclass(frozen=True)
class ParetoTail:
    alpha: float
    sigma1: float
    sigma2: float
    h: SlowlyVaryingSpec
    x0: float = 1.0

    def __post_init__(self):
        if not (1.0 < self.alpha <= 2.0):
            raise ValueError("need alpha in (1, 2]")
        if self.sigma1 < 0.0 or self.sigma2 < 0.0 or self.sigma1 + self.sigma2 <= 0.0:
            raise ValueError("need sigma1, sigma2 >= 0 with sigma1 + sigma2 > 0")
        if not (self.x0 > 0.0):
            raise ValueError("need x0 > 0")
        _check_survival_monotone(self)
        if self._two_sided_tail(self.x0) < 1.0 - 1e-12:
            raise ValueError("tail constants carry less than unit mass beyond "
                             "x0; exact tails need (s1+s2)*x0^-a*h(x0) >= 1")

    def _two_sided_tail(self, x: float) -> float:
        return (self.sigma1 + self.sigma2) * x ** (-self.alpha) * eval_sv(self.h, x)

    @property
    def threshold(self) -> float:
        """Support threshold x_t: the point where the two-sided tail mass
        (s1+s2)*x^-a*h(x) equals 1."""
        total = self.sigma1 + self.sigma2
        if self.h.kind == "constant":
            return (total * self.h.c) ** (1.0 / self.alpha)
        lo = hi = self.x0
        while self._two_sided_tail(hi) > 1.0:
            lo, hi = hi, hi * 4.0
        for _ in range(200):
            mid = math.sqrt(lo * hi)
            if self._two_sided_tail(mid) > 1.0:
                lo = mid
            else:
                hi = mid
        return math.sqrt(lo * hi)


def _check_survival_monotone(spec: ParetoTail) -> None:
    # x^-a h(x) must strictly decrease past x0, i.e. a*ln(e+x) > p*x/(e+x).
    # For p > 0 the left-minus-right gap is minimized at x* = e*(p/a - 1).
    if spec.h.kind != "log_power" or spec.h.p <= 0.0:
        return
    p, a = spec.h.p, spec.alpha
    candidates = [spec.x0]
    x_star = math.e * (p / a - 1.0)
    if x_star > spec.x0:
        candidates.append(x_star)
    for x in candidates:
        if a * math.log(math.e + x) <= p * x / (math.e + x):
            raise ValueError("survival x^-alpha h(x) is not monotone past x0; "
                             "reduce the log-power exponent")


InnovationSpec = Union[ExactStable, ParetoTail]


class TailConstants(NamedTuple):
    alpha: float
    sigma1: float
    sigma2: float
    h: SlowlyVaryingSpec


def tail_constants(spec: InnovationSpec) -> TailConstants:
    """Tail constants (alpha, sigma1, sigma2, h) of the innovation law.

    ParetoTail stores them; ExactStable derives them from the standard stable
    tail constant.  At alpha = 2 the power-tail constant degenerates to 0, so
    the Gaussian branch returns the generalized constants sigma1 = sigma2 =
    scale^2/2 that make the CF constants round-trip exactly (h == 1).
    """
    if isinstance(spec, ParetoTail):
        return TailConstants(spec.alpha, spec.sigma1, spec.sigma2, spec.h)
    law = spec.law
    if law.alpha >= GAUSSIAN_ALPHA_CUTOFF:
        half = 0.5 * law.scale**2
        return TailConstants(law.alpha, half, half, constant(1.0))
    c = stable_tail_constant(law.alpha) * law.scale**law.alpha
    return TailConstants(law.alpha,
                         c * (1.0 - law.beta) / 2.0,
                         c * (1.0 + law.beta) / 2.0,
                         constant(1.0))


def innovation_cf_params(spec: InnovationSpec) -> SkewedStableParams:
    """CF constants (alpha, sigma, D) of the attractor of the innovation law."""
    tc = tail_constants(spec)
    return from_tail_constants(tc.alpha, tc.sigma1, tc.sigma2)


def _tail_first_moment(spec: ParetoTail, weight: float, x1: float) -> float:
    """E[X 1{X > x1}] for one side with survival weight * x^-alpha * h(x):
    x1 * P(X > x1) + int_x1^inf P(X > x) dx."""
    a, h = spec.alpha, spec.h
    head = weight * x1 ** (1.0 - a) * eval_sv(h, x1)
    if h.kind == "constant":
        return head + weight * h.c * x1 ** (1.0 - a) / (a - 1.0)
    integral, _ = quad(lambda x: weight * x ** (-a) * eval_sv(h, x),
                       x1, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400)
    return head + integral


@dataclass(frozen=True)
class ParetoLayout:
    """Resolved sampling layout: exact tails beyond x1, interior mass p0
    uniform on [center - width, center + width]."""

    x1: float
    p_left: float
    p_right: float
    p0: float
    center: float
    width: float


def pareto_layout(spec: ParetoTail) -> ParetoLayout:
    x1 = 2.0 * spec.threshold
    for _ in range(64):
        p_left = spec.sigma1 * x1 ** (-spec.alpha) * eval_sv(spec.h, x1)
        p_right = spec.sigma2 * x1 ** (-spec.alpha) * eval_sv(spec.h, x1)
        p0 = 1.0 - p_left - p_right
        tail_mean = (_tail_first_moment(spec, spec.sigma2, x1)
                     - _tail_first_moment(spec, spec.sigma1, x1))
        center = -tail_mean / p0
        if abs(center) < 0.9 * x1:
            width = 0.5 * (x1 - abs(center))
            return ParetoLayout(x1, p_left, p_right, p0, center, width)
        x1 *= 2.0  # extreme skew: push the exact-tail zone out
    raise RuntimeError("could not place the interior balance interval")


def sample_innovations(spec: InnovationSpec, n: int, seed) -> np.ndarray:
    """n i.i.d. mean-zero innovations; deterministic given seed."""
    n = int(n)
    if n < 1:
        raise ValueError("need n >= 1")
    if isinstance(spec, ExactStable):
        return sample(spec.law, n, seed)
    rng = np.random.default_rng(seed)
    return _sample_pareto_with(spec, n, rng)


def _sample_pareto_with(spec: ParetoTail, n: int, rng) -> np.ndarray:
    lay = pareto_layout(spec)
    q = rng.random(n)
    left = q < lay.p_left
    right = q >= lay.p_left + lay.p0
    out = np.empty(n)
    interior = ~(left | right)
    # uniform interior stretch balancing the mean
    out[interior] = lay.center + lay.width * (
        2.0 * (q[interior] - lay.p_left) / lay.p0 - 1.0)
    # conditional survival levels g in (0, 1] per tail
    if np.any(left):
        g = np.maximum(q[left] / lay.p_left, 1e-300)
        out[left] = -_invert_tail_survival(spec, lay.x1, g)
    if np.any(right):
        g = np.maximum((1.0 - q[right]) / lay.p_right, 1e-300)
        out[right] = _invert_tail_survival(spec, lay.x1, g)
    return out


def _invert_tail_survival(spec: ParetoTail, x1: float, g: np.ndarray) -> np.ndarray:
    """Solve (x/x1)^-alpha h(x)/h(x1) = g for x >= x1 (vectorized)."""
    a, h = spec.alpha, spec.h
    if h.kind == "constant":
        return x1 * g ** (-1.0 / a)
    h1 = eval_sv(h, x1)

    def surv(x):
        return (x / x1) ** (-a) * eval_sv(h, x) / h1

    hi = x1 * np.maximum(g, 1e-300) ** (-1.0 / a)
    for _ in range(200):  # grow until the bracket covers every draw
        bad = surv(hi) > g
        if not np.any(bad):
            break
        hi[bad] *= 4.0
    lo = np.full_like(hi, x1)
    for _ in range(80):  # monotone bisection in log space
        mid = np.sqrt(lo * hi)
        below = surv(mid) > g
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.sqrt(lo * hi)
