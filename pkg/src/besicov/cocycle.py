"""Exact evaluation of the level bumps, the truncated cocycle, and its sums.

Two piecewise-linear shapes per level n, both of period P = 1/(A_n q_{k_n})
and Lipschitz constant Lambda_n:

  main:  0 on [0, P/12], a ramp of slope Lambda_n up to the plateau
         q_{k_n+1}/(3 A_n n^2) on [5P/12, 7P/12], then the mirror ramp down;
         even about both 0 and P/2.
  tent:  a plain tent, Lambda_n * x up to P/2 and back down (A_n = 1 here,
         so P = 1/q_{k_n} and the peak is q_{k_n+1}/(2 n^2)).

The cocycle itself is the series of coboundary-like differences
f_l(x + alpha) - f_l(x).  The library replaces alpha by one deep convergent
alpha_hat = p_N/q_N *everywhere*, which turns every audited statement into an
exact rational identity; the substitution error is tracked per level as
Lambda_l |m| |alpha - alpha_hat| and surfaces as an explicit budget.  The
series is truncated at ``n_levels``; the omitted tail of the true cocycle is
bounded by sum_{l > N} 1/l^2 < 1/N per unit shift.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Optional

from .cf import IrrationalSpec, convergent
from .levels import LevelParams, Profile, select_levels

#: Default safety factor between q_N (denominator of alpha_hat) and the
#: largest Lipschitz constant in play.
DEFAULT_GUARD = 10**6


@dataclass(frozen=True)
class PiecewisePeriodic:
    """A continuous piecewise-linear periodic function given by breakpoints
    on one period [0, P]; first and last values must agree (continuity)."""

    period: Fraction
    breakpoints: tuple[tuple[Fraction, Fraction], ...]
    slope: Fraction  # Lipschitz constant

    def value(self, x: Fraction) -> Fraction:
        y = x - floor(x / self.period) * self.period
        pts = self.breakpoints
        for (x0, v0), (x1, v1) in zip(pts, pts[1:]):
            if y <= x1:
                if v0 == v1:
                    return v0
                return v0 + (v1 - v0) * (y - x0) / (x1 - x0)
        return pts[-1][1]

    @property
    def maximum(self) -> Fraction:
        return max(v for _, v in self.breakpoints)


@lru_cache(maxsize=None)
def shape(level: LevelParams, variant: str) -> PiecewisePeriodic:
    p = level.period
    lam = level.lam
    if variant == "tent":
        pts = (
            (Fraction(0), Fraction(0)),
            (p / 2, lam * p / 2),
            (p, Fraction(0)),
        )
    else:
        top = level.plateau
        pts = (
            (Fraction(0), Fraction(0)),
            (p / 12, Fraction(0)),
            (5 * p / 12, top),
            (7 * p / 12, top),
            (11 * p / 12, Fraction(0)),
            (p, Fraction(0)),
        )
    return PiecewisePeriodic(period=p, breakpoints=pts, slope=lam)


def eval_level(level: LevelParams, variant: str, x: Fraction) -> Fraction:
    """f_n(x), exact; x is reduced mod the period internally."""
    return shape(level, variant).value(x)


def level_max(level: LevelParams, variant: str) -> Fraction:
    return shape(level, variant).maximum


def term(level: LevelParams, variant: str, x: Fraction, shift: Fraction) -> Fraction:
    """f_n(x + shift) - f_n(x), exact."""
    s = shape(level, variant)
    return s.value(x + shift) - s.value(x)


@dataclass(frozen=True)
class CocycleSpec:
    """A truncated cocycle with a pinned rational stand-in for alpha.

    ``profile`` carries at least ``n_levels`` levels; ``alpha_hat`` is the
    convergent p_N/q_N at ``alpha_depth``, chosen so that
    q_N > guard * max_{l <= n_levels} Lambda_l.  That guard keeps the
    substitution error Lambda_l |alpha - alpha_hat| certifiably below every
    inequality margin the audits assert.
    """

    profile: Profile
    n_levels: int
    alpha_depth: int
    alpha_hat: Fraction
    guard: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_levels <= self.profile.n_max:
            raise ValueError("n_levels must be within the profile's levels")
        q_n = self.alpha_hat.denominator
        if q_n <= self.guard * max(lv.lam for lv in self.levels):
            raise ValueError("alpha_hat too shallow for the guard invariant")

    @property
    def levels(self) -> tuple[LevelParams, ...]:
        return self.profile.levels[: self.n_levels]

    @property
    def variant(self) -> str:
        return self.profile.variant

    @property
    def alpha_gap_bound(self) -> Fraction:
        """Exact upper bound on |alpha - alpha_hat|: the bracket width 1/(q_N q_{N+1})."""
        n = self.alpha_depth
        return Fraction(
            1,
            convergent(self.profile.alpha, n).q * convergent(self.profile.alpha, n + 1).q,
        )

    @property
    def tail_bound(self) -> Fraction:
        """Bound on the omitted series tail per unit |m|: sum_{l>N} 1/l^2 < 1/N."""
        return Fraction(1, self.n_levels)

    def sub_budget_level(self, n: int, m: int = 1) -> Fraction:
        """Substitution error budget for level n at iterate count m."""
        return self.profile.level(n).lam * abs(m) * self.alpha_gap_bound

    def sub_budget(self, m: int = 1) -> Fraction:
        """Total substitution budget across all truncated levels."""
        return sum(
            (lv.lam for lv in self.levels), start=Fraction(0)
        ) * abs(m) * self.alpha_gap_bound

    def truncated(self, n_levels: int) -> "CocycleSpec":
        """Same cocycle cut at fewer levels (alpha_hat unchanged, so values
        of shared levels agree bit for bit)."""
        if n_levels == self.n_levels:
            return self
        return CocycleSpec(
            profile=self.profile,
            n_levels=n_levels,
            alpha_depth=self.alpha_depth,
            alpha_hat=self.alpha_hat,
            guard=self.guard,
        )


def make_cocycle(
    spec: IrrationalSpec,
    strategy: str,
    variant: str,
    n_max: int,
    n_levels: Optional[int] = None,
    alpha_depth: Optional[int] = None,
    guard: int = DEFAULT_GUARD,
) -> CocycleSpec:
    """Build a cocycle spec, extending the level stack past n_max.

    The truncation default is n_max + 3 so that target sets sampled to depth
    n_max still leave a few audited levels above the deepest window in use.
    Level selection is prefix-stable, so the first n_max levels equal those of
    ``select_levels(spec, strategy, variant, n_max)`` exactly.
    """
    n_levels = n_max + 3 if n_levels is None else n_levels
    profile = select_levels(spec, strategy, variant, max(n_max, n_levels))
    lam_max = max(lv.lam for lv in profile.levels[:n_levels])
    if alpha_depth is None:
        alpha_depth = 2
        while convergent(spec, alpha_depth).q <= guard * lam_max:
            alpha_depth += 1
    c = convergent(spec, alpha_depth)
    return CocycleSpec(
        profile=profile,
        n_levels=n_levels,
        alpha_depth=alpha_depth,
        alpha_hat=c.value,
        guard=guard,
    )


def phi(cspec: CocycleSpec, x: Fraction) -> Fraction:
    """Truncated cocycle value: sum of f_l(x + alpha_hat) - f_l(x)."""
    a = cspec.alpha_hat
    v = cspec.variant
    return sum((term(lv, v, x, a) for lv in cspec.levels), start=Fraction(0))


def phi_m(cspec: CocycleSpec, x: Fraction, m: int) -> Fraction:
    """m-th ergodic sum evaluated through the telescoped form
    sum_l (f_l(x + m alpha_hat) - f_l(x)); exact for any integer m."""
    if m == 0:
        return Fraction(0)
    shift = m * cspec.alpha_hat
    v = cspec.variant
    return sum((term(lv, v, x, shift) for lv in cspec.levels), start=Fraction(0))


def birkhoff(cspec: CocycleSpec, x: Fraction, m: int) -> Fraction:
    """m-th ergodic sum by direct orbit summation.

    Agrees with :func:`phi_m` bit for bit because the same alpha_hat is used
    throughout and each f_l has period dividing 1; this equality is the
    module's master correctness check.
    """
    a = cspec.alpha_hat
    total = Fraction(0)
    y = x
    if m >= 0:
        for _ in range(m):
            total += phi(cspec, y)
            y = (y + a) % 1
    else:
        for _ in range(-m):
            y = (y - a) % 1
            total -= phi(cspec, y)
    return total
