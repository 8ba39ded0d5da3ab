"""The four nested interval families and their Cantor-set machinery.

At level n the circle is tiled by A_n q_{k_n} periods of length
P = 1/(A_n q_{k_n}); each family places one closed subinterval of length P/6
per period, at a family-specific offset pattern (in units of P):

    "++" : [-1/12, 1/12]      centred on the bump zeros
    "-+" : [ 1/6,  1/3 ]      inside the rising ramp
    "--" : [ 5/12, 7/12]      centred on the plateau, "++" shifted by P/2
    "+-" : [ 2/3,  5/6 ]      inside the falling ramp, "-+" shifted by P/2

The j = 0 interval of "++" straddles 0 and is kept as a single wrapped
interval on the circle, so counting and membership treat the circle metric
uniformly.  Intersecting the unions over all levels yields a topological
Cantor set; the library works with finite depths and certifies membership
level by level with exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor
from typing import Iterable, Optional, Union

from .errors import DepthExceedsProfile, IndexOutOfRange, InvalidDigitPath
from .levels import Profile

FAMILIES = ("++", "--", "+-", "-+")

#: CLI-safe aliases.
FAMILY_CODES = {"pp": "++", "mm": "--", "pm": "+-", "mp": "-+"}

_OFFSETS = {
    "++": (Fraction(-1, 12), Fraction(1, 12)),
    "-+": (Fraction(1, 6), Fraction(1, 3)),
    "--": (Fraction(5, 12), Fraction(7, 12)),
    "+-": (Fraction(2, 3), Fraction(5, 6)),
}


def canonical_family(family: str) -> str:
    fam = FAMILY_CODES.get(family, family)
    if fam not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    return fam


@dataclass(frozen=True)
class SignPair:
    """Escape signs (s_minus for backward time, s_plus for forward time)."""

    s_minus: str
    s_plus: str

    @staticmethod
    def of(family: str) -> "SignPair":
        fam = canonical_family(family)
        return SignPair(s_minus=fam[0], s_plus=fam[1])

    @property
    def family(self) -> str:
        return self.s_minus + self.s_plus

    @property
    def aligned(self) -> bool:
        return self.s_minus == self.s_plus


def family_kind(family: str) -> str:
    return "aligned" if SignPair.of(family).aligned else "mixed"


@dataclass(frozen=True)
class TargetInterval:
    """One closed level-n interval, endpoints exact; ``a`` may be negative
    only for the wrapped j = 0 interval of the "++" family."""

    family: str
    n: int
    j: int
    a: Fraction
    b: Fraction

    @property
    def length(self) -> Fraction:
        return self.b - self.a

    @property
    def center(self) -> Fraction:
        return (self.a + self.b) / 2

    def contains_point(self, x: Fraction) -> bool:
        """Membership of x in [0,1) under the circle identification."""
        return self.a <= x <= self.b or self.a <= x - 1 <= self.b


def interval(profile: Profile, family: str, n: int, j: int) -> TargetInterval:
    fam = canonical_family(family)
    lv = profile.level(n)
    count = lv.cell_count
    if not 0 <= j < count:
        raise IndexOutOfRange(f"j={j} outside 0..{count - 1} at level {n}")
    lo, hi = _OFFSETS[fam]
    p = lv.period
    return TargetInterval(family=fam, n=n, j=j, a=(j + lo) * p, b=(j + hi) * p)


def member_level(
    profile: Profile, family: str, n: int, x: Fraction
) -> Optional[tuple[int, Fraction]]:
    """Locate x in the level-n union.

    Returns ``(j, reduction)`` with reduction = x - j_lift * P lying in the
    family's offset band, or None when x falls in a gap.  The lifted index
    makes the reduction exact even across the wrap, while j is reported mod
    the cell count.
    """
    fam = canonical_family(family)
    lv = profile.level(n)
    lo, hi = _OFFSETS[fam]
    u = x / lv.period
    j_lift = floor(u - lo)
    if u - j_lift > hi:
        return None
    return j_lift % lv.cell_count, x - j_lift * lv.period


@dataclass(frozen=True)
class MemberResult:
    ok: bool
    first_fail: Optional[int]
    entries: tuple[tuple[int, Fraction], ...]  # (j, reduction) per level


def member(profile: Profile, family: str, x: Fraction, up_to: int) -> MemberResult:
    """Exact membership of x in every level-l union for l <= up_to.

    A failure reports the minimal failing level.
    """
    x = x % 1
    entries: list[tuple[int, Fraction]] = []
    for n in range(1, up_to + 1):
        hit = member_level(profile, family, n, x)
        if hit is None:
            return MemberResult(ok=False, first_fail=n, entries=tuple(entries))
        entries.append(hit)
    return MemberResult(ok=True, first_fail=None, entries=tuple(entries))


def _circle_contained(child: TargetInterval, parent: TargetInterval) -> bool:
    """Closed containment of intervals on the circle (lengths < 1)."""
    lo = parent.a - child.a
    hi = parent.b - child.b
    return ceil(lo) <= floor(hi)


def _children_lifted(
    profile: Profile, family: str, parent: TargetInterval
) -> list[tuple[int, Fraction]]:
    """Child indices at level n+1 with their lifted centers, in circle order
    along the parent.

    The offset pattern tiles the real line with period P', so one lifted
    index range (j + lo) P' >= a, (j + hi) P' <= b already enumerates every
    circle child; each candidate is re-verified by the containment predicate.
    """
    fam = canonical_family(family)
    n_child = parent.n + 1
    lv = profile.level(n_child)
    lo, hi = _OFFSETS[fam]
    p = lv.period
    count = lv.cell_count
    jmin = ceil(parent.a / p - lo)
    jmax = floor(parent.b / p - hi)
    out: list[tuple[int, Fraction]] = []
    for j in range(jmin, jmax + 1):
        child = TargetInterval(
            family=fam, n=n_child, j=j % count, a=(j + lo) * p, b=(j + hi) * p
        )
        assert _circle_contained(child, parent)
        out.append((child.j, child.center))
    return out


def children(profile: Profile, family: str, parent: TargetInterval) -> list[int]:
    """Indices j of the level-(n+1) intervals wholly inside ``parent``.

    Containment is closed (boundary touching counts), matching the counting
    convention the dimension bounds rely on.
    """
    if parent.n >= profile.n_max:
        raise DepthExceedsProfile(f"no level {parent.n + 1} in profile")
    return [j for j, _ in _children_lifted(profile, family, parent)]


@dataclass(frozen=True)
class DigitPath:
    """Nested child choices identifying a depth-N point.

    ``point`` is the center of the depth-N interval; ``reductions[l-1]`` is
    point - j_l * P_l (lifted), which lies in the family's offset band at
    every level and is what the divergence audits consume.
    """

    family: str
    indices: tuple[int, ...]
    point: Fraction
    reductions: tuple[Fraction, ...]

    @property
    def depth(self) -> int:
        return len(self.indices)


def _path_from_indices(
    profile: Profile, family: str, indices: Iterable[int]
) -> DigitPath:
    fam = canonical_family(family)
    idx = tuple(indices)
    prev: Optional[TargetInterval] = None
    for n, j in enumerate(idx, start=1):
        cur = interval(profile, fam, n, j)
        if prev is not None and not _circle_contained(cur, prev):
            raise InvalidDigitPath(f"level {n} interval j={j} not inside level {n - 1}")
        prev = cur
    assert prev is not None
    x = prev.center % 1
    res = member(profile, fam, x, len(idx))
    if not res.ok:
        raise InvalidDigitPath(f"center fails membership at level {res.first_fail}")
    return DigitPath(
        family=fam,
        indices=idx,
        point=x,
        reductions=tuple(r for _, r in res.entries),
    )


def sample_point(
    profile: Profile,
    family: str,
    policy: Union[str, DigitPath] = "center",
    depth: int = 1,
) -> tuple[Fraction, DigitPath]:
    """Produce a certified point of the depth-``depth`` intersection.

    policy "center" descends through the middle child at every level (keeping
    audit margins fat), "leftmost" through the first child in circle order;
    both are rooted at j_1 = 0.  A DigitPath may be passed instead to
    reconstruct and re-certify a specific point.  Membership at every level
    up to the depth is verified exactly before returning.
    """
    fam = canonical_family(family)
    if isinstance(policy, DigitPath):
        path = _path_from_indices(profile, fam, policy.indices)
        return path.point, path
    if policy not in ("center", "leftmost"):
        raise ValueError("policy must be 'center', 'leftmost', or a DigitPath")
    if not 1 <= depth <= profile.n_max:
        raise DepthExceedsProfile(f"depth {depth} outside 1..{profile.n_max}")

    indices = [0]
    cur = interval(profile, fam, 1, 0)
    for _ in range(2, depth + 1):
        kids = _children_lifted(profile, fam, cur)
        if not kids:
            raise InvalidDigitPath(
                f"no children inside level-{cur.n} interval (invalid profile?)"
            )
        pick = kids[0] if policy == "leftmost" else kids[len(kids) // 2]
        indices.append(pick[0])
        cur = interval(profile, fam, cur.n + 1, pick[0])
    path = _path_from_indices(profile, fam, indices)
    return path.point, path


def interval_rows(profile: Profile, family: str, n: int) -> Iterable[dict]:
    """CSV-ready rows (decimal strings) for the whole level-n union."""
    fam = canonical_family(family)
    lv = profile.level(n)
    for j in range(lv.cell_count):
        iv = interval(profile, fam, n, j)
        yield {
            "n": n,
            "j": j,
            "family": fam,
            "a_num": str(iv.a.numerator),
            "a_den": str(iv.a.denominator),
            "b_num": str(iv.b.numerator),
            "b_den": str(iv.b.denominator),
        }
