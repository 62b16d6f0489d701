"""
Exact DoF regions of the two-user MIMO IC and the antenna-count predicates
that decide which region applies under each feedback setting.

All arithmetic is done with :class:`fractions.Fraction`; no floating point
enters membership or vertex computations.
"""

from __future__ import annotations

import enum
import functools
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .model import AntennaConfig, FeedbackSetting

LABELS = ("NonNeg1", "NonNeg2", "L01", "L02", "L1", "L2", "L3")


class ConditionNotHolding(ValueError):
    """Neither Condition 1 nor Condition 2 holds for the configuration."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def format_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class DofPoint:
    d1: Fraction
    d2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "d1", _frac(self.d1))
        object.__setattr__(self, "d2", _frac(self.d2))
        if self.d1 < 0 or self.d2 < 0:
            raise ValueError(f"DoF coordinates must be nonnegative: {self}")

    def mirrored(self) -> "DofPoint":
        return DofPoint(self.d2, self.d1)

    def scaled(self, factor) -> "DofPoint":
        return DofPoint(self.d1 * factor, self.d2 * factor)

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return (self.d1, self.d2)

    def __str__(self):
        return f"({format_fraction(self.d1)}, {format_fraction(self.d2)})"


@dataclass(frozen=True)
class HalfPlane:
    """The constraint ``a1*d1 + a2*d2 <= b``."""

    a1: Fraction
    a2: Fraction
    b: Fraction
    label: str

    def __post_init__(self):
        for name in ("a1", "a2", "b"):
            object.__setattr__(self, name, _frac(getattr(self, name)))
        if self.a1 == 0 and self.a2 == 0:
            raise ValueError("half-plane normal must be nonzero")
        if self.label not in LABELS:
            raise ValueError(f"unknown half-plane label {self.label!r}")

    def value(self, d1: Fraction, d2: Fraction) -> Fraction:
        return self.a1 * d1 + self.a2 * d2

    def satisfied(self, p: DofPoint) -> bool:
        return self.value(p.d1, p.d2) <= self.b

    def tight(self, p: DofPoint) -> bool:
        return self.value(p.d1, p.d2) == self.b

    def mirrored(self) -> "HalfPlane":
        swap = {"NonNeg1": "NonNeg2", "NonNeg2": "NonNeg1", "L01": "L02",
                "L02": "L01", "L1": "L2", "L2": "L1", "L3": "L3"}
        return HalfPlane(self.a2, self.a1, self.b, swap[self.label])

    def __str__(self):
        terms = []
        for coef, var in ((self.a1, "d1"), (self.a2, "d2")):
            if coef == 0:
                continue
            if coef == 1:
                terms.append(var)
            elif coef == -1:
                terms.append(f"-{var}")
            else:
                terms.append(f"({format_fraction(coef)}){var}")
        return f"{self.label}: {' + '.join(terms)} <= {format_fraction(self.b)}"


def _intersect(p: HalfPlane, q: HalfPlane):
    det = p.a1 * q.a2 - p.a2 * q.a1
    if det == 0:
        return None
    d1 = (p.b * q.a2 - p.a2 * q.b) / det
    d2 = (p.a1 * q.b - p.b * q.a1) / det
    return d1, d2


def _ccw_order(points: list) -> list:
    """Order the vertices of a convex polygon counter-clockwise, starting
    from the lowest-then-leftmost vertex."""
    if len(points) <= 2:
        return sorted(points, key=lambda p: (p[1], p[0]))
    n = len(points)
    cx = sum(p[0] for p in points) / n
    cy = sum(p[1] for p in points) / n

    def half(v):
        x, y = v
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    def cmp(p, q):
        u = (p[0] - cx, p[1] - cy)
        v = (q[0] - cx, q[1] - cy)
        hu, hv = half(u), half(v)
        if hu != hv:
            return hu - hv
        cross = u[0] * v[1] - u[1] * v[0]
        return -1 if cross > 0 else (1 if cross < 0 else 0)

    ordered = sorted(points, key=functools.cmp_to_key(cmp))
    start = min(range(n), key=lambda i: (ordered[i][1], ordered[i][0]))
    return ordered[start:] + ordered[:start]


def enumerate_vertices(halfplanes) -> tuple:
    """Vertices of the polygon cut out by ``halfplanes``.

    Every pair of boundary lines is intersected exactly, infeasible
    intersections are discarded and the survivors are deduplicated and
    ordered counter-clockwise.
    """
    found = set()
    for p, q in combinations(halfplanes, 2):
        pt = _intersect(p, q)
        if pt is None:
            continue
        if all(h.value(*pt) <= h.b for h in halfplanes):
            found.add(pt)
    return tuple(DofPoint(*pt) for pt in _ccw_order(list(found)))


@dataclass(frozen=True)
class DofRegion:
    """Bounded convex polygon in the nonnegative ``(d1, d2)`` quadrant."""

    halfplanes: tuple

    def __post_init__(self):
        object.__setattr__(self, "halfplanes", tuple(self.halfplanes))

    @functools.cached_property
    def vertices(self) -> tuple:
        return enumerate_vertices(self.halfplanes)

    def contains(self, p: DofPoint) -> bool:
        return all(h.satisfied(p) for h in self.halfplanes)

    def bound(self, label: str) -> HalfPlane:
        for h in self.halfplanes:
            if h.label == label:
                return h
        raise KeyError(label)

    def redundant(self, label: str) -> bool:
        """True when the labelled bound is implied by the remaining ones."""
        target = self.bound(label)
        others = [h for h in self.halfplanes if h is not target]
        return all(target.satisfied(v) for v in enumerate_vertices(others))

    def redundancy(self) -> dict:
        return {h.label: self.redundant(h.label) for h in self.halfplanes}

    def active(self, label: str) -> bool:
        """True when the labelled bound supports an edge of positive length."""
        h = self.bound(label)
        return sum(1 for v in self.vertices if h.tight(v)) >= 2

    def mirrored(self) -> "DofRegion":
        return DofRegion(tuple(h.mirrored() for h in self.halfplanes))

    def vertex_set(self) -> frozenset:
        return frozenset(v.as_tuple() for v in self.vertices)

    # -- export ----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "halfplanes": [
                {"a1": format_fraction(h.a1), "a2": format_fraction(h.a2),
                 "b": format_fraction(h.b), "label": h.label,
                 "redundant": self.redundant(h.label)}
                for h in self.halfplanes],
            "vertices": [[format_fraction(v.d1), format_fraction(v.d2)]
                         for v in self.vertices],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def to_csv(self) -> str:
        lines = ["d1,d2"]
        lines += [f"{format_fraction(v.d1)},{format_fraction(v.d2)}" for v in self.vertices]
        return "\n".join(lines) + "\n"


def _base_bounds(cfg: AntennaConfig) -> list:
    m1, m2, n1, n2 = cfg.as_tuple()
    return [
        HalfPlane(-1, 0, 0, "NonNeg1"),
        HalfPlane(0, -1, 0, "NonNeg2"),
        HalfPlane(1, 0, min(m1, n1), "L01"),
        HalfPlane(0, 1, min(m2, n2), "L02"),
    ]


def sum_bound(cfg: AntennaConfig) -> int:
    m1, m2, n1, n2 = cfg.as_tuple()
    return min(m1 + m2, n1 + n2, max(m1, n2), max(m2, n1))


def shannon_outer_region(cfg: AntennaConfig) -> DofRegion:
    """Outer bound on the DoF region with Shannon feedback (exact for every
    antenna configuration)."""
    m1, m2, n1, n2 = cfg.as_tuple()
    hps = _base_bounds(cfg)
    hps.append(HalfPlane(Fraction(1, min(n1 + n2, m1)), Fraction(1, min(n2, m1)),
                         Fraction(min(n2, m1 + m2), min(n2, m1)), "L1"))
    hps.append(HalfPlane(Fraction(1, min(n1, m2)), Fraction(1, min(n1 + n2, m2)),
                         Fraction(min(n1, m1 + m2), min(n1, m2)), "L2"))
    hps.append(HalfPlane(1, 1, sum_bound(cfg), "L3"))
    return DofRegion(tuple(hps))


def icsit_op_region(cfg: AntennaConfig) -> DofRegion:
    """DoF region with instantaneous CSIT, with or without output feedback."""
    hps = _base_bounds(cfg)
    hps.append(HalfPlane(1, 1, sum_bound(cfg), "L3"))
    return DofRegion(tuple(hps))


def contains(region: DofRegion, p: DofPoint) -> bool:
    return region.contains(p)


class Relation(enum.Enum):
    EQUAL = "Equal"
    A_SUBSET_B = "ASubsetB"
    B_SUBSET_A = "BSubsetA"
    INCOMPARABLE = "Incomparable"


def region_relation(a: DofRegion, b: DofRegion) -> Relation:
    """Containment relation of two convex regions via vertex membership."""
    a_in_b = all(b.contains(v) for v in a.vertices)
    b_in_a = all(a.contains(v) for v in b.vertices)
    if a_in_b and b_in_a:
        return Relation.EQUAL
    if a_in_b:
        return Relation.A_SUBSET_B
    if b_in_a:
        return Relation.B_SUBSET_A
    return Relation.INCOMPARABLE


# -- conditions and cases ------------------------------------------------

def condition_holds(cfg: AntennaConfig, i: int) -> bool:
    """Whether Condition ``i`` holds:
    ``M_i > N1+N2-M_j > N_i > N_j > M_j > N_j (N_j-M_j)/(N_i-M_j)``."""
    if i not in (1, 2):
        raise ValueError("i must be 1 or 2")
    j = 3 - i
    mi, mj = cfg.tx_antennas(i), cfg.tx_antennas(j)
    ni, nj = cfg.rx_antennas(i), cfg.rx_antennas(j)
    if not (mi > cfg.n1 + cfg.n2 - mj > ni > nj > mj):
        return False
    # ni > mj is implied by the chain above, so the ratio is well defined
    return mj > Fraction(nj * (nj - mj), ni - mj)


class CaseClass(enum.Enum):
    NO_CONDITION_HOLDS = "NoConditionHolds"
    CONDITION1_CASE_A = "Condition1CaseA"
    CONDITION1_CASE_B = "Condition1CaseB"
    CONDITION2_CASE_A = "Condition2CaseA"
    CONDITION2_CASE_B = "Condition2CaseB"

    @property
    def swapped(self) -> bool:
        """User 2 plays the role of user 1 in the scheme."""
        return self in (CaseClass.CONDITION2_CASE_A, CaseClass.CONDITION2_CASE_B)

    @property
    def case(self):
        if self is CaseClass.NO_CONDITION_HOLDS:
            return None
        return "A" if self.value.endswith("A") else "B"


def normalize(cfg: AntennaConfig) -> tuple[AntennaConfig, bool]:
    """Return ``(cfg', swapped)`` with Condition 1 holding for ``cfg'``.

    Raises
    ------
    ConditionNotHolding
        If neither condition holds.
    """
    if condition_holds(cfg, 1):
        return cfg, False
    if condition_holds(cfg, 2):
        return cfg.swapped(), True
    raise ConditionNotHolding(f"no condition holds for {cfg}")


def case_a_threshold(cfg: AntennaConfig) -> Fraction:
    """``N2 (N1 - M2) / (N2 - M2)`` for a Condition-1 configuration."""
    return Fraction(cfg.n2 * (cfg.n1 - cfg.m2), cfg.n2 - cfg.m2)


def classify_case(cfg: AntennaConfig) -> CaseClass:
    try:
        norm, swapped = normalize(cfg)
    except ConditionNotHolding:
        return CaseClass.NO_CONDITION_HOLDS
    case_a = norm.m1_prime >= case_a_threshold(norm)
    if swapped:
        return CaseClass.CONDITION2_CASE_A if case_a else CaseClass.CONDITION2_CASE_B
    return CaseClass.CONDITION1_CASE_A if case_a else CaseClass.CONDITION1_CASE_B


@dataclass(frozen=True)
class CornerPoints:
    p_o2_1: DofPoint
    p_o2_3: DofPoint
    p_1_3: DofPoint

    def mirrored(self) -> "CornerPoints":
        return CornerPoints(self.p_o2_1.mirrored(), self.p_o2_3.mirrored(),
                            self.p_1_3.mirrored())


def normalized_corner_points(norm: AntennaConfig) -> CornerPoints:
    """Corner points for a configuration already satisfying Condition 1."""
    m1p, m2, n1, n2 = norm.m1_prime, norm.m2, norm.n1, norm.n2
    return CornerPoints(
        p_o2_1=DofPoint(Fraction(m1p * (n2 - m2), n2), m2),
        p_o2_3=DofPoint(n1 - m2, m2),
        p_1_3=DofPoint(Fraction(m1p * (n1 - n2), m1p - n2),
                       Fraction(n2 * (m1p - n1), m1p - n2)),
    )


def corner_points(cfg: AntennaConfig) -> CornerPoints:
    """Corner points targeted by the alignment scheme, in the coordinates of
    ``cfg`` (mirrored back when Condition 2 is the one holding).

    Raises
    ------
    ConditionNotHolding
    """
    norm, swapped = normalize(cfg)
    pts = normalized_corner_points(norm)
    return pts.mirrored() if swapped else pts


# -- settings --------------------------------------------------------------

@dataclass(frozen=True)
class Known:
    region: DofRegion


@dataclass(frozen=True)
class UnknownByThisPaper:
    reason: str

    def __post_init__(self):
        if not self.reason:
            raise ValueError("reason must be non-empty")


def output_feedback_open(cfg: AntennaConfig) -> str | None:
    """Name of the antenna inequality leaving the output-feedback region
    open, or None when the region is settled."""
    m1, m2, n1, n2 = cfg.as_tuple()
    if min(m1, n1) > n2 > m2:
        return "min(M1,N1) > N2 > M2 holds"
    if min(m2, n2) > m1 > n1:
        return "min(M2,N2) > M1 > N1 holds"
    return None


def region_for_setting(cfg: AntennaConfig, s: FeedbackSetting):
    """The DoF region under setting ``s`` when it is determined, otherwise
    :class:`UnknownByThisPaper` naming the failed predicate."""
    fs = FeedbackSetting
    if s in (fs.SHANNON, fs.DESIGNABLE_SHANNON,
             fs.LIMITED_SHANNON_TYPE1, fs.LIMITED_SHANNON_TYPE2):
        return Known(shannon_outer_region(cfg))
    if s in (fs.INSTANTANEOUS_CSIT, fs.INSTANTANEOUS_CSIT_PLUS_OUTPUT):
        return Known(icsit_op_region(cfg))
    if s is fs.OUTPUT_FEEDBACK:
        reason = output_feedback_open(cfg)
        return Known(shannon_outer_region(cfg)) if reason is None else UnknownByThisPaper(reason)
    if s is fs.DELAYED_CSIT:
        for i in (1, 2):
            if condition_holds(cfg, i):
                return UnknownByThisPaper(
                    f"Condition {i} holds; delayed-CSIT region is strictly smaller "
                    "than the Shannon-feedback region")
        return Known(shannon_outer_region(cfg))
    if s is fs.NO_SIDE_INFORMATION:
        return UnknownByThisPaper("no-CSIT region is not characterized here")
    raise ValueError(f"unhandled setting {s}")
