"""
Retrospective interference alignment: scheme parameters, the five design
criteria, corner-point planners, LC/DS set partitioning and the complete
transmit schedule.

Everything here is expressed for a configuration on which Condition 1
holds (user 1 is the user with the large transmitter).  A Condition-2
configuration is handled by planning on ``cfg.swapped()``; the returned
:class:`SchemeParams` records the swap.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .model import AntennaConfig
from .regions import (CaseClass, ConditionNotHolding, DofPoint, classify_case,
                      format_fraction, normalize, normalized_corner_points,
                      shannon_outer_region)

DEFAULT_BLOCKS = 4


class WrongCase(ValueError):
    """Planner called on a configuration outside its case."""


class CapacityExceeded(ValueError):
    """A set does not fit in its partition cells."""


@dataclass(frozen=True)
class SchemeParams:
    """Parameters ``(T, t1, t2, m1, m2, B)`` of the alignment scheme.

    ``m1`` and ``m2`` are indexed by slot-in-block minus one.  ``swapped``
    marks parameters planned on the user-swapped configuration; ``target``
    is then expressed in swapped coordinates as well.
    """

    T: int
    t1: int
    t2: int
    m1: tuple
    m2: tuple
    B: int
    target: DofPoint
    swapped: bool = False
    corner: str = ""

    def __post_init__(self):
        object.__setattr__(self, "m1", tuple(int(x) for x in self.m1))
        object.__setattr__(self, "m2", tuple(int(x) for x in self.m2))

    @property
    def total_slots(self) -> int:
        return (self.B + 1) * self.T

    def n_req(self, tbar: int, cfg: AntennaConfig) -> int:
        """Cross-receiver LCs R1 needs for Phase-One slot ``tbar``."""
        return max(0, self.m1[tbar - 1] - cfg.n1)

    def with_blocks(self, B: int) -> "SchemeParams":
        return SchemeParams(self.T, self.t1, self.t2, self.m1, self.m2, B,
                            self.target, self.swapped, self.corner)

    def to_json(self) -> dict:
        return {"T": self.T, "t1": self.t1, "t2": self.t2,
                "m1": list(self.m1), "m2": list(self.m2), "B": self.B,
                "target": [format_fraction(self.target.d1), format_fraction(self.target.d2)],
                "swapped": self.swapped, "corner": self.corner}

    @classmethod
    def from_json(cls, obj: dict) -> "SchemeParams":
        return cls(obj["T"], obj["t1"], obj["t2"], obj["m1"], obj["m2"], obj["B"],
                   DofPoint(Fraction(obj["target"][0]), Fraction(obj["target"][1])),
                   obj.get("swapped", False), obj.get("corner", ""))


@dataclass(frozen=True)
class Violation:
    criterion: str
    message: str

    def __str__(self):
        return f"{self.criterion}: {self.message}"


CRITERIA = ("DC1", "DC2", "DC3", "DC4", "DC5")


def validate(params: SchemeParams, cfg: AntennaConfig) -> list:
    """Check Design Criteria 1-5; returns the list of violations.

    ``cfg`` is the configuration the scheme runs on (the swapped one when
    ``params.swapped``).
    """
    out = []
    T, t1, t2, m1, m2 = params.T, params.t1, params.t2, params.m1, params.m2
    d1, d2 = params.target.d1, params.target.d2

    if T < 1 or t1 < 1 or t2 < 1:
        out.append(Violation("DC1", f"T={T}, t1={t1}, t2={t2} must be positive"))
    if t1 + t2 != T:
        out.append(Violation("DC1", f"t1 + t2 = {t1 + t2} != T = {T}"))
    if params.B < 1:
        out.append(Violation("DC1", f"B={params.B} must be positive"))

    if (T * d1).denominator != 1 or (T * d2).denominator != 1:
        out.append(Violation("DC2", f"T*d = ({T * d1}, {T * d2}) not integral"))

    if len(m1) != T or len(m2) != T:
        out.append(Violation("DC3", f"m1/m2 lengths {len(m1)}/{len(m2)} != T = {T}"))
        return out
    if any(x < 0 for x in m1 + m2):
        out.append(Violation("DC3", "negative symbol counts"))
    for i in range(t1, T):
        if m1[i] != 0:
            out.append(Violation("DC3", f"m1({i + 1}) = {m1[i]} in Phase Two"))
    for i in range(min(t1, T)):
        if m1[i] > cfg.m1_prime:
            out.append(Violation("DC3", f"m1({i + 1}) = {m1[i]} > M1' = {cfg.m1_prime}"))
    if sum(m1) != T * d1:
        out.append(Violation("DC3", f"sum m1 = {sum(m1)} != T*d1 = {T * d1}"))
    for j in range(T):
        if m2[j] > cfg.m2:
            out.append(Violation("DC3", f"m2({j + 1}) = {m2[j]} > M2 = {cfg.m2}"))
    if sum(m2) != T * d2:
        out.append(Violation("DC3", f"sum m2 = {sum(m2)} != T*d2 = {T * d2}"))

    ds_load = sum(m2[:t1])
    if ds_load > (cfg.n2 - cfg.m2) * t2:
        out.append(Violation("DC4", f"|S_DS| = {ds_load} > (N2-M2)*t2 = {(cfg.n2 - cfg.m2) * t2}"))
    lc_load = sum(max(0, m1[i] - cfg.n1) for i in range(t1))
    if lc_load > (cfg.n1 - cfg.n2) * t2:
        out.append(Violation("DC5", f"|S_LC| = {lc_load} > (N1-N2)*t2 = {(cfg.n1 - cfg.n2) * t2}"))
    return out


def target_in_region(params: SchemeParams, cfg: AntennaConfig) -> bool:
    """Whether the target point lies in the Shannon-feedback region."""
    return shannon_outer_region(cfg).contains(params.target)


# -- planners ----------------------------------------------------------------

def _normalized_for(cfg: AntennaConfig, wanted: str):
    case = classify_case(cfg)
    if case.case != wanted:
        raise WrongCase(f"{cfg} is {case.value}, planner needs Case {wanted}")
    norm, swapped = normalize(cfg)
    return norm, swapped


def plan_case_a(cfg: AntennaConfig, B: int = DEFAULT_BLOCKS) -> SchemeParams:
    """Parameters reaching ``P_o2,3 = (N1 - M2, M2)`` in Case A."""
    norm, swapped = _normalized_for(cfg, "A")
    m2, n1, n2 = norm.m2, norm.n1, norm.n2
    T, t1, t2 = n2, n2 - m2, m2
    total = n2 * (n1 - m2)
    base = total // t1
    extra = total - t1 * base
    m1 = [base + 1] * extra + [base] * (t1 - extra) + [0] * t2
    return SchemeParams(T, t1, t2, m1, [m2] * T, B,
                        normalized_corner_points(norm).p_o2_3, swapped, "o2_3")


def plan_case_b_o21(cfg: AntennaConfig, B: int = DEFAULT_BLOCKS) -> SchemeParams:
    """Parameters reaching ``P_o2,1`` in Case B."""
    norm, swapped = _normalized_for(cfg, "B")
    m2, n2 = norm.m2, norm.n2
    T, t1, t2 = n2, n2 - m2, m2
    m1 = [norm.m1_prime] * t1 + [0] * t2
    return SchemeParams(T, t1, t2, m1, [m2] * T, B,
                        normalized_corner_points(norm).p_o2_1, swapped, "o2_1")


def plan_case_b_13(cfg: AntennaConfig, B: int = DEFAULT_BLOCKS) -> SchemeParams:
    """Parameters reaching ``P_1,3`` (intersection of L1 and L3) in Case B.

    Phase-One ``m2`` values are filled greedily: ``M2`` per slot until the
    remaining budget ``(N2 - M2)(M1' - N1)`` is smaller than ``M2``, then
    the remainder, then zeros.
    """
    norm, swapped = _normalized_for(cfg, "B")
    m1p, m2, n1, n2 = norm.m1_prime, norm.m2, norm.n1, norm.n2
    T, t1, t2 = m1p - n2, n1 - n2, m1p - n1
    budget = (n2 - m2) * (m1p - n1)
    phase_one = []
    for _ in range(t1):
        take = min(m2, budget)
        phase_one.append(take)
        budget -= take
    if budget:
        raise WrongCase(f"Phase-One T2 budget does not fit for {cfg}")
    m1 = [m1p] * t1 + [0] * t2
    return SchemeParams(T, t1, t2, m1, phase_one + [m2] * t2, B,
                        normalized_corner_points(norm).p_1_3, swapped, "1_3")


PLANNERS = {"o2_3": plan_case_a, "o2_1": plan_case_b_o21, "1_3": plan_case_b_13}


def plan(cfg: AntennaConfig, corner: str = "auto", B: int = DEFAULT_BLOCKS) -> SchemeParams:
    """Dispatch to a planner; ``auto`` picks ``o2_3`` in Case A and ``1_3``
    in Case B."""
    if corner == "auto":
        case = classify_case(cfg)
        if case is CaseClass.NO_CONDITION_HOLDS:
            raise ConditionNotHolding(f"no condition holds for {cfg}")
        corner = "o2_3" if case.case == "A" else "1_3"
    try:
        planner = PLANNERS[corner]
    except KeyError:
        raise ValueError(f"unknown corner {corner!r}") from None
    return planner(cfg, B)


def scheme_config(cfg: AntennaConfig, params: SchemeParams) -> AntennaConfig:
    """The configuration the scheme actually runs on."""
    return cfg.swapped() if params.swapped else cfg


# -- symbols and sets ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class Ds:
    """Data symbol ``u_{user,index}(block, slot)``."""

    user: int
    block: int
    slot: int
    index: int

    def __str__(self):
        return f"DS{self.user}[b{self.block},t{self.slot},i{self.index}]"


@dataclass(frozen=True, order=True)
class Lc:
    """Linear combination ``LC^{[tx]}_{rx,antenna}(block, slot)``: the part
    of receiver ``rx``'s antenna output contributed by transmitter ``tx``."""

    rx: int
    tx: int
    antenna: int
    block: int
    slot: int

    def __str__(self):
        return f"LC{self.rx}{self.tx}[a{self.antenna},b{self.block},t{self.slot}]"


SymbolId = Union[Ds, Lc]


def parse_symbol(text: str) -> SymbolId:
    body = text[text.index("[") + 1:-1].split(",")
    nums = [int(part[1:]) for part in body]
    if text.startswith("DS"):
        return Ds(int(text[2]), *nums)
    return Lc(int(text[2]), int(text[3]), nums[0], nums[1], nums[2])


def _partition(items: list, cells: int, cap: int) -> tuple:
    if len(items) > cells * cap:
        raise CapacityExceeded(f"{len(items)} items exceed {cells} cells of {cap}")
    return tuple(tuple(items[i * cap:(i + 1) * cap]) for i in range(cells))


@dataclass(frozen=True)
class SetPlan:
    """``S_LC(b)``, ``S_DS(b)`` and their Phase-Two partitions, for blocks
    ``b = 1..B+1`` (stored at index ``b - 1``)."""

    s_lc: tuple
    s_ds: tuple
    p_lc: tuple
    p_ds: tuple

    def cell(self, b: int, i: int) -> tuple:
        """Elements ``P_LC(b, i)`` followed by ``P_DS(b, i)``."""
        return self.p_lc[b - 1][i - 1] + self.p_ds[b - 1][i - 1]


def build_set_plan(params: SchemeParams, cfg: AntennaConfig) -> SetPlan:
    """Construct and partition the LC and DS sets of every block.

    ``cfg`` is the configuration the scheme runs on.
    """
    B, t1, t2 = params.B, params.t1, params.t2
    lc_cap, ds_cap = cfg.n1 - cfg.n2, cfg.n2 - cfg.m2
    s_lc, s_ds, p_lc, p_ds = [], [], [], []
    for b in range(1, B + 2):
        if b == 1:
            lcs = []
        else:
            lcs = [Lc(2, 1, a, b - 1, tb)
                   for tb in range(1, t1 + 1)
                   for a in range(1, params.n_req(tb, cfg) + 1)]
        if b == B + 1:
            dss = []
        else:
            dss = [Ds(2, b, tb, i)
                   for tb in range(1, t1 + 1)
                   for i in range(1, params.m2[tb - 1] + 1)]
        s_lc.append(tuple(lcs))
        s_ds.append(tuple(dss))
        p_lc.append(_partition(lcs, t2, max(lc_cap, 0)))
        p_ds.append(_partition(dss, t2, max(ds_cap, 0)))
    return SetPlan(tuple(s_lc), tuple(s_ds), tuple(p_lc), tuple(p_ds))


# -- schedule -------------------------------------------------------------------

class EntryKind(enum.Enum):
    NEW_DS = "NewDs"
    RETRANS_DS = "RetransDs"
    RETRANS_LC = "RetransLc"
    ZERO = "Zero"


@dataclass(frozen=True)
class Entry:
    kind: EntryKind
    symbol: object = None

    def __str__(self):
        return self.kind.value if self.symbol is None else f"{self.kind.value}:{self.symbol}"


ZERO = Entry(EntryKind.ZERO)


@dataclass(frozen=True)
class SlotPlan:
    t: int
    block: int
    tbar: int
    phase: int
    tx1: tuple
    tx2: tuple

    def entries(self, tx: int) -> tuple:
        return self.tx1 if tx == 1 else self.tx2


def block_of(t: int, T: int) -> int:
    """``b(t) = ceil(t / T)``."""
    return -(-t // T)


def slot_in_block(t: int, T: int) -> int:
    """``t - T (b(t) - 1)``."""
    return t - T * (block_of(t, T) - 1)


@dataclass(frozen=True)
class TransmitSchedule:
    total_slots: int
    slots: tuple = field(repr=False)

    def slot(self, t: int) -> SlotPlan:
        return self.slots[t - 1]

    def new_ds_count(self, user: int) -> int:
        return sum(1 for s in self.slots for e in s.entries(user)
                   if e.kind is EntryKind.NEW_DS)

    def to_json(self) -> dict:
        return {"total_slots": self.total_slots,
                "slots": [{"t": s.t, "block": s.block, "tbar": s.tbar, "phase": s.phase,
                           "tx1": [str(e) for e in s.tx1], "tx2": [str(e) for e in s.tx2]}
                          for s in self.slots]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def _pad(entries: list, n: int) -> tuple:
    return tuple(entries) + (ZERO,) * (n - len(entries))


def build_schedule(params: SchemeParams, plan: SetPlan, cfg: AntennaConfig) -> TransmitSchedule:
    """Per-slot antenna assignments for all ``(B + 1) T`` slots.

    In Phase Two, T1 places the ``P_LC`` elements on its lowest antennas,
    followed by the ``P_DS`` elements.
    """
    T, t1, B = params.T, params.t1, params.B
    slots = []
    for t in range(1, params.total_slots + 1):
        b, tb = block_of(t, T), slot_in_block(t, T)
        if tb <= t1:
            if b <= B:
                tx1 = [Entry(EntryKind.NEW_DS, Ds(1, b, tb, i))
                       for i in range(1, params.m1[tb - 1] + 1)]
                tx2 = [Entry(EntryKind.NEW_DS, Ds(2, b, tb, j))
                       for j in range(1, params.m2[tb - 1] + 1)]
            else:
                tx1, tx2 = [], []
            phase = 1
        else:
            i = tb - t1
            tx1 = [Entry(EntryKind.RETRANS_LC, s) for s in plan.p_lc[b - 1][i - 1]]
            tx1 += [Entry(EntryKind.RETRANS_DS, s) for s in plan.p_ds[b - 1][i - 1]]
            if b <= B:
                tx2 = [Entry(EntryKind.NEW_DS, Ds(2, b, tb, j))
                       for j in range(1, params.m2[tb - 1] + 1)]
            else:
                tx2 = []
            phase = 2
        if len(tx1) > cfg.m1 or len(tx2) > cfg.m2:
            raise CapacityExceeded(f"slot {t} needs more antennas than available")
        slots.append(SlotPlan(t, b, tb, phase, _pad(tx1, cfg.m1), _pad(tx2, cfg.m2)))
    return TransmitSchedule(params.total_slots, tuple(slots))
