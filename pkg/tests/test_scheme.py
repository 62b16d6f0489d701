import itertools
import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from retroia.model import AntennaConfig
from retroia.regions import CaseClass, ConditionNotHolding, DofPoint, classify_case
from retroia.scheme import (CapacityExceeded, Ds, EntryKind, Lc, SchemeParams, WrongCase,
                            block_of, build_schedule, build_set_plan, parse_symbol, plan,
                            plan_case_a, plan_case_b_13, plan_case_b_o21, scheme_config,
                            slot_in_block, target_in_region, validate)

from oracles import scheme_symbol_totals

CFG_A = AntennaConfig(6, 2, 4, 3)
CFG_B = AntennaConfig(7, 2, 5, 3)


def condition_configs(limit=12):
    out = []
    for c in itertools.product(range(1, limit + 1), repeat=4):
        cfg = AntennaConfig(*c)
        case = classify_case(cfg)
        if case is not CaseClass.NO_CONDITION_HOLDS:
            out.append((cfg, case))
    return out


ALL_CONDITION_CONFIGS = condition_configs()


def schedule_for(cfg, params):
    run_cfg = scheme_config(cfg, params)
    sets = build_set_plan(params, run_cfg)
    return run_cfg, sets, build_schedule(params, sets, run_cfg)


# -- validate ----------------------------------------------------------------------

def test_validate_case_a_example():
    p = SchemeParams(3, 1, 2, [6, 0, 0], [2, 2, 2], 4, DofPoint(2, 2))
    assert validate(p, CFG_A) == []


def test_validate_m2_cap_breach():
    p = SchemeParams(3, 1, 2, [6, 0, 0], [3, 2, 2], 4, DofPoint(2, 2))
    assert "DC3" in {v.criterion for v in validate(p, CFG_A)}


def test_validate_t2_too_small():
    p = SchemeParams(3, 1, 1, [6, 0, 0], [2, 2, 2], 4, DofPoint(2, 2))
    crit = {v.criterion for v in validate(p, CFG_A)}
    assert {"DC4", "DC5"} <= crit


def test_validate_dc2_non_integral():
    p = SchemeParams(3, 1, 2, [6, 0, 0], [2, 2, 2], 4, DofPoint(F(1, 2), 2))
    assert "DC2" in {v.criterion for v in validate(p, CFG_A)}


def test_validate_phase_two_data_and_m1_cap():
    p = SchemeParams(3, 1, 2, [5, 1, 0], [2, 2, 2], 4, DofPoint(2, 2))
    assert any(v.criterion == "DC3" and "Phase Two" in v.message for v in validate(p, CFG_A))
    q = SchemeParams(3, 1, 2, [8, 0, 0], [2, 2, 2], 4, DofPoint(F(8, 3), 2))
    assert any("M1'" in v.message for v in validate(q, CFG_A))


# -- planners ------------------------------------------------------------------------

def test_plan_case_a_6243():
    p = plan_case_a(CFG_A)
    assert (p.T, p.t1, p.t2, p.m1, p.m2) == (3, 1, 2, (6, 0, 0), (2, 2, 2))
    assert p.target == DofPoint(2, 2) and validate(p, CFG_A) == []


def test_plan_case_a_9254_fails_condition():
    # the last link of the chain needs M2 = 2 > N2 (N2 - M2) / (N1 - M2) = 8/3
    cfg = AntennaConfig(9, 2, 5, 4)
    assert classify_case(cfg) is CaseClass.NO_CONDITION_HOLDS
    with pytest.raises(WrongCase):
        plan_case_a(cfg)


def test_plan_case_a_ceilings_first():
    # N2 (N1 - M2) = 3 * 7 = 21 over t1 = 2 slots: 11, 10
    cfg = AntennaConfig(11, 1, 8, 3)
    assert classify_case(cfg) is CaseClass.CONDITION1_CASE_A
    p = plan_case_a(cfg)
    assert p.m1[:p.t1] == (11, 10)
    assert validate(p, cfg) == []


def test_plan_case_a_wrong_case():
    with pytest.raises(WrongCase):
        plan_case_a(CFG_B)


def test_plan_case_b_o21_examples():
    p = plan_case_b_o21(CFG_B)
    assert (p.T, p.t1, p.t2, p.m1, p.m2) == (3, 1, 2, (7, 0, 0), (2, 2, 2))
    assert p.target == DofPoint(F(7, 3), 2) and validate(p, CFG_B) == []
    with pytest.raises(WrongCase):
        plan_case_b_o21(CFG_A)


def test_plan_case_b_o21_uses_m1_prime():
    cfg = AntennaConfig(10, 2, 5, 3)
    p = plan_case_b_o21(cfg)
    assert p.m1 == (8, 0, 0)
    assert p.target == DofPoint(F(8, 3), 2)
    assert validate(p, cfg) == [] and target_in_region(p, cfg)


def test_plan_case_b_13_examples():
    p = plan_case_b_13(CFG_B)
    assert (p.T, p.t1, p.t2, p.m1, p.m2) == (4, 2, 2, (7, 7, 0, 0), (2, 0, 2, 2))
    assert p.target == DofPoint(F(7, 2), F(3, 2)) and validate(p, CFG_B) == []
    cfg = AntennaConfig(9, 3, 6, 4)
    q = plan_case_b_13(cfg)
    assert (q.T, q.t1, q.t2, q.m1, q.m2) == (5, 2, 3, (9, 9, 0, 0, 0), (3, 0, 3, 3, 3))
    assert q.target == DofPoint(F(18, 5), F(12, 5)) and validate(q, cfg) == []
    with pytest.raises(WrongCase):
        plan_case_b_13(CFG_A)


def test_plan_dispatch():
    assert plan(CFG_A).corner == "o2_3"
    assert plan(CFG_B).corner == "1_3"
    with pytest.raises(ConditionNotHolding):
        plan(AntennaConfig(2, 2, 2, 2))
    with pytest.raises(ValueError):
        plan(CFG_A, "nowhere")


def test_condition2_plans_on_swapped_users():
    cfg = CFG_B.swapped()
    p = plan(cfg)
    assert p.swapped and scheme_config(cfg, p) == CFG_B
    assert p.target == plan(CFG_B).target


def test_params_json_roundtrip():
    p = plan_case_b_13(CFG_B, B=3)
    assert SchemeParams.from_json(json.loads(json.dumps(p.to_json()))) == p


# -- sets -------------------------------------------------------------------------------

def test_set_plan_6243():
    p = plan_case_a(CFG_A, B=2)
    sets = build_set_plan(p, CFG_A)
    assert sets.s_lc[0] == ()
    assert sets.s_lc[1] == (Lc(2, 1, 1, 1, 1), Lc(2, 1, 2, 1, 1))
    assert sets.p_lc[1] == ((Lc(2, 1, 1, 1, 1),), (Lc(2, 1, 2, 1, 1),))
    assert sets.s_ds[1] == (Ds(2, 2, 1, 1), Ds(2, 2, 1, 2))
    assert sets.p_ds[1] == ((Ds(2, 2, 1, 1),), (Ds(2, 2, 1, 2),))
    assert sets.s_ds[2] == ()
    assert sets.cell(2, 1) == (Lc(2, 1, 1, 1, 1), Ds(2, 2, 1, 1))


def test_set_plan_rejects_overfull_cells():
    p = SchemeParams(3, 1, 2, [6, 0, 0], [2, 2, 2], 2, DofPoint(2, 2))
    tight = AntennaConfig(6, 2, 4, 3)
    build_set_plan(p, tight)
    crowded = SchemeParams(2, 1, 1, [6, 0], [2, 2], 2, DofPoint(3, 2))
    with pytest.raises(CapacityExceeded):
        build_set_plan(crowded, tight)


# -- schedule ------------------------------------------------------------------------

def test_block_indexing():
    assert [block_of(t, 3) for t in range(1, 8)] == [1, 1, 1, 2, 2, 2, 3]
    assert [slot_in_block(t, 3) for t in range(1, 8)] == [1, 2, 3, 1, 2, 3, 1]


def test_schedule_6243_b2():
    p = plan_case_a(CFG_A, B=2)
    _, _, sched = schedule_for(CFG_A, p)
    assert sched.total_slots == 9
    s1 = sched.slot(1)
    assert [e.kind for e in s1.tx1] == [EntryKind.NEW_DS] * 6
    assert [e.kind for e in s1.tx2] == [EntryKind.NEW_DS] * 2
    s9 = sched.slot(9)
    assert [e.kind for e in s9.tx1[:1]] == [EntryKind.RETRANS_LC]
    lcs = [e.symbol for t in (8, 9) for e in sched.slot(t).tx1 if e.kind is EntryKind.RETRANS_LC]
    assert lcs == [Lc(2, 1, 1, 2, 1), Lc(2, 1, 2, 2, 1)]
    assert all(e.kind is EntryKind.ZERO for e in s9.tx2)
    assert all(e.kind is EntryKind.ZERO for e in sched.slot(7).tx1 + sched.slot(7).tx2)


def test_schedule_json_dump():
    p = plan_case_a(CFG_A, B=1)
    _, _, sched = schedule_for(CFG_A, p)
    obj = json.loads(sched.dumps())
    assert obj["total_slots"] == 6
    assert obj["slots"][1]["tx1"][0] == "RetransDs:DS2[b1,t1,i1]"


def test_symbol_id_roundtrip():
    for s in (Ds(1, 2, 3, 4), Lc(2, 1, 3, 4, 5)):
        assert parse_symbol(str(s)) == s


def _check_schedule(cfg, params):
    run_cfg, sets, sched = schedule_for(cfg, params)
    B, T, t1 = params.B, params.T, params.t1
    n1, n2, m2 = run_cfg.n1, run_cfg.n2, run_cfg.m2
    new = {1: 0, 2: 0}
    for s in sched.slots:
        for tx in (1, 2):
            new[tx] += sum(e.kind is EntryKind.NEW_DS for e in s.entries(tx))
        active1 = [e for e in s.tx1 if e.kind is not EntryKind.ZERO]
        active2 = [e for e in s.tx2 if e.kind is not EntryKind.ZERO]
        if s.phase == 1:
            if s.block == B + 1:
                assert not active1 and not active2
            else:
                assert len(active1) == params.m1[s.tbar - 1]
                assert len(active2) == params.m2[s.tbar - 1]
                # active entries occupy the lowest antennas
                assert all(e.kind is not EntryKind.ZERO for e in s.tx1[:len(active1)])
        else:
            assert len(active1) + len(active2) <= n1
            no_lc = [e for e in active1 if e.kind is not EntryKind.RETRANS_LC]
            assert len(no_lc) + len(active2) <= n2
            assert len(active1) <= n1 - m2
            kinds = [e.kind for e in active1]
            assert kinds == sorted(kinds, key=lambda k: k is not EntryKind.RETRANS_LC)
            if s.block == B + 1:
                assert not active2
    d1, d2 = params.target.d1, params.target.d2
    assert (new[1], new[2]) == scheme_symbol_totals(T, d1, d2, B)
    for b in range(1, B + 2):
        for parent, cells, cap in ((sets.s_lc, sets.p_lc, n1 - n2), (sets.s_ds, sets.p_ds, n2 - m2)):
            flat = [x for cell in cells[b - 1] for x in cell]
            assert flat == list(parent[b - 1]) and len(set(flat)) == len(flat)
            assert all(len(cell) <= cap for cell in cells[b - 1])
    assert len(sets.s_lc[0]) == 0 and len(sets.s_ds[B]) == 0


@settings(max_examples=120, deadline=None)
@given(st.sampled_from(ALL_CONDITION_CONFIGS), st.integers(1, 5))
def test_planner_outputs_validate_and_schedules_hold(item, B):
    cfg, case = item
    corners = ["o2_3"] if case.case == "A" else ["o2_1", "1_3"]
    for corner in corners:
        params = plan(cfg, corner, B)
        run_cfg = scheme_config(cfg, params)
        assert validate(params, run_cfg) == []
        assert target_in_region(params, run_cfg)
        _check_schedule(cfg, params)


def test_every_condition_config_validates():
    assert len(ALL_CONDITION_CONFIGS) > 200
    for cfg, case in ALL_CONDITION_CONFIGS:
        for corner in (["o2_3"] if case.case == "A" else ["o2_1", "1_3"]):
            params = plan(cfg, corner, 2)
            assert validate(params, scheme_config(cfg, params)) == [], (cfg, corner)
