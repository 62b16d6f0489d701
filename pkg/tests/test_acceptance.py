"""End-to-end acceptance checks.  Each test prints one PASS/FAIL line."""

import itertools
import time
from fractions import Fraction as F

import pytest

from retroia.model import AntennaConfig, FeedbackSetting
from retroia.regions import (DofPoint, Known, Relation, condition_holds, icsit_op_region,
                             region_for_setting, region_relation, shannon_outer_region)
from retroia.scenarios import (run_example_6243_dcsit, run_example_6243_shannon,
                               shannon_beats_delayed_csit)
from retroia.scheme import plan, plan_case_a, plan_case_b_13, plan_case_b_o21, validate
from retroia.simulator import IllConditioned, noise_robustness, simulate

CFG_A = AntennaConfig(6, 2, 4, 3)
CFG_B = AntennaConfig(7, 2, 5, 3)


@pytest.fixture
def verdict(capsys):
    def emit(number, title, ok, detail=""):
        with capsys.disabled():
            print(f"\ncriterion {number} [{'PASS' if ok else 'FAIL'}] {title}"
                  + (f": {detail}" if detail else ""))
        assert ok, detail
    return emit


def test_criterion_1_region_reproduction(verdict):
    start = time.perf_counter()
    r = shannon_outer_region(CFG_A)
    verts = {(v.d1, v.d2) for v in r.vertices}
    exact = verts == {(0, 0), (4, 0), (2, 2), (0, 2)}
    inside = r.contains(DofPoint(F(12, 7), F(2)))
    excluded = not r.contains(DofPoint(F(12, 7) + F(1, 1000), F(2)))
    elapsed = time.perf_counter() - start
    verdict(1, "region reproduction", exact and inside and excluded and elapsed < 1,
            f"vertices exact={exact}, contains (12/7,2)={inside}, "
            f"excludes (12/7+1/1000,2)={excluded}, {elapsed:.3f}s")


def test_criterion_2_shannon_example(verdict):
    start = time.perf_counter()
    good = ill = wrong = 0
    for seed in range(100):
        try:
            r = run_example_6243_shannon(seed)
        except IllConditioned:
            ill += 1
            continue
        ok = (r.symbols_decoded == {1: 12, 2: 14} and r.total_slots == 7
              and len(r.feedback_checks) == 7 and all(c.passed for c in r.feedback_checks))
        good += ok
        wrong += not ok
    elapsed = time.perf_counter() - start
    verdict(2, "example scheme under Shannon feedback",
            good >= 99 and wrong == 0 and elapsed < 5,
            f"{good}/100 decoded (12,14) in 7 slots, {ill} ill-conditioned, "
            f"{wrong} wrong, {elapsed:.2f}s")


def test_criterion_3_delayed_csit_baseline(verdict):
    r = run_example_6243_dcsit(1)
    shannon, dcsit, better = shannon_beats_delayed_csit(1)
    ok = (r.symbols_decoded == {1: 5, 2: 6} and r.total_slots == 3 and r.all_success
          and shannon == F(12, 7) and dcsit == F(5, 3) and better and shannon > dcsit)
    verdict(3, "delayed-CSIT baseline", ok,
            f"decoded {r.symbols_decoded[1]},{r.symbols_decoded[2]} over {r.total_slots}; "
            f"{shannon} > {dcsit}")


def test_criterion_4_case_a_accounting(verdict):
    failures = []
    for B in (1, 2, 4, 9):
        p = plan_case_a(CFG_A, B)
        want = DofPoint(F(2 * B, B + 1), F(2 * B, B + 1))
        for seed in range(50):
            r = simulate(CFG_A, p, seed)
            if r.achieved != want or not r.all_success:
                failures.append((B, seed))
    verdict(4, "Case-A accounting for B in {1,2,4,9}", not failures,
            f"{4 * 50 - len(failures)}/200 runs exact" + (f", failed {failures[:5]}"
                                                          if failures else ""))


def test_criterion_5_case_b_corners(verdict):
    B = 3
    failures = []
    for planner, corner in ((plan_case_b_o21, DofPoint(F(7, 3), F(2))),
                            (plan_case_b_13, DofPoint(F(7, 2), F(3, 2)))):
        p = planner(CFG_B, B)
        violations = validate(p, CFG_B)
        if violations:
            failures.append((planner.__name__, "criteria", violations))
        want = corner.scaled(F(B, B + 1))
        for seed in range(50):
            r = simulate(CFG_B, p, seed)
            if r.achieved != want or not r.all_success:
                failures.append((planner.__name__, seed))
    verdict(5, "Case-B corner points at B=3", not failures,
            "both planners satisfy DC1-DC5, 100/100 runs exact" if not failures
            else str(failures[:5]))


def test_criterion_6_predicate_sweep(verdict):
    start = time.perf_counter()
    both = not_subset = of_mismatch = 0
    for m1, m2, n1, n2 in itertools.product(range(1, 9), repeat=4):
        cfg = AntennaConfig(m1, m2, n1, n2)
        both += condition_holds(cfg, 1) and condition_holds(cfg, 2)
        rel = region_relation(shannon_outer_region(cfg), icsit_op_region(cfg))
        not_subset += rel not in (Relation.EQUAL, Relation.A_SUBSET_B)
        neither = not (min(m1, n1) > n2 > m2) and not (min(m2, n2) > m1 > n1)
        known = isinstance(region_for_setting(cfg, FeedbackSetting.OUTPUT_FEEDBACK), Known)
        of_mismatch += known != neither
    elapsed = time.perf_counter() - start
    verdict(6, "condition and feedback-setting predicates over 4096 configs",
            both == 0 and not_subset == 0 and of_mismatch == 0 and elapsed < 30,
            f"both-conditions={both}, not-subset={not_subset}, "
            f"output-feedback mismatches={of_mismatch}, {elapsed:.2f}s")


def test_criterion_7_limited_feedback_equivalence(verdict):
    mismatches = []
    runs = 0
    for cfg in (CFG_A, CFG_B):
        p = plan(cfg)
        for seed in range(20):
            base = simulate(cfg, p, seed).traces.transmit_bytes()
            for s in (FeedbackSetting.LIMITED_SHANNON_TYPE1,
                      FeedbackSetting.LIMITED_SHANNON_TYPE2):
                runs += 1
                if simulate(cfg, p, seed, feedback=s).traces.transmit_bytes() != base:
                    mismatches.append((str(cfg), seed, s.value))
    verdict(7, "limited-feedback transmit traces", not mismatches,
            f"{runs - len(mismatches)}/{runs} byte-identical")


def test_criterion_8_noise_robustness(verdict):
    mse = noise_robustness(plan_case_a(CFG_A), CFG_A, [1e4, 1e6, 1e8], 0)
    ratio = mse[0] / mse[1]
    ok = mse[0] > mse[1] > mse[2] and 10 <= ratio <= 1000
    verdict(8, "noise robustness", ok,
            "MSE " + ", ".join(f"{m:.3g}" for m in mse) + f", ratio {ratio:.1f}")
