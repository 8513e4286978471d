"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -s`` to see them).

Every tolerance is pinned here; nothing is deferred to later calibration.
"""

import json
import random
import time
from fractions import Fraction

import minnesota
from mro_audit.core import compute_totals, pool_audit_records, pool_candidates
from mro_audit.discrepancy import analyze_precinct, mro_sum
from mro_audit.io import load_audits
from mro_audit.oracle import (
    brute_mro,
    brute_taint_count,
    gen_instance,
    random_audits,
)
from mro_audit.risk import (
    IDENTITY,
    SamplingDesign,
    TestConfig,
    monte_carlo_pvalue,
    p_value,
    run_test,
    taint_count,
)
from mro_audit.report import percent
from mro_audit.sampling import draw_sample, statutory_minimum

WR = lambda n: SamplingDesign("with_replacement", n)  # noqa: E731


def _report(number: int, passed: bool, detail: str) -> None:
    print(f"ACCEPTANCE {number}: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {number}: {detail}"


def test_criterion_1_pvalue_golden():
    value = p_value(166, 4123, WR(78))
    timings = []
    for _ in range(5):
        start = time.perf_counter()
        p_value(166, 4123, WR(78))
        timings.append(time.perf_counter() - start)
    fastest = min(timings)
    ok = abs(value - 0.0405) <= 0.0005 and fastest < 0.001
    _report(1, ok, f"p={value:.6f} (target 0.0405 +/- 0.0005), "
                   f"runtime {fastest * 1e6:.0f}us < 1ms")


def test_criterion_2_larger_sample_golden():
    value = p_value(166, 4123, WR(202))
    ok = 0.0001 <= value <= 0.0004 and percent(value) == "0.02%"
    _report(2, ok, f"p={value:.6f} in [0.0001, 0.0004], prints as {percent(value)}")


def test_criterion_3_statewide_margins(minnesota_files):
    totals = compute_totals(minnesota_files["setup"], minnesota_files["returns"])
    expected = {
        "Fitzgerald": 1_207_655,
        "Kennedy": 443_196,
        "Cavlan": 1_268_135,
        "Powers": 1_273_441,
        "WriteIns": 1_277_948,
    }
    margins_ok = all(
        totals.pairwise_margins[("Klobuchar", loser)] == margin
        for loser, margin in expected.items()
    )
    pooled_setup, pooled_returns = pool_candidates(
        minnesota_files["setup"], minnesota_files["returns"],
        minnesota.POOL, "Pooled",
    )
    pooled_totals = compute_totals(pooled_setup, pooled_returns)
    pooled_ok = pooled_totals.pairwise_margins[("Klobuchar", "Pooled")] == 1_261_826
    _report(3, margins_ok and pooled_ok,
            f"all five margins exact, pooled margin "
            f"{pooled_totals.pairwise_margins[('Klobuchar', 'Pooled')]:,} "
            f"(sum-of-candidates arithmetic)")


def test_criterion_4_full_pipeline_on_calibrated_fixture(minnesota_files):
    pooled_setup, pooled_returns = pool_candidates(
        minnesota_files["setup"], minnesota_files["returns"],
        minnesota.POOL, "Pooled",
    )
    audits = pool_audit_records(
        load_audits(minnesota_files["audits_path"]), minnesota.POOL, "Pooled"
    )
    report = run_test(
        pooled_setup, pooled_returns, audits, TestConfig(IDENTITY, WR(78))
    )
    ok = (
        report.taint_count == 166
        and abs(report.p_value - 0.0405) <= 0.0005
        and report.observed_statistic == 0
    )
    _report(4, ok,
            f"taint_count={report.taint_count} (target 166), "
            f"p={report.p_value:.6f} (target 4.05% +/- 0.05pp), "
            f"sample={report.sample_size} zero-discrepancy precincts")


def test_criterion_5_inequality_property_suite():
    start = time.perf_counter()
    rng = random.Random(20_060_913)
    instances = 10_000
    zero_delta_checked = 0
    for trial in range(instances):
        n = rng.randint(1, 50)
        k = rng.randint(2, 6)
        seats = rng.randint(1, min(2, k - 1))
        setup, returns, clean = gen_instance(n, k, seats, seed=trial)
        zero_delta = trial % 10 == 0
        audits = clean if zero_delta else random_audits(setup, returns,
                                                        seed=trial + instances)
        totals = compute_totals(setup, returns)
        by_id = {a.precinct_id: a for a in audits}
        discs = [
            analyze_precinct(r, by_id[r.precinct_id], totals.pairwise_margins)
            for r in returns
        ]
        for d in discs:
            assert d.max_overstatement <= d.bound, (trial, d.precinct_id)
        sums = mro_sum(discs)
        assert sums.pairwise_max <= sums.total, trial
        if zero_delta:
            assert sums.total == 0 and sums.pairwise_max == 0, trial
            zero_delta_checked += 1
    elapsed = time.perf_counter() - start
    ok = elapsed < 30.0
    _report(5, ok,
            f"{instances} instances (incl. {zero_delta_checked} zero-delta): "
            f"every MRO <= bound, every pairwise sum <= MRO sum, "
            f"{elapsed:.1f}s < 30s")


def test_criterion_6_reversal_necessity():
    rng = random.Random(166)
    violations = 0
    for trial in range(1_000):
        candidates = rng.randint(2, 5)
        seats = rng.randint(1, min(2, candidates - 1))
        setup, returns, audits = gen_instance(
            rng.randint(1, 12), candidates, seats,
            reversal=True, seed=trial,
        )
        totals = compute_totals(setup, returns)
        by_id = {a.precinct_id: a for a in audits}
        discs = [
            analyze_precinct(r, by_id[r.precinct_id], totals.pairwise_margins)
            for r in returns
        ]
        if mro_sum(discs).total < 1:
            violations += 1
    _report(6, violations == 0,
            f"1000 planted reversals, {violations} violations of sum >= 1")


def test_criterion_7_oracle_equivalence():
    rng = random.Random(443_196)
    taint_mismatches = 0
    for _ in range(2_000):
        n = rng.randint(1, 15)
        bounds = [Fraction(rng.randint(0, 60), 100) for _ in range(n)]
        threshold = Fraction(rng.randint(0, 30), 100)
        target = Fraction(rng.randint(1, 300), 100)
        if brute_taint_count(bounds, threshold, target) != taint_count(
            bounds, threshold, IDENTITY, target
        ):
            taint_mismatches += 1

    mro_mismatches = 0
    for trial in range(1_000):
        setup, returns, _ = gen_instance(1, rng.randint(2, 6), seed=trial)
        audits = random_audits(setup, returns, seed=trial + 5_000)
        margins = compute_totals(setup, returns).pairwise_margins
        disc = analyze_precinct(returns[0], audits[0], margins)
        if brute_mro(returns[0], audits[0], margins) != disc.max_overstatement:
            mro_mismatches += 1

    ok = taint_mismatches == 0 and mro_mismatches == 0
    _report(7, ok,
            f"taint_count matched subset search on 2000 instances "
            f"({taint_mismatches} mismatches); precinct MRO matched pair "
            f"enumeration on 1000 instances ({mro_mismatches} mismatches)")


def test_criterion_8_monte_carlo_validation():
    start = time.perf_counter()
    closed = p_value(166, 4123, WR(78))
    result = monte_carlo_pvalue(166, 4123, WR(78), 1_000_000, seed=20_061_107)
    elapsed = time.perf_counter() - start
    window = 3 * result.standard_error
    ok = abs(result.estimate - closed) <= window and elapsed < 60.0
    _report(8, ok,
            f"estimate {result.estimate:.6f} vs closed form {closed:.6f}, "
            f"|diff| {abs(result.estimate - closed):.6f} <= 3SE {window:.6f}, "
            f"{elapsed:.1f}s < 60s")


def test_criterion_9_determinism_and_brackets(minnesota_files):
    sample_a = draw_sample(minnesota_files["plans"], minnesota_files["returns"],
                           minnesota.SAMPLE_SEED)
    sample_b = draw_sample(minnesota_files["plans"], minnesota_files["returns"],
                           minnesota.SAMPLE_SEED)
    draw_ok = json.dumps(sample_a).encode() == json.dumps(sample_b).encode()

    gen_a = gen_instance(20, 5, 2, reversal=True, seed=31337)
    gen_b = gen_instance(20, 5, 2, reversal=True, seed=31337)
    gen_ok = repr(gen_a).encode() == repr(gen_b).encode()

    brackets = {49_999: 2, 50_000: 3, 100_000: 3, 100_001: 4}
    bracket_ok = all(
        statutory_minimum(voters) == expected
        for voters, expected in brackets.items()
    )
    _report(9, draw_ok and gen_ok and bracket_ok,
            f"draw_sample and gen_instance byte-identical on reruns; "
            f"statutory brackets {brackets} all match")
