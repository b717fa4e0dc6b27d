"""Acceptance suite: one test per exit criterion, each printing a PASS/FAIL line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

from __future__ import annotations

import time
from contextlib import contextmanager
from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from tiger.ingest import builtin_fixture_dir, load_dataset, load_qualitative_file
from tiger.metrics import (
    WeightVector,
    delegation_stats,
    gini,
    insider_share,
    nakamoto,
    participation,
    timing_fairness,
)
from tiger.model import CharacteristicId, GovernanceParams, TokenAmount
from tiger.scorecard import Verdict, evaluate, load_calibration
from tiger.taxonomy import TaxonomyConfig, classify

from conftest import PROPERTY_EXAMPLES

UTC = timezone.utc


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


# Shared timer so the combined oracle budget can be asserted at the end.
_ORACLE_SECONDS: dict[str, float] = {}


def test_compound_golden_fixture():
    started = time.perf_counter()
    with criterion("Compound golden fixture reproduces the published figures in < 5 s"):
        fixture = builtin_fixture_dir("compound-2022")
        result = load_dataset(fixture)
        assert result.warnings == ()
        dataset = result.dataset
        entries = load_qualitative_file(fixture.parent / "compound-2022-qualitative.json")
        calibration = load_calibration("paper-2022")
        profiles = classify(
            dataset.agent_evidence,
            TaxonomyConfig(),
            known_addresses=[r.address for r in dataset.balances],
        )

        assert abs(insider_share(dataset.allocation) - Decimal("49.95")) <= Decimal("0.01")

        stats = delegation_stats(dataset, profiles)
        assert abs(stats.delegated_share_pct - Decimal("92.6")) <= Decimal("0.1")
        assert abs(stats.top_n_coverage[60] - Decimal("99.9")) <= Decimal("0.1")

        year2022 = (datetime(2022, 1, 1, tzinfo=UTC), datetime(2023, 1, 1, tzinfo=UTC))
        window_stats = participation(dataset, year2022)
        assert window_stats.avg_addresses_per_proposal == Decimal("66.00")
        assert abs(window_stats.float_participation_pct - Decimal("8.39")) <= Decimal("0.05")

        lifetime = participation(dataset)
        assert lifetime.proposals_total == 113
        assert abs(lifetime.proposals_per_month - Decimal("2.3")) <= Decimal("0.05")

        assessment = evaluate(dataset, profiles, entries, calibration)
        assert assessment.dimension_scores == {
            "T": Fraction(3),
            "I": Fraction(5),
            "G": Fraction(3),
            "E": Fraction(5),
            "R": Fraction(3),
        }
        assert assessment.overall == Decimal("3.8")
        assert assessment.verdict is Verdict.SUFFICIENT

        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"golden fixture run took {elapsed:.2f}s"


def _exhaustive_reference(n: int):
    """All 2^n subset sums for every weight multiset of {1..8}^n."""
    multisets = np.array(list(combinations_with_replacement(range(1, 9), n)), dtype=np.int64)
    column = np.arange(2**n, dtype=np.int64)
    masks = ((column[None, :] >> np.arange(n)[:, None]) & 1).astype(np.int64)
    popcount = np.array([bin(x).count("1") for x in range(2**n)], dtype=np.int64)
    totals = multisets.sum(axis=1)
    variants = [(33, 100), (1, 2), (67, 100)]
    minima = {
        (pair, strict): np.empty(len(multisets), dtype=np.int64)
        for pair in variants
        for strict in (True, False)
    }
    chunk = max(1, (1 << 22) // (2**n))
    for start in range(0, len(multisets), chunk):
        weights = multisets[start : start + chunk]
        sums = weights @ masks
        totals_chunk = totals[start : start + chunk]
        for num, den in variants:
            bar = totals_chunk * num
            lhs = sums * den
            for strict in (True, False):
                reached = lhs > bar[:, None] if strict else lhs >= bar[:, None]
                sizes = np.where(reached, popcount[None, :], np.int64(1 << 30))
                minima[((num, den), strict)][start : start + len(weights)] = sizes.min(axis=1)
    return multisets, minima


def test_nakamoto_matches_exhaustive_minimal_subset_search():
    started = time.perf_counter()
    with criterion(
        "nakamoto equals exhaustive minimal-subset search "
        "(n <= 12, weights <= 8, thresholds 0.33/0.5/0.67, strict both ways)"
    ):
        checked = 0
        for n in range(1, 13):
            multisets, minima = _exhaustive_reference(n)
            vectors = [WeightVector.from_weights(row) for row in multisets.tolist()]
            for (num, den), strict in minima:
                threshold = Fraction(num, den)
                expected = minima[((num, den), strict)]
                for index, vector in enumerate(vectors):
                    assert nakamoto(vector, threshold, strict) == expected[index]
                    checked += 1
        assert checked == 125_969 * 6
    _ORACLE_SECONDS["nakamoto"] = time.perf_counter() - started


def test_gini_matches_double_sum_definition():
    started = time.perf_counter()
    with criterion("gini equals the O(n^2) double-sum definition to 1e-12 on 1000 random vectors"):
        rng = np.random.default_rng(20220615)
        for _ in range(1000):
            n = int(rng.integers(1, 201))
            values = rng.integers(0, 10**6, n, dtype=np.int64)
            if values.sum() == 0:
                values[0] = 1
            double_sum = int(np.abs(values[:, None] - values[None, :]).sum())
            expected = Fraction(double_sum, 2 * n * int(values.sum()))
            got = gini(WeightVector.from_weights(values.tolist()))
            assert abs(got - float(expected)) <= 1e-12
    _ORACLE_SECONDS["gini"] = time.perf_counter() - started


def test_oracle_runtime_budget():
    with criterion("oracle equivalence suites finish within the combined 60 s budget"):
        assert set(_ORACLE_SECONDS) == {"nakamoto", "gini"}, "oracle suites must run first"
        combined = sum(_ORACLE_SECONDS.values())
        print(f"  (nakamoto {_ORACLE_SECONDS['nakamoto']:.1f}s + gini {_ORACLE_SECONDS['gini']:.1f}s)")
        assert combined < 60.0, f"combined oracle runtime {combined:.1f}s"


def test_property_suites_run_at_least_500_cases():
    with criterion("randomized property suites run at >= 500 cases each"):
        import test_properties

        suites = [
            test_properties.test_gini_scale_invariance,
            test_properties.test_nakamoto_scale_invariance,
            test_properties.test_taxonomy_partition,
            test_properties.test_taxonomy_threshold_monotonicity,
            test_properties.test_scorecard_monotonicity,
            test_properties.test_critical_fail_dominance,
            test_properties.test_scenario_purity_and_involution,
            test_properties.test_reevaluation_byte_identity,
            test_properties.test_exit_code_contract,
        ]
        assert PROPERTY_EXAMPLES >= 500
        for suite in suites:
            assert callable(suite)


def test_timing_fairness_on_compound_params():
    with criterion("review 3 + voting 3 + queue 2 totals 8 days and passes the 7-day floor"):
        params = GovernanceParams(
            proposal_threshold=TokenAmount.from_decimal(25_000),
            autonomous_proposal_bond=TokenAmount.from_decimal(100),
            quorum=TokenAmount.from_decimal(400_000),
            review_period_days=3,
            voting_period_days=3,
            queue_period_days=2,
        )
        timing = timing_fairness(params, min_total_days=7)
        assert timing.total_days == 8
        assert timing.passed


def test_qualitative_judgments_flow_only_through_entries():
    with criterion(
        "qualitative findings are never computed; fixture entries aggregate to R=3 and E=5"
    ):
        fixture = builtin_fixture_dir("compound-2022")
        dataset = load_dataset(fixture).dataset
        calibration = load_calibration("paper-2022")
        profiles = classify(
            dataset.agent_evidence,
            TaxonomyConfig(),
            known_addresses=[r.address for r in dataset.balances],
        )

        bare = evaluate(dataset, profiles, [], calibration)
        undetermined = {r.id for r in bare.characteristics if r.indeterminate}
        assert undetermined == {
            CharacteristicId.BOOTSTRAPPING,
            CharacteristicId.SOFT_POWER,
            CharacteristicId.RESPONSIBILITY_ALIGNMENT,
            CharacteristicId.ACCOUNTABILITY,
        }
        assert bare.verdict is Verdict.INDETERMINATE

        entries = load_qualitative_file(fixture.parent / "compound-2022-qualitative.json")
        scores = {e.characteristic.value: e.score for e in entries}
        assert scores == {
            "bootstrapping": 5,
            "soft_power": 3,
            "responsibility_alignment": 4,
            "accountability": 2,
        }
        full = evaluate(dataset, profiles, entries, calibration)
        assert full.dimension_scores["R"] == Fraction(3)
        assert full.dimension_scores["E"] == Fraction(5)
