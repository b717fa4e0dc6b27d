from __future__ import annotations

from datetime import datetime, timezone
from decimal import Decimal
from fractions import Fraction
from itertools import combinations

import pytest

from tiger.metrics import (
    MetricError,
    WeightVector,
    decisiveness,
    delegation_stats,
    gini,
    governance_nakamoto,
    group_differentiation,
    inflation_split,
    insider_share,
    nakamoto,
    participation,
    timing_fairness,
    via_power_vector,
)
from tiger.model import GovernanceParams, TokenAmount, VoteRecord, VoteSupport

from util import micro_dataset, tok

UTC = timezone.utc


def wv(*weights: int) -> WeightVector:
    return WeightVector.from_weights(weights)


def gini_double_sum(weights: list[int]) -> float:
    """Independent O(n^2) mean-absolute-difference oracle."""
    n = len(weights)
    total = sum(weights)
    s = sum(abs(a - b) for a in weights for b in weights)
    return float(Fraction(s, 2 * n * total))


def min_controlling_subset(weights: list[int], threshold: Fraction, strict: bool) -> int:
    """Exhaustive oracle: smallest subset of holders crossing the threshold."""
    total = sum(weights)
    for size in range(1, len(weights) + 1):
        for subset in combinations(weights, size):
            lhs = sum(subset) * threshold.denominator
            rhs = threshold.numerator * total
            if (lhs > rhs) if strict else (lhs >= rhs):
                return size
    raise AssertionError("unreachable threshold")


class TestGini:
    def test_perfect_equality(self):
        assert gini(wv(10, 10, 10, 10)) == 0.0

    def test_single_owner_among_zeros(self):
        # oracle: sum |xi-xj| = 2*3*1 = 6; G = 6 / (2*4*1) = 0.75
        assert gini_double_sum([1, 0, 0, 0]) == 0.75
        assert gini(wv(1, 0, 0, 0)) == 0.75

    def test_three_one(self):
        # oracle: sum |xi-xj| = 2*2 = 4; G = 4 / (2*2*4) = 0.25
        assert gini_double_sum([3, 1]) == 0.25
        assert gini(wv(3, 1)) == 0.25

    def test_single_holder_is_zero(self):
        assert gini(wv(42)) == 0.0

    def test_zero_weight_holder_shifts_per_definition(self):
        base = [5, 3]
        with_zero = [5, 3, 0]
        assert gini(wv(*with_zero)) == gini_double_sum(with_zero)
        assert gini(wv(*with_zero)) != gini(wv(*base))

    def test_empty_or_zero_total_rejected(self):
        with pytest.raises(MetricError):
            gini(WeightVector.from_weights([]))
        with pytest.raises(MetricError):
            gini(wv(0, 0))


class TestNakamoto:
    def test_single_majority_holder(self):
        assert nakamoto(wv(60, 40), Fraction(1, 2), strict=True) == 1

    def test_four_equal_holders(self):
        assert min_controlling_subset([25, 25, 25, 25], Fraction(1, 2), True) == 3
        assert nakamoto(wv(25, 25, 25, 25), Fraction(1, 2), strict=True) == 3

    def test_descending_weights(self):
        assert min_controlling_subset([40, 30, 20, 10], Fraction(1, 2), True) == 2
        assert nakamoto(wv(40, 30, 20, 10), Fraction(1, 2), strict=True) == 2

    def test_non_strict_boundary(self):
        assert nakamoto(wv(50, 50), Fraction(1, 2), strict=False) == 1
        assert nakamoto(wv(50, 50), Fraction(1, 2), strict=True) == 2

    def test_zero_weight_holder_is_inert(self):
        assert nakamoto(wv(40, 30, 20, 10, 0), Fraction(1, 2), strict=True) == 2

    def test_single_holder(self):
        assert nakamoto(wv(7), Fraction(1, 2), strict=True) == 1

    def test_errors(self):
        with pytest.raises(MetricError):
            nakamoto(WeightVector.from_weights([]), Fraction(1, 2))
        with pytest.raises(MetricError):
            nakamoto(wv(1), Fraction(3, 2))


class TestGovernanceNakamoto:
    def test_two_vias_reach_quorum(self):
        vector = WeightVector.from_weights([300_000, 150_000, 50_000])
        assert governance_nakamoto(vector, tok(400_000)) == 2

    def test_boundary_single_via_at_quorum(self):
        vector = WeightVector.from_weights([400_000])
        assert governance_nakamoto(vector, tok(400_000)) == 1

    def test_unreachable(self):
        vector = WeightVector.from_weights([100_000, 50_000])
        assert governance_nakamoto(vector, tok(400_000)) is None

    def test_opposition_must_be_beaten_strictly(self):
        vector = WeightVector.from_weights([300_000, 150_000, 100_000])
        assert governance_nakamoto(vector, tok(200_000), opposition=tok(450_000)) == 3
        assert governance_nakamoto(vector, tok(200_000), opposition=tok(550_000)) is None

    def test_more_power_never_needs_more_vias(self, compound, compound_profiles):
        vector = via_power_vector(compound, compound_profiles)
        baseline = governance_nakamoto(vector, compound.params.quorum)
        boosted = WeightVector(
            tuple(
                (owner, weight * 3 if index == 0 else weight)
                for index, (owner, weight) in enumerate(vector.sorted_desc())
            )
        )
        assert governance_nakamoto(boosted, compound.params.quorum) <= baseline


class TestAllocationMetrics:
    def test_insider_share_on_fixture(self, compound):
        assert insider_share(compound.allocation) == Decimal("49.95")

    def test_all_external_is_zero(self):
        dataset = micro_dataset(insider_pct=0)
        assert insider_share(dataset.allocation) == Decimal("0.00")

    def test_single_insider_group_is_100(self):
        dataset = micro_dataset(insider_pct=100, group_split=1)
        assert insider_share(dataset.allocation) == Decimal("100.00")

    def test_group_differentiation_fixture(self, compound):
        breakdown = group_differentiation(compound.allocation)
        assert breakdown.largest_groups == ("Users",)
        assert breakdown.largest_share_pct == Decimal("42.30")

    def test_group_tie_reported_on_both(self):
        dataset = micro_dataset(insider_pct=0, group_split=2)
        breakdown = group_differentiation(dataset.allocation)
        assert breakdown.largest_share_pct == Decimal("50.00")
        assert len(breakdown.largest_groups) == 2

    def test_single_group_holds_everything(self):
        dataset = micro_dataset(insider_pct=100, group_split=1)
        breakdown = group_differentiation(dataset.allocation)
        assert breakdown.largest_share_pct == Decimal("100.00")
        assert breakdown.largest_groups == ("insiders",)


class TestParticipation:
    def test_fixture_2022_window(self, compound):
        window = (datetime(2022, 1, 1, tzinfo=UTC), datetime(2023, 1, 1, tzinfo=UTC))
        stats = participation(compound, window)
        assert stats.avg_addresses_per_proposal == Decimal("66.00")
        assert stats.proposals_total == 36
        assert abs(stats.float_participation_pct - Decimal("8.39")) <= Decimal("0.05")

    def test_fixture_lifetime(self, compound):
        stats = participation(compound)
        assert stats.proposals_total == 113
        assert abs(stats.proposals_per_month - Decimal("2.3")) <= Decimal("0.05")
        assert stats.turnout_by_year[2020] == Decimal("56.00")
        assert stats.turnout_by_year[2022] == Decimal("66.00")

    def test_float_participation_quotient(self):
        # 600,000 active of 7,150,000 circulating = 8.3916..%
        from tiger.model import fraction_to_decimal

        exact = Fraction(600_000, 7_150_000) * 100
        assert fraction_to_decimal(exact, 4) == Decimal("8.3916")
        assert abs(fraction_to_decimal(exact, 2) - Decimal("8.39")) <= Decimal("0.05")

    def test_empty_window_raises(self, compound):
        window = (datetime(2040, 1, 1, tzinfo=UTC), datetime(2041, 1, 1, tzinfo=UTC))
        with pytest.raises(MetricError):
            participation(compound, window)


class TestDelegationStats:
    def test_fixture_delegated_share(self, compound, compound_profiles):
        stats = delegation_stats(compound, compound_profiles)
        assert abs(stats.delegated_share_pct - Decimal("92.6")) <= Decimal("0.1")
        assert stats.delegated_total == tok(2_377_404)

    def test_fixture_top60_coverage(self, compound, compound_profiles):
        stats = delegation_stats(compound, compound_profiles)
        assert abs(stats.top_n_coverage[60] - Decimal("99.9")) <= Decimal("0.1")
        assert stats.distinct_via_delegates == 60

    def test_coverage_non_decreasing(self, compound, compound_profiles):
        coverage = delegation_stats(compound, compound_profiles).top_n_coverage
        levels = sorted(coverage)
        assert all(coverage[a] <= coverage[b] for a, b in zip(levels, levels[1:]))

    def test_no_delegations(self):
        dataset = micro_dataset().with_changes(delegations=())
        stats = delegation_stats(dataset, [])
        assert stats.delegated_share_pct == Decimal("0.00")
        assert stats.top_n_coverage == {}
        assert stats.distinct_via_delegates == 0


class TestDecisiveness:
    def test_fixture_2022(self, compound, compound_profiles):
        window = (datetime(2022, 1, 1, tzinfo=UTC), datetime(2023, 1, 1, tzinfo=UTC))
        result = decisiveness(compound, compound_profiles, 10, window)
        assert result.decided_count == 36
        assert abs(result.fraction - Decimal("0.70")) <= Decimal("0.03")

    def test_single_voter_single_proposal(self):
        dataset = micro_dataset(proposal_count=1)
        voter = dataset.votes[0].voter
        dataset = dataset.with_changes(
            votes=(VoteRecord(1, voter, VoteSupport.FOR, tok(10)),)
        )
        result = decisiveness(dataset, [], 1)
        assert result.fraction == Decimal("1.0000")

    def test_uniform_hundred_voters_k10(self):
        base = micro_dataset(via_count=100, proposal_count=1)
        vias = [p for p in base.balances if p.balance.atto == 0][:100]
        votes = tuple(
            VoteRecord(1, record.address, VoteSupport.FOR, tok(10)) for record in vias
        )
        dataset = base.with_changes(votes=votes)
        result = decisiveness(dataset, [], 10)
        assert result.fraction == Decimal("0.0000")

    def test_non_decreasing_in_k(self, compound, compound_profiles):
        window = (datetime(2022, 1, 1, tzinfo=UTC), datetime(2023, 1, 1, tzinfo=UTC))
        fractions = [
            decisiveness(compound, compound_profiles, k, window).fraction for k in (1, 5, 10, 20, 66)
        ]
        assert all(a <= b for a, b in zip(fractions, fractions[1:]))


class TestInflationSplit:
    def test_all_external(self, compound):
        split = inflation_split(compound.allocation)
        assert (split.pct_a_external, split.pct_b_insider) == (Decimal("100.00"), Decimal("0.00"))
        assert split.has_inflation

    def test_equal_split(self):
        dataset = micro_dataset(insider_inflation=50)
        split = inflation_split(dataset.allocation)
        assert (split.pct_a_external, split.pct_b_insider) == (Decimal("50.00"), Decimal("50.00"))

    def test_zero_inflation_marker(self):
        dataset = micro_dataset()
        allocation = dataset.allocation.__class__(
            max_supply=dataset.allocation.max_supply,
            circulating=dataset.allocation.circulating,
            groups=dataset.allocation.groups,
            daily_inflation=TokenAmount.ZERO,
            inflation_streams=(),
        )
        split = inflation_split(allocation)
        assert not split.has_inflation
        assert (split.pct_a_external, split.pct_b_insider) == (Decimal("0.00"), Decimal("0.00"))


class TestTimingFairness:
    def test_compound_periods_pass(self):
        params = GovernanceParams(tok(25_000), tok(100), tok(400_000), 3, 3, 2)
        timing = timing_fairness(params, 7)
        assert (timing.total_days, timing.passed) == (8, True)

    def test_single_day_fails(self):
        params = GovernanceParams(tok(1), tok(1), tok(1), 0, 1, 0)
        timing = timing_fairness(params, 7)
        assert (timing.total_days, timing.passed) == (1, False)

    def test_boundary_inclusive(self):
        params = GovernanceParams(tok(1), tok(1), tok(1), 7, 0, 0)
        assert timing_fairness(params, 7).passed


def test_scale_invariance_examples():
    vector = wv(7, 3, 2, 1)
    scaled = wv(70, 30, 20, 10)
    assert gini(vector) == gini(scaled)
    assert nakamoto(vector, Fraction(1, 2)) == nakamoto(scaled, Fraction(1, 2))
