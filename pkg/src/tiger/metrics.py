"""Quantitative governance metrics: concentration, reach, turnout, delegation.

All arithmetic runs on exact integers and fractions; floats appear only in
the final Gini output, rounded once from the exact rational value. Every
function here is pure, so metrics can be evaluated in parallel without
changing results.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .model import (
    DECIDED_STATUSES,
    Address,
    AgentClass,
    AllocationSchedule,
    GovernanceDataset,
    GovernanceParams,
    TokenAmount,
    fraction_to_decimal,
    quantize_pct,
)
from .taxonomy import AgentProfile

__all__ = [
    "WeightVector",
    "ParticipationStats",
    "DelegationStats",
    "DecisivenessResult",
    "GroupBreakdown",
    "InflationSplit",
    "TimingFairness",
    "MetricError",
    "gini",
    "nakamoto",
    "governance_nakamoto",
    "insider_share",
    "group_differentiation",
    "participation",
    "delegation_stats",
    "decisiveness",
    "inflation_split",
    "timing_fairness",
    "effective_voting_power",
]

# Mean Gregorian month length in days; the proposals-per-month denominator.
DAYS_PER_MONTH = Fraction(3652425, 120000)


class MetricError(ValueError):
    """Raised when a metric's preconditions are not met."""


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, float):
        # Interpret floats by their shortest decimal rendering so 0.33 means
        # 33/100 here and in any independent recomputation.
        return Fraction(Decimal(repr(value)))
    if isinstance(value, str):
        return Fraction(Decimal(value))
    raise MetricError(f"cannot interpret {value!r} as a fraction")


def _as_weight(value) -> int:
    """Weights normalize to atto units; plain ints count whole tokens."""
    if isinstance(value, TokenAmount):
        return value.atto
    if isinstance(value, int):
        if value < 0:
            raise MetricError("weights cannot be negative")
        return value * 10**18
    if isinstance(value, (Decimal, str)):
        return TokenAmount.from_decimal(value).atto
    raise MetricError(f"cannot interpret {value!r} as a weight")


@dataclass(frozen=True)
class WeightVector:
    """Ordered (owner, weight) pairs; weights are exact non-negative integers."""

    entries: tuple[tuple[str, int], ...]

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[object, object]]) -> "WeightVector":
        return cls(tuple((str(owner), _as_weight(weight)) for owner, weight in pairs))

    @classmethod
    def from_weights(cls, weights: Iterable[object]) -> "WeightVector":
        return cls.from_pairs((f"w{i}", w) for i, w in enumerate(weights))

    @property
    def total(self) -> int:
        return sum(weight for _, weight in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def sorted_desc(self) -> list[tuple[str, int]]:
        # Weight ties break on owner id so rankings are reproducible.
        return sorted(self.entries, key=lambda e: (-e[1], e[0]))


def gini(weights: WeightVector) -> float:
    """Population Gini: mean absolute difference normalized by 2 * n * mean.

    Computed with the sorted-rank formula over exact integers, so the result
    is the double rounding of the true rational value (>= 12 significant
    digits of agreement with the O(n^2) definition).
    """
    n = len(weights)
    total = weights.total
    if n == 0 or total == 0:
        raise MetricError("gini requires a non-empty vector with positive total")
    ranked = sorted(weight for _, weight in weights.entries)
    weighted_rank_sum = sum(rank * value for rank, value in enumerate(ranked, start=1))
    return float(Fraction(2 * weighted_rank_sum - (n + 1) * total, n * total))


def nakamoto(weights: WeightVector, threshold_fraction, strict: bool = True) -> int:
    """Minimum count of largest holders controlling the threshold share.

    strict=True counts holders needed to exceed threshold*total; strict=False
    counts holders needed to reach it.
    """
    if len(weights) == 0:
        raise MetricError("nakamoto requires a non-empty vector")
    total = weights.total
    if total == 0:
        raise MetricError("nakamoto requires a positive total weight")
    threshold = _as_fraction(threshold_fraction)
    if not 0 < threshold <= 1:
        raise MetricError("threshold_fraction must be in (0, 1]")
    bar = threshold * total
    cumulative = 0
    for count, (_, weight) in enumerate(weights.sorted_desc(), start=1):
        cumulative += weight
        if (cumulative > bar) if strict else (cumulative >= bar):
            return count
    # Reachable only for strict thresholds at exactly 100% of the total.
    raise MetricError("threshold unreachable even with every holder")


def governance_nakamoto(
    via_powers: WeightVector,
    quorum: TokenAmount,
    opposition: Optional[TokenAmount] = None,
) -> Optional[int]:
    """Minimum VIAs whose combined power reaches quorum and beats opposition.

    Returns None when every VIA combined still falls short ("unreachable").
    """
    if quorum.atto <= 0:
        raise MetricError("quorum must be positive")
    cumulative = 0
    for count, (_, weight) in enumerate(via_powers.sorted_desc(), start=1):
        cumulative += weight
        if cumulative >= quorum.atto and (opposition is None or cumulative > opposition.atto):
            return count
    return None


@dataclass(frozen=True)
class GroupBreakdown:
    shares: tuple[tuple[str, Decimal], ...]
    largest_share_pct: Decimal
    largest_groups: tuple[str, ...]


def insider_share(allocation: AllocationSchedule) -> Decimal:
    """Percentage of max supply allocated to insider stakeholder groups."""
    return sum(
        (g.pct_of_max_supply for g in allocation.groups if g.category == "insider"),
        Decimal(0),
    ).quantize(Decimal("0.01"))


def group_differentiation(allocation: AllocationSchedule) -> GroupBreakdown:
    """Echo each stakeholder group's share and identify the largest (with ties)."""
    shares = tuple((g.name, g.pct_of_max_supply) for g in allocation.groups)
    if not shares:
        return GroupBreakdown((), Decimal("0.00"), ())
    largest = max(pct for _, pct in shares)
    winners = tuple(name for name, pct in shares if pct == largest)
    return GroupBreakdown(shares, largest.quantize(Decimal("0.01")), winners)


def effective_voting_power(dataset: GovernanceDataset) -> dict[Address, int]:
    """Per-address voting power in atto units: undelegated balance + delegated-in."""
    power = {record.address: record.balance.atto for record in dataset.balances}
    for edge in dataset.delegations:
        power[edge.delegator] = power.get(edge.delegator, 0) - edge.amount.atto
        power[edge.delegatee] = power.get(edge.delegatee, 0) + edge.amount.atto
    for address, value in power.items():
        if value < 0:
            raise MetricError(f"address {address} delegates more than it holds")
    return power


def via_power_vector(
    dataset: GovernanceDataset, profiles: Sequence[AgentProfile]
) -> WeightVector:
    """Effective voting power restricted to VIA-classified addresses."""
    via = {p.address for p in profiles if p.agent_class is AgentClass.VIA}
    power = effective_voting_power(dataset)
    return WeightVector.from_pairs(
        (address.value, TokenAmount(weight))
        for address, weight in sorted(power.items())
        if address in via
    )


@dataclass(frozen=True)
class ParticipationStats:
    proposals_total: int
    avg_addresses_per_proposal: Decimal
    avg_active_weight: Decimal
    float_participation_pct: Decimal
    turnout_by_year: Mapping[int, Decimal]
    proposals_per_month: Decimal


def _months_between(start: datetime, end: datetime) -> Fraction:
    seconds = Fraction(int((end - start).total_seconds()))
    return seconds / 86400 / DAYS_PER_MONTH


def participation(
    dataset: GovernanceDataset,
    window: Optional[tuple[Optional[datetime], Optional[datetime]]] = None,
) -> ParticipationStats:
    """Turnout statistics over decided proposals in a [start, end) window.

    The proposals-per-month denominator is the window length when a bounded
    window is given, otherwise the DAO lifetime (launch, or first proposal,
    up to the snapshot).
    """
    start, end = window if window else (None, None)

    def in_window(at: datetime) -> bool:
        return (start is None or at >= start) and (end is None or at < end)

    proposals = [p for p in dataset.proposals if in_window(p.submitted_at)]
    decided = [p for p in proposals if p.status in DECIDED_STATUSES]
    if not proposals:
        raise MetricError("empty window: no proposals")

    votes_by_proposal: dict[int, list] = {}
    for vote in dataset.votes:
        votes_by_proposal.setdefault(vote.proposal_id, []).append(vote)

    turnout_by_year: dict[int, Decimal] = {}
    if decided:
        counts = {p.id: len({v.voter for v in votes_by_proposal.get(p.id, ())}) for p in decided}
        weights = {p.id: sum(v.weight.atto for v in votes_by_proposal.get(p.id, ())) for p in decided}
        avg_addresses = Fraction(sum(counts.values()), len(decided))
        avg_weight = Fraction(sum(weights.values()), len(decided)) / Fraction(10**18)
        per_year: dict[int, list[int]] = {}
        for p in decided:
            per_year.setdefault(p.submitted_at.year, []).append(counts[p.id])
        turnout_by_year = {
            year: fraction_to_decimal(Fraction(sum(values), len(values)), 2)
            for year, values in sorted(per_year.items())
        }
    else:
        avg_addresses = Fraction(0)
        avg_weight = Fraction(0)

    circulating = dataset.allocation.circulating.as_fraction()
    float_pct = avg_weight / circulating * 100 if circulating else Fraction(0)

    if start is not None and end is not None:
        months = _months_between(start, end)
    else:
        lifetime_start = dataset.dao_launched_at
        if lifetime_start is None:
            lifetime_start = min(p.submitted_at for p in dataset.proposals)
        months = _months_between(lifetime_start, dataset.snapshot_time)
    per_month = Fraction(len(proposals)) / months if months > 0 else Fraction(0)

    return ParticipationStats(
        proposals_total=len(proposals),
        avg_addresses_per_proposal=fraction_to_decimal(avg_addresses, 2),
        avg_active_weight=fraction_to_decimal(avg_weight, 2),
        float_participation_pct=fraction_to_decimal(float_pct, 4),
        turnout_by_year=turnout_by_year,
        proposals_per_month=fraction_to_decimal(per_month, 2),
    )


@dataclass(frozen=True)
class DelegationStats:
    delegated_total: TokenAmount
    delegated_share_pct: Decimal
    top_n_coverage: Mapping[int, Decimal]
    distinct_via_delegates: int


TOP_N_LEVELS = (1, 5, 10, 20, 50, 60, 100)


def delegation_stats(
    dataset: GovernanceDataset, profiles: Sequence[AgentProfile]
) -> DelegationStats:
    """Delegated share of active voting power and delegatee coverage ranking.

    Active voting power excludes contract-held tokens: the denominator is
    the combined effective power of non-contract addresses.
    """
    delegated_total = sum(edge.amount.atto for edge in dataset.delegations)
    contracts = {r.address for r in dataset.balances if r.is_contract}
    power = effective_voting_power(dataset)
    total_power = sum(v for a, v in power.items() if a not in contracts)

    if not dataset.delegations:
        return DelegationStats(TokenAmount.ZERO, Decimal("0.00"), {}, 0)

    share = Fraction(delegated_total, total_power) * 100 if total_power else Fraction(0)

    delegatees = sorted({edge.delegatee for edge in dataset.delegations})
    ranked = sorted(((power.get(a, 0), a) for a in delegatees), key=lambda e: (-e[0], e[1]))
    coverage: dict[int, Decimal] = {}
    running = 0
    cumulative = []
    for weight, _ in ranked:
        running += weight
        cumulative.append(running)
    for level in TOP_N_LEVELS:
        if level > len(ranked):
            break
        pct = Fraction(cumulative[level - 1], total_power) * 100 if total_power else Fraction(0)
        coverage[level] = quantize_pct(pct)

    via = {p.address for p in profiles if p.agent_class is AgentClass.VIA}
    distinct_via = sum(1 for a in delegatees if a in via)

    return DelegationStats(
        delegated_total=TokenAmount(delegated_total),
        delegated_share_pct=quantize_pct(share),
        top_n_coverage=coverage,
        distinct_via_delegates=distinct_via,
    )


@dataclass(frozen=True)
class ProposalDecisiveness:
    proposal_id: int
    cast_weight: TokenAmount
    top_k_weight: TokenAmount
    top_k_majority: bool


@dataclass(frozen=True)
class DecisivenessResult:
    fraction: Decimal
    decided_count: int
    majority_count: int
    per_proposal: tuple[ProposalDecisiveness, ...] = field(repr=False)


def decisiveness(
    dataset: GovernanceDataset,
    profiles: Sequence[AgentProfile],
    k: int,
    window: Optional[tuple[Optional[datetime], Optional[datetime]]] = None,
) -> DecisivenessResult:
    """Share of decided proposals where the k heaviest voters cast a strict majority."""
    if k <= 0:
        raise MetricError("k must be positive")
    start, end = window if window else (None, None)
    decided = [
        p
        for p in dataset.proposals
        if p.status in DECIDED_STATUSES
        and (start is None or p.submitted_at >= start)
        and (end is None or p.submitted_at < end)
    ]
    if not decided:
        raise MetricError("no decided proposals in window")

    votes_by_proposal: dict[int, list] = {}
    for vote in dataset.votes:
        votes_by_proposal.setdefault(vote.proposal_id, []).append(vote)

    details = []
    majority_count = 0
    for proposal in decided:
        votes = votes_by_proposal.get(proposal.id, [])
        total = sum(v.weight.atto for v in votes)
        top = sorted(votes, key=lambda v: (-v.weight.atto, v.voter))[:k]
        top_weight = sum(v.weight.atto for v in top)
        majority = total > 0 and 2 * top_weight > total
        majority_count += majority
        details.append(
            ProposalDecisiveness(
                proposal.id, TokenAmount(total), TokenAmount(top_weight), majority
            )
        )

    return DecisivenessResult(
        fraction=fraction_to_decimal(Fraction(majority_count, len(decided)), 4),
        decided_count=len(decided),
        majority_count=majority_count,
        per_proposal=tuple(details),
    )


@dataclass(frozen=True)
class InflationSplit:
    pct_a_external: Decimal
    pct_b_insider: Decimal
    has_inflation: bool


def inflation_split(allocation: AllocationSchedule) -> InflationSplit:
    """Percentage split of daily inflation between external and insider recipients."""
    external = sum(
        s.daily_amount.atto for s in allocation.inflation_streams if s.recipient_class == "A_external"
    )
    insider = sum(
        s.daily_amount.atto for s in allocation.inflation_streams if s.recipient_class == "B_insider"
    )
    total = external + insider
    if total == 0:
        return InflationSplit(Decimal("0.00"), Decimal("0.00"), False)
    return InflationSplit(
        quantize_pct(Fraction(external, total) * 100),
        quantize_pct(Fraction(insider, total) * 100),
        True,
    )


@dataclass(frozen=True)
class TimingFairness:
    total_days: int
    min_total_days: int
    passed: bool


def timing_fairness(params: GovernanceParams, min_total_days: int = 7) -> TimingFairness:
    """Whether review + voting + queue leaves holders at least the floor in days."""
    total = params.review_period_days + params.voting_period_days + params.queue_period_days
    return TimingFairness(total, min_total_days, total >= min_total_days)
