"""Shared builders for compact, valid governance datasets used across tests."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from decimal import Decimal
from typing import Optional

from tiger.model import (
    Address,
    AgentEvidence,
    AllocationSchedule,
    BalanceRecord,
    CapabilityFlags,
    CharacteristicId,
    DelegationEdge,
    GovernanceDataset,
    GovernanceParams,
    InflationStream,
    PauseGuardian,
    Proposal,
    ProposalStatus,
    QualitativeEntry,
    StakeholderGroup,
    TokenAmount,
    VoteRecord,
    VoteSupport,
)
from tiger.scorecard import derived_address

UTC = timezone.utc
SNAPSHOT = datetime(2022, 6, 15, tzinfo=UTC)


def addr(seed: str) -> Address:
    return derived_address(f"test:{seed}")


def tok(amount: int | str) -> TokenAmount:
    return TokenAmount.from_decimal(amount) if isinstance(amount, int) else TokenAmount.parse(amount)


def pct_groups(insider_pct: int, split: int = 2) -> tuple[StakeholderGroup, ...]:
    """Groups summing to a 1,000,000 max supply with the given insider share."""
    external_pct = 100 - insider_pct
    groups = []
    if insider_pct:
        groups.append(
            StakeholderGroup(
                "insiders",
                "insider",
                tok(insider_pct * 10_000),
                Decimal(insider_pct).quantize(Decimal("0.01")),
            )
        )
    share, remainder = divmod(external_pct, split)
    for index in range(split):
        pct = share + (1 if index < remainder else 0)
        groups.append(
            StakeholderGroup(
                f"external-{index}",
                "external",
                tok(pct * 10_000),
                Decimal(pct).quantize(Decimal("0.01")),
            )
        )
    return tuple(groups)


def micro_dataset(
    via_count: int = 8,
    via_power: int = 10_000,
    insider_pct: int = 10,
    group_split: int = 2,
    vote_weight: int = 30_000,
    quorum: int = 25_000,
    periods: tuple[int, int, int] = (3, 3, 2),
    can_freeze: bool = False,
    freeze_agents: Optional[int] = None,
    can_upgrade: bool = False,
    upgrade_agents: Optional[int] = None,
    guardian: Optional[PauseGuardian] = PauseGuardian(5, ("pause",), False, True),
    insider_inflation: int = 0,
    proposal_count: int = 2,
    circulating: int = 800_000,
) -> GovernanceDataset:
    """A compact valid dataset with adjustable score-relevant knobs.

    Each VIA receives via_power through one delegator; a few plain holders
    pad the population. Votes land on decided proposals inside the snapshot
    year so participation metrics are well-defined.
    """
    balances: list[BalanceRecord] = []
    delegations: list[DelegationEdge] = []
    evidence: list[AgentEvidence] = []

    vias = [addr(f"via:{i}") for i in range(via_count)]
    for i, via in enumerate(vias):
        delegator = addr(f"delegator:{i}")
        balances.append(BalanceRecord(via, tok(0), False))
        balances.append(BalanceRecord(delegator, tok(via_power), False))
        delegations.append(DelegationEdge(delegator, via, tok(via_power)))
        evidence.append(AgentEvidence(via, identity_evidence=True))

    holders = [addr(f"holder:{i}") for i in range(3)]
    for holder in holders:
        balances.append(BalanceRecord(holder, tok(5_000), False))

    proposals = []
    votes = []
    for p in range(proposal_count):
        pid = p + 1
        proposals.append(
            Proposal(
                id=pid,
                submitted_at=datetime(2022, 1, 10, tzinfo=UTC) + timedelta(days=7 * p),
                status=ProposalStatus.EXECUTED,
            )
        )
        voters = [vias[0], holders[0], holders[1]]
        weights = [vote_weight // 3, vote_weight // 3, vote_weight - 2 * (vote_weight // 3)]
        for voter, weight in zip(voters, weights):
            if weight > 0:
                votes.append(VoteRecord(pid, voter, VoteSupport.FOR, tok(weight)))

    streams = [InflationStream("users", tok(100 - insider_inflation), "A_external")]
    if insider_inflation:
        streams.append(InflationStream("team", tok(insider_inflation), "B_insider"))

    allocation = AllocationSchedule(
        max_supply=tok(1_000_000),
        circulating=tok(circulating),
        groups=pct_groups(insider_pct, group_split),
        daily_inflation=tok(100),
        inflation_streams=tuple(streams),
    )
    params = GovernanceParams(
        proposal_threshold=tok(1_000),
        autonomous_proposal_bond=tok(10),
        quorum=tok(quorum),
        review_period_days=periods[0],
        voting_period_days=periods[1],
        queue_period_days=periods[2],
    )
    capabilities = CapabilityFlags(
        can_freeze_balances=can_freeze,
        freeze_agent_count=freeze_agents if can_freeze else None,
        can_upgrade_code=can_upgrade,
        upgrade_agent_count=upgrade_agents if can_upgrade else None,
        pause_guardian=guardian,
    )
    return GovernanceDataset(
        snapshot_time=SNAPSHOT,
        dao_name="micro",
        dao_launched_at=datetime(2020, 1, 1, tzinfo=UTC),
        balances=tuple(balances),
        delegations=tuple(delegations),
        proposals=tuple(proposals),
        votes=tuple(votes),
        allocation=allocation,
        params=params,
        capabilities=capabilities,
        agent_evidence=tuple(evidence),
    )


def qual_entries(scores: dict[str, int], when: Optional[datetime] = None) -> list[QualitativeEntry]:
    at = when if when is not None else SNAPSHOT
    return [
        QualitativeEntry(
            characteristic=CharacteristicId(name),
            score=score,
            evidence=f"test evidence for {name}",
            assessor="tester",
            entered_at=at,
        )
        for name, score in scores.items()
    ]


FULL_QUALITATIVE = {
    "bootstrapping": 5,
    "soft_power": 5,
    "responsibility_alignment": 5,
    "accountability": 5,
}


def all_five_dataset() -> GovernanceDataset:
    """A dataset scoring 5 on every quantitative characteristic (paper-2022).

    450 equal VIA delegates: VIA nakamoto 226 (>=40) and 450 distinct VIA
    delegates (>=400); the quorum takes 5 of them; float participation 25%.
    """
    return micro_dataset(
        via_count=450,
        via_power=1_000,
        insider_pct=0,
        group_split=5,
        vote_weight=200_000,
        quorum=4_100,
        circulating=800_000,
    )
