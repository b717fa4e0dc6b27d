"""Build the bundled Compound reference fixture from its published figures.

Regenerates src/tiger/fixtures/compound-2022/ plus the reference qualitative
entries. The construction is fully deterministic (seeded RNG) and asserts
every target the acceptance suite checks before writing anything.

Run from the repository root:  python scripts/make_compound_fixture.py
"""

from __future__ import annotations

import json
import random
import sys
from datetime import datetime, timedelta, timezone
from decimal import Decimal
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from tiger.ingest import load_qualitative_file, save_dataset
from tiger.metrics import (
    decisiveness,
    delegation_stats,
    governance_nakamoto,
    insider_share,
    nakamoto,
    participation,
    via_power_vector,
)
from tiger.model import (
    Address,
    AgentEvidence,
    AllocationSchedule,
    BalanceRecord,
    CapabilityFlags,
    DelegationEdge,
    GovernanceDataset,
    GovernanceParams,
    InflationStream,
    PauseGuardian,
    Proposal,
    ProposalStatus,
    StakeholderGroup,
    TokenAmount,
    VoteRecord,
    VoteSupport,
    validate_dataset,
)
from tiger.scorecard import derived_address, evaluate, load_calibration
from tiger.taxonomy import TaxonomyConfig, classify

UTC = timezone.utc
FIXTURE_DIR = ROOT / "src" / "tiger" / "fixtures" / "compound-2022"
QUALITATIVE_PATH = ROOT / "src" / "tiger" / "fixtures" / "compound-2022-qualitative.json"

SNAPSHOT = datetime(2022, 6, 15, tzinfo=UTC)
LAUNCHED = datetime(2018, 5, 12, tzinfo=UTC)

# Voting-power ledger (whole tokens).
TOTAL_EOA_POWER = 2_567_391
DELEGATED_TOTAL = 2_377_404
TOP60_POWER = 2_564_824  # 99.90% of TOTAL_EOA_POWER
DUST_TOTAL = TOTAL_EOA_POWER - TOP60_POWER
DELEGATE_OWN_TOTAL = TOP60_POWER - DELEGATED_TOTAL

CIRCULATING = 7_150_000
MAX_SUPPLY = 10_000_000
CONTRACT_TOTAL = CIRCULATING - TOTAL_EOA_POWER

TOP4 = [140_000, 130_000, 125_000, 118_494]  # 4th is the modelling firm's delegate


def apportion(weights: list[float], total: int) -> list[int]:
    """Integer shares proportional to weights, exact by largest remainder."""
    scale = total / sum(weights)
    raw = [w * scale for w in weights]
    floors = [int(x) for x in raw]
    shortfall = total - sum(floors)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - floors[i]), i))
    for i in order[:shortfall]:
        floors[i] += 1
    return floors


def token(amount: int) -> TokenAmount:
    return TokenAmount.from_decimal(amount)


def build_dataset() -> GovernanceDataset:
    rng = random.Random(20220615)

    # --- delegate powers -------------------------------------------------
    tail_target = TOP60_POWER - sum(TOP4)
    tail_shape = [110_000 * 0.95**k for k in range(56)]
    powers = TOP4 + apportion(tail_shape, tail_target)
    assert len(powers) == 60 and sum(powers) == TOP60_POWER
    assert max(powers[4:]) < TOP4[3]

    delegates = [derived_address(f"delegate:{i}") for i in range(60)]
    own_balances = apportion([float(p) for p in powers], DELEGATE_OWN_TOTAL)
    assert all(own < p for own, p in zip(own_balances, powers))
    delegated_in = [p - own for p, own in zip(powers, own_balances)]
    assert sum(delegated_in) == DELEGATED_TOTAL
    assert all(d > 0 for d in delegated_in)

    balances: dict[Address, BalanceRecord] = {}
    delegations: list[DelegationEdge] = []

    for address, own in zip(delegates, own_balances):
        balances[address] = BalanceRecord(address, token(own), False)

    # Delegators hand their full balance to a single delegate.
    delegators: list[Address] = []
    for i, (delegate, incoming) in enumerate(zip(delegates, delegated_in)):
        chunk_count = max(1, min(8, incoming // 20_000 + rng.randint(0, 2)))
        chunks = apportion([rng.uniform(0.6, 1.4) for _ in range(chunk_count)], incoming)
        for j, chunk in enumerate(chunks):
            if chunk == 0:
                continue
            delegator = derived_address(f"delegator:{i}:{j}")
            delegators.append(delegator)
            balances[delegator] = BalanceRecord(delegator, token(chunk), False)
            delegations.append(DelegationEdge(delegator, delegate, token(chunk)))

    dust_holders = [derived_address(f"dust:{i}") for i in range(37)]
    for address, amount in zip(dust_holders, apportion([1.0] * 37, DUST_TOTAL)):
        balances[address] = BalanceRecord(address, token(amount), False)

    retail = [derived_address(f"retail:{i}") for i in range(120)]
    for address in retail:
        balances[address] = BalanceRecord(address, TokenAmount.ZERO, False)

    # --- insiders and contracts ------------------------------------------
    groups = [
        ("Shareholders", "insider", 2_396_307, "23.96"),
        ("Founders & team", "insider", 2_226_037, "22.26"),
        ("Future team", "insider", 372_707, "3.73"),
        ("Users", "external", 4_229_949, "42.30"),
        ("Community", "external", 775_000, "7.75"),
    ]
    insider_holders = {
        name: derived_address(f"insider:{name}")
        for name, category, _, _ in groups
        if category == "insider"
    }
    for address in insider_holders.values():
        balances[address] = BalanceRecord(address, TokenAmount.ZERO, False)

    escrow_amounts = {
        "Shareholders": 1_198_153,
        "Founders & team": 1_113_018,
        "Future team": 186_354,
    }
    escrows = []
    for name, amount in escrow_amounts.items():
        address = derived_address(f"escrow:{name}")
        escrows.append(address)
        balances[address] = BalanceRecord(address, token(amount), True)
    reservoir = derived_address("contract:reservoir")
    treasury = derived_address("contract:treasury")
    remaining = CONTRACT_TOTAL - sum(escrow_amounts.values())
    balances[reservoir] = BalanceRecord(reservoir, token(1_500_000), True)
    balances[treasury] = BalanceRecord(treasury, token(remaining - 1_500_000), True)
    assert sum(r.balance.atto for r in balances.values()) == CIRCULATING * 10**18

    # --- proposals and votes ----------------------------------------------
    def spread(year_start: datetime, count: int, span_days: int) -> list[datetime]:
        step = span_days / count
        return [year_start + timedelta(days=round(step * i) + 1) for i in range(count)]

    def statuses(executed: int, defeated: int, canceled: int) -> list[ProposalStatus]:
        out = (
            [ProposalStatus.EXECUTED] * executed
            + [ProposalStatus.DEFEATED] * defeated
            + [ProposalStatus.CANCELED] * canceled
        )
        rng.shuffle(out)
        return out

    years = [
        (datetime(2020, 4, 10, tzinfo=UTC), 32, 250, statuses(22, 7, 3), 56),
        (datetime(2021, 1, 4, tzinfo=UTC), 45, 355, statuses(31, 9, 5), 60),
        (datetime(2022, 1, 3, tzinfo=UTC), 36, 157, statuses(24, 7, 5), 66),
    ]

    proposals: list[Proposal] = []
    votes: list[VoteRecord] = []
    non_top_pool = delegates[10:] + delegators + dust_holders + retail
    proposal_id = 0
    nondecisive_2022 = {2, 5, 8, 11, 14, 17, 20, 23, 26, 29, 32}

    for start, count, span, status_list, voters_per in years:
        dates = spread(start, count, span)
        for index in range(count):
            proposal_id += 1
            submitted = dates[index]
            proposals.append(
                Proposal(
                    id=proposal_id,
                    submitted_at=submitted,
                    status=status_list[index],
                    is_general=rng.random() < 0.8,
                )
            )

            if submitted.year == 2022:
                total_weight = 600_000
                if index in nondecisive_2022:
                    top_weights = [31_000, 30_500, 30_000, 29_500, 29_000,
                                   28_500, 28_000, 27_500, 27_000, 26_500]
                else:
                    top_weights = [45_000, 42_000, 39_000, 36_000, 33_000,
                                   30_000, 27_500, 25_000, 22_500, 20_000]
            else:
                total_weight = rng.randint(300, 550) * 1_000
                shape = sorted((rng.uniform(1.5, 4.0) for _ in range(10)), reverse=True)
                top_weights = apportion(shape, int(total_weight * 0.62))

            top_voters = rng.sample(delegates, 10)
            tail_count = voters_per - 10
            chosen = set(top_voters)
            tail_voters = rng.sample([a for a in non_top_pool if a not in chosen], tail_count)
            tail_total = total_weight - sum(top_weights)
            tail_weights = apportion([rng.uniform(0.8, 1.2) for _ in range(tail_count)], tail_total)
            assert max(tail_weights) < min(top_weights)

            for voter, weight in zip(top_voters + tail_voters, top_weights + tail_weights):
                support = VoteSupport.FOR if rng.random() < 0.72 else (
                    VoteSupport.AGAINST if rng.random() < 0.8 else VoteSupport.ABSTAIN
                )
                votes.append(VoteRecord(proposal_id, voter, support, token(weight)))

    # --- agent evidence -----------------------------------------------------
    evidence: list[AgentEvidence] = []
    for address in delegates:
        evidence.append(
            AgentEvidence(
                address=address,
                identity_evidence=True,
                active_days_fraction=round(rng.uniform(0.6, 0.95), 2),
                automation_flag=False,
                cross_dao_count=rng.randint(1, 6),
            )
        )
    for address in delegators[:40]:
        evidence.append(
            AgentEvidence(
                address=address,
                identity_evidence=False,
                active_days_fraction=round(rng.uniform(0.55, 0.9), 2),
                automation_flag=False,
                cross_dao_count=rng.randint(1, 4),
            )
        )
    for address in retail[:10]:
        evidence.append(
            AgentEvidence(
                address=address,
                identity_evidence=False,
                active_days_fraction=round(rng.uniform(0.7, 1.0), 2),
                automation_flag=True,
                cross_dao_count=rng.randint(0, 2),
            )
        )

    allocation = AllocationSchedule(
        max_supply=token(MAX_SUPPLY),
        circulating=token(CIRCULATING),
        groups=tuple(
            StakeholderGroup(name, category, token(amount), Decimal(pct))
            for name, category, amount, pct in groups
        ),
        vesting_end=datetime(2024, 6, 30, tzinfo=UTC),
        daily_inflation=token(1_139),
        inflation_streams=(InflationStream("user rewards", token(1_139), "A_external"),),
    )
    params = GovernanceParams(
        proposal_threshold=token(25_000),
        autonomous_proposal_bond=token(100),
        quorum=token(400_000),
        review_period_days=3,
        voting_period_days=3,
        queue_period_days=2,
    )
    capabilities = CapabilityFlags(
        can_freeze_balances=False,
        can_upgrade_code=False,
        pause_guardian=PauseGuardian(
            holder_count=6,
            pausable_functions=("mint", "borrow", "transfer", "liquidate"),
            is_full_shutdown=False,
            community_controlled=True,
        ),
    )

    return GovernanceDataset(
        snapshot_time=SNAPSHOT,
        dao_name="Compound",
        dao_category="protocol",
        dao_launched_at=LAUNCHED,
        balances=tuple(balances[a] for a in sorted(balances)),
        delegations=tuple(delegations),
        proposals=tuple(proposals),
        votes=tuple(votes),
        allocation=allocation,
        params=params,
        capabilities=capabilities,
        agent_evidence=tuple(evidence),
        insider_holders=insider_holders,
        vesting_escrows=tuple(escrows),
    )


QUALITATIVE_ENTRIES = [
    {
        "characteristic": "bootstrapping",
        "score": 5,
        "evidence": (
            "Centralized activity observed is limited to interface hosting and "
            "coordination work consistent with bootstrapping a new protocol."
        ),
    },
    {
        "characteristic": "soft_power",
        "score": 3,
        "evidence": (
            "One service provider authors a large share of pre-proposal posts and "
            "controls a top-five delegate address; its activity centers on risk "
            "topics and shows no manipulative pattern."
        ),
    },
    {
        "characteristic": "responsibility_alignment",
        "score": 4,
        "evidence": (
            "Decisions execute through contracts that bind insiders and outsiders "
            "alike; no veto or overruling rights observed."
        ),
    },
    {
        "characteristic": "accountability",
        "score": 2,
        "evidence": (
            "No dispute-resolution mechanism is implemented; community discussion "
            "about adding one has not reached a formal vote."
        ),
    },
]


def write_qualitative() -> None:
    payload = {
        "entries": [
            {
                **entry,
                "assessor": "reference-assessor",
                "entered_at": "2022-06-15T00:00:00Z",
            }
            for entry in QUALITATIVE_ENTRIES
        ]
    }
    QUALITATIVE_PATH.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def check(dataset: GovernanceDataset) -> None:
    violations = validate_dataset(dataset)
    assert not violations, violations[:5]

    profiles = classify(
        dataset.agent_evidence,
        TaxonomyConfig(),
        known_addresses=[r.address for r in dataset.balances],
    )

    share = insider_share(dataset.allocation)
    assert share == Decimal("49.95"), share

    stats = delegation_stats(dataset, profiles)
    assert abs(stats.delegated_share_pct - Decimal("92.6")) <= Decimal("0.1"), stats.delegated_share_pct
    assert abs(stats.top_n_coverage[60] - Decimal("99.9")) <= Decimal("0.1"), stats.top_n_coverage
    assert stats.distinct_via_delegates == 60

    year2022 = (datetime(2022, 1, 1, tzinfo=UTC), datetime(2023, 1, 1, tzinfo=UTC))
    stats2022 = participation(dataset, year2022)
    assert stats2022.avg_addresses_per_proposal == Decimal("66.00"), stats2022
    assert abs(stats2022.float_participation_pct - Decimal("8.39")) <= Decimal("0.05")

    lifetime = participation(dataset)
    assert lifetime.proposals_total == 113
    assert abs(lifetime.proposals_per_month - Decimal("2.3")) <= Decimal("0.05"), lifetime
    assert lifetime.turnout_by_year[2020] == Decimal("56.00")

    dec = decisiveness(dataset, profiles, 10, year2022)
    assert abs(dec.fraction - Decimal("0.70")) <= Decimal("0.03"), dec.fraction
    assert dec.decided_count == 36

    via_vec = via_power_vector(dataset, profiles)
    via_nakamoto = nakamoto(via_vec, Decimal("0.5"), strict=True)
    assert 12 <= via_nakamoto <= 24, via_nakamoto
    gov = governance_nakamoto(via_vec, dataset.params.quorum, None)
    assert gov == 4, gov

    entries = load_qualitative_file(QUALITATIVE_PATH)
    assessment = evaluate(dataset, profiles, entries, load_calibration("paper-2022"))
    dims = {axis: value for axis, value in assessment.dimension_scores.items()}
    assert dims == {"T": 3, "I": 5, "G": 3, "E": 5, "R": 3}, dims
    assert assessment.overall == Decimal("3.8"), assessment.overall
    assert assessment.verdict.value == "sufficient"
    assert not assessment.critical_failures

    print("fixture checks passed:")
    print(f"  insider share          {share}")
    print(f"  delegated share        {stats.delegated_share_pct}")
    print(f"  top-60 coverage        {stats.top_n_coverage[60]}")
    print(f"  2022 avg addresses     {stats2022.avg_addresses_per_proposal}")
    print(f"  float participation    {stats2022.float_participation_pct}")
    print(f"  lifetime proposals     {lifetime.proposals_total} at {lifetime.proposals_per_month}/month")
    print(f"  decisiveness (k=10)    {dec.fraction}")
    print(f"  VIA nakamoto           {via_nakamoto}")
    print(f"  governance nakamoto    {gov}")
    print(f"  dimensions             {dims} overall {assessment.overall} ({assessment.verdict.value})")


def main() -> int:
    dataset = build_dataset()
    write_qualitative()
    check(dataset)
    content_hash = save_dataset(dataset, FIXTURE_DIR)
    print(f"wrote {FIXTURE_DIR} (hash {content_hash})")
    print(f"wrote {QUALITATIVE_PATH}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
