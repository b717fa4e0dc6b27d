"""Domain types for DAO governance snapshots and the assessment scorecard.

Everything here is immutable after construction and safe to share across
threads. Amounts are exact fixed-point decimals (18 fractional digits) so
percentage quantifiers are reproducible; floats never enter the arithmetic.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from decimal import ROUND_HALF_UP, Decimal, localcontext
from enum import Enum
from fractions import Fraction
from typing import ClassVar, Iterable, Mapping, Optional

__all__ = [
    "Address",
    "AgentEvidence",
    "AllocationSchedule",
    "BalanceRecord",
    "CapabilityFlags",
    "CharacteristicId",
    "DelegationEdge",
    "Dimension",
    "GovernanceDataset",
    "GovernanceParams",
    "InflationStream",
    "ModelError",
    "PauseGuardian",
    "Proposal",
    "ProposalStatus",
    "QualitativeEntry",
    "StakeholderGroup",
    "TokenAmount",
    "Violation",
    "VoteRecord",
    "VoteSupport",
    "parse_rfc3339",
    "format_rfc3339",
    "validate_dataset",
]

ATTO = 10**18

_ADDRESS_RE = re.compile(r"^0x[0-9a-f]{40}$")
_AMOUNT_RE = re.compile(r"^(\d+)(?:\.(\d+))?$")


class ModelError(ValueError):
    """Raised when a value cannot be represented as a valid domain type."""


def parse_rfc3339(text: str) -> datetime:
    """Parse an RFC 3339 timestamp into an aware UTC datetime."""
    raw = text.strip()
    if raw.endswith(("Z", "z")):
        raw = raw[:-1] + "+00:00"
    try:
        dt = datetime.fromisoformat(raw)
    except ValueError as exc:
        raise ModelError(f"invalid timestamp {text!r}") from exc
    if dt.tzinfo is None:
        raise ModelError(f"timestamp {text!r} has no timezone")
    return dt.astimezone(timezone.utc)


def format_rfc3339(dt: datetime) -> str:
    """Canonical UTC rendering: 'Z' suffix, microseconds only when nonzero."""
    dt = dt.astimezone(timezone.utc)
    if dt.microsecond:
        return dt.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"
    return dt.strftime("%Y-%m-%dT%H:%M:%S") + "Z"


@dataclass(frozen=True, order=True)
class Address:
    """A 20-byte account identifier, case-normalized to lowercase hex."""

    value: str

    def __post_init__(self) -> None:
        normalized = self.value.lower()
        if not _ADDRESS_RE.match(normalized):
            raise ModelError(f"invalid address {self.value!r}")
        object.__setattr__(self, "value", normalized)

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True, order=True)
class TokenAmount:
    """Non-negative exact token quantity with 18 fractional digits.

    Stored as an integer count of 10^-18 units. Arithmetic never rounds:
    anything that would lose precision raises ModelError instead.
    """

    atto: int

    def __post_init__(self) -> None:
        if not isinstance(self.atto, int):
            raise ModelError(f"atto units must be int, got {type(self.atto).__name__}")
        if self.atto < 0:
            raise ModelError("token amount cannot be negative")

    @classmethod
    def parse(cls, text: str) -> "TokenAmount":
        match = _AMOUNT_RE.match(text.strip())
        if not match:
            raise ModelError(f"invalid token amount {text!r}")
        whole, frac = match.group(1), match.group(2) or ""
        if len(frac) > 18:
            raise ModelError(f"token amount {text!r} exceeds 18 fractional digits")
        return cls(int(whole) * ATTO + int(frac.ljust(18, "0")))

    @classmethod
    def from_decimal(cls, value: Decimal | int | str) -> "TokenAmount":
        if isinstance(value, int):
            return cls(value * ATTO)
        return cls.parse(str(value))

    ZERO: ClassVar["TokenAmount"]

    def as_decimal(self) -> Decimal:
        return Decimal(self.atto) / Decimal(ATTO)

    def as_fraction(self) -> Fraction:
        return Fraction(self.atto, ATTO)

    def __str__(self) -> str:
        whole, frac = divmod(self.atto, ATTO)
        if frac == 0:
            return str(whole)
        return f"{whole}.{str(frac).zfill(18).rstrip('0')}"

    def __add__(self, other: "TokenAmount") -> "TokenAmount":
        return TokenAmount(self.atto + other.atto)

    def __sub__(self, other: "TokenAmount") -> "TokenAmount":
        if other.atto > self.atto:
            raise ModelError("token amount subtraction would go negative")
        return TokenAmount(self.atto - other.atto)

    def __bool__(self) -> bool:
        return self.atto != 0


TokenAmount.ZERO = TokenAmount(0)


class Dimension(str, Enum):
    """The five scorecard dimensions, keyed by their radar axis letter."""

    TOKEN_WEIGHTED_VOTING = "T"
    INFRASTRUCTURE = "I"
    GOVERNANCE = "G"
    ESCALATION = "E"
    REPUTATION = "R"

    @property
    def title(self) -> str:
        return _DIMENSION_TITLES[self]


_DIMENSION_TITLES = {
    Dimension.TOKEN_WEIGHTED_VOTING: "Token Weighted Voting and Incentives",
    Dimension.INFRASTRUCTURE: "Infrastructure",
    Dimension.GOVERNANCE: "Governance",
    Dimension.ESCALATION: "Escalation",
    Dimension.REPUTATION: "Reputation",
}

DIMENSION_ORDER: tuple[Dimension, ...] = (
    Dimension.TOKEN_WEIGHTED_VOTING,
    Dimension.INFRASTRUCTURE,
    Dimension.GOVERNANCE,
    Dimension.ESCALATION,
    Dimension.REPUTATION,
)


class CharacteristicId(str, Enum):
    """The 15 assessed characteristics, three per dimension."""

    TOKEN_DISTRIBUTION = "token_distribution"
    NON_COLLUSIVE_OLIGOPOLY = "non_collusive_oligopoly"
    VOTING_POWER_CONCENTRATION = "voting_power_concentration"
    TOKEN_FREEZE_THAW = "token_freeze_thaw"
    CODE_UPGRADES = "code_upgrades"
    ACCESS = "access"
    VOTING_DELEGATION = "voting_delegation"
    VOTING_PARTICIPATION = "voting_participation"
    BOOTSTRAPPING = "bootstrapping"
    CRISIS_MANAGEMENT = "crisis_management"
    INFLATION = "inflation"
    VOTING_ACCESS = "voting_access"
    SOFT_POWER = "soft_power"
    RESPONSIBILITY_ALIGNMENT = "responsibility_alignment"
    ACCOUNTABILITY = "accountability"

    @property
    def dimension(self) -> Dimension:
        return _CHARACTERISTIC_DIMENSION[self]


_CHARACTERISTIC_DIMENSION = {
    CharacteristicId.TOKEN_DISTRIBUTION: Dimension.TOKEN_WEIGHTED_VOTING,
    CharacteristicId.NON_COLLUSIVE_OLIGOPOLY: Dimension.TOKEN_WEIGHTED_VOTING,
    CharacteristicId.VOTING_POWER_CONCENTRATION: Dimension.TOKEN_WEIGHTED_VOTING,
    CharacteristicId.TOKEN_FREEZE_THAW: Dimension.INFRASTRUCTURE,
    CharacteristicId.CODE_UPGRADES: Dimension.INFRASTRUCTURE,
    CharacteristicId.ACCESS: Dimension.INFRASTRUCTURE,
    CharacteristicId.VOTING_DELEGATION: Dimension.GOVERNANCE,
    CharacteristicId.VOTING_PARTICIPATION: Dimension.GOVERNANCE,
    CharacteristicId.BOOTSTRAPPING: Dimension.GOVERNANCE,
    CharacteristicId.CRISIS_MANAGEMENT: Dimension.ESCALATION,
    CharacteristicId.INFLATION: Dimension.ESCALATION,
    CharacteristicId.VOTING_ACCESS: Dimension.ESCALATION,
    CharacteristicId.SOFT_POWER: Dimension.REPUTATION,
    CharacteristicId.RESPONSIBILITY_ALIGNMENT: Dimension.REPUTATION,
    CharacteristicId.ACCOUNTABILITY: Dimension.REPUTATION,
}

CHARACTERISTIC_ORDER: tuple[CharacteristicId, ...] = tuple(_CHARACTERISTIC_DIMENSION)

# Characteristics whose score comes from an assessor-entered judgment.
QUALITATIVE_CHARACTERISTICS = frozenset(
    {
        CharacteristicId.BOOTSTRAPPING,
        CharacteristicId.SOFT_POWER,
        CharacteristicId.RESPONSIBILITY_ALIGNMENT,
        CharacteristicId.ACCOUNTABILITY,
    }
)

# Characteristics scored from two sub-metrics where an assessor entry may
# still override the computed result.
MIXED_CHARACTERISTICS = frozenset(
    {CharacteristicId.ACCESS, CharacteristicId.VOTING_ACCESS}
)


class ProposalStatus(str, Enum):
    PENDING = "pending"
    ACTIVE = "active"
    SUCCEEDED = "succeeded"
    DEFEATED = "defeated"
    CANCELED = "canceled"
    EXECUTED = "executed"


DECIDED_STATUSES = frozenset(
    {
        ProposalStatus.SUCCEEDED,
        ProposalStatus.DEFEATED,
        ProposalStatus.CANCELED,
        ProposalStatus.EXECUTED,
    }
)


class VoteSupport(str, Enum):
    FOR = "for"
    AGAINST = "against"
    ABSTAIN = "abstain"


class AgentClass(str, Enum):
    VIA = "VIA"
    PIA = "PIA"
    UIA = "UIA"


@dataclass(frozen=True)
class BalanceRecord:
    address: Address
    balance: TokenAmount
    is_contract: bool = False


@dataclass(frozen=True)
class DelegationEdge:
    delegator: Address
    delegatee: Address
    amount: TokenAmount


@dataclass(frozen=True)
class Proposal:
    id: int
    submitted_at: datetime
    status: ProposalStatus
    is_general: bool = True

    def __post_init__(self) -> None:
        if self.id <= 0:
            raise ModelError(f"proposal id must be positive, got {self.id}")


@dataclass(frozen=True)
class VoteRecord:
    proposal_id: int
    voter: Address
    support: VoteSupport
    weight: TokenAmount


@dataclass(frozen=True)
class StakeholderGroup:
    name: str
    category: str  # "insider" or "external"
    allocation: TokenAmount
    pct_of_max_supply: Decimal

    def __post_init__(self) -> None:
        if self.category not in ("insider", "external"):
            raise ModelError(f"unknown stakeholder category {self.category!r}")


@dataclass(frozen=True)
class InflationStream:
    label: str
    daily_amount: TokenAmount
    recipient_class: str  # "A_external" or "B_insider"

    def __post_init__(self) -> None:
        if self.recipient_class not in ("A_external", "B_insider"):
            raise ModelError(f"unknown recipient class {self.recipient_class!r}")


@dataclass(frozen=True)
class AllocationSchedule:
    max_supply: TokenAmount
    circulating: TokenAmount
    groups: tuple[StakeholderGroup, ...]
    vesting_end: Optional[datetime] = None
    daily_inflation: TokenAmount = TokenAmount.ZERO
    inflation_streams: tuple[InflationStream, ...] = ()


@dataclass(frozen=True)
class GovernanceParams:
    proposal_threshold: TokenAmount
    autonomous_proposal_bond: TokenAmount
    quorum: TokenAmount
    review_period_days: int
    voting_period_days: int
    queue_period_days: int

    def __post_init__(self) -> None:
        for name in ("review_period_days", "voting_period_days", "queue_period_days"):
            if getattr(self, name) < 0:
                raise ModelError(f"{name} cannot be negative")


@dataclass(frozen=True)
class PauseGuardian:
    holder_count: int
    pausable_functions: tuple[str, ...]
    is_full_shutdown: bool
    community_controlled: bool


@dataclass(frozen=True)
class CapabilityFlags:
    can_freeze_balances: bool = False
    freeze_agent_count: Optional[int] = None
    can_upgrade_code: bool = False
    upgrade_agent_count: Optional[int] = None
    pause_guardian: Optional[PauseGuardian] = None


@dataclass(frozen=True)
class AgentEvidence:
    """Per-address raw features feeding the agent taxonomy."""

    address: Address
    identity_evidence: bool = False
    active_days_fraction: float = 0.0
    automation_flag: bool = False
    cross_dao_count: int = 0
    manual_class: Optional[AgentClass] = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.active_days_fraction <= 1.0:
            raise ModelError("active_days_fraction must be within [0, 1]")
        if self.cross_dao_count < 0:
            raise ModelError("cross_dao_count cannot be negative")


DAO_CATEGORIES = frozenset(
    {
        "media",
        "operating_system",
        "social",
        "protocol",
        "collector",
        "investment",
        "impact",
        "service",
        "grants",
    }
)


@dataclass(frozen=True)
class GovernanceDataset:
    """An immutable point-in-time snapshot of one DAO's governance state."""

    snapshot_time: datetime
    dao_name: str
    balances: tuple[BalanceRecord, ...]
    delegations: tuple[DelegationEdge, ...]
    proposals: tuple[Proposal, ...]
    votes: tuple[VoteRecord, ...]
    allocation: AllocationSchedule
    params: GovernanceParams
    capabilities: CapabilityFlags
    agent_evidence: tuple[AgentEvidence, ...] = ()
    dao_category: Optional[str] = None
    # Launch of the underlying protocol; proposals may start later, and the
    # proposals-per-month lifetime denominator is measured from here.
    dao_launched_at: Optional[datetime] = None
    # Designated holder address per insider stakeholder group, used by the
    # vesting-completion scenario to materialize unvested allocations.
    insider_holders: Mapping[str, Address] = field(default_factory=dict)
    # Contract addresses escrowing not-yet-claimed insider allocations.
    vesting_escrows: tuple[Address, ...] = ()
    # Assumed adversarial voting weight for the governance-reach metric;
    # settable through the what-if scenario stack.
    opposition: Optional[TokenAmount] = None

    def __post_init__(self) -> None:
        if self.dao_category is not None and self.dao_category not in DAO_CATEGORIES:
            raise ModelError(f"unknown dao_category {self.dao_category!r}")
        object.__setattr__(self, "insider_holders", dict(self.insider_holders))

    def balance_index(self) -> dict[Address, BalanceRecord]:
        return {record.address: record for record in self.balances}

    def with_changes(self, **changes) -> "GovernanceDataset":
        return replace(self, **changes)


@dataclass(frozen=True)
class QualitativeEntry:
    """One assessor-entered judgment for a qualitative or mixed characteristic."""

    characteristic: CharacteristicId
    score: int
    evidence: str
    assessor: str
    entered_at: datetime

    def __post_init__(self) -> None:
        if not 1 <= self.score <= 5:
            raise ModelError(f"score out of range: {self.score} is not within 1..5")
        if (
            self.characteristic not in QUALITATIVE_CHARACTERISTICS
            and self.characteristic not in MIXED_CHARACTERISTICS
        ):
            raise ModelError(
                f"qualitative entry not permitted for {self.characteristic.value}"
            )


@dataclass(frozen=True, order=True)
class Violation:
    """One dataset invariant breach, with a machine-readable rule id."""

    rule: str
    path: str
    message: str


def _pct_error(pct: Decimal, allocation: TokenAmount, max_supply: TokenAmount) -> Fraction:
    exact = Fraction(allocation.atto, max_supply.atto) * 100
    return abs(Fraction(pct) - exact)


def validate_dataset(dataset: GovernanceDataset) -> list[Violation]:
    """Check every cross-record invariant; returns an empty list iff valid.

    Violations are data, not failures: the report is sorted and independent
    of record order so identical datasets always produce identical reports.
    """
    violations: list[Violation] = []
    known: dict[Address, BalanceRecord] = {}

    seen: set[Address] = set()
    for record in dataset.balances:
        if record.address in seen:
            violations.append(
                Violation(
                    "duplicate-address",
                    f"balances[{record.address}]",
                    "more than one balance record for address",
                )
            )
        seen.add(record.address)
        known.setdefault(record.address, record)

    delegated_out: dict[Address, int] = {}
    for edge in dataset.delegations:
        for role, address in (("delegator", edge.delegator), ("delegatee", edge.delegatee)):
            if address not in known:
                violations.append(
                    Violation(
                        "unknown-address",
                        f"delegations[{role}={address}]",
                        f"{role} has no balance record",
                    )
                )
        delegated_out[edge.delegator] = delegated_out.get(edge.delegator, 0) + edge.amount.atto
    for delegator, total in sorted(delegated_out.items()):
        record = known.get(delegator)
        if record is not None and total > record.balance.atto:
            violations.append(
                Violation(
                    "delegation-exceeds-balance",
                    f"delegations[delegator={delegator}]",
                    f"delegated {TokenAmount(total)} exceeds balance {record.balance}",
                )
            )

    by_id: dict[int, Proposal] = {}
    for proposal in dataset.proposals:
        if proposal.id in by_id:
            violations.append(
                Violation(
                    "proposal-id-duplicate",
                    f"proposals[{proposal.id}]",
                    "duplicate proposal id",
                )
            )
        by_id.setdefault(proposal.id, proposal)
    ordered = sorted(by_id.values(), key=lambda p: p.id)
    for earlier, later in zip(ordered, ordered[1:]):
        if later.submitted_at < earlier.submitted_at:
            violations.append(
                Violation(
                    "proposal-order",
                    f"proposals[{later.id}]",
                    "submitted_at decreases while id increases",
                )
            )

    seen_votes: set[tuple[int, Address]] = set()
    for vote in dataset.votes:
        key = (vote.proposal_id, vote.voter)
        if key in seen_votes:
            violations.append(
                Violation(
                    "vote-duplicate",
                    f"votes[{vote.proposal_id}:{vote.voter}]",
                    "duplicate (proposal_id, voter) pair",
                )
            )
        seen_votes.add(key)
        if vote.proposal_id not in by_id:
            violations.append(
                Violation(
                    "vote-unknown-proposal",
                    f"votes[{vote.proposal_id}:{vote.voter}]",
                    "vote references unknown proposal",
                )
            )
        if vote.voter not in known:
            violations.append(
                Violation(
                    "unknown-address",
                    f"votes[{vote.proposal_id}:{vote.voter}]",
                    "voter has no balance record",
                )
            )
        if vote.weight.atto <= 0:
            violations.append(
                Violation(
                    "vote-weight-nonpositive",
                    f"votes[{vote.proposal_id}:{vote.voter}]",
                    "vote weight must be > 0",
                )
            )

    allocation = dataset.allocation
    total_alloc = sum(group.allocation.atto for group in allocation.groups)
    if allocation.groups and total_alloc != allocation.max_supply.atto:
        violations.append(
            Violation(
                "allocation-sum-mismatch",
                "allocation.groups",
                f"group allocations sum to {TokenAmount(total_alloc)}, "
                f"max supply is {allocation.max_supply}",
            )
        )
    if allocation.groups:
        pct_sum = sum((group.pct_of_max_supply for group in allocation.groups), Decimal(0))
        if abs(pct_sum - Decimal(100)) > Decimal("0.01"):
            violations.append(
                Violation(
                    "allocation-pct-sum",
                    "allocation.groups",
                    f"group percentages sum to {pct_sum}, expected 100.00 +/- 0.01",
                )
            )
    if allocation.max_supply.atto > 0:
        for group in allocation.groups:
            if _pct_error(group.pct_of_max_supply, group.allocation, allocation.max_supply) > Fraction(1, 100):
                violations.append(
                    Violation(
                        "group-pct-inconsistent",
                        f"allocation.groups[{group.name}]",
                        "pct_of_max_supply deviates more than 0.01 points from allocation share",
                    )
                )
    if allocation.circulating.atto > allocation.max_supply.atto:
        violations.append(
            Violation(
                "circulating-exceeds-max",
                "allocation.circulating",
                f"circulating {allocation.circulating} exceeds max supply {allocation.max_supply}",
            )
        )

    if dataset.params.quorum.atto <= 0:
        violations.append(
            Violation("quorum-nonpositive", "params.quorum", "quorum must be > 0")
        )

    capabilities = dataset.capabilities
    for flag, count_name in (
        ("can_freeze_balances", "freeze_agent_count"),
        ("can_upgrade_code", "upgrade_agent_count"),
    ):
        enabled = getattr(capabilities, flag)
        count = getattr(capabilities, count_name)
        if enabled and count is None:
            violations.append(
                Violation(
                    "capability-agent-count",
                    f"capabilities.{count_name}",
                    f"{flag} is set but {count_name} is missing",
                )
            )
        if not enabled and count is not None:
            violations.append(
                Violation(
                    "capability-agent-count",
                    f"capabilities.{count_name}",
                    f"{count_name} present but {flag} is false",
                )
            )

    evidence_seen: set[Address] = set()
    for evidence in dataset.agent_evidence:
        if evidence.address in evidence_seen:
            violations.append(
                Violation(
                    "duplicate-evidence",
                    f"agents[{evidence.address}]",
                    "more than one evidence record for address",
                )
            )
        evidence_seen.add(evidence.address)

    return sorted(set(violations))


def quantize_pct(value: Fraction | Decimal) -> Decimal:
    """Render a ratio-derived percentage at the conventional 0.01 precision."""
    return fraction_to_decimal(value if isinstance(value, Fraction) else Fraction(value), 2)


def fraction_to_decimal(value: Fraction, places: int = 4) -> Decimal:
    quantum = Decimal(1).scaleb(-places)
    with localcontext() as ctx:
        ctx.prec = 60
        return (Decimal(value.numerator) / Decimal(value.denominator)).quantize(
            quantum, rounding=ROUND_HALF_UP
        )


def sum_amounts(amounts: Iterable[TokenAmount]) -> TokenAmount:
    return TokenAmount(sum(amount.atto for amount in amounts))
