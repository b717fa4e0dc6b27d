"""Scorecard evaluation: metric ladders, dimension aggregation, verdict.

A calibration profile maps raw metric values onto 1..5 scores through
threshold ladders. The shipped "paper-2022" profile is tuned so the bundled
reference snapshot reproduces its published dimension scores; the breakpoints
are engine defaults, expected to be recalibrated per jurisdiction.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from decimal import Decimal
from enum import Enum
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from . import metrics
from .model import (
    Address,
    BalanceRecord,
    CapabilityFlags,
    CharacteristicId,
    DelegationEdge,
    Dimension,
    DIMENSION_ORDER,
    CHARACTERISTIC_ORDER,
    GovernanceDataset,
    MIXED_CHARACTERISTICS,
    QUALITATIVE_CHARACTERISTICS,
    QualitativeEntry,
    TokenAmount,
    fraction_to_decimal,
    quantize_pct,
)
from .taxonomy import AgentProfile

__all__ = [
    "Assessment",
    "CalibrationError",
    "CalibrationProfile",
    "CharacteristicResult",
    "GracePeriod",
    "Ladder",
    "QUESTION_TEXT",
    "RadarVector",
    "ScenarioError",
    "ScenarioKind",
    "ScenarioSpec",
    "Verdict",
    "apply_scenario",
    "apply_scenario_stack",
    "evaluate",
    "list_calibrations",
    "load_calibration",
    "radar",
]


class CalibrationError(ValueError):
    """Raised for malformed or incomplete calibration profiles."""


class ScenarioError(ValueError):
    """Raised when a scenario references entities missing from the dataset."""


class Verdict(str, Enum):
    SUFFICIENT = "sufficient"
    NOT_SUFFICIENT = "not_sufficient"
    INDETERMINATE = "indeterminate"


QUESTION_TEXT: Mapping[CharacteristicId, str] = {
    CharacteristicId.TOKEN_DISTRIBUTION: (
        "Was the token launch balanced between insiders and the wider community, "
        "weighing long-term funding against further decentralization?"
    ),
    CharacteristicId.NON_COLLUSIVE_OLIGOPOLY: (
        "Are tokens allocated across clearly differentiated stakeholder groups "
        "whose presumed preferences do not align?"
    ),
    CharacteristicId.VOTING_POWER_CONCENTRATION: (
        "How many verifiably independent holders would it take to command a "
        "majority of voting power?"
    ),
    CharacteristicId.TOKEN_FREEZE_THAW: (
        "Can any set of stakeholders lock, move, freeze, or thaw token balances, "
        "and how many agents would that take?"
    ),
    CharacteristicId.CODE_UPGRADES: (
        "Can smart-contract code be changed unilaterally, and how many agents "
        "does an effective upgrade require?"
    ),
    CharacteristicId.ACCESS: (
        "Can external contributors realistically reach a positive voting outcome, "
        "given the quorum and the decision timeline?"
    ),
    CharacteristicId.VOTING_DELEGATION: (
        "How many identifiable delegates with distinct preference profiles are "
        "available to receive voting delegation?"
    ),
    CharacteristicId.VOTING_PARTICIPATION: (
        "What share of the circulating float actively participates in votes?"
    ),
    CharacteristicId.BOOTSTRAPPING: (
        "Does any centralized activity exceed what bootstrapping toward full "
        "decentralization requires?"
    ),
    CharacteristicId.CRISIS_MANAGEMENT: (
        "Do policies include crisis-management and dispute-resolution mechanisms, "
        "and who controls them?"
    ),
    CharacteristicId.INFLATION: (
        "How is ongoing token issuance split between external participants and "
        "insiders?"
    ),
    CharacteristicId.VOTING_ACCESS: (
        "Are there quorum or timing restrictions limiting who can take part in "
        "decision-making?"
    ),
    CharacteristicId.SOFT_POWER: (
        "Is there evidence of co-optation or informal influence steering votes?"
    ),
    CharacteristicId.RESPONSIBILITY_ALIGNMENT: (
        "Is accountability for decision-makers symmetrical to the power vested "
        "in them?"
    ),
    CharacteristicId.ACCOUNTABILITY: (
        "Are conflict- and reputation-management measures implemented and usable?"
    ),
}


@dataclass(frozen=True)
class Ladder:
    """Maps a metric value onto scores 5..2 via four breakpoints, else 1.

    direction="lower" reads breakpoints ascending (smaller metric is better);
    direction="higher" reads them descending.
    """

    metric: str
    direction: str
    breakpoints: tuple[Decimal, Decimal, Decimal, Decimal]

    def __post_init__(self) -> None:
        if self.direction not in ("lower", "higher"):
            raise CalibrationError(f"unknown ladder direction {self.direction!r}")
        pairs = list(zip(self.breakpoints, self.breakpoints[1:]))
        ordered = (
            all(a < b for a, b in pairs)
            if self.direction == "lower"
            else all(a > b for a, b in pairs)
        )
        if not ordered:
            raise CalibrationError(
                f"ladder breakpoints for {self.metric} must be strictly "
                f"{'ascending' if self.direction == 'lower' else 'descending'}"
            )

    def score(self, value: Decimal | int | Fraction) -> int:
        if isinstance(value, Fraction):
            value = fraction_to_decimal(value, 6)
        if isinstance(value, int):
            value = Decimal(value)
        for score, bound in zip((5, 4, 3, 2), self.breakpoints):
            if (value <= bound) if self.direction == "lower" else (value >= bound):
                return score
        return 1


@dataclass(frozen=True)
class GracePeriod:
    """Allowance for declared early-stage centralization.

    When enabled and the assessor's bootstrapping judgment attests that
    centralization is a declared transitional measure (score >= 4), eligible
    characteristics are floored at declared_intent_score_floor.
    """

    enabled: bool = False
    declared_intent_score_floor: int = 3
    eligible_characteristics: frozenset[CharacteristicId] = frozenset()


# Quantitative characteristics that must carry a ladder in every profile.
LADDERED_CHARACTERISTICS: tuple[CharacteristicId, ...] = tuple(
    c for c in CHARACTERISTIC_ORDER if c not in QUALITATIVE_CHARACTERISTICS
)


@dataclass(frozen=True)
class CalibrationProfile:
    profile_id: str
    ladders: Mapping[CharacteristicId, Ladder]
    critical_characteristics: frozenset[CharacteristicId]
    nakamoto_threshold: Fraction = Fraction(1, 2)
    nakamoto_strict: bool = True
    min_total_days: int = 7
    sufficiency_bar: Decimal = Decimal("3.0")
    critical_fail_bound: int = 2
    capability_absent_score: int = 5
    unreachable_governance_score: int = 5
    grace_period: GracePeriod = GracePeriod()

    def __post_init__(self) -> None:
        missing = [c.value for c in LADDERED_CHARACTERISTICS if c not in self.ladders]
        if missing:
            raise CalibrationError(
                f"profile {self.profile_id!r} lacks ladders for: {', '.join(missing)}"
            )
        if not 0 < self.nakamoto_threshold <= 1:
            raise CalibrationError("nakamoto_threshold must be in (0, 1]")

    def ladder(self, characteristic: CharacteristicId) -> Ladder:
        return self.ladders[characteristic]


def _profile_from_payload(payload: dict) -> CalibrationProfile:
    try:
        ladders = {
            CharacteristicId(key): Ladder(
                metric=spec["metric"],
                direction=spec["direction"],
                breakpoints=tuple(Decimal(b) for b in spec["breakpoints"]),
            )
            for key, spec in payload["ladders"].items()
        }
        grace = payload.get("grace_period", {})
        return CalibrationProfile(
            profile_id=payload["id"],
            ladders=ladders,
            critical_characteristics=frozenset(
                CharacteristicId(c) for c in payload["critical_characteristics"]
            ),
            nakamoto_threshold=Fraction(Decimal(payload.get("nakamoto_threshold", "0.5"))),
            nakamoto_strict=payload.get("nakamoto_strict", True),
            min_total_days=payload.get("min_total_days", 7),
            sufficiency_bar=Decimal(payload.get("sufficiency_bar", "3.0")),
            critical_fail_bound=payload.get("critical_fail_bound", 2),
            capability_absent_score=payload.get("capability_absent_score", 5),
            unreachable_governance_score=payload.get("unreachable_governance_score", 5),
            grace_period=GracePeriod(
                enabled=grace.get("enabled", False),
                declared_intent_score_floor=grace.get("declared_intent_score_floor", 3),
                eligible_characteristics=frozenset(
                    CharacteristicId(c) for c in grace.get("eligible_characteristics", ())
                ),
            ),
        )
    except (KeyError, ValueError) as exc:
        if isinstance(exc, CalibrationError):
            raise
        raise CalibrationError(f"malformed calibration profile: {exc}") from exc


def list_calibrations() -> list[str]:
    root = resources.files("tiger").joinpath("calibrations")
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_calibration(profile_id_or_path: str) -> CalibrationProfile:
    """Load a shipped profile by id, or any profile from an explicit JSON path."""
    path = Path(profile_id_or_path)
    if path.suffix == ".json" and path.exists():
        payload = json.loads(path.read_text(encoding="utf-8"))
        return _profile_from_payload(payload)
    resource = resources.files("tiger").joinpath(f"calibrations/{profile_id_or_path}.json")
    if not resource.is_file():
        raise CalibrationError(f"unknown calibration profile {profile_id_or_path!r}")
    return _profile_from_payload(json.loads(resource.read_text(encoding="utf-8")))


@dataclass(frozen=True)
class CharacteristicResult:
    id: CharacteristicId
    score: Optional[int]  # None marks an indeterminate characteristic
    basis: str  # "quantitative", "qualitative", or "mixed"
    critical: bool
    metric_values: Mapping[str, object]
    evidence: str
    provenance: Mapping[str, object]

    @property
    def indeterminate(self) -> bool:
        return self.score is None


@dataclass(frozen=True)
class Assessment:
    characteristics: tuple[CharacteristicResult, ...]
    dimension_scores: Mapping[str, Optional[Fraction]]
    overall: Optional[Decimal]
    radar: tuple[Optional[Fraction], ...]
    verdict: Verdict
    critical_failures: tuple[CharacteristicId, ...]

    def characteristic(self, characteristic_id: CharacteristicId) -> CharacteristicResult:
        for result in self.characteristics:
            if result.id is characteristic_id:
                return result
        raise KeyError(characteristic_id)


@dataclass(frozen=True)
class RadarVector:
    axes: tuple[str, ...]
    values: tuple[Optional[Fraction], ...]
    indeterminate_axes: tuple[str, ...]


def radar(assessment: Assessment) -> RadarVector:
    """Dimension scores as an ordered radar vector, flagging unset axes."""
    axes = tuple(d.value for d in DIMENSION_ORDER)
    return RadarVector(
        axes=axes,
        values=assessment.radar,
        indeterminate_axes=tuple(
            axis for axis, value in zip(axes, assessment.radar) if value is None
        ),
    )


def _crisis_rank(capabilities: CapabilityFlags) -> tuple[int, str]:
    guardian = capabilities.pause_guardian
    if guardian is None:
        return 2, "no pause mechanism; nothing to capture, nothing to contain crises with"
    if guardian.community_controlled:
        if guardian.is_full_shutdown:
            return 3, "community-controlled full shutdown capability"
        return 4, "community-controlled partial pause capability"
    if guardian.is_full_shutdown:
        return 0, "team-controlled full shutdown capability"
    return 1, "team-controlled partial pause capability"


def _scoring_window(dataset: GovernanceDataset):
    """Turnout is scored over the snapshot's calendar year."""
    start = datetime(dataset.snapshot_time.year, 1, 1, tzinfo=timezone.utc)
    return (start, None)


def _grace_declared(entries: Mapping[CharacteristicId, QualitativeEntry]) -> bool:
    entry = entries.get(CharacteristicId.BOOTSTRAPPING)
    return entry is not None and entry.score >= 4


def evaluate(
    dataset: GovernanceDataset,
    profiles: Sequence[AgentProfile],
    qualitative: Sequence[QualitativeEntry],
    calibration: CalibrationProfile,
) -> Assessment:
    """Score all 15 characteristics and aggregate dimensions and verdict.

    Deterministic: identical inputs always produce an identical Assessment,
    independent of ordering in the inputs.
    """
    entries: dict[CharacteristicId, QualitativeEntry] = {}
    for entry in qualitative:  # later entries supersede earlier ones
        entries[entry.characteristic] = entry

    via_vector = metrics.via_power_vector(dataset, profiles)
    delegation = metrics.delegation_stats(dataset, profiles)
    split = metrics.inflation_split(dataset.allocation)
    timing = metrics.timing_fairness(dataset.params, calibration.min_total_days)
    breakdown = metrics.group_differentiation(dataset.allocation)
    insiders = metrics.insider_share(dataset.allocation)

    try:
        lifetime = metrics.participation(dataset)
    except metrics.MetricError:
        lifetime = None
    try:
        turnout = metrics.participation(dataset, _scoring_window(dataset))
    except metrics.MetricError:
        turnout = lifetime
    float_pct = turnout.float_participation_pct if turnout else Decimal(0)

    if len(via_vector) and via_vector.total > 0:
        via_nakamoto: Optional[int] = metrics.nakamoto(
            via_vector, calibration.nakamoto_threshold, calibration.nakamoto_strict
        )
    else:
        via_nakamoto = None

    quorum = dataset.params.quorum
    if quorum.atto > 0:
        gov_nakamoto = metrics.governance_nakamoto(via_vector, quorum, dataset.opposition)
        gov_reachable = gov_nakamoto is not None
    else:
        gov_nakamoto, gov_reachable = None, False

    balance_index = dataset.balance_index()
    insider_held = sum(
        balance_index[a].balance.atto
        for a in dataset.insider_holders.values()
        if a in balance_index
    )
    if dataset.allocation.max_supply.atto > 0:
        insider_effective_pct = quantize_pct(
            Fraction(insider_held, dataset.allocation.max_supply.atto) * 100
        )
    else:
        insider_effective_pct = Decimal("0.00")

    results: list[CharacteristicResult] = []

    def ladder_score(characteristic: CharacteristicId, value) -> int:
        return calibration.ladder(characteristic).score(value)

    def add(
        characteristic: CharacteristicId,
        score: Optional[int],
        basis: str,
        metric_values: dict,
        evidence: str,
        provenance: dict,
    ) -> None:
        results.append(
            CharacteristicResult(
                id=characteristic,
                score=score,
                basis=basis,
                critical=characteristic in calibration.critical_characteristics,
                metric_values=metric_values,
                evidence=evidence,
                provenance=provenance,
            )
        )

    def capability_result(
        characteristic: CharacteristicId, enabled: bool, agent_count: Optional[int], label: str
    ) -> None:
        if not enabled:
            add(
                characteristic,
                calibration.capability_absent_score,
                "quantitative",
                {"capability_present": False, "agent_count": None},
                f"token contract exposes no {label} capability",
                {"inputs": ["capabilities"]},
            )
            return
        count = agent_count if agent_count is not None else 1
        add(
            characteristic,
            ladder_score(characteristic, count),
            "quantitative",
            {"capability_present": True, "agent_count": count},
            f"{label} capability controlled by {count} agent(s)",
            {"inputs": ["capabilities"]},
        )

    def access_result(characteristic: CharacteristicId) -> None:
        if not gov_reachable:
            reach_score = calibration.unreachable_governance_score
            reach_note = "no VIA coalition can reach quorum"
        else:
            reach_score = ladder_score(characteristic, gov_nakamoto)
            reach_note = f"{gov_nakamoto} VIA(s) reach quorum"
        timing_score = 5 if timing.passed else 1
        computed = min(reach_score, timing_score)
        entry = entries.get(characteristic)
        score = entry.score if entry else computed
        add(
            characteristic,
            score,
            "mixed",
            {
                "governance_nakamoto": gov_nakamoto if gov_reachable else "unreachable",
                "quorum": str(quorum),
                "opposition": str(dataset.opposition) if dataset.opposition else None,
                "timing_total_days": timing.total_days,
                "timing_pass": timing.passed,
                "reach_subscore": reach_score,
                "timing_subscore": timing_score,
            },
            entry.evidence if entry else f"{reach_note}; decision window {timing.total_days} day(s)",
            {
                "inputs": ["balances", "delegations", "agents", "params"],
                "computed_score": computed,
                "assessor_override": bool(entry),
                **(
                    {"assessor": entry.assessor, "entered_at": entry.entered_at}
                    if entry
                    else {}
                ),
            },
        )

    def qualitative_result(characteristic: CharacteristicId) -> None:
        entry = entries.get(characteristic)
        if entry is None:
            add(
                characteristic,
                None,
                "qualitative",
                {},
                "no assessor judgment recorded",
                {"inputs": ["assessor"]},
            )
            return
        add(
            characteristic,
            entry.score,
            "qualitative",
            {},
            entry.evidence,
            {"inputs": ["assessor"], "assessor": entry.assessor, "entered_at": entry.entered_at},
        )

    for characteristic in CHARACTERISTIC_ORDER:
        if characteristic is CharacteristicId.TOKEN_DISTRIBUTION:
            add(
                characteristic,
                ladder_score(characteristic, insiders),
                "quantitative",
                {
                    "insider_share_pct": insiders,
                    "insider_effective_holdings_pct": insider_effective_pct,
                },
                f"{insiders}% of max supply allocated to insider groups",
                {"inputs": ["allocation", "balances"]},
            )
        elif characteristic is CharacteristicId.NON_COLLUSIVE_OLIGOPOLY:
            add(
                characteristic,
                ladder_score(characteristic, breakdown.largest_share_pct),
                "quantitative",
                {
                    "largest_group_pct": breakdown.largest_share_pct,
                    "largest_groups": list(breakdown.largest_groups),
                    "group_shares": {name: pct for name, pct in breakdown.shares},
                },
                f"largest stakeholder group holds {breakdown.largest_share_pct}%",
                {"inputs": ["allocation"]},
            )
        elif characteristic is CharacteristicId.VOTING_POWER_CONCENTRATION:
            value = via_nakamoto if via_nakamoto is not None else 0
            add(
                characteristic,
                ladder_score(characteristic, value),
                "quantitative",
                {
                    "via_nakamoto": via_nakamoto,
                    "via_count": len(via_vector),
                    "threshold": str(calibration.nakamoto_threshold),
                },
                (
                    f"{via_nakamoto} VIA(s) control a majority of VIA voting power"
                    if via_nakamoto is not None
                    else "no VIA-held voting power to measure"
                ),
                {"inputs": ["balances", "delegations", "agents"]},
            )
        elif characteristic is CharacteristicId.TOKEN_FREEZE_THAW:
            capability_result(
                characteristic,
                dataset.capabilities.can_freeze_balances,
                dataset.capabilities.freeze_agent_count,
                "balance freeze/thaw",
            )
        elif characteristic is CharacteristicId.CODE_UPGRADES:
            capability_result(
                characteristic,
                dataset.capabilities.can_upgrade_code,
                dataset.capabilities.upgrade_agent_count,
                "code upgrade",
            )
        elif characteristic in MIXED_CHARACTERISTICS:
            access_result(characteristic)
        elif characteristic is CharacteristicId.VOTING_DELEGATION:
            add(
                characteristic,
                ladder_score(characteristic, delegation.distinct_via_delegates),
                "quantitative",
                {
                    "distinct_via_delegates": delegation.distinct_via_delegates,
                    "delegated_share_pct": delegation.delegated_share_pct,
                    "top_n_coverage": {str(n): pct for n, pct in delegation.top_n_coverage.items()},
                },
                f"{delegation.distinct_via_delegates} VIA delegate(s) available",
                {"inputs": ["delegations", "agents"]},
            )
        elif characteristic is CharacteristicId.VOTING_PARTICIPATION:
            add(
                characteristic,
                ladder_score(characteristic, float_pct),
                "quantitative",
                {
                    "float_participation_pct": float_pct,
                    "avg_addresses_per_proposal": turnout.avg_addresses_per_proposal if turnout else None,
                    "avg_active_weight": turnout.avg_active_weight if turnout else None,
                    "window_proposals": turnout.proposals_total if turnout else 0,
                    "lifetime_proposals": lifetime.proposals_total if lifetime else 0,
                    "proposals_per_month": lifetime.proposals_per_month if lifetime else None,
                    "turnout_by_year": dict(turnout.turnout_by_year) if turnout else {},
                },
                f"{float_pct}% of the float active in scored window",
                {"inputs": ["votes", "proposals", "allocation"]},
            )
        elif characteristic is CharacteristicId.CRISIS_MANAGEMENT:
            rank, note = _crisis_rank(dataset.capabilities)
            guardian = dataset.capabilities.pause_guardian
            add(
                characteristic,
                ladder_score(characteristic, rank),
                "quantitative",
                {
                    "crisis_rank": rank,
                    "guardian_holder_count": guardian.holder_count if guardian else None,
                    "pausable_functions": list(guardian.pausable_functions) if guardian else [],
                    "is_full_shutdown": guardian.is_full_shutdown if guardian else None,
                    "community_controlled": guardian.community_controlled if guardian else None,
                },
                note,
                {"inputs": ["capabilities"]},
            )
        elif characteristic is CharacteristicId.INFLATION:
            add(
                characteristic,
                ladder_score(characteristic, split.pct_b_insider),
                "quantitative",
                {
                    "pct_a_external": split.pct_a_external,
                    "pct_b_insider": split.pct_b_insider,
                    "has_inflation": split.has_inflation,
                    "daily_inflation": str(dataset.allocation.daily_inflation),
                },
                (
                    f"{split.pct_b_insider}% of daily issuance accrues to insiders"
                    if split.has_inflation
                    else "no ongoing token issuance"
                ),
                {"inputs": ["allocation"]},
            )
        else:
            qualitative_result(characteristic)

    # Grace-period floor: only when the assessor has attested that observed
    # centralization is declared, transitional bootstrapping.
    grace = calibration.grace_period
    if grace.enabled and _grace_declared(entries):
        floored = []
        for index, result in enumerate(results):
            if (
                result.id in grace.eligible_characteristics
                and result.score is not None
                and result.score < grace.declared_intent_score_floor
            ):
                floored.append(
                    replace(
                        result,
                        score=grace.declared_intent_score_floor,
                        provenance={**result.provenance, "grace_period_pre_score": result.score},
                    )
                )
            else:
                floored.append(result)
        results = floored

    by_dimension: dict[Dimension, list[Optional[int]]] = {d: [] for d in DIMENSION_ORDER}
    for result in results:
        by_dimension[result.id.dimension].append(result.score)

    dimension_scores: dict[str, Optional[Fraction]] = {}
    for dimension in DIMENSION_ORDER:
        scores = by_dimension[dimension]
        if any(score is None for score in scores):
            dimension_scores[dimension.value] = None
        else:
            dimension_scores[dimension.value] = Fraction(sum(scores), len(scores))

    values = tuple(dimension_scores[d.value] for d in DIMENSION_ORDER)
    if any(value is None for value in values):
        overall = None
    else:
        mean = sum(values, Fraction(0)) / len(values)
        overall = fraction_to_decimal(mean, 1)

    critical_failures = tuple(
        result.id
        for result in results
        if result.critical
        and result.score is not None
        and result.score <= calibration.critical_fail_bound
    )

    if critical_failures:
        verdict = Verdict.NOT_SUFFICIENT
    elif any(result.score is None for result in results):
        verdict = Verdict.INDETERMINATE
    elif overall is not None and overall >= calibration.sufficiency_bar:
        verdict = Verdict.SUFFICIENT
    else:
        verdict = Verdict.NOT_SUFFICIENT

    return Assessment(
        characteristics=tuple(results),
        dimension_scores=dimension_scores,
        overall=overall,
        radar=values,
        verdict=verdict,
        critical_failures=critical_failures,
    )


class ScenarioKind(str, Enum):
    VESTING_COMPLETE = "vesting_complete"
    REMOVE_DELEGATE = "remove_delegate"
    SPLIT_WHALE = "split_whale"
    TOGGLE_CAPABILITY = "toggle_capability"
    SET_OPPOSITION = "set_opposition"


TOGGLABLE_FLAGS = ("can_freeze_balances", "can_upgrade_code")


@dataclass(frozen=True)
class ScenarioSpec:
    """One what-if transform of a dataset; parameters depend on the kind."""

    kind: ScenarioKind
    address: Optional[Address] = None
    parts: Optional[int] = None
    flag: Optional[str] = None
    agent_count: Optional[int] = None
    amount: Optional[TokenAmount] = None

    def __post_init__(self) -> None:
        if self.kind in (ScenarioKind.REMOVE_DELEGATE, ScenarioKind.SPLIT_WHALE):
            if self.address is None:
                raise ScenarioError(f"{self.kind.value} requires an address")
        if self.kind is ScenarioKind.SPLIT_WHALE:
            if self.parts is None or self.parts < 2:
                raise ScenarioError("split_whale requires parts >= 2")
        if self.kind is ScenarioKind.TOGGLE_CAPABILITY:
            if self.flag not in TOGGLABLE_FLAGS:
                raise ScenarioError(f"toggle_capability flag must be one of {TOGGLABLE_FLAGS}")
        if self.kind is ScenarioKind.SET_OPPOSITION:
            if self.amount is None:
                raise ScenarioError("set_opposition requires an amount")

    def to_payload(self) -> dict:
        payload: dict = {"kind": self.kind.value}
        if self.address is not None:
            payload["address"] = self.address.value
        if self.parts is not None:
            payload["parts"] = self.parts
        if self.flag is not None:
            payload["flag"] = self.flag
        if self.agent_count is not None:
            payload["agent_count"] = self.agent_count
        if self.amount is not None:
            payload["amount"] = str(self.amount)
        return payload

    @classmethod
    def from_payload(cls, payload: Mapping) -> "ScenarioSpec":
        try:
            kind = ScenarioKind(payload["kind"])
        except (KeyError, ValueError) as exc:
            raise ScenarioError(f"unknown scenario kind: {payload.get('kind')!r}") from exc
        return cls(
            kind=kind,
            address=Address(payload["address"]) if "address" in payload else None,
            parts=payload.get("parts"),
            flag=payload.get("flag"),
            agent_count=payload.get("agent_count"),
            amount=TokenAmount.parse(str(payload["amount"])) if "amount" in payload else None,
        )


def derived_address(seed: str) -> Address:
    digest = hashlib.sha256(seed.encode("utf-8")).hexdigest()
    return Address("0x" + digest[:40])


def _apply_vesting_complete(dataset: GovernanceDataset) -> GovernanceDataset:
    allocation = dataset.allocation
    insider_groups = [g for g in allocation.groups if g.category == "insider"]
    if not insider_groups:
        return dataset

    index = dict(dataset.balance_index())
    escrows = set(dataset.vesting_escrows)
    escrow_total = sum(index[a].balance.atto for a in escrows if a in index)

    holders: dict[str, Address] = {}
    for group in insider_groups:
        holders[group.name] = dataset.insider_holders.get(
            group.name, derived_address(f"vesting:{group.name}")
        )
    held_total = sum(
        index[a].balance.atto for a in set(holders.values()) if a in index
    )

    target_total = sum(g.allocation.atto for g in insider_groups)
    minted = target_total - held_total - escrow_total
    if minted < 0:
        raise ScenarioError("insider holdings already exceed the insider allocation")
    new_circulating = dataset.allocation.circulating.atto + minted
    if new_circulating > allocation.max_supply.atto:
        raise ScenarioError("completing vesting would exceed max supply")

    for escrow in escrows:
        if escrow in index:
            index[escrow] = replace(index[escrow], balance=TokenAmount.ZERO)
    for group in insider_groups:
        holder = holders[group.name]
        existing = index.get(holder)
        index[holder] = BalanceRecord(
            address=holder,
            balance=group.allocation,
            is_contract=existing.is_contract if existing else False,
        )

    return dataset.with_changes(
        balances=tuple(index[a] for a in sorted(index)),
        allocation=replace(allocation, circulating=TokenAmount(new_circulating)),
        insider_holders=holders,
    )


def _apply_remove_delegate(dataset: GovernanceDataset, address: Address) -> GovernanceDataset:
    if address not in dataset.balance_index():
        raise ScenarioError(f"unknown address {address}")
    return dataset.with_changes(
        delegations=tuple(e for e in dataset.delegations if e.delegatee != address)
    )


def _apply_split_whale(dataset: GovernanceDataset, address: Address, parts: int) -> GovernanceDataset:
    index = dict(dataset.balance_index())
    record = index.get(address)
    if record is None:
        raise ScenarioError(f"unknown address {address}")

    base, remainder = divmod(record.balance.atto, parts)
    part_addresses = [derived_address(f"split:{address}:{i}") for i in range(1, parts + 1)]
    part_balances = [base + (1 if i < remainder else 0) for i in range(parts)]

    referenced = {e.delegatee for e in dataset.delegations} | {v.voter for v in dataset.votes}
    del index[address]
    if address in referenced:
        index[address] = replace(record, balance=TokenAmount.ZERO)
    for part_address, balance in zip(part_addresses, part_balances):
        index[part_address] = BalanceRecord(part_address, TokenAmount(balance), record.is_contract)

    # Outbound delegation moves with the balance, packed greedily into the
    # parts' capacities so each new delegator still covers what it delegates.
    capacity = list(part_balances)
    new_edges: list[DelegationEdge] = []
    for edge in dataset.delegations:
        if edge.delegator != address:
            new_edges.append(edge)
            continue
        left = edge.amount.atto
        for i, part_address in enumerate(part_addresses):
            if left == 0:
                break
            take = min(left, capacity[i])
            if take > 0:
                new_edges.append(DelegationEdge(part_address, edge.delegatee, TokenAmount(take)))
                capacity[i] -= take
                left -= take
        if left > 0:
            raise ScenarioError("delegated amount exceeds split balance")

    return dataset.with_changes(
        balances=tuple(index[a] for a in sorted(index)),
        delegations=tuple(new_edges),
    )


def _apply_toggle_capability(
    dataset: GovernanceDataset, flag: str, agent_count: Optional[int]
) -> GovernanceDataset:
    capabilities = dataset.capabilities
    enabled = getattr(capabilities, flag)
    count_field = "freeze_agent_count" if flag == "can_freeze_balances" else "upgrade_agent_count"
    if enabled:
        changes = {flag: False, count_field: None}
    else:
        changes = {flag: True, count_field: agent_count if agent_count is not None else 1}
    return dataset.with_changes(capabilities=replace(capabilities, **changes))


def apply_scenario(dataset: GovernanceDataset, scenario: ScenarioSpec) -> GovernanceDataset:
    """Pure dataset transform; the input dataset is never mutated."""
    if scenario.kind is ScenarioKind.VESTING_COMPLETE:
        return _apply_vesting_complete(dataset)
    if scenario.kind is ScenarioKind.REMOVE_DELEGATE:
        return _apply_remove_delegate(dataset, scenario.address)
    if scenario.kind is ScenarioKind.SPLIT_WHALE:
        return _apply_split_whale(dataset, scenario.address, scenario.parts)
    if scenario.kind is ScenarioKind.TOGGLE_CAPABILITY:
        return _apply_toggle_capability(dataset, scenario.flag, scenario.agent_count)
    if scenario.kind is ScenarioKind.SET_OPPOSITION:
        return dataset.with_changes(opposition=scenario.amount)
    raise ScenarioError(f"unsupported scenario kind {scenario.kind}")


def apply_scenario_stack(
    dataset: GovernanceDataset, scenarios: Iterable[ScenarioSpec]
) -> GovernanceDataset:
    for scenario in scenarios:
        dataset = apply_scenario(dataset, scenario)
    return dataset
