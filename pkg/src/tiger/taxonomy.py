"""Agent taxonomy: sort every address into VIA / PIA / UIA.

A VIA is an address with verifiable public identity, a PIA shows a
human-looking activity pattern across DAOs, and everything else is UIA.
Classification consumes pre-extracted evidence features; it never mines
raw chain data itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .model import Address, AgentClass, AgentEvidence, ModelError

__all__ = [
    "AgentClass",
    "AgentEvidence",
    "AgentProfile",
    "TaxonomyConfig",
    "classify",
    "apply_overrides",
]


@dataclass(frozen=True)
class TaxonomyConfig:
    """Thresholds for the presumed-independence (PIA) rule."""

    pia_min_active_fraction: float = 0.5
    pia_min_cross_dao: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.pia_min_active_fraction <= 1.0:
            raise ModelError("pia_min_active_fraction must be within [0, 1]")
        if self.pia_min_cross_dao < 0:
            raise ModelError("pia_min_cross_dao cannot be negative")


@dataclass(frozen=True)
class AgentProfile:
    address: Address
    agent_class: AgentClass
    basis: str  # "manual_override" or "rule"
    matched_rule: str


def _classify_one(evidence: AgentEvidence, config: TaxonomyConfig) -> AgentProfile:
    if evidence.manual_class is not None:
        return AgentProfile(
            evidence.address, evidence.manual_class, "manual_override", "manual_class"
        )
    if evidence.identity_evidence:
        return AgentProfile(evidence.address, AgentClass.VIA, "rule", "public-identity")
    if (
        not evidence.automation_flag
        and evidence.active_days_fraction >= config.pia_min_active_fraction
        and evidence.cross_dao_count >= config.pia_min_cross_dao
    ):
        return AgentProfile(evidence.address, AgentClass.PIA, "rule", "activity-pattern")
    return AgentProfile(evidence.address, AgentClass.UIA, "rule", "default")


def classify(
    evidence: Iterable[AgentEvidence],
    config: TaxonomyConfig = TaxonomyConfig(),
    known_addresses: Iterable[Address] = (),
) -> list[AgentProfile]:
    """Classify every evidenced address, plus any known address without evidence.

    Addresses with no evidence record default to UIA. Output is sorted by
    address so classification is independent of input order.
    """
    by_address: dict[Address, AgentEvidence] = {}
    for record in evidence:
        if record.address in by_address:
            raise ModelError(f"duplicate evidence for address {record.address}")
        by_address[record.address] = record

    profiles = {address: _classify_one(record, config) for address, record in by_address.items()}
    for address in known_addresses:
        if address not in profiles:
            profiles[address] = AgentProfile(address, AgentClass.UIA, "rule", "no-evidence")
    return [profiles[address] for address in sorted(profiles)]


def apply_overrides(
    profiles: Sequence[AgentProfile],
    overrides: Mapping[Address, AgentClass],
) -> list[AgentProfile]:
    """Pointwise replace classes; overridden profiles carry basis=manual_override."""
    known = {profile.address for profile in profiles}
    for address in overrides:
        if address not in known:
            raise ModelError(f"override for unknown address {address}")
    return [
        AgentProfile(p.address, overrides[p.address], "manual_override", "assessor-override")
        if p.address in overrides
        else p
        for p in profiles
    ]
