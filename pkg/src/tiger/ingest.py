"""Dataset bundle I/O, assessment sessions, and the snapshot-provider contract.

A dataset lives on disk as a small directory of CSV/JSON files. Serialization
is canonical (sorted rows, sorted keys, '\\n' newlines, UTF-8, '.' decimal
separator), so a bundle's bytes are a stable content address. Sessions are
append-only event logs over a cached dataset and replay deterministically.
"""

from __future__ import annotations

import csv
import io
import json
import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .model import (
    Address,
    AgentClass,
    AgentEvidence,
    AllocationSchedule,
    BalanceRecord,
    CapabilityFlags,
    DelegationEdge,
    GovernanceDataset,
    GovernanceParams,
    InflationStream,
    ModelError,
    PauseGuardian,
    Proposal,
    ProposalStatus,
    QualitativeEntry,
    CharacteristicId,
    StakeholderGroup,
    TokenAmount,
    Violation,
    VoteRecord,
    VoteSupport,
    format_rfc3339,
    parse_rfc3339,
    validate_dataset,
)
from .scorecard import (
    Assessment,
    CalibrationProfile,
    ScenarioSpec,
    apply_scenario_stack,
    evaluate,
    load_calibration,
)
from .taxonomy import AgentProfile, TaxonomyConfig, apply_overrides, classify

__all__ = [
    "AssessmentSession",
    "AuditEvent",
    "BundleError",
    "DatasetBundle",
    "LoadResult",
    "MockSnapshotProvider",
    "SnapshotProvider",
    "ValidationFailure",
    "builtin_fixture_dir",
    "bundle_files",
    "dataset_hash",
    "load_dataset",
    "load_qualitative_file",
    "load_session",
    "mock_provider",
    "save_dataset",
    "save_session",
]

MANDATORY_FILES = (
    "balances.csv",
    "delegations.csv",
    "proposals.jsonl",
    "votes.csv",
    "allocation.json",
    "params.json",
    "capabilities.json",
    "meta.json",
)
OPTIONAL_FILES = ("agents.csv",)


class BundleError(ValueError):
    """A file-level problem: missing file or malformed content."""

    def __init__(self, message: str, file: str = "", line: Optional[int] = None,
                 column: Optional[str] = None):
        location = file
        if line is not None:
            location += f":{line}"
        if column:
            location += f" ({column})"
        super().__init__(f"{location}: {message}" if location else message)
        self.file = file
        self.line = line
        self.column = column


class ValidationFailure(BundleError):
    """Strict-mode load failure carrying the cross-file violations."""

    def __init__(self, violations: Sequence[Violation]):
        summary = "; ".join(f"{v.rule} at {v.path}" for v in violations[:5])
        if len(violations) > 5:
            summary += f" (+{len(violations) - 5} more)"
        super().__init__(f"dataset failed validation: {summary}")
        self.violations = tuple(violations)


def _dump_json(payload) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode("utf-8")


def _parse_row_value(parser, raw, file: str, line: int, column: str):
    try:
        return parser(raw)
    except (ModelError, ValueError) as exc:
        raise BundleError(str(exc), file, line, column) from exc


def _parse_bool(raw: str) -> bool:
    if raw in ("0", "1"):
        return raw == "1"
    raise ModelError(f"expected 0 or 1, got {raw!r}")


def _csv_rows(text: str, file: str, expected_header: Sequence[str]):
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise BundleError("empty file, expected header", file, 1) from None
    if header != list(expected_header):
        raise BundleError(
            f"bad header {header!r}, expected {list(expected_header)!r}", file, 1
        )
    for line_number, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(expected_header):
            raise BundleError(
                f"expected {len(expected_header)} fields, got {len(row)}", file, line_number
            )
        yield line_number, row


def _read_json(directory: Path, name: str) -> dict:
    try:
        text = (directory / name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BundleError("missing file", name) from None
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"invalid JSON: {exc.msg}", name, exc.lineno) from exc
    if not isinstance(payload, dict):
        raise BundleError("expected a JSON object", name)
    return payload


def _read_text(directory: Path, name: str) -> str:
    try:
        return (directory / name).read_text(encoding="utf-8")
    except FileNotFoundError:
        raise BundleError("missing file", name) from None


def _opt(payload: dict, key: str, parser, file: str):
    value = payload.get(key)
    if value is None:
        return None
    return _parse_row_value(parser, value, file, None, key)


def _req(payload: dict, key: str, parser, file: str):
    if key not in payload or payload[key] is None:
        raise BundleError(f"missing key {key!r}", file)
    return _parse_row_value(parser, payload[key], file, None, key)


def _load_balances(directory: Path) -> tuple[BalanceRecord, ...]:
    file = "balances.csv"
    records = []
    for line, row in _csv_rows(_read_text(directory, file), file, ("address", "balance", "is_contract")):
        records.append(
            BalanceRecord(
                address=_parse_row_value(Address, row[0], file, line, "address"),
                balance=_parse_row_value(TokenAmount.parse, row[1], file, line, "balance"),
                is_contract=_parse_row_value(_parse_bool, row[2], file, line, "is_contract"),
            )
        )
    return tuple(records)


def _load_delegations(directory: Path) -> tuple[DelegationEdge, ...]:
    file = "delegations.csv"
    edges = []
    for line, row in _csv_rows(_read_text(directory, file), file, ("delegator", "delegatee", "amount")):
        edges.append(
            DelegationEdge(
                delegator=_parse_row_value(Address, row[0], file, line, "delegator"),
                delegatee=_parse_row_value(Address, row[1], file, line, "delegatee"),
                amount=_parse_row_value(TokenAmount.parse, row[2], file, line, "amount"),
            )
        )
    return tuple(edges)


def _load_votes(directory: Path) -> tuple[VoteRecord, ...]:
    file = "votes.csv"
    votes = []
    for line, row in _csv_rows(
        _read_text(directory, file), file, ("proposal_id", "voter", "support", "weight")
    ):
        votes.append(
            VoteRecord(
                proposal_id=_parse_row_value(int, row[0], file, line, "proposal_id"),
                voter=_parse_row_value(Address, row[1], file, line, "voter"),
                support=_parse_row_value(VoteSupport, row[2], file, line, "support"),
                weight=_parse_row_value(TokenAmount.parse, row[3], file, line, "weight"),
            )
        )
    return tuple(votes)


def _load_proposals(directory: Path) -> tuple[Proposal, ...]:
    file = "proposals.jsonl"
    proposals = []
    for line_number, line in enumerate(_read_text(directory, file).splitlines(), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise BundleError(f"invalid JSON: {exc.msg}", file, line_number) from exc
        proposals.append(
            Proposal(
                id=_parse_row_value(int, payload.get("id"), file, line_number, "id"),
                submitted_at=_parse_row_value(
                    parse_rfc3339, payload.get("submitted_at"), file, line_number, "submitted_at"
                ),
                status=_parse_row_value(
                    ProposalStatus, payload.get("status"), file, line_number, "status"
                ),
                is_general=bool(payload.get("is_general", True)),
            )
        )
    return tuple(proposals)


def _load_agents(directory: Path) -> tuple[AgentEvidence, ...]:
    file = "agents.csv"
    if not (directory / file).exists():
        return ()
    rows = []
    header = (
        "address",
        "identity_evidence",
        "active_days_fraction",
        "automation_flag",
        "cross_dao_count",
        "manual_class",
    )
    for line, row in _csv_rows(_read_text(directory, file), file, header):
        rows.append(
            AgentEvidence(
                address=_parse_row_value(Address, row[0], file, line, "address"),
                identity_evidence=_parse_row_value(_parse_bool, row[1], file, line, "identity_evidence"),
                active_days_fraction=_parse_row_value(float, row[2], file, line, "active_days_fraction"),
                automation_flag=_parse_row_value(_parse_bool, row[3], file, line, "automation_flag"),
                cross_dao_count=_parse_row_value(int, row[4], file, line, "cross_dao_count"),
                manual_class=(
                    _parse_row_value(AgentClass, row[5], file, line, "manual_class")
                    if row[5]
                    else None
                ),
            )
        )
    return tuple(rows)


def _load_allocation(directory: Path) -> AllocationSchedule:
    file = "allocation.json"
    payload = _read_json(directory, file)
    groups = []
    for entry in payload.get("groups", ()):
        groups.append(
            StakeholderGroup(
                name=_req(entry, "name", str, file),
                category=_req(entry, "category", str, file),
                allocation=_req(entry, "allocation", TokenAmount.parse, file),
                pct_of_max_supply=_req(entry, "pct_of_max_supply", Decimal, file),
            )
        )
    streams = []
    for entry in payload.get("inflation_streams", ()):
        streams.append(
            InflationStream(
                label=_req(entry, "label", str, file),
                daily_amount=_req(entry, "daily_amount", TokenAmount.parse, file),
                recipient_class=_req(entry, "recipient_class", str, file),
            )
        )
    return AllocationSchedule(
        max_supply=_req(payload, "max_supply", TokenAmount.parse, file),
        circulating=_req(payload, "circulating", TokenAmount.parse, file),
        groups=tuple(groups),
        vesting_end=_opt(payload, "vesting_end", parse_rfc3339, file),
        daily_inflation=_opt(payload, "daily_inflation", TokenAmount.parse, file) or TokenAmount.ZERO,
        inflation_streams=tuple(streams),
    )


def _load_params(directory: Path) -> GovernanceParams:
    file = "params.json"
    payload = _read_json(directory, file)
    return GovernanceParams(
        proposal_threshold=_req(payload, "proposal_threshold", TokenAmount.parse, file),
        autonomous_proposal_bond=_req(payload, "autonomous_proposal_bond", TokenAmount.parse, file),
        quorum=_req(payload, "quorum", TokenAmount.parse, file),
        review_period_days=_req(payload, "review_period_days", int, file),
        voting_period_days=_req(payload, "voting_period_days", int, file),
        queue_period_days=_req(payload, "queue_period_days", int, file),
    )


def _load_capabilities(directory: Path) -> CapabilityFlags:
    file = "capabilities.json"
    payload = _read_json(directory, file)
    guardian_payload = payload.get("pause_guardian")
    guardian = None
    if guardian_payload is not None:
        guardian = PauseGuardian(
            holder_count=_req(guardian_payload, "holder_count", int, file),
            pausable_functions=tuple(guardian_payload.get("pausable_functions", ())),
            is_full_shutdown=bool(guardian_payload.get("is_full_shutdown", False)),
            community_controlled=bool(guardian_payload.get("community_controlled", False)),
        )
    return CapabilityFlags(
        can_freeze_balances=bool(payload.get("can_freeze_balances", False)),
        freeze_agent_count=payload.get("freeze_agent_count"),
        can_upgrade_code=bool(payload.get("can_upgrade_code", False)),
        upgrade_agent_count=payload.get("upgrade_agent_count"),
        pause_guardian=guardian,
    )


@dataclass(frozen=True)
class LoadResult:
    dataset: GovernanceDataset
    warnings: tuple[Violation, ...]


def load_dataset(path: str | Path, strict: bool = False) -> LoadResult:
    """Load a bundle directory; file-level errors raise, cross-file rules warn.

    With strict=True a dataset with any cross-file violation is rejected.
    """
    directory = Path(path)
    if not directory.is_dir():
        raise BundleError(f"dataset directory not found: {directory}")
    for name in MANDATORY_FILES:
        if not (directory / name).exists():
            raise BundleError("missing file", name)

    meta = _read_json(directory, "meta.json")
    insider_holders = {
        name: _parse_row_value(Address, value, "meta.json", None, f"insider_holders.{name}")
        for name, value in (meta.get("insider_holders") or {}).items()
    }
    dataset = GovernanceDataset(
        snapshot_time=_req(meta, "snapshot_time", parse_rfc3339, "meta.json"),
        dao_name=_req(meta, "dao_name", str, "meta.json"),
        dao_category=meta.get("dao_category"),
        dao_launched_at=_opt(meta, "dao_launched_at", parse_rfc3339, "meta.json"),
        insider_holders=insider_holders,
        vesting_escrows=tuple(
            _parse_row_value(Address, value, "meta.json", None, "vesting_escrows")
            for value in (meta.get("vesting_escrows") or ())
        ),
        opposition=_opt(meta, "opposition", TokenAmount.parse, "meta.json"),
        balances=_load_balances(directory),
        delegations=_load_delegations(directory),
        proposals=_load_proposals(directory),
        votes=_load_votes(directory),
        allocation=_load_allocation(directory),
        params=_load_params(directory),
        capabilities=_load_capabilities(directory),
        agent_evidence=_load_agents(directory),
    )
    warnings = tuple(validate_dataset(dataset))
    if strict and warnings:
        raise ValidationFailure(warnings)
    return LoadResult(dataset=dataset, warnings=warnings)


def _amount_or_none(amount: Optional[TokenAmount]) -> Optional[str]:
    return str(amount) if amount is not None else None


def _time_or_none(value: Optional[datetime]) -> Optional[str]:
    return format_rfc3339(value) if value is not None else None


def bundle_files(dataset: GovernanceDataset) -> dict[str, bytes]:
    """Canonical byte content for every bundle file of a dataset."""

    def csv_bytes(header: Sequence[str], rows: Iterable[Sequence[str]]) -> bytes:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return out.getvalue().encode("utf-8")

    balances = csv_bytes(
        ("address", "balance", "is_contract"),
        (
            (str(r.address), str(r.balance), "1" if r.is_contract else "0")
            for r in sorted(dataset.balances, key=lambda r: r.address)
        ),
    )
    delegations = csv_bytes(
        ("delegator", "delegatee", "amount"),
        (
            (str(e.delegator), str(e.delegatee), str(e.amount))
            for e in sorted(dataset.delegations, key=lambda e: (e.delegator, e.delegatee))
        ),
    )
    votes = csv_bytes(
        ("proposal_id", "voter", "support", "weight"),
        (
            (str(v.proposal_id), str(v.voter), v.support.value, str(v.weight))
            for v in sorted(dataset.votes, key=lambda v: (v.proposal_id, v.voter))
        ),
    )
    proposals = (
        "\n".join(
            json.dumps(
                {
                    "id": p.id,
                    "submitted_at": format_rfc3339(p.submitted_at),
                    "status": p.status.value,
                    "is_general": p.is_general,
                },
                sort_keys=True,
                ensure_ascii=False,
            )
            for p in sorted(dataset.proposals, key=lambda p: p.id)
        )
        + "\n"
    ).encode("utf-8")
    agents = csv_bytes(
        (
            "address",
            "identity_evidence",
            "active_days_fraction",
            "automation_flag",
            "cross_dao_count",
            "manual_class",
        ),
        (
            (
                str(a.address),
                "1" if a.identity_evidence else "0",
                repr(a.active_days_fraction),
                "1" if a.automation_flag else "0",
                str(a.cross_dao_count),
                a.manual_class.value if a.manual_class else "",
            )
            for a in sorted(dataset.agent_evidence, key=lambda a: a.address)
        ),
    )

    allocation = dataset.allocation
    allocation_json = _dump_json(
        {
            "max_supply": str(allocation.max_supply),
            "circulating": str(allocation.circulating),
            "groups": [
                {
                    "name": g.name,
                    "category": g.category,
                    "allocation": str(g.allocation),
                    "pct_of_max_supply": str(g.pct_of_max_supply),
                }
                for g in allocation.groups
            ],
            "vesting_end": _time_or_none(allocation.vesting_end),
            "daily_inflation": str(allocation.daily_inflation),
            "inflation_streams": [
                {
                    "label": s.label,
                    "daily_amount": str(s.daily_amount),
                    "recipient_class": s.recipient_class,
                }
                for s in allocation.inflation_streams
            ],
        }
    )
    params_json = _dump_json(
        {
            "proposal_threshold": str(dataset.params.proposal_threshold),
            "autonomous_proposal_bond": str(dataset.params.autonomous_proposal_bond),
            "quorum": str(dataset.params.quorum),
            "review_period_days": dataset.params.review_period_days,
            "voting_period_days": dataset.params.voting_period_days,
            "queue_period_days": dataset.params.queue_period_days,
        }
    )
    guardian = dataset.capabilities.pause_guardian
    capabilities_json = _dump_json(
        {
            "can_freeze_balances": dataset.capabilities.can_freeze_balances,
            "freeze_agent_count": dataset.capabilities.freeze_agent_count,
            "can_upgrade_code": dataset.capabilities.can_upgrade_code,
            "upgrade_agent_count": dataset.capabilities.upgrade_agent_count,
            "pause_guardian": (
                {
                    "holder_count": guardian.holder_count,
                    "pausable_functions": list(guardian.pausable_functions),
                    "is_full_shutdown": guardian.is_full_shutdown,
                    "community_controlled": guardian.community_controlled,
                }
                if guardian
                else None
            ),
        }
    )
    meta_json = _dump_json(
        {
            "snapshot_time": format_rfc3339(dataset.snapshot_time),
            "dao_name": dataset.dao_name,
            "dao_category": dataset.dao_category,
            "dao_launched_at": _time_or_none(dataset.dao_launched_at),
            "insider_holders": {
                name: str(address) for name, address in sorted(dataset.insider_holders.items())
            },
            "vesting_escrows": [str(a) for a in dataset.vesting_escrows],
            "opposition": _amount_or_none(dataset.opposition),
        }
    )

    return {
        "balances.csv": balances,
        "delegations.csv": delegations,
        "votes.csv": votes,
        "proposals.jsonl": proposals,
        "agents.csv": agents,
        "allocation.json": allocation_json,
        "params.json": params_json,
        "capabilities.json": capabilities_json,
        "meta.json": meta_json,
    }


def save_dataset(dataset: GovernanceDataset, path: str | Path) -> str:
    """Write the canonical bundle; returns the dataset content hash."""
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    files = bundle_files(dataset)
    for name, content in files.items():
        (directory / name).write_bytes(content)
    return _hash_files(files)


def _hash_files(files: Mapping[str, bytes]) -> str:
    digest = hashlib.sha256()
    for name in sorted(files):
        digest.update(name.encode("utf-8"))
        digest.update(b"\0")
        digest.update(files[name])
        digest.update(b"\0")
    return digest.hexdigest()


def dataset_hash(dataset: GovernanceDataset) -> str:
    return _hash_files(bundle_files(dataset))


@dataclass(frozen=True)
class DatasetBundle:
    """An in-memory file set mirroring one bundle directory."""

    files: Mapping[str, bytes]

    @classmethod
    def from_dir(cls, path: str | Path) -> "DatasetBundle":
        directory = Path(path)
        files = {}
        for name in MANDATORY_FILES + OPTIONAL_FILES:
            source = directory / name
            if source.exists():
                files[name] = source.read_bytes()
        return cls(files=dict(files))

    def write_to(self, path: str | Path) -> Path:
        directory = Path(path)
        directory.mkdir(parents=True, exist_ok=True)
        for name, content in self.files.items():
            (directory / name).write_bytes(content)
        return directory

    @property
    def content_hash(self) -> str:
        return _hash_files(self.files)


class SnapshotProvider(ABC):
    """Read-only source of governance snapshots for a (dao id, time) pair.

    fetch must be idempotent: the same request always yields the same bundle.
    """

    @abstractmethod
    def capabilities(self) -> frozenset[str]:
        """Table names this provider can produce."""

    @abstractmethod
    def fetch(self, dao_id: str, at: Optional[datetime] = None) -> DatasetBundle:
        """Produce the bundle for the DAO at the requested time."""


class MockSnapshotProvider(SnapshotProvider):
    def __init__(self, bundle: DatasetBundle):
        self._bundle = bundle

    def capabilities(self) -> frozenset[str]:
        return frozenset(self._bundle.files)

    def fetch(self, dao_id: str, at: Optional[datetime] = None) -> DatasetBundle:
        return DatasetBundle(files=dict(self._bundle.files))


def mock_provider(fixture: DatasetBundle) -> SnapshotProvider:
    return MockSnapshotProvider(fixture)


def builtin_fixture_dir(name: str = "compound-2022") -> Path:
    from importlib import resources

    path = Path(str(resources.files("tiger").joinpath(f"fixtures/{name}")))
    if not path.is_dir():
        raise BundleError(f"unknown builtin fixture {name!r}")
    return path


def load_qualitative_file(path: str | Path) -> list[QualitativeEntry]:
    """Read assessor judgments from a JSON document: {"entries": [...]}."""
    file = str(path)
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BundleError("missing file", file) from None
    except json.JSONDecodeError as exc:
        raise BundleError(f"invalid JSON: {exc.msg}", file, exc.lineno) from exc
    entries = []
    for record in payload.get("entries", ()):
        entries.append(
            QualitativeEntry(
                characteristic=_req(record, "characteristic", CharacteristicId, file),
                score=_req(record, "score", int, file),
                evidence=record.get("evidence", ""),
                assessor=record.get("assessor", "unknown"),
                entered_at=_req(record, "entered_at", parse_rfc3339, file),
            )
        )
    return entries


@dataclass(frozen=True)
class AuditEvent:
    seq: int
    at: datetime
    kind: str
    payload: Mapping[str, object]

    def to_payload(self) -> dict:
        return {
            "seq": self.seq,
            "at": format_rfc3339(self.at),
            "kind": self.kind,
            "payload": dict(self.payload),
        }

    @classmethod
    def from_payload(cls, payload: Mapping) -> "AuditEvent":
        return cls(
            seq=int(payload["seq"]),
            at=parse_rfc3339(payload["at"]),
            kind=str(payload["kind"]),
            payload=dict(payload["payload"]),
        )


class AssessmentSession:
    """Mutable assessor workspace: dataset + append-only audit log.

    Replaying the audit log over the referenced dataset always reproduces the
    same derived state, hence the same Assessment. Mutations are single-writer;
    the caller serializes concurrent access.
    """

    def __init__(
        self,
        dataset: GovernanceDataset,
        calibration_id: str = "paper-2022",
        dataset_dir: Optional[str] = None,
        events: Sequence[AuditEvent] = (),
    ):
        self.dataset = dataset
        self.dataset_hash = dataset_hash(dataset)
        self.dataset_dir = dataset_dir
        self.calibration_id = calibration_id
        self.events: list[AuditEvent] = []
        self.qualitative: list[QualitativeEntry] = []
        self.overrides: dict[Address, AgentClass] = {}
        self.scenarios: list[ScenarioSpec] = []
        for event in events:
            self._fold(event)
            self.events.append(event)

    # -- event application ------------------------------------------------

    def _fold(self, event: AuditEvent) -> None:
        payload = event.payload
        if event.kind == "qualitative":
            self.qualitative.append(
                QualitativeEntry(
                    characteristic=CharacteristicId(payload["characteristic"]),
                    score=int(payload["score"]),
                    evidence=str(payload.get("evidence", "")),
                    assessor=str(payload.get("assessor", "unknown")),
                    entered_at=parse_rfc3339(payload["entered_at"]),
                )
            )
        elif event.kind == "override":
            self.overrides[Address(payload["address"])] = AgentClass(payload["class"])
        elif event.kind == "scenario_push":
            self.scenarios.append(ScenarioSpec.from_payload(payload["spec"]))
        elif event.kind == "scenario_remove":
            index = int(payload["index"])
            if not 0 <= index < len(self.scenarios):
                raise ModelError(f"scenario index {index} out of range")
            del self.scenarios[index]
        elif event.kind == "calibration":
            self.calibration_id = str(payload["id"])
        else:
            raise ModelError(f"unknown audit event kind {event.kind!r}")

    def _append(self, kind: str, payload: dict, at: Optional[datetime] = None) -> AuditEvent:
        event = AuditEvent(
            seq=len(self.events),
            at=at if at is not None else datetime.now(timezone.utc),
            kind=kind,
            payload=payload,
        )
        self._fold(event)
        self.events.append(event)
        return event

    @property
    def seq(self) -> int:
        return len(self.events)

    # -- mutations ---------------------------------------------------------

    def add_qualitative(self, entry: QualitativeEntry) -> AuditEvent:
        return self._append(
            "qualitative",
            {
                "characteristic": entry.characteristic.value,
                "score": entry.score,
                "evidence": entry.evidence,
                "assessor": entry.assessor,
                "entered_at": format_rfc3339(entry.entered_at),
            },
            at=entry.entered_at,
        )

    def set_override(self, address: Address, agent_class: AgentClass) -> AuditEvent:
        if address not in self.dataset.balance_index():
            raise ModelError(f"override for unknown address {address}")
        return self._append("override", {"address": address.value, "class": agent_class.value})

    def push_scenario(self, spec: ScenarioSpec) -> AuditEvent:
        apply_scenario_stack(self.dataset, self.scenarios + [spec])  # reject invalid specs now
        return self._append("scenario_push", {"spec": spec.to_payload()})

    def remove_scenario(self, index: int) -> AuditEvent:
        if not 0 <= index < len(self.scenarios):
            raise ModelError(f"scenario index {index} out of range")
        return self._append("scenario_remove", {"index": index})

    def set_calibration(self, calibration_id: str) -> AuditEvent:
        load_calibration(calibration_id)  # reject unknown ids now
        return self._append("calibration", {"id": calibration_id})

    # -- evaluation ---------------------------------------------------------

    def effective_dataset(self) -> GovernanceDataset:
        return apply_scenario_stack(self.dataset, self.scenarios)

    def profiles(self, dataset: Optional[GovernanceDataset] = None) -> list[AgentProfile]:
        target = dataset if dataset is not None else self.effective_dataset()
        base = classify(
            target.agent_evidence,
            TaxonomyConfig(),
            known_addresses=[record.address for record in target.balances],
        )
        known = {p.address for p in base}
        # Scenario transforms may drop overridden addresses; stale overrides
        # are ignored rather than invalidating the whole session.
        live = {a: c for a, c in self.overrides.items() if a in known}
        return apply_overrides(base, live)

    def assess(self, calibration: Optional[CalibrationProfile] = None) -> Assessment:
        profile = calibration if calibration is not None else load_calibration(self.calibration_id)
        dataset = self.effective_dataset()
        return evaluate(dataset, self.profiles(dataset), self.qualitative, profile)

    def generated_at(self) -> datetime:
        if self.events:
            return max(event.at for event in self.events)
        return self.dataset.snapshot_time

    # -- persistence ---------------------------------------------------------

    def to_payload(self) -> dict:
        return {
            "version": 1,
            "dataset_dir": self.dataset_dir,
            "dataset_hash": self.dataset_hash,
            "calibration_id": self.calibration_id,
            "events": [event.to_payload() for event in self.events],
        }


def session_bytes(session: AssessmentSession) -> bytes:
    return _dump_json(session.to_payload())


def save_session(session: AssessmentSession, path: str | Path) -> str:
    """Persist the session; returns the content hash of the written bytes."""
    content = session_bytes(session)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(content)
    return hashlib.sha256(content).hexdigest()


def session_hash(session: AssessmentSession) -> str:
    return hashlib.sha256(session_bytes(session)).hexdigest()


def load_session(path: str | Path, dataset_dir: Optional[str | Path] = None) -> AssessmentSession:
    """Reload a persisted session, re-reading and verifying its dataset."""
    file = str(path)
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise BundleError("missing file", file) from None
    except json.JSONDecodeError as exc:
        raise BundleError(f"invalid JSON: {exc.msg}", file, exc.lineno) from exc

    resolved = dataset_dir if dataset_dir is not None else payload.get("dataset_dir")
    if resolved is None:
        raise BundleError("session does not reference a dataset directory", file)
    directory = Path(resolved)
    if not directory.is_absolute():
        directory = (Path(path).parent / directory).resolve()
    dataset = load_dataset(directory).dataset
    session = AssessmentSession(
        dataset=dataset,
        calibration_id=payload.get("calibration_id", "paper-2022"),
        dataset_dir=str(payload.get("dataset_dir") or resolved),
        events=[AuditEvent.from_payload(e) for e in payload.get("events", ())],
    )
    expected = payload.get("dataset_hash")
    if expected and expected != session.dataset_hash:
        raise BundleError(
            f"dataset content hash mismatch: session expects {expected}, "
            f"directory has {session.dataset_hash}",
            file,
        )
    return session
