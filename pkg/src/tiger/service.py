"""Local HTTP service exposing one assessment session to scripts and the workbench.

The service and the CLI render through the same functions, so for identical
session state the /api/v1/assessment body is byte-for-byte the assessment.json
written by `tiger assess`. Mutations serialize through a single-writer lock
and atomically swap a fully rendered snapshot that readers consume lock-free.
Every response carries the session audit sequence number in X-Audit-Seq.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .ingest import (
    AssessmentSession,
    BundleError,
    load_dataset,
    load_qualitative_file,
    load_session,
    save_session,
)
from .metrics import (
    MetricError,
    decisiveness,
    delegation_stats,
    effective_voting_power,
    gini,
    governance_nakamoto,
    inflation_split,
    insider_share,
    participation,
    timing_fairness,
    via_power_vector,
    WeightVector,
)
from .model import (
    Address,
    AgentClass,
    CharacteristicId,
    ModelError,
    QualitativeEntry,
    TokenAmount,
    format_rfc3339,
)
from .report import (
    ReportDocument,
    assessment_json_bytes,
    dump_json_bytes,
    jsonable,
    radar_json_bytes,
)
from .scorecard import (
    Assessment,
    CalibrationError,
    QUESTION_TEXT,
    ScenarioError,
    ScenarioSpec,
    load_calibration,
)

__all__ = ["SessionStore", "create_app"]

API_PREFIX = "/api/v1"

ClientError = (ModelError, ScenarioError, CalibrationError, BundleError, MetricError, ValueError, KeyError)


@dataclass(frozen=True)
class Snapshot:
    """One fully rendered view of the session, swapped atomically on mutation."""

    seq: int
    assessment: Assessment
    assessment_bytes: bytes
    radar_bytes: bytes
    report_bytes: bytes
    characteristics_bytes: bytes
    metrics_bytes: bytes
    summary_bytes: bytes
    audit_bytes: bytes


class SessionStore:
    """Single-session state holder with persistence and render cache."""

    def __init__(self, session: AssessmentSession, store_dir: Optional[Path] = None):
        self.session = session
        self.store_dir = store_dir
        self._lock = threading.Lock()
        self._snapshot = self._render()

    @classmethod
    def open(
        cls,
        store_dir: Optional[str] = None,
        dataset_dir: Optional[str] = None,
        calibration_id: str = "paper-2022",
        qualitative_file: Optional[str] = None,
    ) -> "SessionStore":
        store_path = Path(store_dir) if store_dir else None
        session_file = store_path / "session.json" if store_path else None
        if session_file is not None and session_file.exists():
            session = load_session(session_file)
        elif dataset_dir is not None:
            dataset = load_dataset(dataset_dir).dataset
            session = AssessmentSession(
                dataset,
                calibration_id=calibration_id,
                dataset_dir=str(Path(dataset_dir).resolve()),
            )
            if qualitative_file:
                for entry in load_qualitative_file(qualitative_file):
                    session.add_qualitative(entry)
        else:
            raise BundleError("serve needs --dataset or a store with session.json")
        store = cls(session, store_path)
        store._persist()
        return store

    # -- rendering ----------------------------------------------------------

    def _render(self) -> Snapshot:
        session = self.session
        calibration = load_calibration(session.calibration_id)
        assessment = session.assess(calibration)
        dataset = session.effective_dataset()
        profiles = session.profiles(dataset)

        document = ReportDocument(
            assessment=assessment,
            dao_name=dataset.dao_name,
            snapshot_time=dataset.snapshot_time,
            dataset_hash=session.dataset_hash,
            calibration_id=session.calibration_id,
            generated_at=session.generated_at(),
            scenarios=tuple(session.scenarios),
        )

        characteristics_payload = {
            "seq": session.seq,
            "characteristics": [
                {
                    "id": result.id.value,
                    "dimension": result.id.dimension.value,
                    "question": QUESTION_TEXT[result.id],
                    "basis": result.basis,
                    "critical": result.critical,
                    "score": result.score,
                    "indeterminate": result.indeterminate,
                    "metric_values": jsonable(dict(result.metric_values)),
                    "evidence": result.evidence,
                    "provenance": jsonable(dict(result.provenance)),
                }
                for result in assessment.characteristics
            ],
        }

        power = effective_voting_power(dataset)
        contracts = {r.address for r in dataset.balances if r.is_contract}
        agents = [
            {
                "address": profile.address.value,
                "class": profile.agent_class.value,
                "basis": profile.basis,
                "matched_rule": profile.matched_rule,
                "voting_power": str(TokenAmount(power.get(profile.address, 0))),
                "is_contract": profile.address in contracts,
            }
            for profile in profiles
        ]
        stats = delegation_stats(dataset, profiles)
        via_vector = via_power_vector(dataset, profiles)
        holder_vector = WeightVector.from_pairs(
            (r.address.value, r.balance)
            for r in sorted(dataset.balances, key=lambda r: r.address)
            if not r.is_contract and r.balance.atto > 0
        )
        try:
            turnout = participation(dataset)
            turnout_payload = {
                "proposals_total": turnout.proposals_total,
                "avg_addresses_per_proposal": jsonable(turnout.avg_addresses_per_proposal),
                "avg_active_weight": jsonable(turnout.avg_active_weight),
                "float_participation_pct": jsonable(turnout.float_participation_pct),
                "proposals_per_month": jsonable(turnout.proposals_per_month),
                "turnout_by_year": {str(y): jsonable(v) for y, v in turnout.turnout_by_year.items()},
            }
        except MetricError:
            turnout_payload = None
        gov = governance_nakamoto(via_vector, dataset.params.quorum, dataset.opposition)
        timing = timing_fairness(dataset.params)
        split = inflation_split(dataset.allocation)
        try:
            decided = decisiveness(dataset, profiles, 10)
            decisiveness_payload = {
                "k": 10,
                "fraction": jsonable(decided.fraction),
                "decided_proposals": decided.decided_count,
                "majority_proposals": decided.majority_count,
            }
        except MetricError:
            decisiveness_payload = None
        metrics_payload = {
            "seq": session.seq,
            "insider_share_pct": jsonable(insider_share(dataset.allocation)),
            "gini_holder_balances": gini(holder_vector) if len(holder_vector) else None,
            "delegation": {
                "delegated_total": str(stats.delegated_total),
                "delegated_share_pct": jsonable(stats.delegated_share_pct),
                "top_n_coverage": {str(n): jsonable(v) for n, v in stats.top_n_coverage.items()},
                "distinct_via_delegates": stats.distinct_via_delegates,
            },
            "governance_nakamoto": gov if gov is not None else "unreachable",
            "decisiveness": decisiveness_payload,
            "timing": {"total_days": timing.total_days, "pass": timing.passed},
            "inflation": {
                "pct_a_external": jsonable(split.pct_a_external),
                "pct_b_insider": jsonable(split.pct_b_insider),
                "has_inflation": split.has_inflation,
            },
            "participation": turnout_payload,
            "agents": agents,
        }

        summary_payload = {
            "seq": session.seq,
            "dao_name": dataset.dao_name,
            "dao_category": dataset.dao_category,
            "snapshot_time": format_rfc3339(dataset.snapshot_time),
            "dataset_hash": session.dataset_hash,
            "calibration_id": session.calibration_id,
            "counts": {
                "balances": len(dataset.balances),
                "delegations": len(dataset.delegations),
                "proposals": len(dataset.proposals),
                "votes": len(dataset.votes),
                "agent_evidence": len(dataset.agent_evidence),
            },
            "supply": {
                "max": str(dataset.allocation.max_supply),
                "circulating": str(dataset.allocation.circulating),
            },
            "scenarios": [spec.to_payload() for spec in session.scenarios],
            "verdict": assessment.verdict.value,
            "overall": jsonable(assessment.overall),
        }

        audit_payload = {
            "seq": session.seq,
            "events": [event.to_payload() for event in session.events],
        }

        return Snapshot(
            seq=session.seq,
            assessment=assessment,
            assessment_bytes=assessment_json_bytes(
                assessment, session.dataset_hash, session.calibration_id
            ),
            radar_bytes=radar_json_bytes(assessment),
            report_bytes=document.render_bytes(),
            characteristics_bytes=dump_json_bytes(characteristics_payload),
            metrics_bytes=dump_json_bytes(metrics_payload),
            summary_bytes=dump_json_bytes(summary_payload),
            audit_bytes=dump_json_bytes(audit_payload),
        )

    # -- access ---------------------------------------------------------------

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    def _persist(self) -> None:
        if self.store_dir is not None:
            self.store_dir.mkdir(parents=True, exist_ok=True)
            save_session(self.session, self.store_dir / "session.json")

    def mutate(self, action) -> Snapshot:
        """Run one session mutation and republish the rendered snapshot."""
        with self._lock:
            action(self.session)
            snapshot = self._render()
            self._snapshot = snapshot
            self._persist()
            return snapshot


def _response(content: bytes, seq: int, media_type: str = "application/json",
              status_code: int = 200) -> Response:
    return Response(
        content=content,
        status_code=status_code,
        media_type=media_type,
        headers={"X-Audit-Seq": str(seq)},
    )


def _error(store: SessionStore, message: str, code: str = "bad-request") -> Response:
    payload = {"error": {"code": code, "message": message}}
    return _response(dump_json_bytes(payload), store.snapshot.seq, status_code=400)


def create_app(store: SessionStore, ui_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="tiger", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["X-Audit-Seq"],
    )

    @app.get(f"{API_PREFIX}/dataset/summary")
    def dataset_summary() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.summary_bytes, snapshot.seq)

    @app.get(f"{API_PREFIX}/metrics")
    def metrics_view() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.metrics_bytes, snapshot.seq)

    @app.get(f"{API_PREFIX}/assessment")
    def assessment_view() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.assessment_bytes, snapshot.seq)

    @app.get(f"{API_PREFIX}/radar")
    def radar_view() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.radar_bytes, snapshot.seq)

    @app.get(f"{API_PREFIX}/characteristics")
    def characteristics_view() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.characteristics_bytes, snapshot.seq)

    @app.get(f"{API_PREFIX}/characteristics/{{characteristic_id}}")
    def characteristic_view(characteristic_id: str) -> Response:
        snapshot = store.snapshot
        try:
            wanted = CharacteristicId(characteristic_id)
        except ValueError:
            return _error(store, f"unknown characteristic {characteristic_id!r}", "unknown-characteristic")
        result = snapshot.assessment.characteristic(wanted)
        payload = {
            "seq": snapshot.seq,
            "id": result.id.value,
            "dimension": result.id.dimension.value,
            "question": QUESTION_TEXT[result.id],
            "basis": result.basis,
            "critical": result.critical,
            "score": result.score,
            "indeterminate": result.indeterminate,
            "metric_values": jsonable(dict(result.metric_values)),
            "evidence": result.evidence,
            "provenance": jsonable(dict(result.provenance)),
        }
        return _response(dump_json_bytes(payload), snapshot.seq)

    @app.get(f"{API_PREFIX}/report")
    def report_view() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.report_bytes, snapshot.seq, media_type="text/markdown; charset=utf-8")

    @app.get(f"{API_PREFIX}/session/audit")
    def audit_view() -> Response:
        snapshot = store.snapshot
        return _response(snapshot.audit_bytes, snapshot.seq)

    @app.post(f"{API_PREFIX}/qualitative")
    async def post_qualitative(request: Request) -> Response:
        body = await request.json()
        try:
            entry = QualitativeEntry(
                characteristic=CharacteristicId(str(body["characteristic"])),
                score=int(body["score"]),
                evidence=str(body.get("evidence", "")),
                assessor=str(body.get("assessor", "workbench")),
                entered_at=datetime.now(timezone.utc),
            )
            snapshot = store.mutate(lambda session: session.add_qualitative(entry))
        except ClientError as exc:
            return _error(store, _message(exc), "invalid-qualitative")
        return _response(snapshot.summary_bytes, snapshot.seq)

    @app.post(f"{API_PREFIX}/agents/override")
    async def post_override(request: Request) -> Response:
        body = await request.json()
        try:
            address = Address(str(body["address"]))
            agent_class = AgentClass(str(body["class"]))
            snapshot = store.mutate(lambda session: session.set_override(address, agent_class))
        except ClientError as exc:
            return _error(store, _message(exc), "invalid-override")
        return _response(snapshot.summary_bytes, snapshot.seq)

    @app.post(f"{API_PREFIX}/scenario")
    async def post_scenario(request: Request) -> Response:
        body = await request.json()
        try:
            spec = ScenarioSpec.from_payload(body.get("spec", body))
            snapshot = store.mutate(lambda session: session.push_scenario(spec))
        except ClientError as exc:
            return _error(store, _message(exc), "invalid-scenario")
        return _response(snapshot.summary_bytes, snapshot.seq)

    @app.delete(f"{API_PREFIX}/scenario/{{index}}")
    def delete_scenario(index: int) -> Response:
        try:
            snapshot = store.mutate(lambda session: session.remove_scenario(index))
        except ClientError as exc:
            return _error(store, _message(exc), "invalid-scenario-index")
        return _response(snapshot.summary_bytes, snapshot.seq)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _message(exc: Exception) -> str:
    if isinstance(exc, KeyError):
        return f"missing field {exc.args[0]!r}"
    return str(exc)
