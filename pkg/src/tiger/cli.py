"""Command-line interface: assess, metrics, whatif, classify, serve.

stdout carries exactly the declared JSON or document; every diagnostic goes
to stderr. Exit codes are a stable contract: 0 sufficient/success, 1 input
error, 2 usage error, 3 not sufficient, 4 indeterminate.
"""

from __future__ import annotations

import argparse
import sys
from datetime import datetime, timezone
from decimal import Decimal
from pathlib import Path
from typing import Optional, Sequence

from . import metrics as m
from .ingest import (
    AssessmentSession,
    BundleError,
    LoadResult,
    load_dataset,
    load_qualitative_file,
    load_session,
    save_session,
)
from .model import GovernanceDataset, ModelError, TokenAmount
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
    ScenarioError,
    ScenarioSpec,
    load_calibration,
    Verdict,
)
from .taxonomy import TaxonomyConfig, classify

EXIT_OK = 0
EXIT_INPUT_ERROR = 1
EXIT_USAGE = 2
EXIT_NOT_SUFFICIENT = 3
EXIT_INDETERMINATE = 4

VERDICT_EXIT_CODES = {
    Verdict.SUFFICIENT: EXIT_OK,
    Verdict.NOT_SUFFICIENT: EXIT_NOT_SUFFICIENT,
    Verdict.INDETERMINATE: EXIT_INDETERMINATE,
}

METRIC_NAMES = (
    "gini",
    "nakamoto",
    "governance-nakamoto",
    "insider-share",
    "group-differentiation",
    "participation",
    "delegation-stats",
    "decisiveness",
    "inflation-split",
    "timing-fairness",
)

InputError = (BundleError, ModelError, CalibrationError, ScenarioError, m.MetricError, OSError)


def _emit(payload: bytes) -> None:
    sys.stdout.buffer.write(payload)
    sys.stdout.buffer.flush()


def _year_window(year: Optional[int]):
    if year is None:
        return None
    return (
        datetime(year, 1, 1, tzinfo=timezone.utc),
        datetime(year + 1, 1, 1, tzinfo=timezone.utc),
    )


def _load(dataset_dir: str, strict: bool = False) -> LoadResult:
    result = load_dataset(dataset_dir, strict=strict)
    for violation in result.warnings:
        print(f"warning: {violation.rule} at {violation.path}: {violation.message}", file=sys.stderr)
    return result


def _session_from_args(args) -> AssessmentSession:
    if args.session:
        return load_session(args.session)
    if args.dataset:
        result = _load(args.dataset)
        return AssessmentSession(
            result.dataset,
            calibration_id=args.calibration,
            dataset_dir=str(Path(args.dataset).resolve()),
        )
    raise BundleError("either --session or --dataset is required")


def parse_scenario_flag(text: str) -> ScenarioSpec:
    """Parse 'kind[:param[:param]]' scenario flags used by whatif."""
    parts = text.split(":")
    kind, params = parts[0], parts[1:]
    payload: dict = {"kind": kind}
    if kind in ("remove_delegate", "split_whale"):
        if not params:
            raise ScenarioError(f"{kind} requires an address parameter")
        payload["address"] = params[0]
        if kind == "split_whale":
            if len(params) < 2:
                raise ScenarioError("split_whale requires parts, e.g. split_whale:0x..:4")
            payload["parts"] = int(params[1])
    elif kind == "toggle_capability":
        if not params:
            raise ScenarioError("toggle_capability requires a flag name")
        payload["flag"] = params[0]
        if len(params) > 1:
            payload["agent_count"] = int(params[1])
    elif kind == "set_opposition":
        if not params:
            raise ScenarioError("set_opposition requires an amount")
        payload["amount"] = params[0]
    return ScenarioSpec.from_payload(payload)


def cmd_assess(args) -> int:
    result = _load(args.dataset, strict=args.strict)
    session = AssessmentSession(
        result.dataset,
        calibration_id=args.calibration,
        dataset_dir=str(Path(args.dataset).resolve()),
    )
    if args.qualitative:
        for entry in load_qualitative_file(args.qualitative):
            session.add_qualitative(entry)
    calibration = load_calibration(args.calibration)
    assessment = session.assess(calibration)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "assessment.json").write_bytes(
        assessment_json_bytes(assessment, session.dataset_hash, args.calibration)
    )
    (out_dir / "radar.json").write_bytes(radar_json_bytes(assessment))
    document = ReportDocument(
        assessment=assessment,
        dao_name=session.dataset.dao_name,
        snapshot_time=session.dataset.snapshot_time,
        dataset_hash=session.dataset_hash,
        calibration_id=args.calibration,
        generated_at=session.generated_at(),
        scenarios=tuple(session.scenarios),
    )
    (out_dir / "report.md").write_bytes(document.render_bytes())

    overall = "indeterminate" if assessment.overall is None else str(assessment.overall)
    print(
        f"verdict: {assessment.verdict.value} (overall {overall}); wrote {out_dir}/",
        file=sys.stderr,
    )
    return VERDICT_EXIT_CODES[assessment.verdict]


def _weights_from_file(path: str) -> m.WeightVector:
    pairs = []
    text = Path(path).read_text(encoding="utf-8")
    for index, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "," in line:
            owner, _, weight = line.partition(",")
            if index == 1 and weight.strip().lower() == "weight":
                continue
            pairs.append((owner.strip(), TokenAmount.parse(weight.strip())))
        else:
            pairs.append((f"line{index}", TokenAmount.parse(line)))
    if not pairs:
        raise BundleError("weights file holds no weights", str(path))
    return m.WeightVector.from_pairs(pairs)


def _holder_weights(dataset: GovernanceDataset) -> m.WeightVector:
    return m.WeightVector.from_pairs(
        (record.address.value, record.balance)
        for record in sorted(dataset.balances, key=lambda r: r.address)
        if not record.is_contract and record.balance.atto > 0
    )


def cmd_metrics(args) -> int:
    dataset = None
    profiles = None
    if args.dataset:
        dataset = _load(args.dataset).dataset
        profiles = classify(
            dataset.agent_evidence,
            TaxonomyConfig(),
            known_addresses=[r.address for r in dataset.balances],
        )

    def need_dataset() -> GovernanceDataset:
        if dataset is None:
            raise BundleError(f"metric {args.name!r} requires --dataset")
        return dataset

    def weights() -> m.WeightVector:
        if args.weights:
            return _weights_from_file(args.weights)
        return _holder_weights(need_dataset())

    name = args.name
    if name == "gini":
        vector = weights()
        payload = {"metric": name, "holders": len(vector), "value": m.gini(vector)}
    elif name == "nakamoto":
        vector = weights()
        value = m.nakamoto(vector, Decimal(args.threshold), strict=not args.no_strict)
        payload = {
            "metric": name,
            "holders": len(vector),
            "threshold": args.threshold,
            "strict": not args.no_strict,
            "value": value,
        }
    elif name == "governance-nakamoto":
        ds = need_dataset()
        vector = m.via_power_vector(ds, profiles)
        opposition = TokenAmount.parse(args.opposition) if args.opposition else ds.opposition
        value = m.governance_nakamoto(vector, ds.params.quorum, opposition)
        payload = {
            "metric": name,
            "quorum": str(ds.params.quorum),
            "opposition": str(opposition) if opposition else None,
            "via_count": len(vector),
            "value": value if value is not None else "unreachable",
        }
    elif name == "insider-share":
        payload = {"metric": name, "value": jsonable(m.insider_share(need_dataset().allocation))}
    elif name == "group-differentiation":
        breakdown = m.group_differentiation(need_dataset().allocation)
        payload = {
            "metric": name,
            "groups": {name_: jsonable(pct) for name_, pct in breakdown.shares},
            "largest_share_pct": jsonable(breakdown.largest_share_pct),
            "largest_groups": list(breakdown.largest_groups),
        }
    elif name == "participation":
        stats = m.participation(need_dataset(), _year_window(args.year))
        payload = {
            "metric": name,
            "year": args.year,
            "proposals_total": stats.proposals_total,
            "avg_addresses_per_proposal": jsonable(stats.avg_addresses_per_proposal),
            "avg_active_weight": jsonable(stats.avg_active_weight),
            "float_participation_pct": jsonable(stats.float_participation_pct),
            "proposals_per_month": jsonable(stats.proposals_per_month),
            "turnout_by_year": {str(y): jsonable(v) for y, v in stats.turnout_by_year.items()},
        }
    elif name == "delegation-stats":
        stats = m.delegation_stats(need_dataset(), profiles)
        payload = {
            "metric": name,
            "delegated_total": str(stats.delegated_total),
            "delegated_share_pct": jsonable(stats.delegated_share_pct),
            "top_n_coverage": {str(n): jsonable(v) for n, v in stats.top_n_coverage.items()},
            "distinct_via_delegates": stats.distinct_via_delegates,
        }
    elif name == "decisiveness":
        result = m.decisiveness(need_dataset(), profiles, args.k, _year_window(args.year))
        payload = {
            "metric": name,
            "k": args.k,
            "year": args.year,
            "decided_proposals": result.decided_count,
            "majority_proposals": result.majority_count,
            "value": jsonable(result.fraction),
        }
    elif name == "inflation-split":
        split = m.inflation_split(need_dataset().allocation)
        payload = {
            "metric": name,
            "pct_a_external": jsonable(split.pct_a_external),
            "pct_b_insider": jsonable(split.pct_b_insider),
            "has_inflation": split.has_inflation,
        }
    elif name == "timing-fairness":
        timing = m.timing_fairness(need_dataset().params, args.min_days)
        payload = {
            "metric": name,
            "total_days": timing.total_days,
            "min_total_days": timing.min_total_days,
            "pass": timing.passed,
        }
    else:  # unreachable behind argparse choices
        raise ModelError(f"unknown metric {name!r}")

    _emit(dump_json_bytes(payload))
    return EXIT_OK


def cmd_classify(args) -> int:
    dataset = _load(args.dataset).dataset
    profiles = classify(
        dataset.agent_evidence,
        TaxonomyConfig(
            pia_min_active_fraction=args.pia_min_active_fraction,
            pia_min_cross_dao=args.pia_min_cross_dao,
        ),
        known_addresses=[r.address for r in dataset.balances],
    )
    payload = {
        "profiles": [
            {
                "address": p.address.value,
                "class": p.agent_class.value,
                "basis": p.basis,
                "matched_rule": p.matched_rule,
            }
            for p in profiles
        ],
        "counts": {
            label: sum(1 for p in profiles if p.agent_class.value == label)
            for label in ("VIA", "PIA", "UIA")
        },
    }
    _emit(dump_json_bytes(payload))
    return EXIT_OK


def _diff_assessments(before: Assessment, after: Assessment) -> dict:
    changed = []
    for result_before, result_after in zip(before.characteristics, after.characteristics):
        metric_deltas = {}
        keys = set(result_before.metric_values) | set(result_after.metric_values)
        for key in sorted(keys):
            value_before = jsonable(result_before.metric_values.get(key))
            value_after = jsonable(result_after.metric_values.get(key))
            if value_before != value_after:
                metric_deltas[key] = {"before": value_before, "after": value_after}
        if result_before.score != result_after.score or metric_deltas:
            changed.append(
                {
                    "characteristic": result_before.id.value,
                    "score_before": result_before.score,
                    "score_after": result_after.score,
                    "metric_deltas": metric_deltas,
                }
            )
    return {
        "before": {"overall": jsonable(before.overall), "verdict": before.verdict.value},
        "after": {"overall": jsonable(after.overall), "verdict": after.verdict.value},
        "dimension_scores_before": {k: jsonable(v) for k, v in before.dimension_scores.items()},
        "dimension_scores_after": {k: jsonable(v) for k, v in after.dimension_scores.items()},
        "changed": changed,
    }


def cmd_whatif(args) -> int:
    session = _session_from_args(args)
    calibration = load_calibration(session.calibration_id)
    scenarios = [parse_scenario_flag(flag) for flag in args.scenario or ()]

    before = session.assess(calibration)
    for spec in scenarios:
        session.push_scenario(spec)
    after = session.assess(calibration)

    _emit(dump_json_bytes(_diff_assessments(before, after)))

    if args.commit:
        if not args.session:
            raise BundleError("--commit requires --session")
        content_hash = save_session(session, args.session)
        print(f"committed session {args.session} ({content_hash})", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore.open(
        store_dir=args.store,
        dataset_dir=args.dataset,
        calibration_id=args.calibration,
        qualitative_file=args.qualitative,
    )
    app = create_app(store, ui_dir=args.ui)
    print(f"serving on http://{args.host}:{args.port}/api/v1", file=sys.stderr)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiger",
        description="Decentralization scorecard engine for DAO governance snapshots.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    assess = sub.add_parser("assess", help="run a full assessment and write the documents")
    assess.add_argument("--dataset", required=True, help="dataset bundle directory")
    assess.add_argument("--qualitative", help="JSON file with assessor judgments")
    assess.add_argument("--calibration", default="paper-2022", help="calibration profile id or path")
    assess.add_argument("--out", default="out", help="output directory")
    assess.add_argument("--strict", action="store_true", help="reject datasets with validation warnings")
    assess.set_defaults(func=cmd_assess)

    met = sub.add_parser("metrics", help="compute one metric and print JSON")
    met.add_argument("name", choices=METRIC_NAMES)
    met.add_argument("--dataset", help="dataset bundle directory")
    met.add_argument("--weights", help="weights file (owner,weight or one weight per line)")
    met.add_argument("--threshold", default="0.5", help="nakamoto threshold fraction")
    met.add_argument("--no-strict", action="store_true", help="use >= instead of > at the threshold")
    met.add_argument("--opposition", help="opposition amount for governance-nakamoto")
    met.add_argument("--k", type=int, default=10, help="top-k voters for decisiveness")
    met.add_argument("--year", type=int, help="restrict to one calendar year")
    met.add_argument("--min-days", type=int, default=7, help="timing fairness floor")
    met.set_defaults(func=cmd_metrics)

    cls = sub.add_parser("classify", help="classify agents and print profiles")
    cls.add_argument("--dataset", required=True)
    cls.add_argument("--pia-min-active-fraction", type=float, default=0.5)
    cls.add_argument("--pia-min-cross-dao", type=int, default=1)
    cls.set_defaults(func=cmd_classify)

    whatif = sub.add_parser("whatif", help="apply scenarios and print the assessment diff")
    whatif.add_argument("--session", help="session file")
    whatif.add_argument("--dataset", help="dataset directory for an ephemeral session")
    whatif.add_argument("--calibration", default="paper-2022")
    whatif.add_argument(
        "--scenario",
        action="append",
        help="scenario flag, e.g. vesting_complete | remove_delegate:0x.. | "
        "split_whale:0x..:4 | toggle_capability:can_freeze_balances | set_opposition:100000",
    )
    whatif.add_argument("--commit", action="store_true", help="persist scenarios to the session")
    whatif.set_defaults(func=cmd_whatif)

    serve = sub.add_parser("serve", help="run the local HTTP service")
    serve.add_argument("--store", help="session store directory")
    serve.add_argument("--dataset", help="dataset directory to initialize the store")
    serve.add_argument("--qualitative", help="preload assessor judgments")
    serve.add_argument("--calibration", default="paper-2022")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8787)
    serve.add_argument("--ui", help="serve a built workbench from this directory")
    serve.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
