"""Canonical rendering of assessments: JSON documents and the markdown report.

Rendering is a pure function of session state, so regenerating any document
from an unchanged session yields byte-identical output. The service and the
CLI both emit through this module, which is what makes their bodies equal.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from datetime import datetime
from decimal import Decimal
from fractions import Fraction
from typing import Optional, Sequence

from .model import (
    DIMENSION_ORDER,
    CharacteristicId,
    TokenAmount,
    format_rfc3339,
    fraction_to_decimal,
)
from .scorecard import (
    Assessment,
    CharacteristicResult,
    QUESTION_TEXT,
    ScenarioSpec,
    radar,
)

__all__ = [
    "ReportDocument",
    "assessment_json_bytes",
    "assessment_payload",
    "radar_json_bytes",
    "radar_payload",
    "jsonable",
]


def jsonable(value):
    """Coerce domain values into deterministic JSON-encodable primitives."""
    if isinstance(value, Decimal):
        integral = value.to_integral_value()
        if value == integral:
            return int(integral)
        return float(str(value))
    if isinstance(value, Fraction):
        return jsonable(fraction_to_decimal(value, 4))
    if isinstance(value, TokenAmount):
        return str(value)
    if isinstance(value, datetime):
        return format_rfc3339(value)
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if hasattr(value, "value") and not isinstance(value, (int, float, str, bool)):
        return value.value  # enums
    return value


def dump_json_bytes(payload) -> bytes:
    return (json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n").encode(
        "utf-8"
    )


def _characteristic_payload(result: CharacteristicResult) -> dict:
    return {
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


def assessment_payload(
    assessment: Assessment, dataset_hash: str, calibration_id: str
) -> dict:
    return {
        "dataset_hash": dataset_hash,
        "calibration_id": calibration_id,
        "verdict": assessment.verdict.value,
        "overall": jsonable(assessment.overall),
        "dimension_scores": {
            axis: jsonable(score) for axis, score in assessment.dimension_scores.items()
        },
        "radar": radar_payload(assessment),
        "critical_failures": [c.value for c in assessment.critical_failures],
        "characteristics": [_characteristic_payload(r) for r in assessment.characteristics],
    }


def assessment_json_bytes(
    assessment: Assessment, dataset_hash: str, calibration_id: str
) -> bytes:
    return dump_json_bytes(assessment_payload(assessment, dataset_hash, calibration_id))


def radar_payload(assessment: Assessment) -> dict:
    vector = radar(assessment)
    return {
        "axes": list(vector.axes),
        "values": [jsonable(value) for value in vector.values],
        "indeterminate_axes": list(vector.indeterminate_axes),
    }


def radar_json_bytes(assessment: Assessment) -> bytes:
    return dump_json_bytes(radar_payload(assessment))


def _score_text(value: Optional[Fraction]) -> str:
    if value is None:
        return "indeterminate"
    as_decimal = fraction_to_decimal(value, 2)
    return str(as_decimal.normalize()) if as_decimal != as_decimal.to_integral_value() else str(
        int(as_decimal)
    )


def _title(characteristic: CharacteristicId) -> str:
    return characteristic.value.replace("_", " ").title()


@dataclass(frozen=True)
class ReportDocument:
    """The shareable assessment report for one session state."""

    assessment: Assessment
    dao_name: str
    snapshot_time: datetime
    dataset_hash: str
    calibration_id: str
    generated_at: datetime
    scenarios: Sequence[ScenarioSpec] = ()

    def render(self) -> str:
        a = self.assessment
        lines: list[str] = []
        lines.append(f"# Decentralization Assessment: {self.dao_name}")
        lines.append("")
        lines.append(f"- Snapshot time: {format_rfc3339(self.snapshot_time)}")
        lines.append(f"- Dataset hash: `{self.dataset_hash}`")
        lines.append(f"- Calibration profile: `{self.calibration_id}`")
        lines.append(f"- Generated at: {format_rfc3339(self.generated_at)}")
        if self.scenarios:
            stack = ", ".join(s.kind.value for s in self.scenarios)
            lines.append(f"- Active scenarios: {stack}")
        lines.append("")
        lines.append("## Verdict")
        lines.append("")
        overall = "indeterminate" if a.overall is None else f"{a.overall} / 5"
        lines.append(f"**{a.verdict.value}** with an overall score of {overall}.")
        lines.append("")
        axis_bits = ", ".join(
            f"{d.value}={_score_text(a.dimension_scores[d.value])}" for d in DIMENSION_ORDER
        )
        lines.append(f"Radar: {axis_bits}")
        lines.append("")
        if a.critical_failures:
            failing = ", ".join(_title(c) for c in a.critical_failures)
            lines.append(f"Critical failures: {failing}. A compromised critical")
            lines.append("characteristic compromises the whole system, so the verdict is")
            lines.append("not_sufficient regardless of the overall mean.")
        else:
            lines.append("Critical failures: none.")
        lines.append("")

        by_dimension: dict[str, list[CharacteristicResult]] = {}
        for result in a.characteristics:
            by_dimension.setdefault(result.id.dimension.value, []).append(result)

        for dimension in DIMENSION_ORDER:
            score = a.dimension_scores[dimension.value]
            lines.append(f"## {dimension.title} ({dimension.value} = {_score_text(score)})")
            lines.append("")
            for result in by_dimension.get(dimension.value, ()):
                score_text = "indeterminate" if result.score is None else str(result.score)
                critical = ", critical" if result.critical else ""
                lines.append(f"### {_title(result.id)} ({result.basis}{critical}): {score_text}")
                lines.append("")
                lines.append(QUESTION_TEXT[result.id])
                lines.append("")
                metric_values = jsonable(dict(result.metric_values))
                if metric_values:
                    for key in sorted(metric_values):
                        lines.append(f"- {key}: {json.dumps(metric_values[key], sort_keys=True)}")
                    lines.append("")
                lines.append(f"Evidence: {result.evidence}")
                provenance = jsonable(dict(result.provenance))
                inputs = provenance.pop("inputs", [])
                extra = (
                    "; ".join(f"{k}={json.dumps(v, sort_keys=True)}" for k, v in sorted(provenance.items()))
                    if provenance
                    else ""
                )
                trail = f"Provenance: {', '.join(inputs)}" if inputs else "Provenance: none"
                if extra:
                    trail += f" ({extra})"
                lines.append("")
                lines.append(trail)
                lines.append("")

        lines.append("## Assessment notes")
        lines.append("")
        lines.append(
            "- Collusion inference and advanced delegation-network analysis are not"
        )
        lines.append(
            "  computed by this engine; where relevant they require qualitative review."
        )
        lines.append(
            "- Long-term equilibrium is explored only through the vesting-completion"
        )
        lines.append("  scenario; it has no standalone quantifier.")
        lines.append("")
        return "\n".join(lines)

    def render_bytes(self) -> bytes:
        return self.render().encode("utf-8")
