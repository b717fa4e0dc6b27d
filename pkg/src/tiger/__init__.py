"""TIGER: a deterministic decentralization scorecard engine for DAO snapshots.

Assesses a governance dataset across five dimensions (Token-weighted voting,
Infrastructure, Governance, Escalation, Reputation), combining computed
quantifiers with assessor-entered judgments into a 1..5 scorecard, radar
vector, and sufficiency verdict.
"""

from .model import (
    Address,
    AgentClass,
    CharacteristicId,
    Dimension,
    GovernanceDataset,
    QualitativeEntry,
    TokenAmount,
    validate_dataset,
)
from .scorecard import (
    Assessment,
    CalibrationProfile,
    ScenarioKind,
    ScenarioSpec,
    Verdict,
    apply_scenario,
    evaluate,
    load_calibration,
    radar,
)
from .ingest import (
    AssessmentSession,
    load_dataset,
    load_session,
    save_dataset,
    save_session,
)

__version__ = "0.1.0"

__all__ = [
    "Address",
    "AgentClass",
    "Assessment",
    "AssessmentSession",
    "CalibrationProfile",
    "CharacteristicId",
    "Dimension",
    "GovernanceDataset",
    "QualitativeEntry",
    "ScenarioKind",
    "ScenarioSpec",
    "TokenAmount",
    "Verdict",
    "apply_scenario",
    "evaluate",
    "load_calibration",
    "load_dataset",
    "load_session",
    "radar",
    "save_dataset",
    "save_session",
    "validate_dataset",
    "__version__",
]
