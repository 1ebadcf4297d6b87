"""Schema-guided dialogue state tracking with span extraction and
wide-and-deep candidate ranking."""

__version__ = "0.1.0"

from .schema import (
    DONTCARE,
    UNKNOWN,
    Schema,
    ServiceDef,
    SlotDef,
    IntentDef,
    SlotKind,
    candidate_values,
    classify_slot,
    load_schema,
)
from .dialogue import Dialogue, Frame, State, Turn, load_dialogues, save_dialogues
from .encoder import BaselineEncoder, Encoder, EncoderOutput, SidecarEncoder
from .metrics import MetricsReport, evaluate, fuzzy_score
from .tracker import ModelBundle, OracleModel, ResetRule, TrackerModel, TurnContext, predict_corpus
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "DONTCARE",
    "UNKNOWN",
    "Schema",
    "ServiceDef",
    "SlotDef",
    "IntentDef",
    "SlotKind",
    "candidate_values",
    "classify_slot",
    "load_schema",
    "Dialogue",
    "Frame",
    "State",
    "Turn",
    "load_dialogues",
    "save_dialogues",
    "BaselineEncoder",
    "Encoder",
    "EncoderOutput",
    "SidecarEncoder",
    "MetricsReport",
    "evaluate",
    "fuzzy_score",
    "ModelBundle",
    "OracleModel",
    "ResetRule",
    "TrackerModel",
    "TurnContext",
    "predict_corpus",
    "load_checkpoint",
    "save_checkpoint",
    "__version__",
]
