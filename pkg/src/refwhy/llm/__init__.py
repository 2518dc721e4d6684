"""Multi-model consensus orchestration over an OpenAI-compatible wire."""

from .client import ChatClient, Exchange, ModelRole, TranscriptStore, request_key
from .consensus import (
    AlignmentLabel,
    ConsensusOrchestrator,
    ConsensusRecord,
    export_validation_batch,
    parse_structured,
    read_records_ndjson,
    response_format,
    write_records_ndjson,
)
from .mock import MockServer, ProceduralResponder, ScriptedResponder
from .prompts import CategoryPool, MotivationCase, PromptLibrary, PromptParts, fit_diff

__all__ = [
    "ChatClient",
    "Exchange",
    "ModelRole",
    "TranscriptStore",
    "request_key",
    "ConsensusOrchestrator",
    "ConsensusRecord",
    "AlignmentLabel",
    "export_validation_batch",
    "write_records_ndjson",
    "read_records_ndjson",
    "parse_structured",
    "response_format",
    "MockServer",
    "ProceduralResponder",
    "ScriptedResponder",
    "CategoryPool",
    "MotivationCase",
    "PromptLibrary",
    "PromptParts",
    "fit_diff",
]
