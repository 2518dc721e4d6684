"""Shared scaffolding for consensus-protocol tests and golden generation.

Defines five synthetic cases covering every protocol branch, the
scripted responses that force each branch, and a builder wiring an
orchestrator to a wire-level mock server.
"""

from __future__ import annotations

from refwhy.llm.client import ChatClient, ModelRole, TranscriptStore
from refwhy.llm.consensus import ConsensusOrchestrator
from refwhy.llm.mock import MockServer, ScriptedResponder
from refwhy.llm.prompts import MotivationCase
from refwhy.rminer import LocationRef, RefactoringInstance
from refwhy.taxonomy import BY_NAME

MODEL_NAMES = {"LRM": "mock-lrm", "V1": "mock-v1", "V2": "mock-v2", "V3": "mock-v3"}


def make_case(idx: int, type_name: str, message: str, diff: str,
              ground_truth: str = "") -> MotivationCase:
    instance = RefactoringInstance(
        instance_id=f"case{idx:02d}",
        commit_id=f"{idx:02d}" * 20,
        type=BY_NAME[type_name],
        description=f"{type_name} applied in fixture case {idx}",
        locations=(LocationRef("left", f"src/Case{idx}.java", "METHOD_DECLARATION", "m()"),),
        project="fixture",
    )
    return MotivationCase(
        case_id=instance.instance_id,
        instance=instance,
        commit_message=message,
        code_diff=diff,
        ground_truth_motivation=ground_truth,
    )


BRANCH_CASES = [
    make_case(1, "Extract Method", "pull helper out of parse", "@@ -1,4 +1,8 @@\n+helper body\n"),
    make_case(2, "Move Class", "relocate the cache", "@@ -1,2 +1,2 @@\n-old pkg\n+new pkg\n"),
    make_case(3, "Rename Method", "clearer name for load", "@@ -5,1 +5,1 @@\n-fetch\n+load\n"),
    make_case(4, "Inline Method", "drop needless indirection", "@@ -9,3 +9,1 @@\n-wrapper\n"),
    make_case(5, "Pull Up Method", "share close() in the base", "@@ -2,0 +2,4 @@\n+close body\n"),
]


def _lrm(idx: int) -> dict:
    return {
        "motivation": f"Motivation {idx}",
        "description": f"Description of case {idx}",
        "reasoning": f"Step-by-step reasoning for case {idx}",
    }


def _verdict(value: str, who: str, idx: int) -> dict:
    return {"verdict": value, "reasoning": f"{who} review of case {idx}: {value}"}


def _arbiter(value: str, idx: int, corrected: str | None = None) -> dict:
    return {
        "verdict": value,
        "motivation": corrected if corrected else f"Motivation {idx}",
        "reasoning": f"arbiter ruling for case {idx}: {value}",
    }


def branch_scripts() -> dict[str, list[dict]]:
    """Scripted responses forcing all five protocol branches, in case order.

    case1: V1 agree,    V2 agree    -> no arbiter, final LRM
    case2: V1 disagree, V2 disagree -> no arbiter (shared verdict), final LRM
    case3: V1 agree,    V2 disagree -> arbiter agrees, final LRM
    case4: V1 disagree, V2 agree    -> arbiter disagrees, final V3
    case5: V1 agree,    V2 disagree -> arbiter disagrees, final V3
    """
    return {
        MODEL_NAMES["LRM"]: [_lrm(i) for i in (1, 2, 3, 4, 5)],
        MODEL_NAMES["V1"]: [
            _verdict("agree", "V1", 1),
            _verdict("disagree", "V1", 2),
            _verdict("agree", "V1", 3),
            _verdict("disagree", "V1", 4),
            _verdict("agree", "V1", 5),
        ],
        MODEL_NAMES["V2"]: [
            _verdict("agree", "V2", 1),
            _verdict("disagree", "V2", 2),
            _verdict("disagree", "V2", 3),
            _verdict("agree", "V2", 4),
            _verdict("disagree", "V2", 5),
        ],
        MODEL_NAMES["V3"]: [
            _arbiter("agree", 3),
            _arbiter("disagree", 4, corrected="Corrected motivation 4"),
            _arbiter("disagree", 5, corrected="Corrected motivation 5"),
        ],
    }


def build_orchestrator(server: MockServer, store_path, context_limit: int = 4096,
                       session=None) -> tuple[ConsensusOrchestrator, ChatClient]:
    roles = {
        name: ModelRole(
            role=name,
            endpoint=server.endpoint,
            model_name=MODEL_NAMES[name],
            context_limit=context_limit,
            timeout=10.0,
            max_retries=2,
        )
        for name in MODEL_NAMES
    }
    client = ChatClient(store=TranscriptStore(store_path), session=session)
    return ConsensusOrchestrator(roles, client), client


def scripted_server() -> MockServer:
    return MockServer(responder=ScriptedResponder(branch_scripts()))
