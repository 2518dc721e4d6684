"""Four-role consensus protocol over sampled refactoring cases.

The primary model (LRM) proposes a motivation; V1 and V2 independently
validate it (issued concurrently); the arbiter V3 runs exactly when V1
and V2 disagree and its verdict decides whether the LRM's motivation is
replaced.  Alignment classification and iterative open coding reuse the
same transport.  Every exchange is persisted through the client's
transcript store before a record is returned.
"""

from __future__ import annotations

import json
import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InsufficientRecords, MalformedModelOutput
from .client import ChatClient, Exchange, ModelRole
from .prompts import CategoryPool, MotivationCase, PromptLibrary, PromptParts

log = logging.getLogger(__name__)

# Output schemas: task name -> (field, allowed values or None)
SCHEMAS: dict[str, dict[str, tuple[str, ...] | None]] = {
    "motivation": {"motivation": None, "description": None, "reasoning": None},
    "validation_verdict": {"verdict": ("agree", "disagree"), "reasoning": None},
    "arbiter_verdict": {"verdict": ("agree", "disagree"), "motivation": None, "reasoning": None},
    "alignment": {"alignment": ("yes", "no", "extends"), "reasoning": None},
    "category_assignment": {"category": None, "is_new": ("true", "false"), "description": None, "reasoning": None},
    "category_resolution": {"category": None, "is_new": ("true", "false"), "description": None, "justification": None},
}


def response_format(schema_name: str) -> dict:
    spec = SCHEMAS[schema_name]
    properties = {}
    for name, allowed in spec.items():
        properties[name] = {"type": "string"}
        if allowed:
            properties[name]["enum"] = list(allowed)
    return {
        "type": "json_schema",
        "json_schema": {
            "name": schema_name,
            "strict": True,
            "schema": {
                "type": "object",
                "properties": properties,
                "required": list(spec.keys()),
                "additionalProperties": False,
            },
        },
    }


def parse_structured(schema_name: str, content: str) -> dict:
    """Strict parse of a model reply against its output schema."""
    spec = SCHEMAS[schema_name]
    try:
        parsed = json.loads(content)
    except json.JSONDecodeError as exc:
        raise MalformedModelOutput(f"{schema_name}: not valid JSON: {exc}") from exc
    if not isinstance(parsed, dict):
        raise MalformedModelOutput(f"{schema_name}: expected a JSON object")
    missing = set(spec) - set(parsed)
    extra = set(parsed) - set(spec)
    if missing or extra:
        raise MalformedModelOutput(
            f"{schema_name}: field mismatch (missing={sorted(missing)}, extra={sorted(extra)})"
        )
    for name, allowed in spec.items():
        if not isinstance(parsed[name], str):
            raise MalformedModelOutput(f"{schema_name}: field {name} must be a string")
        if allowed and parsed[name] not in allowed:
            raise MalformedModelOutput(f"{schema_name}: field {name} has value {parsed[name]!r}")
    return parsed


@dataclass(frozen=True)
class AlignmentLabel:
    value: str  # yes | no | extends
    reasoning: str


@dataclass
class ConsensusRecord:
    case_id: str
    lrm_output: dict
    v1_verdict: dict
    v2_verdict: dict
    v3_verdict: dict | None
    final_source: str  # LRM | V3
    final_motivation: str
    raw_transcripts: list[dict] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "case_id": self.case_id,
                "lrm_output": self.lrm_output,
                "v1_verdict": self.v1_verdict,
                "v2_verdict": self.v2_verdict,
                "v3_verdict": self.v3_verdict,
                "final_source": self.final_source,
                "final_motivation": self.final_motivation,
                "raw_transcripts": self.raw_transcripts,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "ConsensusRecord":
        raw = json.loads(line)
        return cls(
            case_id=raw["case_id"],
            lrm_output=raw["lrm_output"],
            v1_verdict=raw["v1_verdict"],
            v2_verdict=raw["v2_verdict"],
            v3_verdict=raw["v3_verdict"],
            final_source=raw["final_source"],
            final_motivation=raw["final_motivation"],
            raw_transcripts=raw["raw_transcripts"],
        )


class ConsensusOrchestrator:
    """Drives the LRM / V1 / V2 / V3 protocol through a ChatClient."""

    def __init__(
        self,
        roles: dict[str, ModelRole],
        client: ChatClient,
        prompts: PromptLibrary | None = None,
        alignment_role: str = "LRM",
    ):
        for required in ("LRM", "V1", "V2", "V3"):
            if required not in roles:
                raise ValueError(f"missing configuration for role {required}")
        self.roles = roles
        self.client = client
        self.prompts = prompts or PromptLibrary()
        self.alignment_role = alignment_role

    # -- protocol steps ------------------------------------------------------

    def _ask(self, role: ModelRole, parts: PromptParts, schema_name: str) -> tuple[dict, list[dict]]:
        """One exchange with strict parsing and a single reprompt on failure."""
        messages = [
            {"role": "system", "content": parts.system},
            {"role": "user", "content": parts.user},
        ]
        exchange = self.client.exchange(role, messages, response_format(schema_name))
        transcripts = [exchange.pair()]
        try:
            return parse_structured(schema_name, exchange.content), transcripts
        except MalformedModelOutput as first_error:
            log.warning("%s produced malformed output, reprompting: %s", role.role, first_error)
            retry_messages = messages + [
                {"role": "assistant", "content": exchange.content},
                {
                    "role": "user",
                    "content": (
                        "The previous reply did not match the required JSON object with fields "
                        + ", ".join(SCHEMAS[schema_name])
                        + ". Reply again with only that JSON object."
                    ),
                },
            ]
            retry = self.client.exchange(role, retry_messages, response_format(schema_name))
            transcripts.append(retry.pair())
            return parse_structured(schema_name, retry.content), transcripts

    def extract_motivation(self, case: MotivationCase) -> ConsensusRecord:
        """LRM proposal, concurrent V1/V2 validation, arbiter iff they disagree."""
        lrm_role = self.roles["LRM"]
        parts = self.prompts.build("motivation", case, ("motivation", "description", "reasoning"),
                                   lrm_role.context_limit)
        lrm_output, transcripts = self._ask(lrm_role, parts, "motivation")

        def validate(role_name: str):
            role = self.roles[role_name]
            vparts = self.prompts.build(
                "validate",
                case,
                ("verdict", "reasoning"),
                role.context_limit,
                motivation=lrm_output["motivation"],
                lrm_description=lrm_output["description"],
                lrm_reasoning=lrm_output["reasoning"],
            )
            return self._ask(role, vparts, "validation_verdict")

        with ThreadPoolExecutor(max_workers=2) as pool:
            f1 = pool.submit(validate, "V1")
            f2 = pool.submit(validate, "V2")
            v1, t1 = f1.result()
            v2, t2 = f2.result()
        transcripts += t1 + t2

        v3 = None
        final_source = "LRM"
        final_motivation = lrm_output["motivation"]
        if v1["verdict"] != v2["verdict"]:
            v3_role = self.roles["V3"]
            aparts = self.prompts.build(
                "arbitrate",
                case,
                ("verdict", "motivation", "reasoning"),
                v3_role.context_limit,
                motivation=lrm_output["motivation"],
                lrm_description=lrm_output["description"],
                v1_verdict=v1["verdict"],
                v1_reasoning=v1["reasoning"],
                v2_verdict=v2["verdict"],
                v2_reasoning=v2["reasoning"],
            )
            v3, t3 = self._ask(v3_role, aparts, "arbiter_verdict")
            transcripts += t3
            if v3["verdict"] == "disagree":
                final_source = "V3"
                final_motivation = v3["motivation"]

        return ConsensusRecord(
            case_id=case.case_id,
            lrm_output=lrm_output,
            v1_verdict=v1,
            v2_verdict=v2,
            v3_verdict=v3,
            final_source=final_source,
            final_motivation=final_motivation,
            raw_transcripts=transcripts,
        )

    def extract_all(self, cases: list[MotivationCase], workers: int = 1) -> list[ConsensusRecord]:
        if workers <= 1:
            return [self.extract_motivation(case) for case in cases]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.extract_motivation, cases))

    def classify_alignment(self, record: ConsensusRecord, case: MotivationCase) -> AlignmentLabel:
        """Single-role yes / no / extends classification against ground truth."""
        if not case.ground_truth_motivation:
            raise ValueError(f"case {case.case_id} has no ground truth motivation")
        role = self.roles[self.alignment_role]
        parts = self.prompts.build(
            "alignment",
            case,
            ("alignment", "reasoning"),
            role.context_limit,
            motivation=record.final_motivation,
        )
        parsed, _ = self._ask(role, parts, "alignment")
        return AlignmentLabel(value=parsed["alignment"], reasoning=parsed["reasoning"])

    def open_code(
        self, records: list[ConsensusRecord], pool: CategoryPool | None = None
    ) -> tuple[dict[str, str], CategoryPool]:
        """Iterative open coding of motivations into a grow-only category pool.

        V1 and V2 each assign an existing category or propose a new one;
        when they agree the shared category stands, otherwise V3 resolves
        by picking one of the two or proposing a third, with justification.
        """
        if not records:
            raise ValueError("open coding needs at least one record")
        pool = pool or CategoryPool()
        assignments: dict[str, str] = {}

        for record in records:
            case = MotivationCase(
                case_id=record.case_id, instance=None, commit_message="", code_diff=""
            )
            extra = {
                "motivation": record.final_motivation,
                "motivation_description": record.lrm_output.get("description", ""),
            }

            def assign(role_name: str):
                role = self.roles[role_name]
                parts = self.prompts.build(
                    "opencode_assign", case, ("category", "is_new", "description", "reasoning"),
                    role.context_limit, pool=pool, **extra,
                )
                return self._ask(role, parts, "category_assignment")

            with ThreadPoolExecutor(max_workers=2) as tp:
                f1 = tp.submit(assign, "V1")
                f2 = tp.submit(assign, "V2")
                a1, _ = f1.result()
                a2, _ = f2.result()

            if a1["category"] == a2["category"]:
                chosen, description = a1["category"], a1["description"]
            else:
                v3_role = self.roles["V3"]
                parts = self.prompts.build(
                    "opencode_resolve", case,
                    ("category", "is_new", "description", "justification"),
                    v3_role.context_limit, pool=pool,
                    v1_category=a1["category"], v1_reasoning=a1["reasoning"],
                    v2_category=a2["category"], v2_reasoning=a2["reasoning"],
                    **extra,
                )
                res, _ = self._ask(v3_role, parts, "category_resolution")
                chosen, description = res["category"], res["description"]

            if chosen not in pool.names():
                pool.add(chosen, description or "open-coded category", record.case_id)
            assignments[record.case_id] = chosen

        return assignments, pool


def export_validation_batch(
    records: list[ConsensusRecord],
    cases_by_id: dict[str, MotivationCase],
    sample_n: int,
    seed: int,
    path: str | Path,
) -> int:
    """Seeded uniform sample of records serialized for human review.

    Each exported line carries the full reviewing context: refactoring
    type, commit message, diff, the proposed motivation, and all
    validator verdicts.  Raises InsufficientRecords when sample_n exceeds
    the record count.
    """
    if sample_n > len(records):
        raise InsufficientRecords(f"requested {sample_n} of {len(records)} records")
    rng = random.Random(seed)
    picked = sorted(rng.sample(range(len(records)), sample_n))
    with open(path, "w", encoding="utf-8") as fh:
        for i in picked:
            record = records[i]
            case = cases_by_id.get(record.case_id)
            fh.write(
                json.dumps(
                    {
                        "case_id": record.case_id,
                        "refactoring_type": case.instance.type.name if case and case.instance else "",
                        "abbreviation": case.instance.type.abbreviation if case and case.instance else "",
                        "commit_message": case.commit_message if case else "",
                        "code_diff": case.code_diff if case else "",
                        "ground_truth": case.ground_truth_motivation if case else "",
                        "lrm_output": record.lrm_output,
                        "v1_verdict": record.v1_verdict,
                        "v2_verdict": record.v2_verdict,
                        "v3_verdict": record.v3_verdict,
                        "final_source": record.final_source,
                        "final_motivation": record.final_motivation,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
    return sample_n


def write_records_ndjson(records: list[ConsensusRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def read_records_ndjson(path: str | Path) -> list[ConsensusRecord]:
    with open(path, encoding="utf-8") as fh:
        return [ConsensusRecord.from_json(line) for line in fh if line.strip()]
