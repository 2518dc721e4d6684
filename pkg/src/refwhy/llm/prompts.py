"""Prompt assembly with token budgeting and tail-first diff truncation.

Templates are external text files with $name placeholders, bundled under
the package data directory and overridable per run.  Token counts use a
bytes-per-token heuristic (default 4), endpoint-agnostic on purpose.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template

from ..errors import BudgetExceeded
from ..rminer import RefactoringInstance

TRUNCATION_MARKER = "[diff truncated]"
RESPONSE_RESERVE_TOKENS = 512
BYTES_PER_TOKEN = 4


@dataclass(frozen=True)
class MotivationCase:
    """One sampled refactoring with the context the prompt is built from."""

    case_id: str
    instance: RefactoringInstance | None
    commit_message: str
    code_diff: str
    ground_truth_motivation: str = ""
    ground_truth_explanation: str = ""


@dataclass(frozen=True)
class PromptParts:
    system: str
    user: str
    schema: tuple[str, ...]  # expected output field names


@dataclass
class CategoryPool:
    """Ordered, grow-only pool of open-coded motivation categories."""

    entries: list[dict] = field(default_factory=list)  # {name, description, created_by}

    def names(self) -> list[str]:
        return [e["name"] for e in self.entries]

    def add(self, name: str, description: str, created_by: str) -> bool:
        if name in self.names():
            return False
        self.entries.append({"name": name, "description": description, "created_by": created_by})
        return True

    def render(self) -> str:
        if not self.entries:
            return "(the category list is currently empty)"
        return "\n".join(f"- {e['name']}: {e['description']}" for e in self.entries)


def estimate_tokens(text: str, bytes_per_token: int = BYTES_PER_TOKEN) -> int:
    return math.ceil(len(text.encode("utf-8")) / bytes_per_token)


class PromptLibrary:
    """Loads <task>_system.txt / <task>_user.txt template pairs."""

    TASKS = ("motivation", "validate", "arbitrate", "alignment", "opencode_assign", "opencode_resolve")

    def __init__(self, directory: str | Path | None = None,
                 bytes_per_token: int = BYTES_PER_TOKEN,
                 response_reserve: int = RESPONSE_RESERVE_TOKENS):
        self.bytes_per_token = bytes_per_token
        self.response_reserve = response_reserve
        self._templates: dict[str, tuple[Template, Template]] = {}
        if directory is not None:
            base = Path(directory)
            for task in self.TASKS:
                self._templates[task] = (
                    Template((base / f"{task}_system.txt").read_text(encoding="utf-8")),
                    Template((base / f"{task}_user.txt").read_text(encoding="utf-8")),
                )
        else:
            pkg = resources.files("refwhy.data.prompts")
            for task in self.TASKS:
                self._templates[task] = (
                    Template((pkg / f"{task}_system.txt").read_text(encoding="utf-8")),
                    Template((pkg / f"{task}_user.txt").read_text(encoding="utf-8")),
                )

    def build(
        self,
        task: str,
        case: MotivationCase,
        schema: tuple[str, ...],
        context_limit: int,
        pool: CategoryPool | None = None,
        **extra: str,
    ) -> PromptParts:
        """Fill the template pair for a task, fitting the diff to budget.

        The diff is truncated tail-first (hunk headers and earliest hunks
        survive) so that system + user + a response reserve fit inside
        the role's context window.  Raises BudgetExceeded when not even
        an empty diff fits.
        """
        system_t, user_t = self._templates[task]
        values = {
            "rt": case.instance.type.name if case.instance else "",
            "rt_abbr": case.instance.type.abbreviation if case.instance else "",
            "description": case.instance.description if case.instance else "",
            "message": case.commit_message,
            "ground_truth": case.ground_truth_motivation,
            "ground_truth_explanation": case.ground_truth_explanation,
            "pool": pool.render() if pool is not None else "",
            **extra,
        }
        system = system_t.safe_substitute(values)
        budget = context_limit - self.response_reserve
        base_tokens = estimate_tokens(system, self.bytes_per_token) + estimate_tokens(
            user_t.safe_substitute({**values, "diff": ""}), self.bytes_per_token
        )
        diff_budget_bytes = (budget - base_tokens) * self.bytes_per_token
        if diff_budget_bytes < 0:
            raise BudgetExceeded(
                f"task {task}: fixed prompt needs {base_tokens} tokens, budget is {budget}"
            )
        diff = fit_diff(case.code_diff, diff_budget_bytes)
        user = user_t.safe_substitute({**values, "diff": diff})
        return PromptParts(system=system, user=user, schema=schema)


def fit_diff(diff: str, budget_bytes: int) -> str:
    """Cut a diff from the tail to fit a byte budget, at a line boundary."""
    raw = diff.encode("utf-8")
    if len(raw) <= budget_bytes:
        return diff
    marker = "\n" + TRUNCATION_MARKER
    budget = budget_bytes - len(marker.encode("utf-8"))
    if budget <= 0:
        return TRUNCATION_MARKER
    head = raw[:budget]
    cut = head.rfind(b"\n")
    if cut > 0:
        head = head[:cut]
    return head.decode("utf-8", errors="ignore") + marker
