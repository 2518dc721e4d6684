"""HTTP review service for the human-validation protocol.

Serves cases from an exported validation batch, persists reviewer
verdicts to an append-only NDJSON log (durable across restarts), and
computes live agreement statistics through the stats suite, never a
second kappa implementation.  Majority-vote resolutions materialize once
three reviewers have verdicted a case.
"""

from __future__ import annotations

import json
import os
import threading
import time
from collections import Counter
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from ..errors import DegenerateTable
from ..stats import ContingencyTable, bowker_test, cohen_kappa

VALID_MODELS = ("LRM", "V1", "V2", "V3")


class VerdictIn(BaseModel):
    case_id: str
    reviewer_id: str = Field(min_length=1)
    decision: str = Field(pattern="^(agree|disagree)$")
    correct_models: list[str] = Field(default_factory=list)
    note: str = ""


class ReviewState:
    """Case batch plus the verdict log; appends are serialized."""

    def __init__(self, batch_path: str | Path, verdicts_path: str | Path):
        self.cases: dict[str, dict] = {}
        self.case_order: list[str] = []
        with open(batch_path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                case = json.loads(line)
                self.cases[case["case_id"]] = case
                self.case_order.append(case["case_id"])

        self.verdicts_path = Path(verdicts_path)
        self._lock = threading.Lock()
        self.history: list[dict] = []
        self.current: dict[tuple[str, str], dict] = {}  # (case, reviewer) -> verdict
        if self.verdicts_path.exists():
            with open(self.verdicts_path, encoding="utf-8") as fh:
                for line in fh:
                    if line.strip():
                        self._index(json.loads(line))

    def _index(self, verdict: dict) -> None:
        self.history.append(verdict)
        self.current[(verdict["case_id"], verdict["reviewer_id"])] = verdict

    def record(self, verdict: dict) -> None:
        verdict = {**verdict, "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())}
        line = json.dumps(verdict, sort_keys=True)
        with self._lock:
            self.verdicts_path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.verdicts_path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._index(verdict)

    def next_case(self, reviewer: str) -> dict | None:
        for case_id in self.case_order:
            if (case_id, reviewer) not in self.current:
                return self.cases[case_id]
        return None

    def reviewers(self) -> list[str]:
        return sorted({r for _, r in self.current})

    def resolutions(self) -> dict[str, str]:
        """Majority decision for cases with verdicts from >= 3 reviewers."""
        by_case: dict[str, list[str]] = {}
        for (case_id, _), verdict in self.current.items():
            by_case.setdefault(case_id, []).append(verdict["decision"])
        resolved = {}
        for case_id, decisions in by_case.items():
            if len(decisions) >= 3:
                resolved[case_id] = Counter(decisions).most_common(1)[0][0]
        return resolved


def _kappa_block(table_counts: list[list[int]], labels: list[str]) -> dict:
    total = sum(sum(row) for row in table_counts)
    if total == 0:
        return {"n": 0, "kappa": None, "table": table_counts, "labels": labels}
    table = ContingencyTable.from_lists(labels, table_counts)
    block: dict = {"n": total, "table": table_counts, "labels": labels}
    try:
        kappa = cohen_kappa(table)
        block.update(
            kappa=kappa.statistic,
            std_err=kappa.extra["std_err"],
            ci_low=kappa.extra["ci_low"],
            ci_high=kappa.extra["ci_high"],
            kappa_p=kappa.p_value,
        )
    except DegenerateTable:
        diagonal = sum(table_counts[i][i] for i in range(len(labels)))
        block.update(kappa=None, degenerate=True, raw_agreement=diagonal / total)
    bowker = bowker_test(table)
    block.update(bowker_chi_square=bowker.statistic, bowker_df=bowker.df, bowker_p=bowker.p_value)
    return block


def create_app(
    batch_path: str | Path,
    verdicts_path: str | Path,
    static_dir: str | Path | None = None,
) -> FastAPI:
    state = ReviewState(batch_path, verdicts_path)
    app = FastAPI(title="refwhy review service")
    app.state.review = state

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/api/cases")
    def next_case(reviewer: str):
        if not reviewer:
            raise HTTPException(status_code=400, detail="reviewer id required")
        case = state.next_case(reviewer)
        reviewed = sum(1 for (_, r) in state.current if r == reviewer)
        if case is None:
            return {"done": True, "reviewed": reviewed, "total": len(state.cases)}
        mine = state.current.get((case["case_id"], reviewer))
        return {"done": False, "reviewed": reviewed, "total": len(state.cases),
                "case": case, "my_verdict": mine}

    @app.post("/api/verdicts")
    def post_verdict(verdict: VerdictIn):
        if verdict.case_id not in state.cases:
            raise HTTPException(status_code=404, detail=f"unknown case {verdict.case_id}")
        bad_models = [m for m in verdict.correct_models if m not in VALID_MODELS]
        if bad_models:
            raise HTTPException(status_code=400, detail=f"unknown models {bad_models}")
        if verdict.decision == "disagree" and not verdict.correct_models and not verdict.note.strip():
            raise HTTPException(
                status_code=400,
                detail="a disagree verdict needs at least one correct-model pick or a note",
            )
        state.record(verdict.model_dump())
        return {"ok": True, "resolved": verdict.case_id in state.resolutions()}

    @app.get("/api/agreement")
    def agreement():
        reviewers = state.reviewers()
        payload: dict = {"reviewers": reviewers, "pairs": [], "vs_model": []}

        for i, a in enumerate(reviewers):
            for b in reviewers[i + 1 :]:
                counts = [[0, 0], [0, 0]]
                for case_id in state.cases:
                    va = state.current.get((case_id, a))
                    vb = state.current.get((case_id, b))
                    if va is None or vb is None:
                        continue
                    row = 0 if va["decision"] == "disagree" else 1
                    col = 0 if vb["decision"] == "disagree" else 1
                    counts[row][col] += 1
                block = _kappa_block(counts, ["disagree", "agree"])
                block.update(a=a, b=b)
                payload["pairs"].append(block)

        # reviewer vs the model label carried by the batch (when present)
        for reviewer in reviewers:
            counts = [[0, 0], [0, 0]]
            for case_id, case in state.cases.items():
                model_label = case.get("model_label")
                verdict = state.current.get((case_id, reviewer))
                if model_label is None or verdict is None:
                    continue
                row = 0 if str(model_label).lower() in ("no", "disagree", "0", "false") else 1
                col = 0 if verdict["decision"] == "disagree" else 1
                counts[row][col] += 1
            block = _kappa_block(counts, ["No", "Yes"])
            block.update(reviewer=reviewer)
            payload["vs_model"].append(block)
        return payload

    @app.get("/api/progress")
    def progress():
        per_reviewer = Counter(r for (_, r) in state.current)
        resolutions = state.resolutions()
        return {
            "total_cases": len(state.cases),
            "per_reviewer": dict(sorted(per_reviewer.items())),
            "verdicts": len(state.history),
            "resolved": len(resolutions),
            "resolutions": resolutions,
        }

    if static_dir is not None and Path(static_dir).exists():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app


def serve_review(
    batch_path: str | Path,
    verdicts_path: str | Path,
    bind: str = "127.0.0.1",
    port: int = 8099,
    static_dir: str | Path | None = None,
) -> None:
    import uvicorn

    app = create_app(batch_path, verdicts_path, static_dir)
    uvicorn.run(app, host=bind, port=port, log_level="info")
