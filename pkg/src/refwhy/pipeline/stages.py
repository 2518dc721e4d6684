"""Pipeline stages: mine, sample, classify, analyze.

Each stage reads only prior-stage artifacts, writes only its own
directory under the configured output root, and is re-runnable: with
unchanged inputs and seeds the dataset files are byte-identical (run
timestamps live only in the stage manifest).
"""

from __future__ import annotations

import json
import logging
import subprocess
import time
from collections import Counter
from pathlib import Path

from .. import __version__
from ..errors import MissingStageInput, RefwhyError, SingleClass, ZeroVariance
from ..history import commit_diff_text, dump_stream_ndjson, read_stream_ndjson, stream_commits
from ..llm.client import ChatClient, TranscriptStore
from ..llm.consensus import ConsensusOrchestrator, export_validation_batch, write_records_ndjson
from ..llm.mock import MockServer
from ..llm.prompts import MotivationCase, PromptLibrary
from ..metrics import MetricsAccumulator, write_metrics_csv, read_metrics_csv, PROCESS_COLUMNS
from ..rminer import (
    RefactoringInstance,
    join_to_commits,
    parse_rm_json,
    read_instances_ndjson,
    write_instances_ndjson,
)
from ..sampling import cochran_n, run_sample_plan, write_sample_manifest
from ..stats import (
    ContingencyTable,
    bowker_test,
    build_correlation_matrix,
    cohen_kappa,
    label_shares,
    raw_agreement,
    rf_train_and_importance,
    write_heatmap_svg,
    write_importance_csv,
    write_matrix_csv,
)
from ..stats.forest import ForestConfig
from .config import PipelineConfig
from .reference import load_reference_data

log = logging.getLogger(__name__)


def _stage_dir(config: PipelineConfig, name: str) -> Path:
    path = config.output_dir / name
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_manifest(stage_dir: Path, payload: dict) -> None:
    payload = {
        "tool_version": __version__,
        "git_version": _git_version(),
        "finished_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        **payload,
    }
    (stage_dir / "manifest.json").write_text(json.dumps(payload, indent=2, sort_keys=True))


def _git_version() -> str:
    try:
        return subprocess.run(
            ["git", "--version"], capture_output=True, check=True, text=True
        ).stdout.strip()
    except (OSError, subprocess.CalledProcessError):
        return "unknown"


# -- mine ---------------------------------------------------------------------

def cmd_mine(config: PipelineConfig) -> int:
    """Mine every configured repository; returns the number of failed repos.

    One bad repository does not abort the batch: failures are recorded in
    the manifest and reflected in the exit code.
    """
    config.validate_mine()
    out = _stage_dir(config, "mine")
    failures = 0
    report: dict[str, dict] = {}

    for repo in config.repos:
        name = repo.name
        try:
            report[name] = _mine_one(config, repo, out)
        except RefwhyError as exc:
            log.error("mining %s failed: %s", name, exc)
            report[name] = {"status": "failed", "error": str(exc)}
            failures += 1

    _write_manifest(out, {"repos": report, "seed": config.sample.seed})
    return failures


def _mine_one(config: PipelineConfig, repo: Path, out: Path) -> dict:
    name = repo.name
    records = list(
        stream_commits(repo)
    )
    dump_stream_ndjson(records, out / f"{name}.commits.ndjson")

    accumulator = MetricsAccumulator(
        adev_window_days=config.thresholds.adev_window_days,
        rexp_window_days=config.thresholds.rexp_window_days,
    )
    for record in records:
        accumulator.accumulate(record)
    joined_products = 0
    if config.product_csv and config.product_csv.exists():
        joined_products = accumulator.ingest_product_metrics(
            config.product_csv,
            comread_thresholds=(config.thresholds.comread_low, config.thresholds.comread_high),
        )
    write_metrics_csv(accumulator.vectors, out / f"{name}.metrics.csv")

    rm_path = config.rm_json_dir / f"{name}.json"
    joined_instances = 0
    unjoined = 0
    if rm_path.exists():
        instances = parse_rm_json(rm_path, project=name)
        joined, missing = join_to_commits(instances, {r.id for r in records})
        write_instances_ndjson(joined, out / f"{name}.instances.ndjson")
        joined_instances = len(joined)
        unjoined = len(missing)
    else:
        log.warning("no RefactoringMiner output for %s (expected %s)", name, rm_path)

    return {
        "status": "ok",
        "commits": len(records),
        "metric_rows": len(accumulator.vectors),
        "instances_joined": joined_instances,
        "instances_unjoined": unjoined,
        "product_rows_joined": joined_products,
    }


# -- sample -------------------------------------------------------------------

def cmd_sample(config: PipelineConfig, seed: int | None = None) -> int:
    mine_dir = config.output_dir / "mine"
    instance_files = sorted(mine_dir.glob("*.instances.ndjson"))
    if not instance_files:
        raise MissingStageInput("no mined instances found; run mine first")
    population: list[RefactoringInstance] = []
    for path in instance_files:
        population.extend(read_instances_ndjson(path))

    plan = config.sample
    if seed is not None:
        plan = type(plan)(
            target_n=plan.target_n,
            confidence=plan.confidence,
            margin=plan.margin,
            min_per_project=plan.min_per_project,
            min_per_type=plan.min_per_type,
            seed=seed,
        )
    out = _stage_dir(config, "sample")
    result = run_sample_plan(
        population, plan, project_of=lambda i: i.project, type_of=lambda i: i.type.name
    )
    write_sample_manifest(
        result,
        out / "sample_manifest.csv",
        id_of=lambda i: (i.instance_id, i.commit_id),
        project_of=lambda i: i.project,
        type_of=lambda i: i.type.name,
    )
    (out / "shortfalls.json").write_text(
        json.dumps(
            [vars(s) for s in result.shortfalls], indent=2, sort_keys=True
        )
    )
    _write_manifest(
        out,
        {
            "population": len(population),
            "selected": len(result.selected),
            "target": plan.target_n,
            "seed": plan.seed,
            "cochran_for_population": cochran_n(plan.confidence, plan.margin, len(population))
            if population
            else 0,
        },
    )
    return 0


# -- classify -----------------------------------------------------------------

def cmd_classify(config: PipelineConfig, mock: bool = False, seed: int | None = None) -> int:
    config.validate_classify(mock)
    sample_path = config.output_dir / "sample" / "sample_manifest.csv"
    mine_dir = config.output_dir / "mine"
    if not sample_path.exists():
        raise MissingStageInput("no sample manifest found; run sample first")

    instances: dict[str, RefactoringInstance] = {}
    for path in sorted(mine_dir.glob("*.instances.ndjson")):
        for inst in read_instances_ndjson(path):
            instances[inst.instance_id] = inst
    messages: dict[str, str] = {}
    for path in sorted(mine_dir.glob("*.commits.ndjson")):
        for record in read_stream_ndjson(path):
            messages[record.id] = record.message

    sampled_ids = []
    with open(sample_path, encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            sampled_ids.append(line.split(",")[0])

    repo_by_project = {repo.name: repo for repo in config.repos}
    diff_cache: dict[tuple[str, str], str] = {}
    cases: list[MotivationCase] = []
    for instance_id in sampled_ids:
        inst = instances.get(instance_id)
        if inst is None:
            log.warning("sampled instance %s not found in mined instances", instance_id)
            continue
        repo = repo_by_project.get(inst.project)
        key = (inst.project, inst.commit_id)
        if key not in diff_cache:
            diff_cache[key] = commit_diff_text(repo, inst.commit_id) if repo else ""
        cases.append(
            MotivationCase(
                case_id=inst.instance_id,
                instance=inst,
                commit_message=messages.get(inst.commit_id, ""),
                code_diff=diff_cache[key],
            )
        )

    out = _stage_dir(config, "classify")
    store = TranscriptStore(out / "transcripts.ndjson")
    client = ChatClient(store=store)
    prompts = PromptLibrary(config.prompt_dir) if config.prompt_dir else PromptLibrary()

    server = None
    try:
        if mock:
            server = MockServer().start()
            roles = config.mock_roles(server.endpoint)
        else:
            roles = config.roles
        orchestrator = ConsensusOrchestrator(roles, client, prompts)
        records = orchestrator.extract_all(cases, workers=config.classify_workers)
        write_records_ndjson(records, out / "records.ndjson")

        assignments, pool = orchestrator.open_code(records) if records else ({}, None)
        (out / "assignments.json").write_text(json.dumps(assignments, indent=2, sort_keys=True))
        (out / "category_pool.json").write_text(
            json.dumps(pool.entries if pool else [], indent=2, sort_keys=True)
        )

        batch_seed = seed if seed is not None else config.sample.seed
        batch_n = min(len(records), cochran_n(0.95, 0.05, len(records))) if records else 0
        cases_by_id = {c.case_id: c for c in cases}
        export_validation_batch(
            records, cases_by_id, batch_n, batch_seed, out / "validation_batch.ndjson"
        )
    finally:
        if server is not None:
            server.stop()

    _write_manifest(
        out,
        {
            "cases": len(cases),
            "records": len(cases),
            "network_calls": client.network_calls,
            "cached_exchanges": len(store),
            "mock": mock,
        },
    )
    return 0


# -- analyze ------------------------------------------------------------------

def cmd_analyze(config: PipelineConfig) -> int:
    mine_dir = config.output_dir / "mine"
    classify_dir = config.output_dir / "classify"
    metrics_files = sorted(mine_dir.glob("*.metrics.csv"))
    if not metrics_files:
        raise MissingStageInput("no metrics CSV found; run mine first")
    assignments_path = classify_dir / "assignments.json"
    if not assignments_path.exists():
        raise MissingStageInput("no category assignments found; run classify first")

    out = _stage_dir(config, "analyze")
    reference = load_reference_data()

    agreement = _agreement_report(reference)
    (out / "agreement_report.json").write_text(json.dumps(agreement, indent=2, sort_keys=True))

    rows: dict[tuple[str, str], dict] = {}
    header: list[str] = []
    for path in metrics_files:
        file_header, file_rows = read_metrics_csv(path)
        header = header or file_header
        for row in file_rows:
            rows[(row["commit"], row["file"])] = row
    by_commit: dict[str, list[dict]] = {}
    for (commit, _), row in rows.items():
        by_commit.setdefault(commit, []).append(row)

    assignments: dict[str, str] = json.loads(assignments_path.read_text())
    instances: dict[str, RefactoringInstance] = {}
    for path in sorted(mine_dir.glob("*.instances.ndjson")):
        for inst in read_instances_ndjson(path):
            instances[inst.instance_id] = inst

    labels: list[str] = []
    data_rows: list[dict] = []
    for case_id, category in sorted(assignments.items()):
        inst = instances.get(case_id)
        if inst is None:
            continue
        row = _metrics_row_for(inst, rows, by_commit)
        if row is None:
            continue
        labels.append(category)
        data_rows.append(row)

    summary_lines = [
        "analysis summary",
        "================",
        f"metric rows: {len(rows)}",
        f"classified cases with metrics: {len(data_rows)}",
        "",
        "agreement on the bundled reference table:",
        f"  kappa = {agreement['kappa']:.3f} "
        f"(std err {agreement['std_err']:.3f}, CI [{agreement['ci_low']:.3f}, {agreement['ci_high']:.3f}])",
        f"  bowker chi-square = {agreement['bowker_chi_square']:.3f} (p {agreement['bowker_p']:.2g})",
        f"  raw agreement = {agreement['raw_agreement_percent']:.2f}%",
        "",
    ]

    if data_rows:
        numeric_columns = _numeric_columns(header, data_rows)
        categories = sorted(set(labels))
        matrix_columns = {
            name: [row[name] for row in data_rows] for name in numeric_columns
        }
        usable = [
            name
            for name in numeric_columns
            if len({v for v in matrix_columns[name]}) > 1
        ]
        dropped = sorted(set(numeric_columns) - set(usable))
        if dropped:
            log.warning("dropping constant columns from correlation: %s", ", ".join(dropped))
        if usable and len(categories) > 1:
            matrix = build_correlation_matrix(
                {k: matrix_columns[k] for k in usable}, labels, categories, usable
            )
            write_matrix_csv(matrix, out / "correlation_matrix.csv")
            write_heatmap_svg(matrix, out / "correlation_heatmap.svg")
            significant = sum(
                1 for cell in matrix.cells.values() if cell.rho_p_bh < matrix.alpha
            )
            summary_lines += [
                f"correlation matrix: {len(categories)} categories x {len(usable)} metrics "
                f"= {matrix.n_tests} tests, {significant} BH-significant",
            ]
        _importances(config, header, data_rows, labels, out, summary_lines)
    else:
        summary_lines.append("no classified cases joined to metric rows; matrix skipped")

    (out / "summary.txt").write_text("\n".join(summary_lines) + "\n")
    _write_manifest(out, {"cases": len(data_rows), "labels": dict(Counter(labels))})
    return 0


def _agreement_report(reference: dict) -> dict:
    table_spec = reference["alignment_agreement_table"]
    table = ContingencyTable.from_lists(table_spec["labels"], table_spec["counts"])
    kappa = cohen_kappa(table)
    bowker = bowker_test(table)
    shares = label_shares(reference["alignment_label_counts"])
    return {
        "kappa": kappa.statistic,
        "std_err": kappa.extra["std_err"],
        "ci_low": kappa.extra["ci_low"],
        "ci_high": kappa.extra["ci_high"],
        "kappa_p": kappa.p_value,
        "bowker_chi_square": bowker.statistic,
        "bowker_df": bowker.df,
        "bowker_p": bowker.p_value,
        "raw_agreement_percent": 100.0 * raw_agreement(table),
        "label_shares_percent": shares,
        "published": reference["published_agreement"],
    }


def _metrics_row_for(inst: RefactoringInstance, rows, by_commit) -> dict | None:
    for loc in inst.locations:
        row = rows.get((inst.commit_id, loc.file_path))
        if row is not None:
            return row
    candidates = by_commit.get(inst.commit_id)
    return candidates[0] if candidates else None


def _numeric_columns(header: list[str], data_rows: list[dict]) -> list[str]:
    """Metric columns usable in rank correlation (booleans and categories excluded)."""
    skip = {"commit", "file", "FIX", "COMREAD_cat"}
    columns = []
    for name in header:
        if name in skip:
            continue
        values = [row.get(name) for row in data_rows]
        if any(v is None for v in values):
            continue
        columns.append(name)
    return columns


def _importances(config, header, data_rows, labels, out: Path, summary_lines: list[str]) -> None:
    import numpy as np

    process = [c for c in PROCESS_COLUMNS if c != "FIX"]
    product = [c for c in header if c not in ("commit", "file") and c not in PROCESS_COLUMNS
               and c != "COMREAD_cat"]
    scenarios = {"process": process}
    if product and all(all(row.get(c) is not None for c in product) for row in data_rows):
        scenarios["product"] = product
        scenarios["all"] = process + product

    for name, columns in scenarios.items():
        x = np.asarray([[row[c] for c in columns] for row in data_rows], dtype=float)
        try:
            result = rf_train_and_importance(
                x,
                labels,
                ForestConfig(n_trees=config.analyze_trees, seed=config.analyze_seed),
                feature_names=columns,
            )
        except (SingleClass, ZeroVariance) as exc:
            log.warning("importance scenario %s skipped: %s", name, exc)
            continue
        write_importance_csv(columns, result.mda, result.mdg, out / f"importance_{name}.csv")
        top = result.features[result.ranking("mdg")[0]]
        summary_lines.append(
            f"importance ({name}): top MDG feature {top}, OOB accuracy {result.oob_accuracy:.3f}"
        )
