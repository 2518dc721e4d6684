"""Acceptance suite: every primary criterion at its stated tolerance.

Each criterion prints one PASS/FAIL line (run with ``pytest -s`` to see
them as they execute).  Golden numbers are asserted exactly as stated;
time budgets are enforced with wall-clock checks.
"""

from __future__ import annotations

import json
import random
import time
from collections import Counter
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import chisquare

from refwhy.llm.consensus import read_records_ndjson
from refwhy.pipeline.config import PipelineConfig
from refwhy.pipeline.stages import cmd_analyze, cmd_classify, cmd_mine, cmd_sample
from refwhy.sampling import (
    SamplePlan,
    cochran_n,
    phase1_greedy,
    phase2_reservoir,
    run_sample_plan,
    write_sample_manifest,
)
from refwhy.stats import (
    ContingencyTable,
    ForestConfig,
    anderson_darling_normal,
    benjamini_hochberg,
    bonferroni,
    bowker_test,
    build_correlation_matrix,
    cohen_kappa,
    kendall_tau,
    label_shares,
    raw_agreement,
    rf_train_and_importance,
    spearman_rho,
)

from consensus_harness import BRANCH_CASES, MODEL_NAMES, branch_scripts, build_orchestrator, scripted_server
from refwhy.llm.mock import MockServer, ScriptedResponder
from stats_oracles import brute_force_kendall_tau_b, brute_force_spearman
from test_pipeline import build_product_csv, build_rm_json

FIXTURES = Path(__file__).parent / "fixtures"
GOLDEN_TABLE = ContingencyTable.from_lists(["No", "Yes"], [[59, 8], [34, 97]])


@contextmanager
def criterion(name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {name}: FAIL")
        raise
    print(f"ACCEPTANCE {name}: PASS")


def test_kappa_golden():
    with criterion("kappa-golden"):
        result = cohen_kappa(GOLDEN_TABLE)
        assert result.statistic == pytest.approx(0.567, abs=1e-3)
        assert result.extra["ci_low"] == pytest.approx(0.455, abs=1e-2)
        assert result.extra["ci_high"] == pytest.approx(0.679, abs=1e-2)
        assert result.p_value < 1e-4
        start = time.perf_counter()
        cohen_kappa(GOLDEN_TABLE)
        assert time.perf_counter() - start < 1e-3


def test_bowker_golden():
    with criterion("bowker-golden"):
        result = bowker_test(GOLDEN_TABLE)
        assert result.statistic == pytest.approx(16.095, abs=1e-3)
        assert result.df == 1
        assert result.p_value < 1e-4
        mcnemar = (8 - 34) ** 2 / (8 + 34)
        assert result.statistic == mcnemar  # 2x2 equivalence, exact


def test_bonferroni_golden():
    with criterion("bonferroni-golden"):
        threshold, _ = bonferroni([0.5] * 574, 0.05)
        assert abs(threshold - 8.7108e-5) < 1e-9


def test_cochran_golden():
    with criterion("cochran-golden"):
        assert cochran_n(0.95, 0.05) == 385


def test_alignment_arithmetic():
    with criterion("alignment-arithmetic"):
        shares = label_shares({"yes": 105, "no": 49, "extends": 44})
        assert shares["yes"] == pytest.approx(53.03, abs=0.01)
        assert shares["no"] == pytest.approx(24.74, abs=0.01)
        assert shares["extends"] == pytest.approx(22.22, abs=0.01)
        assert 100 * raw_agreement(GOLDEN_TABLE) == pytest.approx(78.79, abs=0.01)


def test_metric_oracle_on_fixture(mini_java_records, tmp_path, mini_java_repo):
    from refwhy.metrics import MetricsAccumulator, PROCESS_COLUMNS
    from metrics_oracle import assign_file_ids, expected_vector

    with criterion("metric-oracle"):
        ratio_columns = {"ADD", "DELE", "OWN", "OEXP", "EXP", "ENTROPY", "AGE"}
        acc = MetricsAccumulator()
        rows = [acc.accumulate(record) for record in mini_java_records]
        ids = assign_file_ids(mini_java_records)
        for k, record in enumerate(mini_java_records):
            for i in range(len(record.changes)):
                want = expected_vector(mini_java_records, ids, k, i)
                got = rows[k][i]
                for column in PROCESS_COLUMNS:
                    if column in ratio_columns:
                        assert getattr(got, column) == pytest.approx(want[column], abs=1e-9)
                    else:
                        assert getattr(got, column) == want[column]

        start = time.perf_counter()
        config = _workspace_config(tmp_path, mini_java_repo, mini_java_records)
        assert cmd_mine(config) == 0
        assert time.perf_counter() - start < 10.0


def test_sampling_properties():
    with criterion("sampling-properties"):
        start = time.perf_counter()

        # phase-1 coverage on 100 randomized synthetic populations
        rng = random.Random(20240)
        for trial in range(100):
            population = []
            uid = 0
            for p in range(rng.randint(1, 7)):
                for t in range(rng.randint(1, 6)):
                    for _ in range(rng.randint(0, 9)):
                        population.append((uid, f"p{p}", f"t{t}"))
                        uid += 1
            if not population:
                continue
            result = phase1_greedy(population, lambda i: i[1], lambda i: i[2], 3, 3, seed=trial)
            chosen = [i for i, _ in result.selected]
            assert len(chosen) == len({i[0] for i in chosen})
            projects = Counter(i[1] for i in population)
            types = Counter(i[2] for i in population)
            got_p = Counter(i[1] for i in chosen)
            got_t = Counter(i[2] for i in chosen)
            for name, available in projects.items():
                if available >= 3:
                    assert got_p[name] >= 3
            for name, available in types.items():
                if available >= 3:
                    assert got_t[name] >= 3

        # reservoir uniformity: 100k seeded trials of k=2 from n=5
        trials = 100_000
        counts = Counter()
        for seed in range(trials):
            for item in phase2_reservoir(range(5), 2, seed=seed):
                counts[item] += 1
        freqs = [counts[i] / trials for i in range(5)]
        assert all(0.38 <= f <= 0.42 for f in freqs), freqs
        _, p = chisquare([counts[i] for i in range(5)], [trials * 0.4] * 5)
        assert p > 0.001

        # fixed seed => byte-identical manifest
        population = [(i, f"p{i % 4}", f"t{i % 6}") for i in range(300)]
        blobs = []
        import io, tempfile

        for _ in range(2):
            result = run_sample_plan(
                population, SamplePlan(target_n=50, seed=11), lambda i: i[1], lambda i: i[2]
            )
            with tempfile.NamedTemporaryFile(mode="r+", suffix=".csv") as fh:
                write_sample_manifest(
                    result, fh.name,
                    id_of=lambda i: (str(i[0]), f"c{i[0]}"),
                    project_of=lambda i: i[1], type_of=lambda i: i[2],
                )
                fh.seek(0)
                blobs.append(fh.read())
        assert blobs[0] == blobs[1]
        assert time.perf_counter() - start < 60.0


def test_correction_dominance():
    with criterion("correction-dominance"):
        start = time.perf_counter()
        rng = random.Random(99)
        for _ in range(1000):
            m = rng.randint(1, 1000)
            p = [rng.random() ** rng.choice([1, 2, 5]) for _ in range(m)]
            _, bonf = bonferroni(p, 0.05)
            bh, _ = benjamini_hochberg(p, 0.05)
            assert bh >= bonf
        assert time.perf_counter() - start < 10.0


def test_correlation_oracles():
    with criterion("correlation-oracles"):
        start = time.perf_counter()
        rng = random.Random(7)
        done = 0
        while done < 200:
            n = rng.randint(3, 50)
            x = [rng.randint(0, 12) for _ in range(n)]
            y = [rng.randint(0, 12) for _ in range(n)]
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            assert spearman_rho(x, y).statistic == pytest.approx(
                brute_force_spearman(x, y), abs=1e-9)
            assert kendall_tau(x, y).statistic == pytest.approx(
                brute_force_kendall_tau_b(x, y), abs=1e-9)
            done += 1
        assert time.perf_counter() - start < 30.0


def test_anderson_darling_calibration():
    with criterion("ad-calibration"):
        start = time.perf_counter()
        false_rejections = 0
        for seed in range(100):
            sample = np.random.default_rng(seed).normal(size=500)
            false_rejections += int(anderson_darling_normal(sample).extra["reject_at_005"])
        assert 1 <= false_rejections <= 10, false_rejections

        rejected = 0
        for seed in range(100):
            sample = np.random.default_rng(seed).exponential(size=500)
            rejected += int(anderson_darling_normal(sample).extra["reject_at_005"])
        assert rejected >= 95, rejected
        assert time.perf_counter() - start < 30.0


def test_rf_planted_signal():
    with criterion("rf-planted-signal"):
        start = time.perf_counter()
        hits_mda = hits_mdg = 0
        for seed in range(100):
            rng = np.random.default_rng(seed)
            x = rng.normal(size=(500, 10))
            y = (x[:, 0] > 0.0).astype(int)
            flips = rng.random(500) < 0.10
            y[flips] = 1 - y[flips]
            result = rf_train_and_importance(x, y, ForestConfig(n_trees=50, seed=seed))
            hits_mda += int(result.ranking("mda")[0] == 0)
            hits_mdg += int(result.ranking("mdg")[0] == 0)
        assert hits_mda >= 95, hits_mda
        assert hits_mdg >= 95, hits_mdg

        # constant feature: zero Gini decrease exactly, negligible MDA
        rng = np.random.default_rng(0)
        x = rng.normal(size=(500, 11))
        x[:, 10] = 1.0
        y = (x[:, 0] > 0.0).astype(int)
        result = rf_train_and_importance(x, y, ForestConfig(n_trees=50, seed=0))
        assert result.mdg[10] == 0.0
        assert abs(result.mda[10]) < 0.5

        # byte-exact determinism per seed
        again = rf_train_and_importance(x, y, ForestConfig(n_trees=50, seed=0))
        assert result.mda.tobytes() == again.mda.tobytes()
        assert result.mdg.tobytes() == again.mdg.tobytes()
        assert time.perf_counter() - start < 300.0


def test_consensus_protocol(tmp_path):
    with criterion("consensus-protocol"):
        start = time.perf_counter()

        # golden-transcript equality over all branch combinations
        with scripted_server() as server:
            orch, client = build_orchestrator(server, tmp_path / "a.ndjson")
            records = [orch.extract_motivation(c) for c in BRANCH_CASES]
        produced = "".join(r.to_json() + "\n" for r in records)
        assert produced.encode() == (FIXTURES / "golden_consensus.ndjson").read_bytes()
        branch_shapes = {
            (r.v1_verdict["verdict"], r.v2_verdict["verdict"],
             r.v3_verdict["verdict"] if r.v3_verdict else None, r.final_source)
            for r in records
        }
        assert branch_shapes == {
            ("agree", "agree", None, "LRM"),
            ("disagree", "disagree", None, "LRM"),
            ("agree", "disagree", "agree", "LRM"),
            ("disagree", "agree", "disagree", "V3"),
            ("agree", "disagree", "disagree", "V3"),
        }

        # arbiter-iff-disagreement over randomized scripts
        rng = random.Random(5150)
        for trial in range(6):
            verdicts = [(rng.choice(["agree", "disagree"]), rng.choice(["agree", "disagree"]))
                        for _ in BRANCH_CASES]
            scripts = branch_scripts()
            scripts[MODEL_NAMES["V1"]] = [{"verdict": a, "reasoning": "r"} for a, _ in verdicts]
            scripts[MODEL_NAMES["V2"]] = [{"verdict": b, "reasoning": "r"} for _, b in verdicts]
            scripts[MODEL_NAMES["V3"]] = [
                {"verdict": rng.choice(["agree", "disagree"]), "motivation": "m", "reasoning": "r"}
                for _ in BRANCH_CASES]
            with MockServer(responder=ScriptedResponder(scripts)) as server:
                orch, _ = build_orchestrator(server, tmp_path / f"r{trial}.ndjson")
                for case, (a, b) in zip(BRANCH_CASES, verdicts):
                    record = orch.extract_motivation(case)
                    assert (record.v3_verdict is not None) == (a != b)

        # cached re-run performs zero network calls
        with scripted_server() as server:
            orch, client = build_orchestrator(server, tmp_path / "a.ndjson")
            rerun = [orch.extract_motivation(c) for c in BRANCH_CASES]
            assert client.network_calls == 0
            assert server.requests_served == 0
        assert [r.to_json() for r in rerun] == [r.to_json() for r in records]
        assert time.perf_counter() - start < 30.0


def test_matrix_shape():
    with criterion("matrix-shape"):
        rng = random.Random(3)
        rows = 80
        categories = [f"rmc{i:02d}" for i in range(14)]
        labels = [categories[rng.randrange(14)] for _ in range(rows)]
        metrics = {f"m{i:02d}": [rng.random() for _ in range(rows)] for i in range(41)}
        matrix = build_correlation_matrix(metrics, labels, categories, sorted(metrics))
        assert matrix.n_tests == 574
        assert len(matrix.cells) == 574


def test_end_to_end_mock(tmp_path, mini_java_repo, mini_java_records):
    with criterion("end-to-end-mock"):
        config = _workspace_config(tmp_path / "e2e", mini_java_repo, mini_java_records)
        start = time.perf_counter()
        assert cmd_mine(config) == 0
        assert cmd_sample(config) == 0
        assert cmd_classify(config, mock=True) == 0
        assert cmd_analyze(config) == 0
        assert time.perf_counter() - start < 60.0

        out = config.output_dir
        declared = [
            "mine/mini-java.metrics.csv",
            "mine/mini-java.commits.ndjson",
            "mine/mini-java.instances.ndjson",
            "mine/manifest.json",
            "sample/sample_manifest.csv",
            "sample/shortfalls.json",
            "sample/manifest.json",
            "classify/records.ndjson",
            "classify/transcripts.ndjson",
            "classify/assignments.json",
            "classify/category_pool.json",
            "classify/validation_batch.ndjson",
            "classify/manifest.json",
            "analyze/agreement_report.json",
            "analyze/correlation_matrix.csv",
            "analyze/correlation_heatmap.svg",
            "analyze/importance_process.csv",
            "analyze/summary.txt",
            "analyze/manifest.json",
        ]
        for relative in declared:
            assert (out / relative).exists(), relative

        agreement = json.loads((out / "analyze/agreement_report.json").read_text())
        assert agreement["kappa"] == pytest.approx(0.567, abs=1e-3)
        assert agreement["bowker_chi_square"] == pytest.approx(16.095, abs=1e-3)
        records = read_records_ndjson(out / "classify/records.ndjson")
        assert len(records) == 16


def _workspace_config(root: Path, repo: Path, records) -> PipelineConfig:
    root.mkdir(parents=True, exist_ok=True)
    rm_dir = root / "rm"
    rm_dir.mkdir(exist_ok=True)
    build_rm_json(records, rm_dir / "mini-java.json")
    product = root / "product.csv"
    build_product_csv(records, product)
    config_path = root / "pipeline.conf"
    config_path.write_text(
        f"""repos = {repo}
rm_json_dir = {rm_dir}
output_dir = {root / 'out'}
product_csv = {product}
sample.target_n = 16
sample.min_per_type = 1
sample.seed = 7
analyze.n_trees = 30
analyze.seed = 3
"""
    )
    return PipelineConfig.from_file(config_path)
