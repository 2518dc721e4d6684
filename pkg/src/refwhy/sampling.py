"""Three-phase stratified sampling over refactoring populations.

Phase 1 greedily covers per-project and per-type minima, phase 2 fills
under-sampled projects by single-pass reservoir sampling, and phase 3
completes the target size by uniform sampling without replacement.  All
phases draw from one seeded generator, so a fixed seed fixes the sample.
"""

from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Hashable, Iterable, Sequence

from scipy.stats import norm

from .errors import DomainError, InsufficientPool


@dataclass(frozen=True)
class SamplePlan:
    target_n: int
    confidence: float = 0.95
    margin: float = 0.05
    min_per_project: int = 3
    min_per_type: int = 3
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.confidence < 1:
            raise DomainError(f"confidence must be in (0, 1), got {self.confidence}")
        if not 0 < self.margin < 1:
            raise DomainError(f"margin must be in (0, 1), got {self.margin}")
        if self.target_n < 1:
            raise DomainError("target_n must be >= 1")


def cochran_n(confidence: float, margin: float, population: int | None = None) -> int:
    """Sample size for a proportion at worst-case variance p = 0.5.

    The infinite-population size is ceil(z^2 * 0.25 / e^2) with z the
    standard normal quantile at (1 + confidence) / 2.  For a finite
    population the correction n / (1 + (n - 1) / N) is applied to the
    uncorrected value and the result rounded to the nearest integer,
    capped at N.
    """
    if not 0 < confidence < 1 or not 0 < margin < 1:
        raise DomainError("confidence and margin must be in (0, 1)")
    if population is not None and population < 1:
        raise DomainError("population must be >= 1")

    z = float(norm.ppf((1.0 + confidence) / 2.0))
    n0 = z * z * 0.25 / (margin * margin)
    if population is None:
        return math.ceil(n0)
    corrected = n0 / (1.0 + (n0 - 1.0) / population)
    return min(population, max(1, int(math.floor(corrected + 0.5))))


@dataclass
class CoverageShortfall:
    kind: str  # "project" or "type"
    name: str
    wanted: int
    got: int


@dataclass
class SampleResult:
    selected: list = field(default_factory=list)  # (item, phase) pairs
    shortfalls: list[CoverageShortfall] = field(default_factory=list)

    @property
    def items(self) -> list:
        return [item for item, _ in self.selected]


def phase1_greedy(
    population: Sequence,
    project_of: Callable[[object], Hashable],
    type_of: Callable[[object], Hashable],
    min_per_project: int,
    min_per_type: int,
    seed: int,
) -> SampleResult:
    """Greedy coverage of project and type minima.

    Every project with at least min_per_project instances contributes at
    least that many selections, and every type with at least min_per_type
    instances globally reaches that count; strata with fewer instances
    contribute everything they have and the gap is reported.  Selection
    inside a stratum is uniform under the seeded generator.
    """
    rng = random.Random(seed)
    result = SampleResult()
    chosen: set[int] = set()  # indices into population

    by_project: dict[Hashable, list[int]] = {}
    by_type: dict[Hashable, list[int]] = {}
    for i, item in enumerate(population):
        by_project.setdefault(project_of(item), []).append(i)
        by_type.setdefault(type_of(item), []).append(i)

    for project in sorted(by_project, key=str):
        pool = by_project[project]
        take = min(min_per_project, len(pool))
        for i in sorted(rng.sample(pool, take)):
            chosen.add(i)
        if take < min_per_project:
            result.shortfalls.append(
                CoverageShortfall("project", str(project), min_per_project, take)
            )

    for rtype in sorted(by_type, key=str):
        pool = by_type[rtype]
        have = sum(1 for i in pool if i in chosen)
        missing = min(min_per_type, len(pool)) - have
        if missing > 0:
            remaining = [i for i in pool if i not in chosen]
            for i in sorted(rng.sample(remaining, missing)):
                chosen.add(i)
        if len(pool) < min_per_type:
            result.shortfalls.append(
                CoverageShortfall("type", str(rtype), min_per_type, min(min_per_type, len(pool)))
            )

    result.selected = [(population[i], 1) for i in sorted(chosen)]
    return result


def phase2_reservoir(stream: Iterable, k: int, seed: int) -> list:
    """Classic single-pass reservoir sample of size min(k, n).

    Each stream element ends up in the reservoir with probability exactly
    k / n without knowing n in advance.
    """
    if k < 0:
        raise DomainError("k must be >= 0")
    rng = random.Random(seed)
    reservoir: list = []
    for count, item in enumerate(stream, start=1):
        if count <= k:
            reservoir.append(item)
        else:
            j = rng.randrange(count)
            if j < k:
                reservoir[j] = item
    return reservoir


def phase3_random_fill(pool: Sequence, remaining: int, seed: int) -> list:
    """Uniform sample without replacement of exactly `remaining` items."""
    if remaining < 0:
        raise DomainError("remaining must be >= 0")
    if remaining > len(pool):
        raise InsufficientPool(f"need {remaining} items, pool has {len(pool)}")
    rng = random.Random(seed)
    picked = rng.sample(range(len(pool)), remaining)
    return [pool[i] for i in sorted(picked)]


def run_sample_plan(
    population: Sequence,
    plan: SamplePlan,
    project_of: Callable[[object], Hashable],
    type_of: Callable[[object], Hashable],
) -> SampleResult:
    """Compose the three phases into one sample of plan.target_n items.

    Phase 2 receives, per project, the phase-1 shortfall as its k and the
    project's unselected instances as its stream.  Phase 3 fills whatever
    remains from the full unselected pool.  Phases never overlap; when
    coverage minima already exceed the target the sample is larger than
    target_n and that is reported via the returned selection.
    """
    result = phase1_greedy(
        population, project_of, type_of, plan.min_per_project, plan.min_per_type, plan.seed
    )
    taken = {id(item) for item, _ in result.selected}

    per_project_selected: dict[Hashable, int] = {}
    for item, _ in result.selected:
        key = project_of(item)
        per_project_selected[key] = per_project_selected.get(key, 0) + 1

    by_project: dict[Hashable, list] = {}
    for item in population:
        by_project.setdefault(project_of(item), []).append(item)

    for offset, project in enumerate(sorted(by_project, key=str)):
        gap = plan.min_per_project - per_project_selected.get(project, 0)
        if gap <= 0:
            continue
        stream = [item for item in by_project[project] if id(item) not in taken]
        for item in phase2_reservoir(stream, gap, plan.seed + 1 + offset):
            result.selected.append((item, 2))
            taken.add(id(item))

    remaining = max(0, plan.target_n - len(result.selected))
    pool = [item for item in population if id(item) not in taken]
    fill = min(remaining, len(pool))
    for item in phase3_random_fill(pool, fill, plan.seed + 104729):
        result.selected.append((item, 3))
    if fill < remaining:
        result.shortfalls.append(CoverageShortfall("target", "total", plan.target_n, len(result.selected)))
    return result


def write_sample_manifest(result: SampleResult, path: str | Path, id_of, project_of, type_of) -> None:
    """Manifest CSV: instance id, commit, project, type, phase."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance", "commit", "project", "type", "phase"])
        for item, phase in result.selected:
            instance_id, commit_id = id_of(item)
            writer.writerow([instance_id, commit_id, project_of(item), type_of(item), phase])
