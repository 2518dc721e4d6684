"""Parsing of RefactoringMiner 3.x JSON output into typed instances."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .errors import MalformedJson, UnknownRefactoringType
from .taxonomy import CATALOGUE, RefactoringType, lookup

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class LocationRef:
    """One side-annotated code location: (file path, element kind, element name)."""

    side: str  # "left" or "right"
    file_path: str
    element_kind: str
    element_name: str


@dataclass(frozen=True)
class RefactoringInstance:
    instance_id: str
    commit_id: str
    type: RefactoringType
    description: str
    locations: tuple[LocationRef, ...]
    project: str = ""


def parse_rm_json(path: str | Path, project: str = "") -> list[RefactoringInstance]:
    """Parse a RefactoringMiner output file into typed instances.

    The file must carry a top-level ``commits`` array whose entries hold
    ``sha1`` and a ``refactorings`` array of ``type`` / ``description`` /
    ``leftSideLocations`` / ``rightSideLocations`` objects.  Commits with
    an empty refactorings array are discarded.  Unknown type strings
    raise UnknownRefactoringType rather than being coerced.
    """
    path = Path(path)
    name = project or path.stem
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedJson(f"{path}: {exc}") from exc

    if not isinstance(payload, dict) or not isinstance(payload.get("commits"), list):
        raise MalformedJson(f"{path}: missing top-level 'commits' array")

    instances: list[RefactoringInstance] = []
    for commit in payload["commits"]:
        if not isinstance(commit, dict) or "sha1" not in commit:
            raise MalformedJson(f"{path}: commit entry without sha1")
        sha1 = str(commit["sha1"])
        refactorings = commit.get("refactorings")
        if not isinstance(refactorings, list):
            raise MalformedJson(f"{path}: commit {sha1} without refactorings array")
        if not refactorings:
            continue  # commits without refactorings are discarded at ingestion
        for seq, entry in enumerate(refactorings):
            type_name = entry.get("type")
            rtype = lookup(type_name) if isinstance(type_name, str) else None
            if rtype is None:
                raise UnknownRefactoringType(str(type_name), sha1)
            locations = tuple(
                _locations("left", entry.get("leftSideLocations", []))
            ) + tuple(_locations("right", entry.get("rightSideLocations", [])))
            instances.append(
                RefactoringInstance(
                    instance_id=f"{sha1[:12]}:{seq}",
                    commit_id=sha1,
                    type=rtype,
                    description=str(entry.get("description", "")),
                    locations=locations,
                    project=name,
                )
            )
    return instances


def _locations(side: str, raw) -> Iterable[LocationRef]:
    for loc in raw or []:
        yield LocationRef(
            side=side,
            file_path=str(loc.get("filePath", "")),
            element_kind=str(loc.get("codeElementType", "")),
            element_name=str(loc.get("codeElement", "") or ""),
        )


def frequency_table(instances: Iterable[RefactoringInstance]) -> dict[str, int]:
    """Exact multiset counts per canonical type name; absent types map to 0."""
    counts = Counter(inst.type.name for inst in instances)
    return {rt.name: counts.get(rt.name, 0) for rt in CATALOGUE}


def join_to_commits(
    instances: Iterable[RefactoringInstance], commit_ids: set[str]
) -> tuple[list[RefactoringInstance], list[RefactoringInstance]]:
    """Split instances into (joined, unjoined) against a mined commit set.

    Join failures are returned for reporting, never silently dropped.
    """
    joined, unjoined = [], []
    for inst in instances:
        (joined if inst.commit_id in commit_ids else unjoined).append(inst)
    if unjoined:
        log.warning("%d refactoring instances did not join to any mined commit", len(unjoined))
    return joined, unjoined


def instance_to_json(inst: RefactoringInstance) -> str:
    return json.dumps(
        {
            "instance_id": inst.instance_id,
            "commit_id": inst.commit_id,
            "type": inst.type.name,
            "description": inst.description,
            "locations": [
                [loc.side, loc.file_path, loc.element_kind, loc.element_name]
                for loc in inst.locations
            ],
            "project": inst.project,
        },
        sort_keys=True,
    )


def instance_from_json(line: str) -> RefactoringInstance:
    raw = json.loads(line)
    rtype = lookup(raw["type"])
    if rtype is None:
        raise UnknownRefactoringType(raw["type"], raw.get("commit_id", "?"))
    return RefactoringInstance(
        instance_id=raw["instance_id"],
        commit_id=raw["commit_id"],
        type=rtype,
        description=raw["description"],
        locations=tuple(LocationRef(*loc) for loc in raw["locations"]),
        project=raw.get("project", ""),
    )


def write_instances_ndjson(instances: Iterable[RefactoringInstance], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for inst in instances:
            fh.write(instance_to_json(inst) + "\n")


def read_instances_ndjson(path: str | Path) -> list[RefactoringInstance]:
    with open(path, encoding="utf-8") as fh:
        return [instance_from_json(line) for line in fh if line.strip()]
