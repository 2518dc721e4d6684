"""Shared fixtures: the deterministic mini-java repository and helpers."""

from __future__ import annotations

import os
import subprocess
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"
sys.path.insert(0, str(FIXTURES))

from mini_java_plan import BASE_TIMESTAMP, DAY, PLAN  # noqa: E402


def _run(repo: Path, *args: str, env: dict | None = None) -> str:
    merged = dict(os.environ)
    merged.update(env or {})
    result = subprocess.run(
        ["git", *args], cwd=repo, env=merged, check=True, capture_output=True, text=True
    )
    return result.stdout


def build_mini_java(target: Path) -> Path:
    """Materialize the fixture plan as a real git repository."""
    target.mkdir(parents=True, exist_ok=True)
    _run(target, "init", "-q", "-b", "master")
    _run(target, "config", "user.name", "fixture")
    _run(target, "config", "user.email", "fixture@example.com")

    for index, commit in enumerate(PLAN):
        name, email = commit["author"]
        stamp = f"{BASE_TIMESTAMP + index * DAY} +0000"
        env = {
            "GIT_AUTHOR_NAME": name,
            "GIT_AUTHOR_EMAIL": email,
            "GIT_AUTHOR_DATE": stamp,
            "GIT_COMMITTER_NAME": name,
            "GIT_COMMITTER_EMAIL": email,
            "GIT_COMMITTER_DATE": stamp,
        }
        merged = False
        for step in commit["steps"]:
            kind = step[0]
            if kind == "write":
                _, path, content = step
                file_path = target / path
                file_path.parent.mkdir(parents=True, exist_ok=True)
                if isinstance(content, bytes):
                    file_path.write_bytes(content)
                else:
                    file_path.write_text(content, encoding="utf-8")
                _run(target, "add", path)
            elif kind == "move":
                _, old, new = step
                (target / new).parent.mkdir(parents=True, exist_ok=True)
                _run(target, "mv", old, new)
            elif kind == "branch":
                _run(target, "checkout", "-q", "-b", step[1])
            elif kind == "checkout":
                _run(target, "checkout", "-q", step[1])
            elif kind == "merge":
                _run(target, "merge", "--no-ff", "-q", "-m", commit["message"], step[1], env=env)
                merged = True
            else:
                raise ValueError(f"unknown plan step {kind}")
        if not merged:
            _run(target, "commit", "-q", "--allow-empty", "-m", commit["message"], env=env)
    return target


@pytest.fixture(scope="session")
def mini_java_repo(tmp_path_factory) -> Path:
    return build_mini_java(tmp_path_factory.mktemp("repos") / "mini-java")


@pytest.fixture(scope="session")
def mini_java_records(mini_java_repo):
    from refwhy.history import stream_commits

    return list(stream_commits(mini_java_repo))
