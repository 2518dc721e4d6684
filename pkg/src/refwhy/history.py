"""Streaming of a git repository's commit history with per-file line deltas.

Reads the object store through git plumbing commands: one rev-list pass
fixes the order (topology first, commit timestamp as tiebreak, oldest
first), one cat-file --batch process supplies commit metadata, and one
diff-tree call per commit yields status plus numstat counts.  Merge
commits are diffed against their first parent only; rename detection
runs at a configurable similarity threshold (default 50%).
"""

from __future__ import annotations

import json
import logging
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

from .errors import CorruptHistory, EmptyIdentity, RepoNotFound

log = logging.getLogger(__name__)

EMPTY_TREE = "4b825dc642cb6eb9a060e54bf8d69288fbee4904"
_GIT_ENV = {"GIT_TERMINAL_PROMPT": "0"}


@dataclass(frozen=True)
class FileChange:
    path: str
    old_path: str | None
    lines_added: int
    lines_deleted: int
    lines_before: int
    change_kind: str  # added | modified | deleted | renamed


@dataclass(frozen=True)
class CommitRecord:
    id: str
    author_id: str
    timestamp: int  # committer time, seconds since epoch (UTC)
    message: str
    parent_ids: tuple[str, ...]
    changes: tuple[FileChange, ...] = field(default_factory=tuple)

    @property
    def is_merge(self) -> bool:
        return len(self.parent_ids) > 1


def normalize_author(name: str, email: str) -> str:
    """Stable author key: lowercase-trimmed email, else lowercase-trimmed name."""
    email = (email or "").strip().lower()
    if email:
        return email
    name = (name or "").strip().lower()
    if name:
        return name
    raise EmptyIdentity("author has neither name nor email")


def count_effective_loc(content: str, language: str = "other") -> int:
    """Lines that are neither blank nor comment-only.

    For ``java`` a line-oriented scanner handles ``//`` and ``/* ... */``
    spanning lines; comment markers inside string or char literals are
    ignored only while the literal stays on one line (an unterminated
    literal resets at the line break).  For any other language only blank
    lines are excluded.
    """
    if language != "java":
        return sum(1 for line in content.splitlines() if line.strip())

    eloc = 0
    in_block = False
    for line in content.splitlines():
        has_code = False
        in_string = False
        in_char = False
        i = 0
        n = len(line)
        while i < n:
            ch = line[i]
            if in_block:
                if ch == "*" and i + 1 < n and line[i + 1] == "/":
                    in_block = False
                    i += 2
                    continue
                i += 1
                continue
            if in_string:
                if ch == "\\":
                    i += 2
                    continue
                if ch == '"':
                    in_string = False
                i += 1
                continue
            if in_char:
                if ch == "\\":
                    i += 2
                    continue
                if ch == "'":
                    in_char = False
                i += 1
                continue
            if ch == "/" and i + 1 < n and line[i + 1] == "/":
                break  # rest of line is a comment
            if ch == "/" and i + 1 < n and line[i + 1] == "*":
                in_block = True
                i += 2
                continue
            if ch == '"':
                in_string = True
                has_code = True
                i += 1
                continue
            if ch == "'":
                in_char = True
                has_code = True
                i += 1
                continue
            if not ch.isspace():
                has_code = True
            i += 1
        if has_code:
            eloc += 1
    return eloc


def stream_commits(
    repo_path: str | Path,
    order: str = "oldest_first",
    rename_threshold: int = 50,
) -> Iterator[CommitRecord]:
    """Yield every commit reachable from HEAD exactly once, oldest first.

    Ordering is topological with the commit timestamp as tiebreak.  File
    deltas of merge commits are computed against the first parent.  A
    repository with no commits yields nothing.

    Raises RepoNotFound when the path is not a readable git repository
    and CorruptHistory (with the offending hash) on unreadable objects.
    """
    if order != "oldest_first":
        raise ValueError(f"unsupported order {order!r}")
    repo = Path(repo_path)
    if not repo.exists():
        raise RepoNotFound(str(repo))
    try:
        _git(repo, "rev-parse", "--git-dir")
    except subprocess.CalledProcessError as exc:
        raise RepoNotFound(f"{repo}: {exc.stderr.decode(errors='replace').strip()}") from exc

    try:
        out = _git(repo, "rev-list", "--date-order", "--reverse", "HEAD")
    except subprocess.CalledProcessError:
        return  # repository without commits
    hashes = out.decode().split()
    if not hashes:
        return

    reader = _CommitObjectReader(repo)
    try:
        for commit_id in hashes:
            meta = reader.read(commit_id)
            base = meta.parents[0] if meta.parents else EMPTY_TREE
            changes = _diff_commit(repo, base, commit_id, rename_threshold, reader)
            yield CommitRecord(
                id=commit_id,
                author_id=normalize_author(meta.author_name, meta.author_email),
                timestamp=meta.committer_time,
                message=meta.message,
                parent_ids=tuple(meta.parents),
                changes=tuple(changes),
            )
    finally:
        reader.close()


@dataclass
class _CommitMeta:
    parents: list[str]
    author_name: str
    author_email: str
    committer_time: int
    message: str


class _CommitObjectReader:
    """Long-lived ``git cat-file --batch`` process for objects and blobs."""

    def __init__(self, repo: Path):
        self._proc = subprocess.Popen(
            ["git", "cat-file", "--batch"],
            cwd=repo,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            env=_env(),
        )

    def close(self):
        if self._proc.stdin:
            self._proc.stdin.close()
        self._proc.wait(timeout=30)

    def _fetch(self, spec: str) -> bytes | None:
        assert self._proc.stdin and self._proc.stdout
        self._proc.stdin.write(spec.encode() + b"\n")
        self._proc.stdin.flush()
        header = self._proc.stdout.readline().decode(errors="replace").strip()
        if header.endswith(("missing", "ambiguous")):
            return None
        parts = header.split()
        size = int(parts[-1])
        body = self._proc.stdout.read(size)
        self._proc.stdout.read(1)  # trailing newline
        return body

    def read(self, commit_id: str) -> _CommitMeta:
        body = self._fetch(commit_id)
        if body is None:
            raise CorruptHistory(commit_id, "object missing")
        return _parse_commit_object(commit_id, body)

    def blob_line_count(self, rev: str, path: str) -> int:
        body = self._fetch(f"{rev}:{path}")
        if body is None:
            raise CorruptHistory(rev, f"blob missing for {path}")
        return len(body.splitlines())


def _parse_commit_object(commit_id: str, body: bytes) -> _CommitMeta:
    try:
        header, _, message = body.partition(b"\n\n")
        parents: list[str] = []
        author_name = author_email = ""
        committer_time = 0
        for line in header.decode("utf-8", errors="replace").splitlines():
            if line.startswith("parent "):
                parents.append(line.split()[1])
            elif line.startswith("author "):
                author_name, author_email = _parse_ident(line[len("author ") :])
            elif line.startswith("committer "):
                _, _ = _parse_ident(line[len("committer ") :])
                committer_time = int(line.rsplit(" ", 2)[-2])
        return _CommitMeta(
            parents=parents,
            author_name=author_name,
            author_email=author_email,
            committer_time=committer_time,
            message=message.decode("utf-8", errors="replace"),
        )
    except (ValueError, IndexError) as exc:
        raise CorruptHistory(commit_id, f"unparseable commit object: {exc}") from exc


def _parse_ident(ident: str) -> tuple[str, str]:
    # "Name <email> timestamp tz"
    lt = ident.find("<")
    gt = ident.find(">", lt)
    name = ident[:lt].strip() if lt >= 0 else ident.strip()
    email = ident[lt + 1 : gt].strip() if 0 <= lt < gt else ""
    return name, email


_STATUS_KIND = {
    "A": "added",
    "M": "modified",
    "D": "deleted",
    "R": "renamed",
    "C": "added",
    "T": "modified",
}


def _diff_commit(
    repo: Path, base: str, commit_id: str, rename_threshold: int, reader: _CommitObjectReader
) -> list[FileChange]:
    try:
        out = _git(
            repo,
            "diff-tree",
            "-r",
            "-z",
            f"-M{rename_threshold}%",
            "--raw",
            "--numstat",
            base,
            commit_id,
        )
    except subprocess.CalledProcessError as exc:
        raise CorruptHistory(commit_id, exc.stderr.decode(errors="replace").strip()) from exc

    tokens = out.decode("utf-8", errors="replace").split("\0")
    # Raw entries come first (":...status", path[, path2]), numstat after.
    entries: list[dict] = []
    numstat: dict[tuple[str | None, str], tuple[int, int]] = {}
    i = 0
    while i < len(tokens):
        token = tokens[i]
        if not token:
            i += 1
            continue
        if token.startswith(":"):
            status = token.split(" ")[-1][0]
            kind = _STATUS_KIND.get(status, "modified")
            if status in ("R", "C"):
                old_path, path = tokens[i + 1], tokens[i + 2]
                i += 3
            else:
                old_path, path = None, tokens[i + 1]
                i += 2
            entries.append({"path": path, "old_path": old_path, "kind": kind})
        else:
            la_s, ld_s, rest = token.split("\t", 2)
            la = 0 if la_s == "-" else int(la_s)
            ld = 0 if ld_s == "-" else int(ld_s)
            if rest == "":  # rename form: two NUL-separated paths follow
                old_path, path = tokens[i + 1], tokens[i + 2]
                numstat[(old_path, path)] = (la, ld)
                i += 3
            else:
                numstat[(None, rest)] = (la, ld)
                i += 1

    changes: list[FileChange] = []
    for entry in entries:
        key = (entry["old_path"], entry["path"])
        la, ld = numstat.get(key, (0, 0))
        if entry["kind"] == "added":
            lines_before = 0
        else:
            source = entry["old_path"] or entry["path"]
            lines_before = reader.blob_line_count(base, source)
        changes.append(
            FileChange(
                path=entry["path"],
                old_path=entry["old_path"],
                lines_added=la,
                lines_deleted=ld,
                lines_before=lines_before,
                change_kind=entry["kind"],
            )
        )
    return changes


def commit_diff_text(
    repo_path: str | Path, commit_id: str, paths: Iterable[str] | None = None
) -> str:
    """Unified diff of a commit against its first parent (or the empty tree)."""
    repo = Path(repo_path)
    out = _git(repo, "rev-list", "--parents", "-n", "1", commit_id)
    ids = out.decode().split()
    base = ids[1] if len(ids) > 1 else EMPTY_TREE
    args = ["diff-tree", "-p", "-M50%", base, commit_id]
    if paths:
        args += ["--", *paths]
    try:
        return _git(repo, *args).decode("utf-8", errors="replace")
    except subprocess.CalledProcessError as exc:
        raise CorruptHistory(commit_id, exc.stderr.decode(errors="replace").strip()) from exc


def file_content_at(repo_path: str | Path, commit_id: str, path: str) -> str:
    """File text at a given revision, lossy-decoded."""
    out = _git(Path(repo_path), "show", f"{commit_id}:{path}")
    return out.decode("utf-8", errors="replace")


def dump_stream_ndjson(records: Iterable[CommitRecord], path: str | Path) -> int:
    """Write the commit stream as one JSON object per line; returns the count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(record_to_json(rec) + "\n")
            n += 1
    return n


def record_to_json(rec: CommitRecord) -> str:
    return json.dumps(
        {
            "id": rec.id,
            "author_id": rec.author_id,
            "timestamp": rec.timestamp,
            "message": rec.message,
            "parent_ids": list(rec.parent_ids),
            "changes": [
                {
                    "path": c.path,
                    "old_path": c.old_path,
                    "lines_added": c.lines_added,
                    "lines_deleted": c.lines_deleted,
                    "lines_before": c.lines_before,
                    "change_kind": c.change_kind,
                }
                for c in rec.changes
            ],
        },
        sort_keys=True,
    )


def record_from_json(line: str) -> CommitRecord:
    raw = json.loads(line)
    return CommitRecord(
        id=raw["id"],
        author_id=raw["author_id"],
        timestamp=raw["timestamp"],
        message=raw["message"],
        parent_ids=tuple(raw["parent_ids"]),
        changes=tuple(
            FileChange(
                path=c["path"],
                old_path=c["old_path"],
                lines_added=c["lines_added"],
                lines_deleted=c["lines_deleted"],
                lines_before=c["lines_before"],
                change_kind=c["change_kind"],
            )
            for c in raw["changes"]
        ),
    )


def read_stream_ndjson(path: str | Path) -> list[CommitRecord]:
    with open(path, encoding="utf-8") as fh:
        return [record_from_json(line) for line in fh if line.strip()]


def _env() -> dict:
    import os

    env = dict(os.environ)
    env.update(_GIT_ENV)
    return env


def _git(repo: Path, *args: str) -> bytes:
    return subprocess.run(
        ["git", *args],
        cwd=repo,
        check=True,
        capture_output=True,
        env=_env(),
    ).stdout
