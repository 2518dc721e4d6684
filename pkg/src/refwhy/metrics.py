"""Per-(commit, file) process metrics over an ordered commit stream.

The accumulator folds commits in stream order.  Every "up to" metric
(commit counts, developer sets, ownership, experience, age) reflects
repository state strictly before the commit being processed; per-commit
metrics (churn, spread, entropy, fix flag) come from the commit itself.
State is then advanced.  Externally computed product metrics are joined
onto emitted vectors from CSV.

Conventions carried by this module:
  * ADEV counts authors active in a trailing window (default 180 days);
    DDEV counts all-time distinct authors.
  * ADD = LA / max(LT, 1) and DELE = LD / max(LT, 1).
  * Ownership attributes cumulative added lines, not blame.
  * EXP is the arithmetic mean of OEXP over all project authors so far.
  * Neighbor commits of a file are all prior commits touching any file
    ever co-modified with it (NCOMM / NADEV / NDDEV); NSCTR counts the
    distinct directories the committer touched across prior commits
    involving the file.
  * NUC aliases COMM and NDEV aliases DDEV (near-duplicate definitions
    across the two source metric suites).
  * Subsystem = first path segment, directory = full parent path.
"""

from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path

from .errors import MalformedCsv
from .history import CommitRecord

log = logging.getLogger(__name__)

CLOCK_SKEW_TOLERANCE = 86400  # seconds

PRODUCT_NUMERIC_FIELDS = (
    "CBO", "WMC", "RFC", "ELOC", "NOM", "NOPM", "DIT", "NOC",
    "NOF", "NOSF", "NOPF", "NOSM", "NOSI", "HsLCOM", "COMREAD_val",
)
PRODUCT_FIELDS = PRODUCT_NUMERIC_FIELDS + ("COMREAD_cat",)

PROCESS_COLUMNS = (
    "COMM", "ADEV", "DDEV", "ADD", "DELE", "OWN", "MINOR", "SCTR",
    "NADEV", "NDDEV", "NCOMM", "NSCTR", "OEXP", "EXP", "ND", "NS", "NF",
    "ENTROPY", "LA", "LD", "LT", "FIX", "NDEV", "AGE", "NUC", "CEXP",
    "REXP", "SEXP",
)
RATIO_COLUMNS = {"ADD", "DELE", "OWN", "OEXP", "EXP", "ENTROPY", "AGE"}

_FIX_RE = re.compile(r"\b(?:fix(?:es|ed)?|bugs?|defects?|patch)\b", re.IGNORECASE)


@dataclass
class ProductMetrics:
    CBO: float | None = None
    WMC: float | None = None
    RFC: float | None = None
    ELOC: float | None = None
    NOM: float | None = None
    NOPM: float | None = None
    DIT: float | None = None
    NOC: float | None = None
    NOF: float | None = None
    NOSF: float | None = None
    NOPF: float | None = None
    NOSM: float | None = None
    NOSI: float | None = None
    HsLCOM: float | None = None
    COMREAD_val: float | None = None
    COMREAD_cat: str | None = None


@dataclass
class MetricVector:
    commit_id: str
    file_path: str
    COMM: int
    ADEV: int
    DDEV: int
    ADD: float
    DELE: float
    OWN: float
    MINOR: int
    SCTR: int
    NADEV: int
    NDDEV: int
    NCOMM: int
    NSCTR: int
    OEXP: float
    EXP: float
    ND: int
    NS: int
    NF: int
    ENTROPY: float
    LA: int
    LD: int
    LT: int
    FIX: bool
    NDEV: int
    AGE: float
    NUC: int
    CEXP: int
    REXP: int
    SEXP: int
    product: ProductMetrics | None = None


def entropy(churns: list[int]) -> float:
    """Normalized Shannon entropy of churn over the files of one commit.

    Only files with churn > 0 participate; with n such files and shares
    p_i the value is -sum(p_i log2 p_i) / log2 n, which is 0 when n <= 1
    or nothing churned.
    """
    active = [c for c in churns if c > 0]
    n = len(active)
    total = sum(active)
    if n <= 1 or total == 0:
        return 0.0
    h = 0.0
    for c in active:
        p = c / total
        h -= p * math.log2(p)
    return h / math.log2(n)


def ownership(added_by_author: dict[str, int]) -> tuple[float, int]:
    """(OWN, MINOR) from cumulative per-author added-line totals.

    OWN is the largest share of added lines; MINOR counts authors whose
    share is strictly below 5%.  Both are 0 while no line was added.
    """
    total = sum(added_by_author.values())
    if total <= 0:
        return 0.0, 0
    shares = [lines / total for lines in added_by_author.values()]
    own = max(shares)
    minor = sum(1 for s in shares if s < 0.05)
    return own, minor


def detect_fix(message: str) -> bool:
    """Defect-fix heuristic: case-insensitive word-boundary keyword match."""
    return bool(_FIX_RE.search(message or ""))


def _directory(path: str) -> str:
    head, _, _ = path.rpartition("/")
    return head if head else "(root)"


def _subsystem(path: str) -> str:
    head, sep, _ = path.partition("/")
    return head if sep else "(root)"


@dataclass
class _FileState:
    commits: list = field(default_factory=list)  # (seq, author, timestamp)
    authors: dict = field(default_factory=dict)  # author -> last touch timestamp
    added_by: dict = field(default_factory=dict)  # author -> cumulative added lines
    last_ts: int | None = None
    author_commits: dict = field(default_factory=dict)  # author -> commit count
    author_times: dict = field(default_factory=dict)  # author -> [timestamps]
    cochanged: set = field(default_factory=set)  # file ids ever co-modified
    committer_dirs: dict = field(default_factory=dict)  # author -> {directories}


class MetricsAccumulator:
    """Stateful stream fold producing one MetricVector per file change.

    Single-threaded per repository; feed commits strictly in stream
    order.  Emitted vectors are collected on ``self.vectors`` so product
    metrics can be joined afterwards.
    """

    def __init__(self, adev_window_days: int = 180, rexp_window_days: int = 30,
                 clock_skew_tolerance: int = CLOCK_SKEW_TOLERANCE):
        self.adev_window = adev_window_days * 86400
        self.rexp_window = rexp_window_days * 86400
        self.clock_skew_tolerance = clock_skew_tolerance
        self.vectors: list[MetricVector] = []
        self._seq = 0
        self._max_ts: int | None = None
        self._path_to_fid: dict[str, int] = {}
        self._next_fid = 0
        self._files: dict[int, _FileState] = {}
        self._author_added: dict[str, int] = {}
        self._total_added = 0
        self._authors: set[str] = set()
        self._pkg_commits: dict[tuple[str, str], int] = {}

    # -- streaming -----------------------------------------------------------

    def accumulate(self, commit: CommitRecord) -> list[MetricVector]:
        if self._max_ts is not None and commit.timestamp < self._max_ts - self.clock_skew_tolerance:
            log.warning(
                "commit %s timestamp regresses %ds beyond tolerance",
                commit.id[:12],
                self._max_ts - commit.timestamp,
            )
        self._max_ts = max(self._max_ts or commit.timestamp, commit.timestamp)

        author = commit.author_id
        now = commit.timestamp
        changes = commit.changes

        nf = len(changes)
        dirs = {_directory(c.path) for c in changes}
        nd = len(dirs)
        ns = len({_subsystem(c.path) for c in changes})
        ent = entropy([c.lines_added + c.lines_deleted for c in changes])
        fix = detect_fix(commit.message)

        exp = self._mean_experience()
        oexp = self._author_share(author)

        out: list[MetricVector] = []
        resolved: list[tuple[int | None, object]] = []
        for change in changes:
            fid = self._resolve_fid(change)
            if fid is None and change.change_kind not in ("added",):
                log.warning(
                    "commit %s modifies unseen file %s; treating as added",
                    commit.id[:12],
                    change.path,
                )
            resolved.append((fid, change))
            state = self._files.get(fid) if fid is not None else None
            out.append(
                self._vector(commit, change, state, author, now,
                             nd=nd, ns=ns, nf=nf, ent=ent, fix=fix, oexp=oexp, exp=exp)
            )

        self._apply(commit, resolved, dirs)
        self.vectors.extend(out)
        return out

    def _vector(self, commit, change, state, author, now, *, nd, ns, nf, ent, fix, oexp, exp):
        la, ld, lt = change.lines_added, change.lines_deleted, change.lines_before
        if state is None:
            comm = adev = ddev = minor = cexp = rexp = 0
            own = 0.0
            age = 0.0
            ncomm = nadev = nddev = nsctr = 0
        else:
            comm = len(state.commits)
            ddev = len(state.authors)
            adev = sum(1 for ts in state.authors.values() if ts > now - self.adev_window)
            own, minor = ownership(state.added_by)
            age = max(0.0, (now - state.last_ts) / 86400.0) if state.last_ts is not None else 0.0
            cexp = state.author_commits.get(author, 0)
            rexp = sum(1 for ts in state.author_times.get(author, ()) if ts > now - self.rexp_window)
            ncomm, nadev, nddev = self._neighborhood(state, now)
            nsctr = len(state.committer_dirs.get(author, ()))
        sexp = self._pkg_commits.get((author, _directory(change.path)), 0)

        return MetricVector(
            commit_id=commit.id,
            file_path=change.path,
            COMM=comm,
            ADEV=adev,
            DDEV=ddev,
            ADD=la / max(lt, 1),
            DELE=ld / max(lt, 1),
            OWN=own,
            MINOR=minor,
            SCTR=nd,
            NADEV=nadev,
            NDDEV=nddev,
            NCOMM=ncomm,
            NSCTR=nsctr,
            OEXP=oexp,
            EXP=exp,
            ND=nd,
            NS=ns,
            NF=nf,
            ENTROPY=ent,
            LA=la,
            LD=ld,
            LT=lt,
            FIX=fix,
            NDEV=ddev,
            AGE=age,
            NUC=comm,
            CEXP=cexp,
            REXP=rexp,
            SEXP=sexp,
        )

    def _neighborhood(self, state: _FileState, now: int) -> tuple[int, int, int]:
        seqs: set[int] = set()
        authors: set[str] = set()
        active: set[str] = set()
        for fid in state.cochanged:
            neighbor = self._files.get(fid)
            if neighbor is None:
                continue
            for seq, author, ts in neighbor.commits:
                if seq in seqs:
                    continue
                seqs.add(seq)
                authors.add(author)
                if ts > now - self.adev_window:
                    active.add(author)
        return len(seqs), len(active), len(authors)

    def _mean_experience(self) -> float:
        if not self._authors or self._total_added <= 0:
            return 0.0
        shares = [100.0 * self._author_added.get(a, 0) / self._total_added for a in self._authors]
        return sum(shares) / len(shares)

    def _author_share(self, author: str) -> float:
        if self._total_added <= 0:
            return 0.0
        return 100.0 * self._author_added.get(author, 0) / self._total_added

    def _resolve_fid(self, change) -> int | None:
        if change.old_path and change.old_path in self._path_to_fid:
            return self._path_to_fid[change.old_path]
        return self._path_to_fid.get(change.path)

    def _apply(self, commit, resolved, dirs):
        seq = self._seq
        self._seq += 1
        author = commit.author_id
        now = commit.timestamp

        fids: list[int] = []
        for fid, change in resolved:
            if fid is None:
                fid = self._next_fid
                self._next_fid += 1
                self._files[fid] = _FileState()
                self._path_to_fid[change.path] = fid
            elif change.old_path and change.old_path in self._path_to_fid:
                # rename: the file identity follows the content
                self._path_to_fid.pop(change.old_path, None)
                self._path_to_fid[change.path] = fid
            fids.append(fid)

        fid_set = set(fids)
        total_added = 0
        for fid, (_, change) in zip(fids, resolved):
            state = self._files[fid]
            state.commits.append((seq, author, now))
            state.authors[author] = now
            if change.lines_added > 0:
                state.added_by[author] = state.added_by.get(author, 0) + change.lines_added
            state.last_ts = now
            state.author_commits[author] = state.author_commits.get(author, 0) + 1
            state.author_times.setdefault(author, []).append(now)
            state.cochanged |= fid_set
            state.committer_dirs.setdefault(author, set()).update(dirs)
            total_added += change.lines_added

        self._author_added[author] = self._author_added.get(author, 0) + total_added
        self._total_added += total_added
        self._authors.add(author)
        for pkg in dirs:
            key = (author, pkg)
            self._pkg_commits[key] = self._pkg_commits.get(key, 0) + 1

    # -- product metrics -----------------------------------------------------

    def ingest_product_metrics(
        self, csv_path: str | Path, comread_thresholds: tuple[float, float] = (0.4, 0.7)
    ) -> int:
        """Join externally computed product metrics onto emitted vectors.

        The CSV must start with ``commit`` and ``file`` columns followed
        by any subset of the product field names.  Returns the number of
        rows joined; unmatched rows and rows with non-numeric cells are
        counted and logged, never fatal.
        """
        by_key = {(v.commit_id, v.file_path): v for v in self.vectors}
        joined = 0
        unmatched = 0
        with open(csv_path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            header = reader.fieldnames or []
            if "commit" not in header or "file" not in header:
                raise MalformedCsv(f"{csv_path}: header must contain 'commit' and 'file'")
            known = [c for c in header if c in PRODUCT_FIELDS]
            for row in reader:
                vec = by_key.get((row["commit"], row["file"]))
                if vec is None:
                    unmatched += 1
                    continue
                product = vec.product or ProductMetrics()
                try:
                    for col in known:
                        cell = row[col]
                        if cell is None or cell == "":
                            continue
                        if col == "COMREAD_cat":
                            product.COMREAD_cat = cell
                        else:
                            setattr(product, col, float(cell))
                except ValueError:
                    log.warning("skipping product row %s:%s with non-numeric cell",
                                row["commit"][:12], row["file"])
                    continue
                if product.COMREAD_val is not None:
                    product.COMREAD_cat = comread_category(product.COMREAD_val, comread_thresholds)
                vec.product = product
                joined += 1
        if unmatched:
            log.warning("%d product metric rows did not match any (commit, file)", unmatched)
        return joined


def comread_category(value: float, thresholds: tuple[float, float] = (0.4, 0.7)) -> str:
    """Map a readability score in [0, 1] onto Low / Medium / High."""
    low, high = thresholds
    if value >= high:
        return "High"
    if value >= low:
        return "Medium"
    return "Low"


def write_metrics_csv(vectors: list[MetricVector], path: str | Path) -> None:
    """Dataset CSV, one row per (commit, file); ratios get 6 decimals, FIX is 0/1."""
    with_product = any(v.product is not None for v in vectors)
    header = ["commit", "file", *PROCESS_COLUMNS]
    if with_product:
        header += list(PRODUCT_FIELDS)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for v in vectors:
            row: list = [v.commit_id, v.file_path]
            for col in PROCESS_COLUMNS:
                value = getattr(v, col)
                if col == "FIX":
                    row.append(int(value))
                elif col in RATIO_COLUMNS:
                    row.append(f"{value:.6f}")
                else:
                    row.append(int(value))
            if with_product:
                product = v.product or ProductMetrics()
                for col in PRODUCT_FIELDS:
                    value = getattr(product, col)
                    if value is None:
                        row.append("")
                    elif col == "COMREAD_cat":
                        row.append(value)
                    else:
                        row.append(f"{value:.6f}")
            writer.writerow(row)


def read_metrics_csv(path: str | Path) -> tuple[list[str], list[dict]]:
    """Read a metrics CSV back as (header, rows of parsed values)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = list(reader.fieldnames or [])
        rows = []
        for raw in reader:
            row: dict = {"commit": raw["commit"], "file": raw["file"]}
            for col in header[2:]:
                cell = raw[col]
                if cell == "" or cell is None:
                    row[col] = None
                elif col == "COMREAD_cat":
                    row[col] = cell
                else:
                    row[col] = float(cell)
            rows.append(row)
        return header, rows


def vector_fields() -> list[str]:
    return [f.name for f in fields(MetricVector)]
