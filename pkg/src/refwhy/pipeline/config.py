"""Key-value configuration file for the pipeline.

The format is plain ``key = value`` lines with ``#`` comments.  Dotted
keys group settings (``sample.seed``, ``role.lrm.model``); list values
are comma separated.  Secrets never live here: API keys come from the
environment (REFWHY_API_KEY, per-role REFWHY_API_KEY_<ROLE>).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from ..errors import ConfigError
from ..llm.client import ModelRole
from ..sampling import SamplePlan

ROLE_NAMES = ("LRM", "V1", "V2", "V3")

_DEFAULT_CONTEXT = {"LRM": 4096, "V1": 4096, "V2": 8129, "V3": 8129}


@dataclass
class ReviewConfig:
    bind: str = "127.0.0.1"
    port: int = 8099
    reviewers: list[str] = field(default_factory=list)
    static_dir: str | None = None


@dataclass
class Thresholds:
    comread_low: float = 0.4
    comread_high: float = 0.7
    adev_window_days: int = 180
    rexp_window_days: int = 30


@dataclass
class PipelineConfig:
    repos: list[Path]
    rm_json_dir: Path
    output_dir: Path
    sample: SamplePlan
    roles: dict[str, ModelRole]
    review: ReviewConfig
    thresholds: Thresholds
    product_csv: Path | None = None
    prompt_dir: Path | None = None
    classify_workers: int = 1
    analyze_trees: int = 200
    analyze_seed: int = 0

    @classmethod
    def from_file(cls, path: str | Path) -> "PipelineConfig":
        raw = parse_kv_file(path)
        base = Path(path).resolve().parent

        def resolve(value: str) -> Path:
            p = Path(value)
            return p if p.is_absolute() else base / p

        repos = [resolve(v) for v in _split(raw.get("repos", ""))]
        if "rm_json_dir" not in raw or "output_dir" not in raw:
            raise ConfigError("config must set rm_json_dir and output_dir")

        plan = SamplePlan(
            target_n=int(raw.get("sample.target_n", 385)),
            confidence=float(raw.get("sample.confidence", 0.95)),
            margin=float(raw.get("sample.margin", 0.05)),
            min_per_project=int(raw.get("sample.min_per_project", 3)),
            min_per_type=int(raw.get("sample.min_per_type", 3)),
            seed=int(raw.get("sample.seed", 0)),
        )

        roles: dict[str, ModelRole] = {}
        for name in ROLE_NAMES:
            prefix = f"role.{name.lower()}."
            keys = {k for k in raw if k.startswith(prefix)}
            if not keys:
                continue
            roles[name] = ModelRole(
                role=name,
                endpoint=raw.get(prefix + "endpoint", ""),
                model_name=raw.get(prefix + "model", ""),
                temperature=float(raw.get(prefix + "temperature", 0.8)),
                context_limit=int(raw.get(prefix + "context_limit", _DEFAULT_CONTEXT[name])),
                timeout=float(raw.get(prefix + "timeout", 120)),
                max_retries=int(raw.get(prefix + "max_retries", 3)),
            )

        review = ReviewConfig(
            bind=raw.get("review.bind", "127.0.0.1"),
            port=int(raw.get("review.port", 8099)),
            reviewers=_split(raw.get("review.reviewers", "")),
            static_dir=raw.get("review.static_dir") or None,
        )
        thresholds = Thresholds(
            comread_low=float(raw.get("thresholds.comread_low", 0.4)),
            comread_high=float(raw.get("thresholds.comread_high", 0.7)),
            adev_window_days=int(raw.get("thresholds.adev_window_days", 180)),
            rexp_window_days=int(raw.get("thresholds.rexp_window_days", 30)),
        )

        return cls(
            repos=repos,
            rm_json_dir=resolve(raw["rm_json_dir"]),
            output_dir=resolve(raw["output_dir"]),
            sample=plan,
            roles=roles,
            review=review,
            thresholds=thresholds,
            product_csv=resolve(raw["product_csv"]) if raw.get("product_csv") else None,
            prompt_dir=resolve(raw["prompt_dir"]) if raw.get("prompt_dir") else None,
            classify_workers=int(raw.get("classify.workers", 1)),
            analyze_trees=int(raw.get("analyze.n_trees", 200)),
            analyze_seed=int(raw.get("analyze.seed", 0)),
        )

    def validate_mine(self) -> None:
        if not self.repos:
            raise ConfigError("no repositories configured")
        for repo in self.repos:
            if not repo.exists():
                raise ConfigError(f"repository path does not exist: {repo}")
        if not self.rm_json_dir.exists():
            raise ConfigError(f"rm_json_dir does not exist: {self.rm_json_dir}")

    def validate_classify(self, mock: bool) -> None:
        if mock:
            return
        missing = [n for n in ROLE_NAMES if n not in self.roles]
        if missing:
            raise ConfigError(f"classify needs all four roles configured; missing {missing}")
        for role in self.roles.values():
            if not role.endpoint or not role.model_name:
                raise ConfigError(f"role {role.role} needs endpoint and model")

    def mock_roles(self, endpoint: str) -> dict[str, ModelRole]:
        """Role set pointed at a scripted endpoint (configs stay optional)."""
        roles = {}
        for name in ROLE_NAMES:
            configured = self.roles.get(name)
            roles[name] = ModelRole(
                role=name,
                endpoint=endpoint,
                model_name=configured.model_name if configured and configured.model_name else f"mock-{name.lower()}",
                temperature=configured.temperature if configured else 0.8,
                context_limit=configured.context_limit if configured else _DEFAULT_CONTEXT[name],
                timeout=10.0,
                max_retries=2,
            )
        return roles


def parse_kv_file(path: str | Path) -> dict[str, str]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    values: dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()
    return values


def _split(value: str) -> list[str]:
    return [part.strip() for part in value.split(",") if part.strip()]
