"""OpenAI-compatible chat-completions client with a durable exchange cache.

Every exchange is appended to an NDJSON transcript log keyed by a hash
of the canonical request payload before the caller sees it.  A re-run
over cached requests replays responses from the log and performs no
network calls, which both survives crashes between protocol steps and
avoids re-billing.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from ..errors import ContextOverflow, EndpointUnreachable

log = logging.getLogger(__name__)

API_KEY_ENV = "REFWHY_API_KEY"


@dataclass(frozen=True)
class ModelRole:
    role: str  # LRM | V1 | V2 | V3
    endpoint: str  # base URL, e.g. http://localhost:1234
    model_name: str
    temperature: float = 0.8
    context_limit: int = 4096
    timeout: float = 120.0
    max_retries: int = 3

    def __post_init__(self):
        if self.role not in ("LRM", "V1", "V2", "V3"):
            raise ValueError(f"unknown role {self.role!r}")
        if self.context_limit <= 0:
            raise ValueError("context_limit must be positive")

    def api_key(self) -> str | None:
        return os.environ.get(f"{API_KEY_ENV}_{self.role}") or os.environ.get(API_KEY_ENV)


def request_key(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


class TranscriptStore:
    """Append-only NDJSON log of request/response exchanges.

    Appends are serialized through one lock; the in-memory index maps
    request keys to stored responses for replay.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index: dict[str, dict] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    entry = json.loads(line)
                    self._index[entry["key"]] = entry["response"]

    def get(self, key: str) -> dict | None:
        return self._index.get(key)

    def put(self, key: str, request: dict, response: dict) -> None:
        entry = {"key": key, "request": request, "response": response}
        line = json.dumps(entry, sort_keys=True)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._index[key] = response

    def __len__(self) -> int:
        return len(self._index)


@dataclass
class Exchange:
    request: dict
    response: dict
    content: str

    def pair(self) -> dict:
        return {"request": self.request, "response": self.response}


class ChatClient:
    """Synchronous client for POST {base}/v1/chat/completions.

    In-flight requests are bounded by a semaphore and each endpoint can
    be rate limited with a minimum interval between calls.
    """

    def __init__(
        self,
        store: TranscriptStore | None = None,
        max_in_flight: int = 4,
        min_interval: float = 0.0,
        session: requests.Session | None = None,
    ):
        self.store = store
        self.network_calls = 0
        self._session = session or requests.Session()
        self._slots = threading.Semaphore(max_in_flight)
        self._min_interval = min_interval
        self._last_call: dict[str, float] = {}
        self._rate_lock = threading.Lock()
        self._count_lock = threading.Lock()

    def exchange(self, role: ModelRole, messages: list[dict], response_format: dict) -> Exchange:
        payload = {
            "model": role.model_name,
            "messages": messages,
            "temperature": role.temperature,
            "response_format": response_format,
        }
        key = request_key(payload)
        if self.store is not None:
            cached = self.store.get(key)
            if cached is not None:
                return Exchange(request=payload, response=cached, content=_content(cached))

        response = self._post(role, payload)
        if self.store is not None:
            self.store.put(key, payload, response)
        return Exchange(request=payload, response=response, content=_content(response))

    def _post(self, role: ModelRole, payload: dict) -> dict:
        url = role.endpoint.rstrip("/") + "/v1/chat/completions"
        headers = {"Content-Type": "application/json"}
        api_key = role.api_key()
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"

        last_error: Exception | None = None
        for attempt in range(role.max_retries):
            self._throttle(role.endpoint)
            try:
                with self._slots:
                    with self._count_lock:
                        self.network_calls += 1
                    resp = self._session.post(
                        url, json=payload, headers=headers, timeout=role.timeout
                    )
                if resp.status_code == 400 and "context" in resp.text.lower():
                    raise ContextOverflow(f"{role.role}: {resp.text[:200]}")
                resp.raise_for_status()
                return resp.json()
            except ContextOverflow:
                raise
            except (requests.RequestException, ValueError) as exc:
                last_error = exc
                if attempt + 1 < role.max_retries:
                    delay = 0.5 * (2**attempt)
                    log.warning("%s attempt %d failed: %s (retrying in %.1fs)",
                                role.role, attempt + 1, exc, delay)
                    time.sleep(delay)
        raise EndpointUnreachable(
            f"{role.role} endpoint {role.endpoint} failed after {role.max_retries} retries: {last_error}"
        )

    def _throttle(self, endpoint: str) -> None:
        if self._min_interval <= 0:
            return
        with self._rate_lock:
            now = time.monotonic()
            wait = self._last_call.get(endpoint, 0.0) + self._min_interval - now
            self._last_call[endpoint] = max(now, now + wait)
        if wait > 0:
            time.sleep(wait)


def _content(response: dict) -> str:
    try:
        return response["choices"][0]["message"]["content"]
    except (KeyError, IndexError, TypeError):
        return ""
