"""Scripted mock endpoint speaking the chat-completions wire protocol.

Live model outputs are non-deterministic, so all correctness testing and
the --mock pipeline mode run against this endpoint instead.  Two
responder flavors exist: per-role FIFO scripts for protocol tests, and a
procedural responder that derives stable pseudo-answers from a hash of
each request, giving full branch coverage with byte-reproducible output.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

_MOTIVATION_PHRASES = (
    "Improve readability of the affected code",
    "Reduce duplication across the changed units",
    "Simplify the control flow of the method",
    "Decouple the moved element from its old owner",
    "Prepare the structure for an upcoming feature",
    "Clarify naming to match the domain language",
)

_CATEGORY_NAMES = (
    "Code Clarity and Readability",
    "Code Simplification and Redundancy Reduction",
    "Maintainability and Modularity",
    "Encapsulation and Abstraction",
    "Testing and Reliability",
    "Structural Reorganization",
)


def _digest(payload: dict) -> bytes:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).digest()


def _schema_name(payload: dict) -> str:
    try:
        return payload["response_format"]["json_schema"]["name"]
    except (KeyError, TypeError):
        return ""


def _user_content(payload: dict) -> str:
    for message in payload.get("messages", []):
        if message.get("role") == "user":
            return message.get("content", "")
    return ""


class ProceduralResponder:
    """Deterministic answers derived from a hash of each request."""

    def __call__(self, payload: dict) -> dict:
        schema = _schema_name(payload)
        seed = _digest(payload)
        pick = seed[0]
        if schema == "motivation":
            phrase = _MOTIVATION_PHRASES[pick % len(_MOTIVATION_PHRASES)]
            return {
                "motivation": phrase,
                "description": f"The change applies the refactoring to {phrase.lower()}.",
                "reasoning": "Let's think step by step. The diff shows the restructuring, "
                "the commit message states the intent, so the motivation follows.",
            }
        if schema == "validation_verdict":
            verdict = "agree" if pick % 5 != 0 else "disagree"
            return {
                "verdict": verdict,
                "reasoning": f"Step-by-step review of the proposal leads to {verdict}.",
            }
        if schema == "arbiter_verdict":
            verdict = "agree" if pick % 2 == 0 else "disagree"
            phrase = _MOTIVATION_PHRASES[seed[1] % len(_MOTIVATION_PHRASES)]
            original = _extract(payload, r"Proposed motivation: (.*)")
            return {
                "verdict": verdict,
                "motivation": original if verdict == "agree" else phrase,
                "reasoning": f"Weighing both assessments, the arbiter decides to {verdict}.",
            }
        if schema == "alignment":
            value = ("yes", "no", "extends")[pick % 3]
            return {"alignment": value, "reasoning": f"Comparison yields {value}."}
        if schema == "category_assignment":
            pool = _pool_names(payload)
            if pool and pick % 4 != 0:
                name = pool[pick % len(pool)]
                return {
                    "category": name,
                    "is_new": "false",
                    "description": "",
                    "reasoning": f"The motivation fits the pooled category {name}.",
                }
            name = _CATEGORY_NAMES[seed[1] % len(_CATEGORY_NAMES)]
            return {
                "category": name,
                "is_new": "true" if name not in pool else "false",
                "description": f"Motivations about {name.lower()}.",
                "reasoning": f"No pooled category fits; proposing {name}.",
            }
        if schema == "category_resolution":
            proposals = [
                _extract(payload, r"First assistant proposed: ([^(]+) \("),
                _extract(payload, r"Second assistant proposed: ([^(]+) \("),
            ]
            proposals = [p.strip() for p in proposals if p]
            if proposals and pick % 3 != 0:
                name = proposals[pick % len(proposals)]
                return {
                    "category": name,
                    "is_new": "false",
                    "description": "",
                    "justification": f"The explanation behind {name} matches the motivation better.",
                }
            name = _CATEGORY_NAMES[seed[1] % len(_CATEGORY_NAMES)]
            return {
                "category": name,
                "is_new": "true",
                "description": f"Motivations about {name.lower()}.",
                "justification": "Neither proposal fits well; introducing a sharper category.",
            }
        return {"error": f"unknown schema {schema}"}


class ScriptedResponder:
    """FIFO scripts per model name; falls back to a procedural responder."""

    def __init__(self, scripts: dict[str, list[dict]] | None = None):
        self.scripts = {k: list(v) for k, v in (scripts or {}).items()}
        self.fallback = ProceduralResponder()
        self._lock = threading.Lock()

    def push(self, model_name: str, content: dict) -> None:
        self.scripts.setdefault(model_name, []).append(content)

    def __call__(self, payload: dict) -> dict:
        with self._lock:
            queue = self.scripts.get(payload.get("model", ""))
            if queue:
                return queue.pop(0)
        return self.fallback(payload)


def _extract(payload: dict, pattern: str) -> str:
    match = re.search(pattern, _user_content(payload))
    return match.group(1) if match else ""


def _pool_names(payload: dict) -> list[str]:
    names = []
    in_pool = False
    for line in _user_content(payload).splitlines():
        if line.startswith("Pooled categories so far:"):
            in_pool = True
            continue
        if in_pool:
            if line.startswith("- "):
                names.append(line[2:].split(":", 1)[0].strip())
            elif line.strip() and not line.startswith("("):
                break
    return names


class MockServer:
    """Threaded HTTP server exposing POST /v1/chat/completions."""

    def __init__(self, responder=None, host: str = "127.0.0.1", port: int = 0):
        self.responder = responder or ProceduralResponder()
        self.requests_served = 0
        outer = self

        class Handler(BaseHTTPRequestHandler):
            def do_POST(self):  # noqa: N802 (http.server API)
                if self.path != "/v1/chat/completions":
                    self.send_error(404)
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    payload = json.loads(self.rfile.read(length))
                except json.JSONDecodeError:
                    self.send_error(400, "invalid JSON body")
                    return
                content = outer.responder(payload)
                body = json.dumps(
                    {
                        "id": "mock-" + _digest(payload).hex()[:12],
                        "object": "chat.completion",
                        "model": payload.get("model", "mock"),
                        "choices": [
                            {
                                "index": 0,
                                "message": {"role": "assistant", "content": json.dumps(content)},
                                "finish_reason": "stop",
                            }
                        ],
                    }
                ).encode("utf-8")
                outer.requests_served += 1
                self.send_response(200)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):  # silence per-request stderr noise
                pass

        self._server = ThreadingHTTPServer((host, port), Handler)
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def endpoint(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "MockServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
