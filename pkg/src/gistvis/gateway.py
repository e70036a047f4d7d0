"""Chat-completion access with retries, caching, and a scripted test backend.

Two backends speak the same ``complete(request) -> text`` contract: a live
generic chat-completion HTTP endpoint, and a deterministic scripted backend
mapping request fingerprints (or ordered match rules) to canned responses.
Structured parsing turns raw model text into booleans, choices, segment
lists, or extraction tables, with bounded corrective re-prompting.
"""

from __future__ import annotations

import hashlib
import json
import os
import re
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

API_KEY_ENV = "GISTVIS_API_KEY"

DEFAULT_TEMPERATURE = 0.0
DEFAULT_MAX_OUTPUT_TOKENS = 1024

CORRECTIVE_SUFFIX = (
    "\n\nYour previous answer could not be parsed. "
    "Answer again using exactly the requested output format and nothing else."
)


class GatewayError(RuntimeError):
    """Transport exhausted after all retries; carries the stage tag."""

    def __init__(self, tag: str, message: str):
        self.tag = tag
        super().__init__(f"[{tag}] {message}")


class ScriptMissError(RuntimeError):
    """Scripted backend had no entry for the request (test misconfiguration).

    Deliberately not a :class:`GatewayError`: stages swallow gateway errors
    into degraded facts, but a script gap must fail the run loudly.
    """

    def __init__(self, tag: str, message: str):
        self.tag = tag
        super().__init__(f"[{tag}] {message}")


class TransportError(RuntimeError):
    """A single failed transport attempt (retried by the gateway)."""


class StructuredOutputError(GatewayError):
    """Model text never parsed into the expected shape."""


@dataclass(frozen=True)
class PromptRequest:
    system_text: str
    user_text: str
    temperature: float = DEFAULT_TEMPERATURE
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    tag: str = ""

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_output_tokens <= 0:
            raise ValueError("max_output_tokens must be > 0")


def fingerprint(req: PromptRequest, model_id: str) -> str:
    """Stable hash over everything that determines the model's answer."""
    payload = json.dumps(
        {
            "system": req.system_text,
            "user": req.user_text,
            "temperature": req.temperature,
            "max_output_tokens": req.max_output_tokens,
            "model": model_id,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Backends


@dataclass
class ScriptRule:
    """Ordered fallback matcher: tag and/or user-text substring."""

    response: str
    tag: Optional[str] = None
    user_contains: Optional[str] = None
    fail_times: int = 0  # raise TransportError this many times before answering

    def matches(self, req: PromptRequest) -> bool:
        if self.tag is not None and self.tag != req.tag:
            return False
        if self.user_contains is not None and self.user_contains not in req.user_text:
            return False
        return True


class ScriptedBackend:
    """Deterministic stand-in for the model.

    Resolution order: exact fingerprint table first, then the first matching
    rule. A miss raises :class:`ScriptMissError` so test gaps surface loudly.
    """

    kind = "scripted"
    model_id = "scripted"

    def __init__(self, responses: Optional[dict[str, str]] = None,
                 rules: Optional[Sequence[ScriptRule]] = None):
        self.responses = dict(responses or {})
        self.rules = list(rules or [])
        self.calls: list[PromptRequest] = []
        self._fail_counts: dict[int, int] = {}

    def script(self, req: PromptRequest, response: str) -> None:
        """Register a canned response for exactly this request."""
        self.responses[fingerprint(req, self.model_id)] = response

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        data = json.loads(Path(path).read_text(encoding="utf-8"))
        rules = [
            ScriptRule(
                response=r["response"],
                tag=r.get("tag"),
                user_contains=r.get("user_contains"),
                fail_times=r.get("fail_times", 0),
            )
            for r in data.get("rules", [])
        ]
        return cls(responses=data.get("responses"), rules=rules)

    def complete(self, req: PromptRequest) -> str:
        self.calls.append(req)
        fp = fingerprint(req, self.model_id)
        if fp in self.responses:
            return self.responses[fp]
        for i, rule in enumerate(self.rules):
            if rule.matches(req):
                failed = self._fail_counts.get(i, 0)
                if failed < rule.fail_times:
                    self._fail_counts[i] = failed + 1
                    raise TransportError(f"scripted failure {failed + 1}/{rule.fail_times}")
                return rule.response
        raise ScriptMissError(req.tag, f"no scripted response for fingerprint {fp}")


class LiveHttpBackend:
    """Generic chat-completion HTTP backend (model id + message list)."""

    kind = "live_http"

    def __init__(self, endpoint: str, model_id: str,
                 api_key: Optional[str] = None, timeout: float = 60.0):
        self.endpoint = endpoint
        self.model_id = model_id
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.timeout = timeout

    def complete(self, req: PromptRequest) -> str:
        import requests

        body = {
            "model": self.model_id,
            "messages": [
                {"role": "system", "content": req.system_text},
                {"role": "user", "content": req.user_text},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_output_tokens,
        }
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            resp = requests.post(self.endpoint, json=body, headers=headers,
                                 timeout=self.timeout)
            resp.raise_for_status()
            payload = resp.json()
            return payload["choices"][0]["message"]["content"]
        except Exception as exc:  # noqa: BLE001 - normalized into one retryable kind
            raise TransportError(str(exc)) from exc


class TokenBucketLimiter:
    """Serializes token acquisition for concurrent callers."""

    def __init__(self, rate_per_second: float, capacity: int = 1):
        self.rate = rate_per_second
        self.capacity = capacity
        self._tokens = float(capacity)
        self._last = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = time.monotonic()
                self._tokens = min(self.capacity, self._tokens + (now - self._last) * self.rate)
                self._last = now
                if self._tokens >= 1:
                    self._tokens -= 1
                    return
                wait = (1 - self._tokens) / self.rate
            time.sleep(wait)


# ---------------------------------------------------------------------------
# Structured parsing


def parse_boolean_verdict(text: str) -> bool:
    token = re.sub(r"[^a-z]", " ", text.strip().lower()).split()
    if token and token[0] in ("true", "yes"):
        return True
    if token and token[0] in ("false", "no"):
        return False
    raise ValueError(f"not a true/false answer: {text!r}")


def parse_single_choice(text: str, options: Sequence[str]) -> str:
    cleaned = text.strip().strip(".,:;\"'").lower()
    for option in options:
        if cleaned == option.lower():
            return option
    contained = [o for o in options if re.search(rf"\b{re.escape(o.lower())}\b", cleaned)]
    if len(contained) == 1:
        return contained[0]
    raise ValueError(f"answer {text!r} is not one of {list(options)}")


_LIST_MARKER = re.compile(r"^\s*(?:[-*•]|\d+[.)])\s*")


def parse_segment_list(text: str) -> list[str]:
    lines = []
    for raw in text.splitlines():
        line = _LIST_MARKER.sub("", raw).strip()
        if line and not line.startswith("```"):
            lines.append(line)
    if not lines:
        raise ValueError("no segments in response")
    return lines


def parse_extraction_table(text: str) -> dict[str, Any]:
    """Parse the fenced pipe-delimited extraction format.

    Returns ``{"rows": [(space, breakdown, kind_text, feature, value_text)],
    "attribute": str | None, "positions": [str]}``. Lines outside the fence
    are ignored except ``attribute:`` and ``position:`` directives.
    """
    rows: list[tuple[str, str, str, str, str]] = []
    attribute: Optional[str] = None
    positions: list[str] = []
    in_fence = False
    saw_fence = "```" in text
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("```"):
            in_fence = not in_fence
            continue
        lowered = line.lower()
        if lowered.startswith("attribute:"):
            attribute = line.split(":", 1)[1].strip() or None
            continue
        if lowered.startswith("position:"):
            positions.extend(p.strip() for p in line.split(":", 1)[1].split(";") if p.strip())
            continue
        if (in_fence or not saw_fence) and "|" in line:
            cells = [c.strip() for c in line.split("|")]
            if len(cells) == 5 and cells[0].lower() != "space":
                rows.append(tuple(cells))  # type: ignore[arg-type]
    if not rows and attribute is None and not positions:
        raise ValueError("no extraction rows in response")
    return {"rows": rows, "attribute": attribute, "positions": positions}


# ---------------------------------------------------------------------------
# Gateway


@dataclass
class LogEntry:
    fingerprint: str
    tag: str
    response: str
    latency: float
    attempts: int


class Gateway:
    """Retrying, caching front door to one backend.

    Safe for concurrent callers; cache writes go through a temp file rename
    so readers never observe partial entries.
    """

    def __init__(self, backend, cache_dir: Optional[str | Path] = None,
                 max_transport_retries: int = 3, max_reprompts: int = 2,
                 backoff_base: float = 0.5,
                 limiter: Optional[TokenBucketLimiter] = None):
        self.backend = backend
        self.cache_dir = Path(cache_dir) if cache_dir else None
        self.max_transport_retries = max_transport_retries
        self.max_reprompts = max_reprompts
        self.backoff_base = backoff_base
        self.limiter = limiter
        self.log: list[LogEntry] = []
        self._log_lock = threading.Lock()

    # -- caching -----------------------------------------------------------

    def _cache_path(self, fp: str) -> Optional[Path]:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"{fp}.json"

    def _cache_read(self, fp: str) -> Optional[str]:
        path = self._cache_path(fp)
        if path is None or not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))["response"]
        except (json.JSONDecodeError, KeyError):
            return None

    def _cache_write(self, fp: str, req: PromptRequest, response: str) -> None:
        path = self._cache_path(fp)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        record = {
            "request": {
                "system_text": req.system_text,
                "user_text": req.user_text,
                "temperature": req.temperature,
                "max_output_tokens": req.max_output_tokens,
                "tag": req.tag,
            },
            "response": response,
            "timestamp": time.time(),
        }
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(record, ensure_ascii=False, indent=2), encoding="utf-8")
        tmp.replace(path)

    # -- completion --------------------------------------------------------

    def complete(self, req: PromptRequest) -> str:
        fp = fingerprint(req, self.backend.model_id)
        cacheable = req.temperature == 0 and getattr(self.backend, "kind", "") == "live_http"
        if cacheable:
            cached = self._cache_read(fp)
            if cached is not None:
                return cached

        started = time.monotonic()
        attempts = 0
        last_error: Optional[Exception] = None
        while attempts < self.max_transport_retries + 1:
            attempts += 1
            if self.limiter is not None:
                self.limiter.acquire()
            try:
                response = self.backend.complete(req)
            except ScriptMissError:
                raise
            except TransportError as exc:
                last_error = exc
                if attempts <= self.max_transport_retries:
                    time.sleep(self.backoff_base * (2 ** (attempts - 1)))
                continue
            latency = time.monotonic() - started
            with self._log_lock:
                self.log.append(LogEntry(fp, req.tag, response, latency, attempts))
            if cacheable:
                self._cache_write(fp, req, response)
            return response
        raise GatewayError(req.tag, f"transport failed after {attempts} attempts: {last_error}")

    def complete_structured(self, req: PromptRequest, expected_shape: str,
                            options: Optional[Sequence[str]] = None) -> Any:
        """Complete and parse; re-prompt with a corrective suffix on failure."""
        parser: Callable[[str], Any]
        if expected_shape == "boolean_verdict":
            parser = parse_boolean_verdict
        elif expected_shape == "single_choice":
            if not options:
                raise ValueError("single_choice requires options")
            parser = lambda text: parse_single_choice(text, options)  # noqa: E731
        elif expected_shape == "segment_list":
            parser = parse_segment_list
        elif expected_shape == "extraction_table":
            parser = parse_extraction_table
        else:
            raise ValueError(f"unknown expected_shape {expected_shape!r}")

        current = req
        last_error: Optional[Exception] = None
        for _ in range(self.max_reprompts + 1):
            text = self.complete(current)
            try:
                return parser(text)
            except ValueError as exc:
                last_error = exc
                current = replace(current, user_text=current.user_text + CORRECTIVE_SUFFIX)
        raise StructuredOutputError(req.tag, f"unparseable after re-prompts: {last_error}")
