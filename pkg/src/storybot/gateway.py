"""Provider-agnostic chat-completion boundary.

Everything that talks to a language model goes through here: prompt
assembly, schema-constrained decoding with corrective retries, and a
deterministic scripted mock that makes the whole pipeline reproducible in
tests. Remote access speaks a generic chat-completion HTTP contract
(messages array in, text out) so any vendor fits; credentials come from
environment variables only.
"""

from __future__ import annotations

import json
import os
import re
import threading
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Protocol, Sequence

import httpx
import jsonschema

from .errors import GatewayError, SchemaError

ENV_ENDPOINT = "STORYBOT_LLM_ENDPOINT"
ENV_API_KEY = "STORYBOT_LLM_API_KEY"
ENV_MODEL = "STORYBOT_LLM_MODEL"
ENV_TIMEOUT = "STORYBOT_LLM_TIMEOUT"

_SCHEMA_DIR = Path(__file__).with_name("schemas")


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict[str, Any]:
    """Fetch a registered response schema by name (e.g. 'goal_set')."""
    path = _SCHEMA_DIR / f"{name}.schema.json"
    if not path.is_file():
        raise KeyError(f"no schema registered under {name!r}")
    return json.loads(path.read_text("utf-8"))


def registered_schemas() -> list[str]:
    return sorted(p.name.removesuffix(".schema.json") for p in _SCHEMA_DIR.glob("*.schema.json"))


@dataclass(frozen=True)
class ChatTurn:
    author: str  # user | agent
    text: str
    timestamp: float = 0.0


@dataclass(frozen=True)
class PromptBundle:
    system: str
    history: tuple[ChatTurn, ...] = ()
    one_shot_example: tuple[str, str] | None = None
    response_schema: str | None = None

    def __post_init__(self) -> None:
        if not self.system:
            raise ValueError("system prompt must be non-empty")
        if self.response_schema is not None:
            load_schema(self.response_schema)

    def with_turns(self, *turns: ChatTurn) -> "PromptBundle":
        return PromptBundle(self.system, self.history + turns, self.one_shot_example, self.response_schema)


@dataclass(frozen=True)
class GatewayConfig:
    provider: str = "scripted_mock"  # scripted_mock | remote_http
    retry_budget: int = 3
    timeout: float = 30.0
    mock_script: str | None = None

    def __post_init__(self) -> None:
        if self.retry_budget < 0:
            raise ValueError("retry_budget must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


_ROLE_BY_AUTHOR = {"user": "user", "agent": "assistant"}


def to_messages(bundle: PromptBundle) -> list[dict[str, str]]:
    messages = [{"role": "system", "content": bundle.system}]
    if bundle.one_shot_example is not None:
        example_in, example_out = bundle.one_shot_example
        messages.append({"role": "user", "content": example_in})
        messages.append({"role": "assistant", "content": example_out})
    for turn in bundle.history:
        messages.append({"role": _ROLE_BY_AUTHOR[turn.author], "content": turn.text})
    return messages


def render_prompt(bundle: PromptBundle) -> str:
    """Plain-text serialization of the full prompt, recorded by capture hooks."""
    parts = []
    for message in to_messages(bundle):
        parts.append(f"[{message['role']}]\n{message['content']}")
    return "\n\n".join(parts)


class Gateway(Protocol):
    def complete(self, bundle: PromptBundle) -> str: ...


class ScriptedMockGateway:
    """Replays a fixed queue of replies; records every rendered prompt.

    The queue is consumed under a lock so concurrent sessions sharing one
    mock stay deterministic.
    """

    def __init__(self, replies: Sequence[str] = ()) -> None:
        self._replies = deque(replies)
        self._lock = threading.Lock()
        self.prompts: list[str] = []

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedMockGateway":
        doc = json.loads(Path(path).read_text("utf-8"))
        if isinstance(doc, dict):
            doc = doc["replies"]
        if not isinstance(doc, list) or not all(isinstance(r, str) for r in doc):
            raise ValueError(f"{path}: mock script must be a JSON array of reply strings")
        return cls(doc)

    def push(self, *replies: str) -> None:
        with self._lock:
            self._replies.extend(replies)

    def complete(self, bundle: PromptBundle) -> str:
        with self._lock:
            self.prompts.append(render_prompt(bundle))
            if not self._replies:
                raise GatewayError("transport", "scripted reply queue is empty")
            return self._replies.popleft()


class HttpGateway:
    """Remote chat-completion provider over HTTP.

    Expects an endpoint accepting {"model", "messages"} and returning the
    completion either as OpenAI-style choices or a bare "content"/"text"
    field.
    """

    def __init__(self, config: GatewayConfig) -> None:
        self._endpoint = os.environ.get(ENV_ENDPOINT, "")
        self._api_key = os.environ.get(ENV_API_KEY, "")
        self._model = os.environ.get(ENV_MODEL, "")
        self._timeout = float(os.environ.get(ENV_TIMEOUT, config.timeout))
        if not self._endpoint:
            raise GatewayError("transport", f"{ENV_ENDPOINT} is not set")
        self.prompts: deque[str] = deque(maxlen=16)

    def complete(self, bundle: PromptBundle) -> str:
        self.prompts.append(render_prompt(bundle))
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            headers["Authorization"] = f"Bearer {self._api_key}"
        body: dict[str, Any] = {"messages": to_messages(bundle)}
        if self._model:
            body["model"] = self._model
        try:
            response = httpx.post(self._endpoint, json=body, headers=headers, timeout=self._timeout)
        except httpx.TimeoutException as exc:
            raise GatewayError("timeout", str(exc)) from exc
        except httpx.HTTPError as exc:
            raise GatewayError("transport", str(exc)) from exc
        if response.status_code in (401, 403):
            raise GatewayError("auth", f"provider rejected credentials ({response.status_code})")
        if response.status_code != 200:
            raise GatewayError("transport", f"provider returned {response.status_code}")
        return self._extract_text(response.json())

    @staticmethod
    def _extract_text(doc: Any) -> str:
        try:
            if isinstance(doc, dict):
                if "choices" in doc:
                    return doc["choices"][0]["message"]["content"]
                for key in ("content", "text"):
                    if isinstance(doc.get(key), str):
                        return doc[key]
        except (KeyError, IndexError, TypeError):
            pass
        raise GatewayError("transport", "could not find completion text in provider response")


def make_gateway(config: GatewayConfig) -> Gateway:
    if config.provider == "scripted_mock":
        if config.mock_script:
            return ScriptedMockGateway.from_file(config.mock_script)
        return ScriptedMockGateway()
    if config.provider == "remote_http":
        return HttpGateway(config)
    raise ValueError(f"unknown gateway provider {config.provider!r}")


def complete(gateway: Gateway, bundle: PromptBundle) -> str:
    """Single raw completion; prompt capture happens inside the gateway."""
    return gateway.complete(bundle)


_FENCE_RE = re.compile(r"```(?:json)?\s*([\s\S]*?)```", re.IGNORECASE)


def _parse_json_payload(raw: str) -> Any:
    text = raw.strip()
    if text.startswith("```"):
        match = _FENCE_RE.search(text)
        if match:
            text = match.group(1)
    return json.loads(text)


@dataclass(frozen=True)
class StructuredReply:
    document: dict[str, Any]
    attempts: int


def complete_structured(gateway: Gateway, bundle: PromptBundle, schema_name: str,
                        retry_budget: int = 3) -> StructuredReply:
    """Decode-validate loop against a registered schema.

    Each failed attempt re-asks with the validator's failure reason appended;
    at most retry_budget re-asks follow the initial attempt.
    """
    schema = load_schema(schema_name)
    work = bundle
    attempts = 0
    last_failure = ""
    while attempts <= retry_budget:
        attempts += 1
        raw = gateway.complete(work)
        try:
            doc = _parse_json_payload(raw)
            jsonschema.validate(doc, schema)
            return StructuredReply(doc, attempts)
        except json.JSONDecodeError as exc:
            last_failure = f"reply was not valid JSON: {exc}"
        except jsonschema.ValidationError as exc:
            last_failure = f"reply did not match the {schema_name} schema: {exc.message}"
        work = work.with_turns(
            ChatTurn("agent", raw[:2000]),
            ChatTurn("user", f"That reply was invalid: {last_failure}. "
                             "Respond again with ONLY a JSON document matching the required schema."),
        )
    raise SchemaError(attempts, last_failure)
