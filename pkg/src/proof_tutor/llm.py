"""Pluggable LLM backends.

A backend maps a :class:`PromptBundle` to raw response text. The remote
backend talks to a chat-completion HTTP API; the replay backend serves
responses from a content-addressed store keyed by a strong hash of the prompt,
which is what makes the whole pipeline bit-deterministic in tests; the
scripted backend is a plain mock. Retries are transport-level only, never
re-sampling, so pass@1 semantics are preserved.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Protocol

import httpx


class TemplateError(ValueError):
    """A prompt template placeholder could not be filled."""


class BackendError(RuntimeError):
    """The backend failed to produce a response (transport, not content)."""


class ReplayMiss(BackendError):
    """No recorded response exists for this prompt."""


@dataclass(frozen=True)
class PromptKnobs:
    temperature: float = 0.0
    model_id: str = "gpt-4o-mini-2024-07-18"
    max_output_tokens: int = 512

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")


@dataclass(frozen=True)
class PromptBundle:
    system: str
    user: str
    knobs: PromptKnobs = field(default_factory=PromptKnobs)

    def __post_init__(self) -> None:
        if not self.system or not self.user:
            raise ValueError("system and user prompts must be non-empty")


def prompt_digest(bundle: PromptBundle) -> str:
    payload = json.dumps(
        {
            "system": bundle.system,
            "user": bundle.user,
            "temperature": bundle.knobs.temperature,
            "model_id": bundle.knobs.model_id,
            "max_output_tokens": bundle.knobs.max_output_tokens,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


class LLMBackend(Protocol):
    def complete(self, bundle: PromptBundle) -> str:  # pragma: no cover
        ...


class RemoteChatBackend:
    """Chat-completion HTTP client; the auth token comes from the environment."""

    def __init__(
        self,
        base_url: str,
        api_key_env: str = "LLM_API_KEY",
        transport_retries: int = 2,
        timeout: float = 60.0,
    ) -> None:
        self._base_url = base_url.rstrip("/")
        self._api_key_env = api_key_env
        self._retries = transport_retries
        self._timeout = timeout

    def complete(self, bundle: PromptBundle) -> str:
        token = os.environ.get(self._api_key_env, "")
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        payload = {
            "model": bundle.knobs.model_id,
            "temperature": bundle.knobs.temperature,
            "max_tokens": bundle.knobs.max_output_tokens,
            "messages": [
                {"role": "system", "content": bundle.system},
                {"role": "user", "content": bundle.user},
            ],
        }
        last_error: Exception | None = None
        for attempt in range(self._retries + 1):
            try:
                response = httpx.post(
                    f"{self._base_url}/chat/completions",
                    json=payload,
                    headers=headers,
                    timeout=self._timeout,
                )
                response.raise_for_status()
                return response.json()["choices"][0]["message"]["content"]
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
                if attempt < self._retries:
                    time.sleep(0.5 * (attempt + 1))
        raise BackendError(f"remote backend failed after retries: {last_error}")


class ReplayBackend:
    """Serve recorded responses from a content-addressed directory."""

    def __init__(self, store_dir: Path | str) -> None:
        self._dir = Path(store_dir)

    def complete(self, bundle: PromptBundle) -> str:
        path = self._dir / f"{prompt_digest(bundle)}.txt"
        if not path.exists():
            raise ReplayMiss(f"no replay entry {path.name} for this prompt")
        return path.read_text(encoding="utf-8")


class RecordingBackend:
    """Wrap a live backend and persist every response into a replay store."""

    def __init__(self, inner: LLMBackend, store_dir: Path | str) -> None:
        self._inner = inner
        self._dir = Path(store_dir)
        self._dir.mkdir(parents=True, exist_ok=True)

    def complete(self, bundle: PromptBundle) -> str:
        response = self._inner.complete(bundle)
        path = self._dir / f"{prompt_digest(bundle)}.txt"
        path.write_text(response, encoding="utf-8")
        return response


class ScriptedBackend:
    """Mock backend: a responder callable, or a fixed queue of responses."""

    def __init__(
        self,
        responder: Callable[[PromptBundle], str] | None = None,
        responses: Iterable[str] | None = None,
    ) -> None:
        if (responder is None) == (responses is None):
            raise ValueError("provide exactly one of responder or responses")
        self._responder = responder
        self._queue = deque(responses or ())

    def complete(self, bundle: PromptBundle) -> str:
        if self._responder is not None:
            return self._responder(bundle)
        if not self._queue:
            raise BackendError("scripted backend ran out of responses")
        return self._queue.popleft()


class CountingBackend:
    """Delegate to another backend while counting calls (pass@1 checks)."""

    def __init__(self, inner: LLMBackend) -> None:
        self._inner = inner
        self.calls = 0

    def complete(self, bundle: PromptBundle) -> str:
        self.calls += 1
        return self._inner.complete(bundle)
