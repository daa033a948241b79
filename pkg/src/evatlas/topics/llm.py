"""Remote-LLM backend client and run orchestration for both backends."""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass, field

import httpx

from ..errors import LlmBackendFailure, MalformedModelResponse
from ..ingest import Corpus
from .assign import assign_studies, complete_assignments
from .lexical import extract_topics_lexical
from .parse import parse_topic_response
from .prompt import build_topic_prompt
from .types import AssignmentTable, RunConfig, TopicModel

API_KEY_ENV = "EVATLAS_LLM_KEY"
API_URL_ENV = "EVATLAS_LLM_URL"


class LlmClient:
    """Minimal chat-completion client (OpenAI-compatible wire shape).

    The endpoint comes from EVATLAS_LLM_URL and the key from EVATLAS_LLM_KEY;
    model name, temperature, and seed come from the RunConfig. Supports a
    per-request timeout and cooperative cancellation via cancel().
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        timeout: float = 120.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = (base_url or os.environ.get(API_URL_ENV, "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.timeout = timeout
        self._client = httpx.Client(timeout=timeout, transport=transport)
        self._cancelled = threading.Event()

    def cancel(self) -> None:
        self._cancelled.set()
        self._client.close()

    def complete(self, prompt: str, config: RunConfig) -> str:
        if not self.base_url:
            raise LlmBackendFailure(f"{API_URL_ENV} is not set")
        if not self.api_key:
            raise LlmBackendFailure(f"{API_KEY_ENV} is not set")
        if self._cancelled.is_set():
            raise LlmBackendFailure("request cancelled")
        payload = {
            "model": config.model,
            "temperature": config.temperature,
            "seed": config.seed,
            "messages": [{"role": "user", "content": prompt}],
        }
        try:
            resp = self._client.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers={"Authorization": f"Bearer {self.api_key}"},
            )
            resp.raise_for_status()
            data = resp.json()
            return data["choices"][0]["message"]["content"]
        except httpx.HTTPError as exc:
            raise LlmBackendFailure(f"chat-completion request failed: {exc}") from exc
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise LlmBackendFailure(f"unexpected chat-completion payload: {exc}") from exc


@dataclass
class TopicRun:
    """Outcome of one topic-model run, whatever the backend."""

    model: TopicModel
    table: AssignmentTable
    raw_reply: str = ""
    warnings: list[str] = field(default_factory=list)
    used_local_assignment: bool = False


def run_topic_model(corpus: Corpus, config: RunConfig, client: LlmClient | None = None) -> TopicRun:
    """Execute one run: lexical is pure; llm prompts, parses leniently, and
    falls back to local cosine assignment when the reply omits assignments.

    The raw LLM reply is preserved verbatim on the result for auditability.
    """
    if config.backend == "lexical":
        model, table = extract_topics_lexical(corpus, config)
        return TopicRun(model=model, table=table)

    prompt = build_topic_prompt(corpus, config)
    own_client = client is None
    client = client or LlmClient()
    try:
        raw = client.complete(prompt, config)
    finally:
        if own_client:
            client._client.close()
    try:
        parsed = parse_topic_response(raw, corpus, config)
    except MalformedModelResponse as exc:
        exc.raw_reply = raw  # keep the reply auditable even when unusable
        raise
    if parsed.needs_local_assignment:
        table = assign_studies(corpus, parsed.model, config)
    else:
        table = complete_assignments(corpus, parsed.model, parsed.stated_assignments, config)
    return TopicRun(
        model=parsed.model,
        table=table,
        raw_reply=raw,
        warnings=parsed.warnings,
        used_local_assignment=parsed.needs_local_assignment,
    )
