"""LLM enrichment: prompt construction and a provider-agnostic HTTP client.

Prompts embed checkpoint template texts verbatim and are reproducible
byte-for-byte from the document and request. The client talks to a single
chat-completion style endpoint; responses are appended to checkpoint
annotations and never modify anything else in the document.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

import requests

from .curvedoc import CurveDocument


class ProviderError(RuntimeError):
    """Completion endpoint unreachable or persistently failing."""


PROMPT_TEMPLATE_IDS = ("v1",)


@dataclass
class EnrichRequest:
    kind: str  # "single" or "pairwise"
    indices: tuple[int, ...]
    prompt_template_id: str = "v1"
    max_templates: int = 200

    def __post_init__(self):
        if self.kind not in ("single", "pairwise"):
            raise ValueError(f"unknown request kind: {self.kind}")
        if self.prompt_template_id not in PROMPT_TEMPLATE_IDS:
            raise ValueError(f"unknown prompt template: {self.prompt_template_id}")
        want = 1 if self.kind == "single" else 2
        if len(self.indices) != want:
            raise ValueError(f"{self.kind} request needs {want} checkpoint index(es)")
        if self.kind == "pairwise" and self.indices[0] == self.indices[1]:
            raise ValueError("pairwise request needs two distinct checkpoints")


@dataclass
class ProviderConfig:
    endpoint: str
    model: str
    auth_env: str = "LOGCURVES_API_TOKEN"
    timeout: float = 30.0
    max_retries: int = 2
    backoff_base: float = 0.5
    offline: bool = False

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be positive")


SYSTEM_CONTEXT = ("These are masked log templates from one time window "
                  "of a software system.")


def _ts(ms: int) -> str:
    return datetime.fromtimestamp(ms / 1000, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def _checkpoint_block(doc: CurveDocument, index: int, max_templates: int) -> str:
    cp = doc.checkpoints[index]
    shown = cp.template_texts[:max_templates]
    lines = [f"Checkpoint {cp.index} of series {cp.series_id!r} at {_ts(cp.timestamp)} "
             f"({cp.record_count} records):"]
    lines += [f"- {t}" for t in shown]
    if len(cp.template_texts) > len(shown):
        lines.append(f"({len(shown)} of {len(cp.template_texts)} templates shown)")
    return "\n".join(lines)


def build_prompt(request: EnrichRequest, doc: CurveDocument) -> str:
    """Deterministic prompt text for a summarization or comparison request."""
    for i in request.indices:
        if not 0 <= i < len(doc.checkpoints):
            raise IndexError(f"checkpoint index {i} out of range")
    head = SYSTEM_CONTEXT
    if request.kind == "single":
        block = _checkpoint_block(doc, request.indices[0], request.max_templates)
        task = ("Task: summarize what the system is doing in this time window. "
                "Group observations by severity and call out errors or anomalies.")
        return f"{head}\n\n{block}\n\n{task}"
    a = _checkpoint_block(doc, request.indices[0], request.max_templates)
    b = _checkpoint_block(doc, request.indices[1], request.max_templates)
    task = ("Task: compare the two time windows. Describe their similarities and "
            "differences, grouped by severity.")
    return f"{head}\n\n{a}\n\n{b}\n\n{task}"


def _extract_content(payload) -> str:
    if isinstance(payload, dict):
        if isinstance(payload.get("content"), str):
            return payload["content"]
        choices = payload.get("choices")
        if isinstance(choices, list) and choices:
            msg = choices[0].get("message", {})
            if isinstance(msg.get("content"), str):
                return msg["content"]
    raise ProviderError("response carries no completion content")


def complete(prompt: str, provider: ProviderConfig) -> str:
    """POST the prompt to the completion endpoint with retries and backoff."""
    if provider.offline:
        raise ProviderError("offline mode: refusing to contact the completion endpoint")
    headers = {"Content-Type": "application/json"}
    token = os.environ.get(provider.auth_env, "")
    if token:
        headers["Authorization"] = f"Bearer {token}"
    body = {
        "model": provider.model,
        "messages": [
            {"role": "system", "content": SYSTEM_CONTEXT},
            {"role": "user", "content": prompt},
        ],
    }
    last: Optional[Exception] = None
    for attempt in range(provider.max_retries + 1):
        if attempt:
            time.sleep(provider.backoff_base * 2 ** (attempt - 1))
        try:
            resp = requests.post(provider.endpoint, json=body, headers=headers,
                                 timeout=provider.timeout)
            if resp.status_code == 200:
                return _extract_content(resp.json())
            last = ProviderError(f"endpoint returned HTTP {resp.status_code}")
        except requests.RequestException as exc:
            last = exc
    raise ProviderError(f"completion failed after {provider.max_retries + 1} attempts: {last}")


def enrich(request: EnrichRequest, provider: ProviderConfig, doc: CurveDocument) -> str:
    """Run one enrichment request and append the result as annotation(s).

    The document is only touched after a successful completion; failures
    raise ProviderError and leave it unchanged.
    """
    prompt = build_prompt(request, doc)
    text = complete(prompt, provider)
    if request.kind == "single":
        doc.checkpoints[request.indices[0]].annotations.append(text)
    else:
        i, j = request.indices
        doc.checkpoints[i].annotations.append(f"[compared with checkpoint {j}] {text}")
        doc.checkpoints[j].annotations.append(f"[compared with checkpoint {i}] {text}")
    return text
