"""Lenient parsing of raw LLM replies into a TopicModel."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

from ..errors import MalformedModelResponse
from ..ingest import Corpus
from .types import RunConfig, RunMeta, Subtopic, Topic, TopicModel

_FENCE_RE = re.compile(r"```(?:[a-zA-Z0-9_-]*)\s*\n(.*?)```", re.DOTALL)


@dataclass
class ParsedResponse:
    model: TopicModel
    stated_assignments: dict[str, str] = field(default_factory=dict)
    needs_local_assignment: bool = False
    warnings: list[str] = field(default_factory=list)


def _candidate_blocks(text: str):
    # fenced code blocks first, then any bare top-level JSON object
    for m in _FENCE_RE.finditer(text):
        yield m.group(1)
    for m in re.finditer(r"\{", text):
        yield text[m.start():]


def _first_structured_block(text: str) -> dict:
    decoder = json.JSONDecoder()
    for candidate in _candidate_blocks(text):
        try:
            obj, _ = decoder.raw_decode(candidate.strip())
        except (json.JSONDecodeError, ValueError):
            continue
        if isinstance(obj, dict) and isinstance(obj.get("topics"), list):
            return obj
    raise MalformedModelResponse("no parseable structured block with a topics list in reply")


def _subtopics(raw, topic_idx: int) -> list[Subtopic]:
    subs = []
    if not isinstance(raw, list):
        return subs
    for j, entry in enumerate(raw, start=1):
        if isinstance(entry, str):
            label, desc = entry.strip(), ""
        elif isinstance(entry, dict):
            label = str(entry.get("label") or entry.get("name") or entry.get("title") or "").strip()
            desc = str(entry.get("description") or "").strip()
        else:
            continue
        if label:
            subs.append(Subtopic(subtopic_id=f"T{topic_idx}.{j}", label=label, description=desc))
    return subs


def parse_topic_response(
    response_text: str,
    corpus: Corpus,
    config: RunConfig = RunConfig(backend="llm"),
) -> ParsedResponse:
    """Extract the first structured block of an LLM reply.

    Lenient by design: count violations and unknown study ids produce
    warnings, not failures; a reply without any per-study assignments is
    flagged needs_local_assignment so the caller can fall back to cosine
    assignment.
    """
    block = _first_structured_block(response_text)
    warnings: list[str] = []
    known_ids = set(corpus.study_ids())
    topics: list[Topic] = []
    stated: dict[str, str] = {}

    for raw in block["topics"]:
        if not isinstance(raw, dict):
            warnings.append(f"dropped non-object topic entry: {raw!r}")
            continue
        label = str(raw.get("label") or raw.get("name") or raw.get("title") or "").strip()
        if not label:
            warnings.append("dropped topic entry with empty label")
            continue
        idx = len(topics) + 1
        topic_id = f"T{idx}"
        subtopics = _subtopics(raw.get("subtopics"), idx)
        smin, smax = config.subtopic_range
        if not smin <= len(subtopics) <= smax:
            warnings.append(
                f"SubtopicCountOutOfRange: topic {label!r} has {len(subtopics)} subtopics, expected {smin}-{smax}"
            )
        topics.append(
            Topic(
                topic_id=topic_id,
                label=label,
                description=str(raw.get("description") or "").strip(),
                subtopics=tuple(subtopics),
                palette_index=idx - 1,
            )
        )
        ids_raw = raw.get("study_ids") or raw.get("studies") or raw.get("assignments") or []
        if isinstance(ids_raw, list):
            for sid in ids_raw:
                sid = str(sid).strip()
                if sid not in known_ids:
                    warnings.append(f"dropped unknown study id {sid!r} in topic {label!r}")
                elif sid in stated:
                    warnings.append(f"study {sid!r} assigned to multiple topics; kept first")
                else:
                    stated[sid] = topic_id

    if not topics:
        raise MalformedModelResponse("structured block contained no usable topics")

    tmin, tmax = config.topic_range
    if not tmin <= len(topics) <= tmax:
        warnings.append(f"TopicCountOutOfRange: reply has {len(topics)} topics, expected {tmin}-{tmax}")

    needs_local = not stated
    if needs_local:
        warnings.append("reply lacks per-study assignments; local assignment required")
    elif len(stated) < len(known_ids):
        warnings.append(
            f"reply assigned {len(stated)} of {len(known_ids)} studies; remainder assigned locally"
        )

    model = TopicModel(
        topics=tuple(topics),
        run_meta=RunMeta(
            backend="llm",
            model=config.model,
            seed=config.seed,
            temperature=config.temperature,
            timestamp=datetime.now(timezone.utc).isoformat(),
            text_fields=config.text_fields,
        ),
    )
    return ParsedResponse(
        model=model,
        stated_assignments=stated,
        needs_local_assignment=needs_local,
        warnings=warnings,
    )
