"""Self-contained export bundles and canonical JSON helpers.

A bundle carries everything needed to reconstruct query behavior elsewhere:
the corpus, every topic-model run (with config, digest, and raw LLM reply),
the active atlas pointer, the stored layout, and any stability reports.
Equivalence between bundles is structural equality with timestamp fields
masked.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import MalformedBundle, UnsupportedBundleVersion
from .ingest import Corpus, corpus_from_dict, corpus_to_dict
from .layout import MapLayout, layout_from_dict
from .topics import (
    AssignmentTable,
    RunConfig,
    TopicModel,
    model_from_dict,
    model_to_dict,
    table_from_dict,
    table_to_dict,
)

FORMAT_VERSION = 1

TIMESTAMP_KEYS = {"timestamp", "ingested_at", "created_at", "built_at", "computed_at"}


def canonical_json(doc: Any) -> str:
    """Sorted keys, no whitespace: identical documents give identical bytes."""
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def mask_timestamps(doc: Any) -> Any:
    """Deep copy with every timestamp-named field normalized; used for
    bundle-equivalence comparisons."""
    if isinstance(doc, dict):
        return {k: ("<masked>" if k in TIMESTAMP_KEYS else mask_timestamps(v)) for k, v in doc.items()}
    if isinstance(doc, list):
        return [mask_timestamps(v) for v in doc]
    return doc


@dataclass
class RunRecord:
    run_id: str
    status: str  # pending | done | failed
    config: RunConfig
    digest: str = ""
    model: TopicModel | None = None
    table: AssignmentTable | None = None
    raw_reply: str = ""
    warnings: list[str] = field(default_factory=list)
    error: dict | None = None

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "status": self.status,
            "config": self.config.to_dict(),
            "digest": self.digest,
            "model": model_to_dict(self.model) if self.model else None,
            "assignments": table_to_dict(self.table) if self.table else None,
            "raw_reply": self.raw_reply,
            "warnings": list(self.warnings),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunRecord":
        return cls(
            run_id=doc["run_id"],
            status=doc["status"],
            config=RunConfig.from_dict(doc["config"]),
            digest=doc.get("digest", ""),
            model=model_from_dict(doc["model"]) if doc.get("model") else None,
            table=table_from_dict(doc["assignments"]) if doc.get("assignments") else None,
            raw_reply=doc.get("raw_reply", ""),
            warnings=list(doc.get("warnings", [])),
            error=doc.get("error"),
        )


@dataclass
class CorpusState:
    """Everything the service knows about one corpus; bundles serialize this."""

    corpus: Corpus
    runs: list[RunRecord] = field(default_factory=list)
    active_run_id: str | None = None
    atlas_version: str | None = None
    layout: MapLayout | None = None
    stability_reports: list[dict] = field(default_factory=list)

    def run(self, run_id: str) -> RunRecord | None:
        for r in self.runs:
            if r.run_id == run_id:
                return r
        return None

    def next_run_id(self) -> str:
        existing = {r.run_id for r in self.runs}
        i = len(self.runs) + 1
        while f"r{i}" in existing:
            i += 1
        return f"r{i}"


def bundle_to_dict(state: CorpusState) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "corpus": corpus_to_dict(state.corpus),
        "runs": [r.to_dict() for r in state.runs],
        "active_atlas": (
            {"run_id": state.active_run_id, "version": state.atlas_version}
            if state.active_run_id
            else None
        ),
        "layout": state.layout.to_dict() if state.layout else None,
        "stability_reports": state.stability_reports,
    }


def bundle_from_dict(doc: dict) -> CorpusState:
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise MalformedBundle("bundle lacks a format_version field")
    if doc["format_version"] != FORMAT_VERSION:
        raise UnsupportedBundleVersion(
            f"bundle format_version {doc['format_version']!r} not supported (expected {FORMAT_VERSION})"
        )
    try:
        corpus = corpus_from_dict(doc["corpus"])
        runs = [RunRecord.from_dict(r) for r in doc.get("runs", [])]
        active = doc.get("active_atlas") or {}
        layout = layout_from_dict(doc["layout"]) if doc.get("layout") else None
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedBundle(f"bad bundle document: {exc}") from exc
    return CorpusState(
        corpus=corpus,
        runs=runs,
        active_run_id=active.get("run_id"),
        atlas_version=active.get("version"),
        layout=layout,
        stability_reports=list(doc.get("stability_reports", [])),
    )
