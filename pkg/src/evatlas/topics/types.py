"""Topic model domain types shared by all backends."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..ingest import Study

# Reserved bucket for studies no topic matches; never counted against the
# configured topic range and rendered as its own gray cluster.
UNCLASSIFIED_TOPIC_ID = "unclassified"
UNCLASSIFIED_LABEL = "Unclassified"


@dataclass(frozen=True)
class Subtopic:
    subtopic_id: str
    label: str
    description: str = ""


@dataclass(frozen=True)
class Topic:
    topic_id: str
    label: str
    description: str
    subtopics: tuple[Subtopic, ...]
    palette_index: int


@dataclass(frozen=True)
class RunMeta:
    backend: str
    model: str  # LLM model identifier, empty for lexical
    seed: int
    temperature: float
    timestamp: str
    text_fields: tuple[str, ...]


@dataclass(frozen=True)
class TopicModel:
    topics: tuple[Topic, ...]
    run_meta: RunMeta

    def topic(self, topic_id: str) -> Topic | None:
        for t in self.topics:
            if t.topic_id == topic_id:
                return t
        return None

    def topic_ids(self) -> list[str]:
        return [t.topic_id for t in self.topics]

    def subtopic_ids(self) -> list[str]:
        return [s.subtopic_id for t in self.topics for s in t.subtopics]


@dataclass(frozen=True)
class Assignment:
    study_id: str
    topic_id: str
    subtopic_id: str | None
    score: float
    alternates: tuple[tuple[str, float], ...] = ()


@dataclass(frozen=True)
class AssignmentTable:
    assignments: tuple[Assignment, ...]

    def __post_init__(self):
        object.__setattr__(self, "_by_study", {a.study_id: a for a in self.assignments})

    def for_study(self, study_id: str) -> Assignment | None:
        return self._by_study.get(study_id)

    def study_ids(self) -> set[str]:
        return set(self._by_study)

    def partition(self) -> dict[str, str]:
        """study_id -> primary topic id, the unit stability metrics consume."""
        return {a.study_id: a.topic_id for a in self.assignments}


@dataclass(frozen=True)
class RunConfig:
    backend: str = "lexical"  # "lexical" | "llm"
    topic_range: tuple[int, int] = (6, 8)
    subtopic_range: tuple[int, int] = (2, 3)
    seed: int = 0
    temperature: float = 0.0
    text_fields: tuple[str, ...] = ("title", "abstract")
    model: str = ""
    alternates: int = 3  # primary + (alternates-1) ranked alternates
    prompt_char_budget: int = 300_000
    abstract_abbrev_chars: int = 600

    def __post_init__(self):
        if self.backend not in ("lexical", "llm"):
            raise ValueError(f"unknown backend {self.backend!r}")
        for lo, hi in (self.topic_range, self.subtopic_range):
            if lo > hi or lo < 1:
                raise ValueError(f"bad range ({lo},{hi})")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        fields_ = tuple(self.text_fields)
        if not fields_ or any(f not in ("title", "abstract") for f in fields_):
            raise ValueError("text_fields must be a non-empty subset of {title, abstract}")
        object.__setattr__(self, "text_fields", fields_)

    def to_dict(self) -> dict:
        return {
            "backend": self.backend,
            "topic_range": list(self.topic_range),
            "subtopic_range": list(self.subtopic_range),
            "seed": self.seed,
            "temperature": self.temperature,
            "text_fields": list(self.text_fields),
            "model": self.model,
            "alternates": self.alternates,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        kwargs = dict(doc)
        for key in ("topic_range", "subtopic_range", "text_fields"):
            if key in kwargs:
                kwargs[key] = tuple(kwargs[key])
        return cls(**{k: v for k, v in kwargs.items() if k in cls.__dataclass_fields__})


def study_text(study: Study, text_fields: tuple[str, ...]) -> str:
    parts = []
    if "title" in text_fields:
        parts.append(study.title)
    if "abstract" in text_fields:
        parts.append(study.abstract)
    return " ".join(p for p in parts if p)


# --- serialization ----------------------------------------------------------

def model_to_dict(model: TopicModel) -> dict:
    return {
        "topics": [
            {
                "topic_id": t.topic_id,
                "label": t.label,
                "description": t.description,
                "palette_index": t.palette_index,
                "subtopics": [
                    {"subtopic_id": s.subtopic_id, "label": s.label, "description": s.description}
                    for s in t.subtopics
                ],
            }
            for t in model.topics
        ],
        "run_meta": {
            "backend": model.run_meta.backend,
            "model": model.run_meta.model,
            "seed": model.run_meta.seed,
            "temperature": model.run_meta.temperature,
            "timestamp": model.run_meta.timestamp,
            "text_fields": list(model.run_meta.text_fields),
        },
    }


def model_from_dict(doc: dict) -> TopicModel:
    meta = doc["run_meta"]
    return TopicModel(
        topics=tuple(
            Topic(
                topic_id=t["topic_id"],
                label=t["label"],
                description=t["description"],
                palette_index=t["palette_index"],
                subtopics=tuple(
                    Subtopic(subtopic_id=s["subtopic_id"], label=s["label"], description=s.get("description", ""))
                    for s in t["subtopics"]
                ),
            )
            for t in doc["topics"]
        ),
        run_meta=RunMeta(
            backend=meta["backend"],
            model=meta.get("model", ""),
            seed=meta["seed"],
            temperature=meta["temperature"],
            timestamp=meta["timestamp"],
            text_fields=tuple(meta["text_fields"]),
        ),
    )


def table_to_dict(table: AssignmentTable) -> dict:
    return {
        "assignments": [
            {
                "study_id": a.study_id,
                "topic_id": a.topic_id,
                "subtopic_id": a.subtopic_id,
                "score": a.score,
                "alternates": [[tid, s] for tid, s in a.alternates],
            }
            for a in table.assignments
        ]
    }


def table_from_dict(doc: dict) -> AssignmentTable:
    return AssignmentTable(
        assignments=tuple(
            Assignment(
                study_id=a["study_id"],
                topic_id=a["topic_id"],
                subtopic_id=a.get("subtopic_id"),
                score=a["score"],
                alternates=tuple((tid, s) for tid, s in a.get("alternates", [])),
            )
            for a in doc["assignments"]
        )
    )


def run_digest(model: TopicModel, table: AssignmentTable) -> str:
    """Content digest of a run, excluding the run timestamp.

    Two runs with identical topics and assignments share a digest even though
    their run_meta timestamps differ.
    """
    doc = model_to_dict(model)
    doc["run_meta"] = {k: v for k, v in doc["run_meta"].items() if k != "timestamp"}
    doc["assignments"] = table_to_dict(table)["assignments"]
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()[:16]
