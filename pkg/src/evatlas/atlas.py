"""EvidenceAtlas: immutable join of corpus + topic model + assignments.

The atlas precomputes an inverted index (facet value -> study ids, topic ->
study ids, subtopic -> study ids) so query evaluation is set algebra. Facet
index keys are case-normalized; the original value spellings live in the
corpus schema.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass

from .errors import InconsistentInputs, UnknownStudy
from .ingest import Corpus, FeatureDef, Study, value_key
from .topics import (
    UNCLASSIFIED_LABEL,
    UNCLASSIFIED_TOPIC_ID,
    Assignment,
    AssignmentTable,
    TopicModel,
    model_to_dict,
    run_digest,
    table_to_dict,
)

# alternates at or above this share of the primary score surface as co-labels
CO_LABEL_THRESHOLD = 0.8


@dataclass(frozen=True)
class EvidenceAtlas:
    corpus: Corpus
    model: TopicModel
    table: AssignmentTable
    version: str
    facet_index: dict[str, dict[str, frozenset[str]]]  # facet -> value key -> ids
    topic_index: dict[str, frozenset[str]]  # topic id -> ids (unclassified included)
    subtopic_index: dict[str, frozenset[str]]
    topic_counts: dict[str, int]

    @property
    def study_ids(self) -> list[str]:
        return sorted(s.id for s in self.corpus.studies)

    def filterable_facets(self) -> list[FeatureDef]:
        return [f for f in self.corpus.schema if f.filterable]

    def has_unclassified(self) -> bool:
        return bool(self.topic_index.get(UNCLASSIFIED_TOPIC_ID))

    def ordered_topic_ids(self) -> list[str]:
        """Model topics in palette order, then unclassified when non-empty."""
        ids = [t.topic_id for t in self.model.topics]
        if self.has_unclassified():
            ids.append(UNCLASSIFIED_TOPIC_ID)
        return ids

    def topic_label(self, topic_id: str) -> str:
        if topic_id == UNCLASSIFIED_TOPIC_ID:
            return UNCLASSIFIED_LABEL
        t = self.model.topic(topic_id)
        return t.label if t else topic_id


def build_atlas(corpus: Corpus, model: TopicModel, table: AssignmentTable) -> EvidenceAtlas:
    """Validate inputs, build the inverted index, and stamp a content version.

    The version is derived from corpus, model, and assignment content, so
    rebuilding from equal inputs yields an equal atlas.
    """
    corpus_ids = {s.id for s in corpus.studies}
    assigned_ids = table.study_ids()
    if assigned_ids != corpus_ids:
        missing = len(corpus_ids - assigned_ids)
        extra = len(assigned_ids - corpus_ids)
        raise InconsistentInputs(
            f"assignments do not cover the corpus exactly ({missing} unassigned, {extra} unknown)"
        )
    known_topics = set(model.topic_ids()) | {UNCLASSIFIED_TOPIC_ID}
    known_subtopics = set(model.subtopic_ids())
    for a in table.assignments:
        if a.topic_id not in known_topics:
            raise InconsistentInputs(f"assignment for {a.study_id!r} references unknown topic {a.topic_id!r}")
        if a.subtopic_id is not None and a.subtopic_id not in known_subtopics:
            raise InconsistentInputs(f"assignment for {a.study_id!r} references unknown subtopic {a.subtopic_id!r}")

    facet_index: dict[str, dict[str, set[str]]] = {}
    for fdef in corpus.schema:
        if fdef.filterable:
            facet_index[fdef.name] = {value_key(v): set() for v in fdef.values}
    for s in corpus.studies:
        for fname, values in s.features.items():
            if fname not in facet_index:
                continue
            for v in values:
                facet_index[fname].setdefault(value_key(v), set()).add(s.id)

    topic_index: dict[str, set[str]] = {tid: set() for tid in model.topic_ids()}
    topic_index[UNCLASSIFIED_TOPIC_ID] = set()
    subtopic_index: dict[str, set[str]] = {sid: set() for sid in known_subtopics}
    for a in table.assignments:
        topic_index[a.topic_id].add(a.study_id)
        if a.subtopic_id is not None:
            subtopic_index[a.subtopic_id].add(a.study_id)

    version = "a" + hashlib.sha256(
        json.dumps(
            {"corpus": corpus.corpus_id, "run": run_digest(model, table)},
            sort_keys=True,
            separators=(",", ":"),
        ).encode("utf-8")
    ).hexdigest()[:12]

    return EvidenceAtlas(
        corpus=corpus,
        model=model,
        table=table,
        version=version,
        facet_index={f: {k: frozenset(v) for k, v in vals.items()} for f, vals in facet_index.items()},
        topic_index={k: frozenset(v) for k, v in topic_index.items()},
        subtopic_index={k: frozenset(v) for k, v in subtopic_index.items()},
        topic_counts={k: len(v) for k, v in topic_index.items()},
    )


@dataclass(frozen=True)
class StudyDetail:
    study: Study
    topic_id: str
    topic_label: str
    subtopic_id: str | None
    subtopic_label: str | None
    score: float
    alternates: tuple[tuple[str, float], ...]
    co_labels: tuple[str, ...]  # topic ids among alternates scoring near the primary

    def to_dict(self) -> dict:
        return {
            "id": self.study.id,
            "title": self.study.title,
            "authors": self.study.authors,
            "year": self.study.year,
            "abstract": self.study.abstract,
            "features": {k: sorted(v, key=lambda x: (x.casefold(), x)) for k, v in sorted(self.study.features.items())},
            "topic_id": self.topic_id,
            "topic_label": self.topic_label,
            "subtopic_id": self.subtopic_id,
            "subtopic_label": self.subtopic_label,
            "score": self.score,
            "alternates": [[tid, s] for tid, s in self.alternates],
            "co_labels": list(self.co_labels),
        }


def study_detail(atlas: EvidenceAtlas, study_id: str, co_label_threshold: float = CO_LABEL_THRESHOLD) -> StudyDetail:
    """Full projection of one study: bibliographic fields, coded features,
    primary topic with score, co-labels, and ranked alternates."""
    study = atlas.corpus.study(study_id)
    if study is None:
        raise UnknownStudy(f"no study {study_id!r} in atlas")
    a: Assignment = atlas.table.for_study(study_id)
    sub_label = None
    if a.subtopic_id is not None:
        for t in atlas.model.topics:
            for s in t.subtopics:
                if s.subtopic_id == a.subtopic_id:
                    sub_label = s.label
    co_labels = tuple(
        tid for tid, score in a.alternates if a.score > 0 and score >= co_label_threshold * a.score
    )
    return StudyDetail(
        study=study,
        topic_id=a.topic_id,
        topic_label=atlas.topic_label(a.topic_id),
        subtopic_id=a.subtopic_id,
        subtopic_label=sub_label,
        score=a.score,
        alternates=a.alternates,
        co_labels=co_labels,
    )
