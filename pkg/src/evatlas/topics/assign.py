"""Assign studies to topics by token-set cosine against topic descriptors."""

from __future__ import annotations

from ..ingest import Corpus, Study
from ..textproc import set_cosine, tokenize
from .types import (
    UNCLASSIFIED_TOPIC_ID,
    Assignment,
    AssignmentTable,
    RunConfig,
    Topic,
    TopicModel,
    study_text,
)


def descriptor_tokens(topic: Topic) -> set[str]:
    """Token set of a topic's label, description, and subtopic labels."""
    text = " ".join([topic.label, topic.description] + [s.label for s in topic.subtopics])
    return set(tokenize(text))


def _ranked_scores(tokens: set[str], descriptors: list[set[str]]) -> list[tuple[int, float]]:
    scores = [(i, set_cosine(tokens, d)) for i, d in enumerate(descriptors)]
    # ties on cosine break to the lower topic index
    return sorted(scores, key=lambda p: (-p[1], p[0]))


def assign_one(
    study: Study,
    model: TopicModel,
    descriptors: list[set[str]],
    config: RunConfig,
) -> Assignment:
    tokens = set(tokenize(study_text(study, config.text_fields)))
    ranked = _ranked_scores(tokens, descriptors)
    n_alt = max(config.alternates - 1, 0)
    if not ranked or ranked[0][1] == 0.0:
        alternates = tuple((model.topics[i].topic_id, 0.0) for i, _ in ranked[:n_alt])
        return Assignment(study.id, UNCLASSIFIED_TOPIC_ID, None, 0.0, alternates)
    best_i, best_score = ranked[0]
    alternates = tuple((model.topics[i].topic_id, s) for i, s in ranked[1 : 1 + n_alt])
    return Assignment(study.id, model.topics[best_i].topic_id, None, best_score, alternates)


def assign_studies(corpus: Corpus, model: TopicModel, config: RunConfig = RunConfig()) -> AssignmentTable:
    """One primary assignment per study: argmax cosine, zero similarity goes
    to the reserved unclassified bucket."""
    descriptors = [descriptor_tokens(t) for t in model.topics]
    assignments = [assign_one(s, model, descriptors, config) for s in corpus.studies]
    assignments.sort(key=lambda a: a.study_id)
    return AssignmentTable(tuple(assignments))


def complete_assignments(
    corpus: Corpus,
    model: TopicModel,
    stated: dict[str, str],
    config: RunConfig,
) -> AssignmentTable:
    """Final table when the LLM reply states some (or all) assignments.

    Stated studies keep the reply's topic; their confidence is the local
    cosine against that topic's descriptor, and alternate scores are capped
    at the primary so the ranked-alternates invariant holds even when the
    local similarity would have ranked another topic first. Unstated studies
    fall back to plain cosine assignment.
    """
    descriptors = [descriptor_tokens(t) for t in model.topics]
    index_of = {t.topic_id: i for i, t in enumerate(model.topics)}
    n_alt = max(config.alternates - 1, 0)
    assignments = []
    for study in corpus.studies:
        topic_id = stated.get(study.id)
        if topic_id is None or topic_id not in index_of:
            assignments.append(assign_one(study, model, descriptors, config))
            continue
        tokens = set(tokenize(study_text(study, config.text_fields)))
        primary_i = index_of[topic_id]
        primary_score = set_cosine(tokens, descriptors[primary_i])
        ranked = [(i, s) for i, s in _ranked_scores(tokens, descriptors) if i != primary_i]
        alternates = tuple(
            (model.topics[i].topic_id, min(s, primary_score)) for i, s in ranked[:n_alt]
        )
        assignments.append(Assignment(study.id, topic_id, None, primary_score, alternates))
    assignments.sort(key=lambda a: a.study_id)
    return AssignmentTable(tuple(assignments))
