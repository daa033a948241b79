import math

import pytest

from evatlas.ingest import parse_corpus
from evatlas.topics import (
    UNCLASSIFIED_TOPIC_ID,
    RunConfig,
    RunMeta,
    Subtopic,
    Topic,
    TopicModel,
    assign_studies,
    complete_assignments,
)


def _model(descriptors):
    topics = tuple(
        Topic(topic_id=f"T{i + 1}", label=label, description=desc, subtopics=(), palette_index=i)
        for i, (label, desc) in enumerate(descriptors)
    )
    meta = RunMeta(backend="llm", model="m", seed=0, temperature=0.0, timestamp="t", text_fields=("title", "abstract"))
    return TopicModel(topics=topics, run_meta=meta)


def _corpus(abstracts):
    rows = "\n".join(f"padpad,A,2010,{a}" for a in abstracts)
    corpus, _ = parse_corpus("title,authors,year,abstract\n" + rows + "\n")
    return corpus


# tokens must survive the tokenizer: use multi-letter non-stopword nonsense terms
A, B, C = "alphaterm", "betaterm", "gammaterm"


def test_hand_computed_cosine_example():
    # study tokens {a,b}; T1 descriptor {a}; T2 descriptor {a,b,c}
    corpus = _corpus([f"{A} {B}"])
    model = _model([(A, ""), (f"{A} {B} {C}", "")])
    config = RunConfig(backend="llm", text_fields=("abstract",))
    table = assign_studies(corpus, model, config)
    a = table.assignments[0]
    assert a.topic_id == "T2"
    assert a.score == pytest.approx(2 / math.sqrt(2 * 3), abs=1e-12)
    assert a.alternates[0][0] == "T1"
    assert a.alternates[0][1] == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_identical_descriptor_scores_one():
    corpus = _corpus([f"{A} {B}"])
    model = _model([(f"{A} {B}", ""), ("unrelatedterm othernoise", "")])
    table = assign_studies(corpus, model, RunConfig(backend="llm", text_fields=("abstract",)))
    a = table.assignments[0]
    assert a.topic_id == "T1"
    assert a.score == pytest.approx(1.0)
    assert all(s == 0.0 for _, s in a.alternates)


def test_disjoint_vocabulary_goes_unclassified():
    corpus = _corpus(["zetaterm thetaterm"])
    model = _model([(A, ""), (B, "")])
    table = assign_studies(corpus, model, RunConfig(backend="llm", text_fields=("abstract",)))
    a = table.assignments[0]
    assert a.topic_id == UNCLASSIFIED_TOPIC_ID
    assert a.score == 0.0


def test_tie_breaks_to_lower_topic_index():
    corpus = _corpus([f"{A} {B}"])
    model = _model([(A, ""), (B, "")])  # both cosine 1/sqrt(2)
    table = assign_studies(corpus, model, RunConfig(backend="llm", text_fields=("abstract",)))
    assert table.assignments[0].topic_id == "T1"


def test_table_is_total_and_sorted():
    corpus = _corpus([f"{A}", f"{B}", "noiseword other"])
    model = _model([(A, ""), (B, "")])
    table = assign_studies(corpus, model, RunConfig(backend="llm", text_fields=("abstract",)))
    assert table.study_ids() == set(corpus.study_ids())
    ids = [a.study_id for a in table.assignments]
    assert ids == sorted(ids)


def test_alternates_sorted_and_bounded():
    corpus = _corpus([f"{A} {B} {C}"])
    model = _model([(f"{A} {B} {C}", ""), (f"{A} {B}", ""), (A, ""), (B, "")])
    table = assign_studies(corpus, model, RunConfig(backend="llm", text_fields=("abstract",), alternates=4))
    a = table.assignments[0]
    scores = [s for _, s in a.alternates]
    assert len(a.alternates) == 3
    assert scores == sorted(scores, reverse=True)
    assert all(s <= a.score for s in scores)


def test_subtopic_labels_feed_descriptors():
    corpus = _corpus([A])
    topics = (
        Topic("T1", "unrelatedterm", "", (Subtopic("T1.1", A),), 0),
        Topic("T2", "othernoise", "", (), 1),
    )
    meta = RunMeta("llm", "m", 0, 0.0, "t", ("abstract",))
    model = TopicModel(topics=topics, run_meta=meta)
    table = assign_studies(corpus, model, RunConfig(backend="llm", text_fields=("abstract",)))
    assert table.assignments[0].topic_id == "T1"


def test_complete_assignments_respects_stated_topic():
    # study text matches T2 perfectly, but the reply says T1
    corpus = _corpus([f"{B} {C}"])
    model = _model([(A, f"{B}"), (f"{B} {C}", "")])
    config = RunConfig(backend="llm", text_fields=("abstract",))
    table = complete_assignments(corpus, model, {"S1": "T1"}, config)
    a = table.assignments[0]
    assert a.topic_id == "T1"
    # local similarity to T2 is higher, so the alternate is capped at the primary
    assert a.alternates[0][0] == "T2"
    assert a.alternates[0][1] == a.score
    assert all(s <= a.score for _, s in a.alternates)


def test_complete_assignments_fills_missing_locally():
    corpus = _corpus([A, B])
    model = _model([(A, ""), (B, "")])
    config = RunConfig(backend="llm", text_fields=("abstract",))
    table = complete_assignments(corpus, model, {"S1": "T2"}, config)
    by = {a.study_id: a for a in table.assignments}
    assert by["S1"].topic_id == "T2"  # stated wins
    assert by["S2"].topic_id == "T2"  # locally assigned
