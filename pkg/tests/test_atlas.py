import dataclasses

import pytest

from evatlas.atlas import build_atlas, study_detail
from evatlas.errors import InconsistentInputs, UnknownStudy
from evatlas.ingest import value_key
from evatlas.topics import Assignment, AssignmentTable


def test_topic_counts_sum_to_corpus_size(demo_atlas, demo_corpus):
    assert sum(demo_atlas.topic_counts.values()) == len(demo_corpus.studies)


def test_facet_index_matches_linear_scan(demo_atlas, demo_corpus):
    for fdef in demo_atlas.filterable_facets():
        for v in fdef.values:
            expected = {s.id for s in demo_corpus.studies if v in s.features.get(fdef.name, ())}
            assert demo_atlas.facet_index[fdef.name][value_key(v)] == expected


def test_topic_index_matches_primary_assignments(demo_atlas):
    for tid, members in demo_atlas.topic_index.items():
        expected = {a.study_id for a in demo_atlas.table.assignments if a.topic_id == tid}
        assert members == expected
        assert demo_atlas.topic_counts[tid] == len(members)


def test_subtopic_index_matches_assignments(demo_atlas):
    for sid, members in demo_atlas.subtopic_index.items():
        expected = {a.study_id for a in demo_atlas.table.assignments if a.subtopic_id == sid}
        assert members == expected


def test_build_is_deterministic(demo_corpus, demo_run):
    model, table = demo_run
    a1 = build_atlas(demo_corpus, model, table)
    a2 = build_atlas(demo_corpus, model, table)
    assert a1.version == a2.version
    assert a1.facet_index == a2.facet_index
    assert a1.topic_index == a2.topic_index


def test_unknown_study_in_assignments_rejected(demo_corpus, demo_run):
    model, table = demo_run
    extra = AssignmentTable(table.assignments + (Assignment("GHOST", "T1", None, 0.5),))
    with pytest.raises(InconsistentInputs):
        build_atlas(demo_corpus, model, extra)


def test_missing_assignment_rejected(demo_corpus, demo_run):
    model, table = demo_run
    with pytest.raises(InconsistentInputs):
        build_atlas(demo_corpus, model, AssignmentTable(table.assignments[:-1]))


def test_unknown_topic_id_rejected(demo_corpus, demo_run):
    model, table = demo_run
    bad = AssignmentTable(
        tuple(dataclasses.replace(a, topic_id="NOPE") if i == 0 else a for i, a in enumerate(table.assignments))
    )
    with pytest.raises(InconsistentInputs):
        build_atlas(demo_corpus, model, bad)


def test_study_detail_projects_features(demo_atlas, demo_corpus):
    for s in demo_corpus.studies[:10]:
        detail = study_detail(demo_atlas, s.id)
        assert detail.study.features == s.features
        assert detail.topic_id == demo_atlas.table.for_study(s.id).topic_id
        assert set(detail.co_labels) <= {tid for tid, _ in detail.alternates}


def test_unknown_study_detail(demo_atlas):
    with pytest.raises(UnknownStudy):
        study_detail(demo_atlas, "NOPE")


def test_co_label_threshold(demo_corpus, demo_run):
    model, table = demo_run
    target = table.assignments[0]
    boosted = dataclasses.replace(
        target,
        score=0.5,
        alternates=(("T2" if target.topic_id != "T2" else "T3", 0.45), ("T1" if target.topic_id != "T1" else "T4", 0.1)),
    )
    table2 = AssignmentTable((boosted,) + table.assignments[1:])
    atlas = build_atlas(demo_corpus, model, table2)
    detail = study_detail(atlas, target.study_id)
    # 0.45 >= 0.8 * 0.5 -> co-label; 0.1 < 0.4 -> not
    assert len(detail.co_labels) == 1
    assert detail.co_labels[0] == boosted.alternates[0][0]
