import random

import pytest

from evatlas.errors import SameFacet, UnknownFacet, UnknownTopic, UnknownValue
from evatlas.query import (
    FilterState,
    evaluate_filter,
    facet_availability,
    facet_counts,
    gap_matrix,
    summary_stats,
)

from .oracles import QueryOracle, random_filter_state


@pytest.fixture(scope="module")
def oracle(demo_corpus, demo_run):
    model, table = demo_run
    return QueryOracle(demo_corpus, model, table)


def fs(**kw):
    return FilterState(
        topic_ids=frozenset(kw.get("topics", ())),
        subtopic_ids=frozenset(kw.get("subs", ())),
        facet_selections={k: frozenset(v) for k, v in kw.get("facets", {}).items()},
    )


def test_empty_filter_returns_everything(demo_atlas, demo_corpus):
    assert evaluate_filter(demo_atlas, FilterState()) == sorted(demo_corpus.study_ids())


def test_topic_and_facet_matches_bruteforce(demo_atlas, oracle):
    state = fs(topics={"T1"}, facets={"Grade Level": {"primary"}})
    assert evaluate_filter(demo_atlas, state) == oracle.filter_ids(state)


def test_disjoint_selections_empty(demo_atlas, demo_corpus):
    # engineered gap in the demo corpus: multi-role agents never study language
    state = fs(facets={"Agent Type": {"Multiple roles"}, "Learning Topic": {"language"}})
    assert evaluate_filter(demo_atlas, state) == []


def test_unknown_names_rejected(demo_atlas):
    with pytest.raises(UnknownFacet):
        evaluate_filter(demo_atlas, fs(facets={"Nope": {"x"}}))
    with pytest.raises(UnknownValue):
        evaluate_filter(demo_atlas, fs(facets={"Grade Level": {"kindergarten"}}))
    with pytest.raises(UnknownTopic):
        evaluate_filter(demo_atlas, fs(topics={"T99"}))
    with pytest.raises(UnknownTopic):
        evaluate_filter(demo_atlas, fs(subs={"T99.1"}))


def test_value_matching_is_case_insensitive(demo_atlas):
    lower = evaluate_filter(demo_atlas, fs(facets={"Grade Level": {"primary"}}))
    upper = evaluate_filter(demo_atlas, fs(facets={"Grade Level": {"PRIMARY"}}))
    assert lower == upper and lower


def test_counts_empty_filter_equal_corpus_frequencies(demo_atlas, demo_corpus):
    counts = facet_counts(demo_atlas, FilterState())
    for fdef in demo_atlas.filterable_facets():
        for v in fdef.values:
            expected = sum(1 for s in demo_corpus.studies if v in s.features.get(fdef.name, ()))
            assert counts["facets"][fdef.name][v] == expected


def test_counts_ignore_own_facet_selection(demo_atlas):
    base = facet_counts(demo_atlas, FilterState())
    with_sel = facet_counts(demo_atlas, fs(facets={"Grade Level": {"primary"}}))
    assert with_sel["facets"]["Grade Level"] == base["facets"]["Grade Level"]
    # other facets do shrink (or stay)
    for v, c in with_sel["facets"]["Agent Type"].items():
        assert c <= base["facets"]["Agent Type"][v]


def test_availability_is_positive_count(demo_atlas, oracle):
    state = fs(topics={"T2"}, facets={"Setting": {"classroom"}})
    counts = facet_counts(demo_atlas, state)
    avail = facet_availability(demo_atlas, state)
    for fname, vals in counts["facets"].items():
        for v, c in vals.items():
            assert avail["facets"][fname][v] == (c > 0)
    for t, c in counts["topics"].items():
        assert avail["topics"][t] == (c > 0)


def test_gap_matrix_matches_bruteforce(demo_atlas, oracle):
    gm = gap_matrix(demo_atlas, "Agent Type", "Grade Level", FilterState())
    rows, cols, cells = oracle.gap_cells("Agent Type", "Grade Level", FilterState())
    assert list(gm.row_values) == rows
    assert list(gm.col_values) == cols
    assert [tuple(r) for r in gm.cells] == cells


def test_gap_matrix_flags_engineered_gap(demo_atlas):
    gm = gap_matrix(demo_atlas, "Agent Type", "Learning Topic", FilterState())
    i = gm.row_values.index("Multiple roles")
    j = gm.col_values.index("language")
    assert gm.cells[i][j] == 0
    assert gm.gap_flags()[i][j] is True


def test_gap_matrix_topic_pseudo_facet(demo_atlas, oracle):
    gm = gap_matrix(demo_atlas, "topic", "Grade Level", FilterState())
    rows, cols, cells = oracle.gap_cells("topic", "Grade Level", FilterState())
    assert list(gm.row_values) == rows
    assert [tuple(r) for r in gm.cells] == cells


def test_gap_matrix_same_facet_rejected(demo_atlas):
    with pytest.raises(SameFacet):
        gap_matrix(demo_atlas, "Grade Level", "Grade Level", FilterState())


def test_gap_matrix_multivalued_counts_each_cell(demo_atlas, demo_corpus):
    gm = gap_matrix(demo_atlas, "Learning Topic", "Grade Level", FilterState())
    cell_total = sum(sum(r) for r in gm.cells)
    pair_total = sum(
        len(s.features.get("Learning Topic", ())) * len(s.features.get("Grade Level", ()))
        for s in demo_corpus.studies
    )
    assert cell_total == pair_total


def test_stats_empty_filter(demo_atlas, demo_corpus):
    stats = summary_stats(demo_atlas, FilterState())
    assert stats.total == len(demo_corpus.studies)
    assert sum(stats.topic_counts.values()) == stats.total
    years = [y for y, _ in stats.year_histogram]
    assert years == sorted(years)
    assert sum(c for _, c in stats.year_histogram) == sum(1 for s in demo_corpus.studies if s.year is not None)


def test_stats_topic_counts_sum_under_filters(demo_atlas, oracle):
    rng = random.Random(5)
    for _ in range(50):
        state = random_filter_state(rng, demo_atlas.corpus, demo_atlas.model)
        stats = summary_stats(demo_atlas, state)
        assert sum(stats.topic_counts.values()) == stats.total
        assert stats.total == len(evaluate_filter(demo_atlas, state))


def test_monotonicity_adding_value_never_shrinks(demo_atlas):
    base = fs(facets={"Grade Level": {"primary"}})
    wider = fs(facets={"Grade Level": {"primary", "upper secondary"}})
    assert set(evaluate_filter(demo_atlas, base)) <= set(evaluate_filter(demo_atlas, wider))


def test_monotonicity_adding_dimension_never_grows(demo_atlas):
    base = fs(facets={"Grade Level": {"primary"}})
    narrower = fs(facets={"Grade Level": {"primary"}, "Setting": {"classroom"}})
    assert set(evaluate_filter(demo_atlas, narrower)) <= set(evaluate_filter(demo_atlas, base))


def test_idempotent_evaluation(demo_atlas):
    state = fs(topics={"T1", "T3"}, facets={"Study Purpose": {"experiment"}})
    assert evaluate_filter(demo_atlas, state) == evaluate_filter(demo_atlas, state)


def test_canonical_form_is_sorted_and_stable():
    a = fs(topics={"T2", "T1"}, facets={"B Facet": {"y", "x"}, "A Facet": {"z"}})
    b = fs(topics={"T1", "T2"}, facets={"A Facet": {"z"}, "B Facet": {"x", "y"}})
    assert a.canonical() == b.canonical()
    assert a.canonical().index('"A Facet"') < a.canonical().index('"B Facet"')


def test_subtopic_selection_matches_subtopic_members(demo_atlas, oracle):
    sid = demo_atlas.model.topics[0].subtopics[0].subtopic_id
    state = fs(subs={sid})
    assert evaluate_filter(demo_atlas, state) == oracle.filter_ids(state)
    assert set(evaluate_filter(demo_atlas, state)) == set(demo_atlas.subtopic_index[sid])


def test_topic_and_subtopic_are_one_dimension(demo_atlas):
    t1 = demo_atlas.model.topics[0]
    t2 = demo_atlas.model.topics[1]
    sub_of_t2 = t2.subtopics[0].subtopic_id
    combined = set(evaluate_filter(demo_atlas, fs(topics={t1.topic_id}, subs={sub_of_t2})))
    expected = set(demo_atlas.topic_index[t1.topic_id]) | set(demo_atlas.subtopic_index[sub_of_t2])
    assert combined == expected


def test_free_text_facet_not_filterable():
    from evatlas.atlas import build_atlas
    from evatlas.ingest import parse_corpus
    from evatlas.topics import RunConfig, extract_topics_lexical

    rows = "\n".join(f"T{i},A,2010,words terms study {i},{'x' * 250}" for i in range(4))
    corpus, _ = parse_corpus("title,authors,year,abstract,Notes\n" + rows + "\n")
    assert corpus.schema[0].kind == "free_text"
    model, table = extract_topics_lexical(corpus, RunConfig(topic_range=(1, 2)))
    atlas = build_atlas(corpus, model, table)
    with pytest.raises(UnknownFacet):
        evaluate_filter(atlas, fs(facets={"Notes": {"x" * 250}}))
