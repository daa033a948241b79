import pytest

from evatlas.errors import EmptyCorpus, MalformedCsv, MissingRequiredColumn
from evatlas.ingest import (
    FREE_TEXT,
    MULTI_CATEGORICAL,
    NUMERIC,
    IngestConfig,
    corpus_from_dict,
    corpus_to_csv,
    corpus_to_dict,
    infer_feature_schema,
    parse_corpus,
    validate_corpus,
)

BASIC = (
    "title,authors,year,abstract,Grade Level\n"
    "Agents in class,A. Smith,2010,Agents help pupils.,primary\n"
    "Voice tutors,B. Jones,2012,Voice based tutor.,lower secondary\n"
    "VR helpers,C. Lee,2015,Virtual reality aid.,upper secondary\n"
)


def test_basic_parse_one_facet():
    corpus, report = parse_corpus(BASIC)
    assert len(corpus.studies) == 3
    assert [f.name for f in corpus.schema] == ["Grade Level"]
    assert report.ok and not report.warnings


def test_grade_level_values_sorted():
    corpus, _ = parse_corpus(BASIC)
    assert corpus.schema[0].values == ("lower secondary", "primary", "upper secondary")


def test_default_ids_are_row_based():
    corpus, _ = parse_corpus(BASIC)
    assert corpus.study_ids() == ["S1", "S2", "S3"]


def test_id_column_used_when_present():
    text = "id,title,authors,year,abstract\nZ9,T,A,2000,X\nQ2,U,B,2001,Y\n"
    corpus, _ = parse_corpus(text)
    assert corpus.study_ids() == ["Z9", "Q2"]


def test_empty_year_kept_with_warning():
    text = "title,authors,year,abstract\nT,A,,X\n"
    corpus, report = parse_corpus(text)
    assert len(corpus.studies) == 1
    assert corpus.studies[0].year is None
    assert sum("year" in m for _, m in report.warnings) == 1


def test_unparseable_year_warns():
    text = "title,authors,year,abstract\nT,A,n.d.,X\n"
    corpus, report = parse_corpus(text)
    assert corpus.studies[0].year is None
    assert any("unparseable year" in m for _, m in report.warnings)


def test_missing_required_column():
    with pytest.raises(MissingRequiredColumn):
        parse_corpus("title,authors,year\nT,A,2000\n")


def test_zero_data_rows():
    with pytest.raises(EmptyCorpus):
        parse_corpus("title,authors,year,abstract\n")


def test_unbalanced_quote_is_malformed():
    with pytest.raises(MalformedCsv):
        parse_corpus('title,authors,year,abstract\n"T,A,2000,X\n')


def test_bom_is_stripped():
    corpus, _ = parse_corpus("﻿" + BASIC)
    assert corpus.studies[0].title == "Agents in class"


def test_multi_value_split():
    text = (
        "title,authors,year,abstract,Learning Topic\n"
        "T,A,2000,X,science; mathematics\n"
        "U,B,2001,Y,science\n"
    )
    corpus, _ = parse_corpus(text)
    fdef = corpus.schema[0]
    assert fdef.kind == MULTI_CATEGORICAL
    assert fdef.values == ("mathematics", "science")
    assert corpus.studies[0].features["Learning Topic"] == frozenset({"science", "mathematics"})


def test_custom_delimiter():
    text = "title,authors,year,abstract,Tags\nT,A,2000,X,a|b\n"
    corpus, _ = parse_corpus(text, IngestConfig(delimiter="|"))
    assert corpus.studies[0].features["Tags"] == frozenset({"a", "b"})


def test_numeric_column():
    headers = ["Sample Size"]
    rows = [["120"], ["45"], ["007"]]
    defs = infer_feature_schema(headers, rows)
    assert defs[0].kind == NUMERIC
    assert defs[0].values == ("7", "45", "120")


def test_long_cells_become_free_text():
    rows = [["x" * 300], ["y" * 250]]
    defs = infer_feature_schema(["Notes"], rows)
    assert defs[0].kind == FREE_TEXT
    assert not defs[0].filterable
    assert defs[0].values == ()


def test_high_cardinality_becomes_free_text():
    rows = [[f"distinct value {i}"] for i in range(30)]
    defs = infer_feature_schema(["Comment"], rows)
    assert defs[0].kind == FREE_TEXT


def test_high_cardinality_cap_scales_with_rows():
    # 30 distinct values over 80 rows stays under max(20, 40) = 40 -> categorical
    rows = [[f"v{i % 30}"] for i in range(80)]
    defs = infer_feature_schema(["Code"], rows)
    assert defs[0].kind == "categorical"


def test_empty_cell_means_absent():
    text = "title,authors,year,abstract,Setting\nT,A,2000,X,\nU,B,2001,Y,classroom\n"
    corpus, report = parse_corpus(text)
    assert "Setting" not in corpus.studies[0].features
    assert corpus.studies[1].features["Setting"] == frozenset({"classroom"})
    assert report.ok


def test_whitespace_normalization():
    text = "title,authors,year,abstract,Grade Level\nT,A,2000,X,  lower   secondary \n"
    corpus, _ = parse_corpus(text)
    assert corpus.studies[0].features["Grade Level"] == frozenset({"lower secondary"})


def test_case_insensitive_value_dedupe_keeps_first_spelling():
    text = "title,authors,year,abstract,Kind\nT,A,2000,X,Primary\nU,B,2001,Y,primary\n"
    corpus, _ = parse_corpus(text)
    assert corpus.schema[0].values == ("Primary",)


def test_duplicate_ids_error():
    text = "id,title,authors,year,abstract\nA,T,X,2000,B1\nA,U,Y,2001,B2\n"
    corpus, report = parse_corpus(text)
    assert len(report.errors) == 1
    assert not report.ok


def test_empty_abstract_warns():
    text = "title,authors,year,abstract\nT,A,2000,\n"
    _, report = parse_corpus(text)
    assert any("abstract" in m for _, m in report.warnings)


def test_ragged_row_padded_with_warning():
    text = "title,authors,year,abstract,Setting\nT,A,2000,X\n"
    corpus, report = parse_corpus(text)
    assert len(corpus.studies) == 1
    assert any("cells" in m for _, m in report.warnings)


def test_demo_corpus_clean(demo_corpus):
    report = validate_corpus(demo_corpus)
    assert report.errors == []
    assert report.warnings == []
    assert len(demo_corpus.studies) == 120


def test_no_phantom_schema_values(demo_corpus):
    for fdef in demo_corpus.schema:
        for v in fdef.values:
            assert any(v in s.features.get(fdef.name, ()) for s in demo_corpus.studies), (fdef.name, v)


def test_categorical_counts_sum_to_coded_studies(demo_corpus):
    for fdef in demo_corpus.schema:
        if fdef.kind != "categorical":
            continue
        per_value = sum(
            sum(1 for s in demo_corpus.studies if v in s.features.get(fdef.name, ()))
            for v in fdef.values
        )
        coded = sum(1 for s in demo_corpus.studies if fdef.name in s.features)
        assert per_value == coded, fdef.name


def test_dict_round_trip(demo_corpus):
    again = corpus_from_dict(corpus_to_dict(demo_corpus))
    assert again.studies == demo_corpus.studies
    assert again.schema == demo_corpus.schema
    assert again.corpus_id == demo_corpus.corpus_id


def test_csv_round_trip(demo_corpus):
    text = corpus_to_csv(demo_corpus)
    again, report = parse_corpus(text)
    assert report.ok
    assert again.studies == demo_corpus.studies
    assert again.schema == demo_corpus.schema


def test_schema_covers_all_feature_keys(demo_corpus):
    names = {f.name for f in demo_corpus.schema}
    for s in demo_corpus.studies:
        assert set(s.features) <= names
