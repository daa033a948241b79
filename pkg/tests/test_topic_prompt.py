import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from evatlas.errors import PromptTooLarge
from evatlas.ingest import parse_corpus
from evatlas.topics import RunConfig, build_topic_prompt


def _corpus(rows):
    text = "title,authors,year,abstract\n" + "\n".join(rows) + "\n"
    corpus, _ = parse_corpus(text)
    return corpus


@pytest.fixture
def small_corpus():
    return _corpus(["Agents,A,2010,Pupils learn with agents.", "Voice,B,2011,Voice tutors for reading."])


def test_default_instruction_substring(small_corpus):
    prompt = build_topic_prompt(small_corpus, RunConfig(backend="llm"))
    assert "identify 6-8 main topics and 2-3 subtopics for each" in prompt


def test_custom_range_substitution(small_corpus):
    prompt = build_topic_prompt(small_corpus, RunConfig(backend="llm", topic_range=(4, 5)))
    assert "identify 4-5 main topics" in prompt


def test_single_study_single_record():
    corpus = _corpus(["Only,A,2000,The sole study."])
    prompt = build_topic_prompt(corpus, RunConfig(backend="llm"))
    assert prompt.count("[S1]") == 1
    assert "The sole study." in prompt


def test_every_study_id_present(small_corpus):
    prompt = build_topic_prompt(small_corpus, RunConfig(backend="llm"))
    for sid in small_corpus.study_ids():
        assert f"[{sid}]" in prompt


def test_response_format_stated(small_corpus):
    prompt = build_topic_prompt(small_corpus, RunConfig(backend="llm"))
    assert '"topics"' in prompt
    assert "study_ids" in prompt
    assert "exactly one" in prompt


def test_overflow_abbreviates_abstracts():
    long_abs = "word " * 500  # 2500 chars
    corpus = _corpus([f"Big,A,2010,{long_abs.strip()}"])
    config = RunConfig(backend="llm", prompt_char_budget=900, abstract_abbrev_chars=600)
    prompt = build_topic_prompt(corpus, config)
    # abbreviated to the first 600 abstract chars
    assert "word " * 100 in prompt
    assert long_abs.strip() not in prompt


def test_prompt_too_large():
    corpus = _corpus([f"T{i},A,2010,{'x ' * 400}" for i in range(20)])
    with pytest.raises(PromptTooLarge):
        build_topic_prompt(corpus, RunConfig(backend="llm", prompt_char_budget=100))


def test_title_only_fields(small_corpus):
    prompt = build_topic_prompt(small_corpus, RunConfig(backend="llm", text_fields=("title",)))
    assert "Pupils learn with agents." not in prompt
    assert "Agents" in prompt


@settings(max_examples=50, deadline=None)
@given(
    a=st.text(alphabet="abcdefg ", min_size=1, max_size=30),
    b=st.text(alphabet="abcdefg ", min_size=1, max_size=30),
)
def test_injective_on_study_text(a, b):
    ca = _corpus([f"T,A,2010,{a.strip() or 'x'}"])
    cb = _corpus([f"T,A,2010,{b.strip() or 'x'}"])
    config = RunConfig(backend="llm")
    if ca.studies[0].abstract != cb.studies[0].abstract:
        assert build_topic_prompt(ca, config) != build_topic_prompt(cb, config)
    else:
        assert build_topic_prompt(ca, config) == build_topic_prompt(cb, config)
