"""Prompt construction for the remote-LLM topic backend."""

from __future__ import annotations

from ..errors import PromptTooLarge
from ..ingest import Corpus
from .types import RunConfig, study_text

RESPONSE_FORMAT_INSTRUCTION = """\
Reply with exactly one JSON code block and no other structured content, shaped as:

```json
{
  "topics": [
    {
      "label": "short topic label",
      "description": "one or two sentences describing the topic",
      "subtopics": [
        {"label": "subtopic label", "description": "short description"}
      ],
      "study_ids": ["S1", "S2"]
    }
  ]
}
```

Assign every study id to exactly one topic's study_ids list."""


def _records(corpus: Corpus, config: RunConfig, abbrev: int | None) -> str:
    lines = []
    for s in corpus.studies:
        text = study_text(s, config.text_fields)
        if abbrev is not None and "abstract" in config.text_fields:
            title = s.title if "title" in config.text_fields else ""
            text = " ".join(p for p in (title, s.abstract[:abbrev]) if p)
        lines.append(f"[{s.id}] {text}")
    return "\n".join(lines)


def build_topic_prompt(corpus: Corpus, config: RunConfig = RunConfig(backend="llm")) -> str:
    """Instruction + one serialized record per study + reply-format contract.

    When the records exceed the configured character budget, abstracts are
    abbreviated to their first ``abstract_abbrev_chars`` characters; if the
    prompt still does not fit, PromptTooLarge is raised so the caller can
    chunk or truncate the corpus.
    """
    tmin, tmax = config.topic_range
    smin, smax = config.subtopic_range
    instruction = (
        f"Analyze this dataset of research studies and identify {tmin}-{tmax} main topics "
        f"and {smin}-{smax} subtopics for each."
    )
    records = _records(corpus, config, abbrev=None)
    if len(records) > config.prompt_char_budget:
        records = _records(corpus, config, abbrev=config.abstract_abbrev_chars)
        if len(records) > config.prompt_char_budget:
            raise PromptTooLarge(
                f"serialized records ({len(records)} chars) exceed budget "
                f"({config.prompt_char_budget}) even with abbreviated abstracts"
            )
    return f"{instruction}\n\nStudies:\n{records}\n\n{RESPONSE_FORMAT_INSTRUCTION}"
