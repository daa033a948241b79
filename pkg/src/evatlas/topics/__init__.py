from .assign import assign_studies, complete_assignments, descriptor_tokens
from .lexical import extract_topics_lexical
from .llm import LlmClient, TopicRun, run_topic_model
from .parse import ParsedResponse, parse_topic_response
from .prompt import build_topic_prompt
from .types import (
    UNCLASSIFIED_LABEL,
    UNCLASSIFIED_TOPIC_ID,
    Assignment,
    AssignmentTable,
    RunConfig,
    RunMeta,
    Subtopic,
    Topic,
    TopicModel,
    model_from_dict,
    model_to_dict,
    run_digest,
    study_text,
    table_from_dict,
    table_to_dict,
)

__all__ = [
    "Assignment",
    "AssignmentTable",
    "LlmClient",
    "ParsedResponse",
    "RunConfig",
    "RunMeta",
    "Subtopic",
    "Topic",
    "TopicModel",
    "TopicRun",
    "UNCLASSIFIED_LABEL",
    "UNCLASSIFIED_TOPIC_ID",
    "assign_studies",
    "build_topic_prompt",
    "complete_assignments",
    "descriptor_tokens",
    "extract_topics_lexical",
    "model_from_dict",
    "model_to_dict",
    "parse_topic_response",
    "run_digest",
    "run_topic_model",
    "study_text",
    "table_from_dict",
    "table_to_dict",
]
