"""evatlas: interactive evidence maps for coded systematic-review data.

Pipeline: ingest a coded CSV into a Corpus, derive a TopicModel (remote-LLM
prompt backend or deterministic lexical backend), join everything into an
immutable EvidenceAtlas, compute a deterministic cluster layout, and answer
dual-filter queries (topics x coded facets) with counts, availability flags,
gap matrices, and summary statistics. Served over HTTP for the browser UI
and over a CLI for scripted use.
"""

__version__ = "0.1.0"
