import pytest

from evatlas.bundle import (
    CorpusState,
    RunRecord,
    bundle_from_dict,
    bundle_to_dict,
    canonical_json,
    mask_timestamps,
)
from evatlas.errors import MalformedBundle, UnsupportedBundleVersion
from evatlas.layout import compute_layout
from evatlas.topics import RunConfig, run_digest


def _state(demo_corpus, demo_run, demo_atlas):
    model, table = demo_run
    record = RunRecord(
        run_id="r1",
        status="done",
        config=RunConfig(seed=0),
        digest=run_digest(model, table),
        model=model,
        table=table,
    )
    return CorpusState(
        corpus=demo_corpus,
        runs=[record],
        active_run_id="r1",
        atlas_version=demo_atlas.version,
        layout=compute_layout(demo_atlas),
    )


def test_round_trip_preserves_everything(demo_corpus, demo_run, demo_atlas):
    state = _state(demo_corpus, demo_run, demo_atlas)
    doc = bundle_to_dict(state)
    again = bundle_from_dict(doc)
    assert again.corpus.studies == demo_corpus.studies
    assert again.corpus.corpus_id == demo_corpus.corpus_id
    assert again.runs[0].digest == state.runs[0].digest
    assert again.runs[0].model == state.runs[0].model
    assert again.runs[0].table == state.runs[0].table
    assert again.active_run_id == "r1"
    assert again.layout == state.layout
    # serialize -> parse -> serialize is byte-stable
    assert canonical_json(bundle_to_dict(again)) == canonical_json(doc)


def test_mask_timestamps_recursive():
    doc = {"a": {"timestamp": "x", "keep": 1}, "b": [{"ingested_at": "y"}], "computed_at": "z"}
    masked = mask_timestamps(doc)
    assert masked == {"a": {"timestamp": "<masked>", "keep": 1}, "b": [{"ingested_at": "<masked>"}], "computed_at": "<masked>"}


def test_version_gate():
    with pytest.raises(UnsupportedBundleVersion):
        bundle_from_dict({"format_version": 2, "corpus": {}})
    with pytest.raises(MalformedBundle):
        bundle_from_dict({"corpus": {}})
    with pytest.raises(MalformedBundle):
        bundle_from_dict({"format_version": 1, "corpus": {"nope": True}})
