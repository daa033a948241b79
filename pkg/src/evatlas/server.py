"""HTTP API exposing the pipeline and query engine.

Every read endpoint is safe and idempotent, serves from an immutable atlas
snapshot, and returns canonical JSON (sorted keys, fixed separators) so
identical requests yield byte-identical bodies. Mutating endpoints append
new versions; nothing is edited in place.
"""

from __future__ import annotations

import json
import os
import threading

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from . import __version__
from .atlas import study_detail
from .bundle import bundle_from_dict, bundle_to_dict, canonical_json
from .errors import EvatlasError, InconsistentInputs, MalformedCsv, UnknownRun
from .ingest import IngestConfig, parse_corpus
from .layout import compute_layout, minimap_frame
from .query import FilterState, evaluate_filter, facet_availability, facet_counts, gap_matrix, summary_stats
from .stability import stability_report
from .store import DataStore
from .topics import LlmClient, RunConfig, model_to_dict

UI_ORIGIN_ENV = "EVATLAS_UI_ORIGIN"

_STATUS_BY_ERROR = {
    "MalformedCsv": 400,
    "MissingRequiredColumn": 400,
    "EmptyCorpus": 400,
    "PromptTooLarge": 400,
    "MalformedModelResponse": 400,
    "EmptyText": 400,
    "UnknownFacet": 400,
    "UnknownValue": 400,
    "UnknownTopic": 400,
    "SameFacet": 400,
    "DomainMismatch": 400,
    "TooFewRuns": 400,
    "MalformedBundle": 400,
    "UnsupportedBundleVersion": 400,
    "CanvasTooSmall": 400,
    "UnknownCorpus": 404,
    "UnknownRun": 404,
    "UnknownStudy": 404,
    "StaleCorpus": 409,
    "InconsistentInputs": 409,
    "LlmBackendFailure": 502,
}


def _json(payload, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), status_code=status_code, media_type="application/json")


def _error_response(exc: EvatlasError) -> Response:
    return _json(exc.to_dict(), status_code=_STATUS_BY_ERROR.get(exc.code, 400))


def create_app(data_dir=None, llm_client: LlmClient | None = None) -> FastAPI:
    app = FastAPI(title="evatlas", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[os.environ.get(UI_ORIGIN_ENV, "*")],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = DataStore(data_dir)
    app.state.store = store
    app.state.llm_client = llm_client

    @app.exception_handler(EvatlasError)
    async def handle_domain_error(_request: Request, exc: EvatlasError):
        return _error_response(exc)

    @app.get("/health")
    def health():
        return _json({"ok": True, "version": __version__})

    @app.get("/corpora")
    def list_corpora():
        items = [
            {
                "corpus_id": st.corpus.corpus_id,
                "studies": len(st.corpus.studies),
                "source": st.corpus.source,
                "atlas_version": st.atlas_version,
                "runs": [r.run_id for r in st.runs],
            }
            for st in store.list_corpora()
        ]
        return _json({"corpora": items})

    @app.post("/corpora")
    async def upload_corpus(
        request: Request,
        title_col: str = "title",
        authors_col: str = "authors",
        year_col: str = "year",
        abstract_col: str = "abstract",
        id_col: str = "id",
        delimiter: str = ";",
        source: str = "upload.csv",
    ):
        body = await request.body()
        try:
            text = body.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedCsv(f"body is not valid UTF-8: {exc}") from exc
        config = IngestConfig(
            title_col=title_col,
            authors_col=authors_col,
            year_col=year_col,
            abstract_col=abstract_col,
            id_col=id_col,
            delimiter=delimiter,
        )
        corpus, report = parse_corpus(text, config, source=source)
        if not report.ok:
            return _json({"error": "ValidationFailed", "report": report.to_dict()}, status_code=400)
        store.put_corpus(corpus)
        return _json({"corpus_id": corpus.corpus_id, "report": report.to_dict()}, status_code=201)

    @app.post("/corpora/{corpus_id}/runs")
    async def start_run(corpus_id: str, request: Request):
        doc = await request.json()
        try:
            config = RunConfig.from_dict(doc or {})
        except (ValueError, TypeError) as exc:
            return _json({"error": "BadRunConfig", "detail": str(exc)}, status_code=400)
        record = store.create_run(corpus_id, config)
        thread = threading.Thread(
            target=store.execute_run,
            args=(corpus_id, record.run_id),
            kwargs={"client": app.state.llm_client},
            daemon=True,
        )
        thread.start()
        return _json({"run_id": record.run_id, "status": record.status}, status_code=202)

    @app.get("/runs/{run_id}")
    def run_status(run_id: str):
        state, record = store.find_run(run_id)
        payload = {
            "run_id": record.run_id,
            "corpus_id": state.corpus.corpus_id,
            "status": record.status,
            "digest": record.digest,
            "warnings": record.warnings,
            "error": record.error,
            "model": model_to_dict(record.model) if record.model else None,
        }
        if record.status == "failed" and record.config.backend == "llm":
            payload["raw_reply_persisted"] = bool(record.raw_reply)
            return _json(payload, status_code=502)
        return _json(payload)

    @app.post("/corpora/{corpus_id}/atlas")
    async def promote_atlas(corpus_id: str, request: Request):
        doc = await request.json()
        run_id = (doc or {}).get("run_id")
        if not run_id:
            return _json({"error": "BadRequest", "detail": "run_id is required"}, status_code=400)
        atlas = store.promote_atlas(corpus_id, run_id)
        return _json({"atlas_version": atlas.version, "run_id": run_id}, status_code=201)

    @app.get("/corpora/{corpus_id}/map")
    def map_payload(corpus_id: str, seed: int = 0, width: float = 1600.0, height: float = 1000.0):
        atlas = store.atlas(corpus_id)
        layout = compute_layout(atlas, seed=seed, canvas=(width, height))
        topics = model_to_dict(atlas.model)["topics"]
        for doc in topics:
            doc["count"] = atlas.topic_counts.get(doc["topic_id"], 0)
        payload = {
            "corpus_id": corpus_id,
            "atlas_version": atlas.version,
            "total": len(atlas.corpus.studies),
            "layout": layout.to_dict(),
            "topics": topics,
            "unclassified": {
                "topic_id": "unclassified",
                "count": atlas.topic_counts.get("unclassified", 0),
            },
            "facet_schema": [
                {"name": f.name, "kind": f.kind, "values": list(f.values)}
                for f in atlas.filterable_facets()
            ],
        }
        return _json(payload)

    @app.post("/corpora/{corpus_id}/query")
    async def query(corpus_id: str, request: Request):
        atlas = store.atlas(corpus_id)
        doc = await request.json()
        fs = FilterState.from_dict(doc or {})
        ids = evaluate_filter(atlas, fs)
        counts = facet_counts(atlas, fs)
        availability = facet_availability(atlas, fs)
        stats = summary_stats(atlas, fs)
        payload = {
            "atlas_version": atlas.version,
            "result_ids": ids,
            "counts": counts,
            "availability": availability,
            "stats": stats.to_dict(),
        }
        return _json(payload)

    @app.get("/corpora/{corpus_id}/studies/{study_id}")
    def study(corpus_id: str, study_id: str):
        atlas = store.atlas(corpus_id)
        return _json(study_detail(atlas, study_id).to_dict())

    @app.get("/corpora/{corpus_id}/gaps")
    def gaps(corpus_id: str, row: str, col: str, filter: str = ""):
        atlas = store.atlas(corpus_id)
        fs = FilterState.from_dict(json.loads(filter)) if filter else FilterState()
        matrix = gap_matrix(atlas, row, col, fs)
        return _json(matrix.to_dict())

    @app.get("/corpora/{corpus_id}/minimap")
    def minimap(corpus_id: str, x: float, y: float, width: float, height: float, seed: int = 0):
        atlas = store.atlas(corpus_id)
        layout = compute_layout(atlas, seed=seed)
        return _json(minimap_frame(layout, (x, y, width, height)).to_dict())

    @app.post("/corpora/{corpus_id}/stability")
    async def stability(corpus_id: str, request: Request):
        doc = await request.json()
        run_ids = (doc or {}).get("run_ids") or []
        state = store.get(corpus_id)
        runs = []
        for rid in run_ids:
            record = state.run(rid)
            if record is None:
                raise UnknownRun(f"unknown run {rid!r} for corpus {corpus_id!r}")
            if record.status != "done":
                raise InconsistentInputs(f"run {rid!r} is {record.status}")
            runs.append((record.model, record.table))
        report = stability_report(runs, run_ids=run_ids)
        store.add_stability_report(corpus_id, report.to_dict())
        return _json(report.to_dict())

    @app.get("/corpora/{corpus_id}/export")
    def export_bundle(corpus_id: str):
        state = store.get(corpus_id)
        return _json(bundle_to_dict(state))

    @app.post("/import")
    async def import_bundle(request: Request):
        doc = await request.json()
        state = bundle_from_dict(doc)
        store.import_state(state)
        return _json({"corpus_id": state.corpus.corpus_id}, status_code=201)

    return app
