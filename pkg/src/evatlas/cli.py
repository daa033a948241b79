"""Command-line interface; every subcommand is fully headless.

State lives in the data directory (EVATLAS_DATA_DIR or ./evatlas-data), so
successive invocations compose: ingest -> topics -> query/gaps/stability ->
export. Errors exit nonzero with a machine-readable JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .bundle import bundle_from_dict, bundle_to_dict, canonical_json
from .errors import EvatlasError
from .ingest import IngestConfig, parse_corpus
from .layout import compute_layout
from .query import FilterState, evaluate_filter, facet_counts, gap_matrix, summary_stats
from .stability import stability_report
from .store import DataStore, default_data_dir
from .topics import RunConfig


def _resolve_corpus_id(store: DataStore, corpus_id: str | None) -> str:
    return corpus_id if corpus_id else store.latest_corpus_id()


def _print(doc) -> None:
    print(canonical_json(doc))


def cmd_ingest(store: DataStore, args) -> None:
    path = Path(args.csv)
    text = path.read_bytes().decode("utf-8")
    config = IngestConfig(
        title_col=args.title_col,
        authors_col=args.authors_col,
        year_col=args.year_col,
        abstract_col=args.abstract_col,
        id_col=args.id_col,
        delimiter=args.delimiter,
    )
    corpus, report = parse_corpus(text, config, source=path.name)
    store.put_corpus(corpus)
    _print(
        {
            "corpus_id": corpus.corpus_id,
            "studies": len(corpus.studies),
            "facets": [f.name for f in corpus.schema if f.filterable],
            "errors": len(report.errors),
            "warnings": len(report.warnings),
            "report": report.to_dict(),
        }
    )


def cmd_topics(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    config = RunConfig(
        backend=args.backend,
        seed=args.seed,
        temperature=args.temperature,
        model=args.model,
        topic_range=(args.min_topics, args.max_topics),
    )
    record = store.create_run(corpus_id, config)
    record = store.execute_run(corpus_id, record.run_id)
    if record.status != "done":
        raise EvatlasError(f"run failed: {record.error}")
    atlas = store.promote_atlas(corpus_id, record.run_id)
    _print(
        {
            "corpus_id": corpus_id,
            "run_id": record.run_id,
            "digest": record.digest,
            "topics": [t.label for t in record.model.topics],
            "atlas_version": atlas.version,
            "warnings": record.warnings,
        }
    )


def cmd_layout(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    atlas = store.atlas(corpus_id)
    layout = compute_layout(atlas, seed=args.seed, canvas=(args.width, args.height))
    store.set_layout(corpus_id, layout)
    _print(layout.to_dict())


def cmd_query(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    atlas = store.atlas(corpus_id)
    fs = FilterState.from_dict(json.loads(args.filter)) if args.filter else FilterState()
    ids = evaluate_filter(atlas, fs)
    _print(
        {
            "corpus_id": corpus_id,
            "count": len(ids),
            "result_ids": ids,
            "counts": facet_counts(atlas, fs),
            "stats": summary_stats(atlas, fs).to_dict(),
        }
    )


def cmd_gaps(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    atlas = store.atlas(corpus_id)
    fs = FilterState.from_dict(json.loads(args.filter)) if args.filter else FilterState()
    _print(gap_matrix(atlas, args.row, args.col, fs).to_dict())


def cmd_stability(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    state = store.get(corpus_id)
    runs = []
    for rid in args.runs:
        record = state.run(rid)
        if record is None or record.status != "done":
            raise EvatlasError(f"run {rid!r} missing or incomplete")
        runs.append((record.model, record.table))
    report = stability_report(runs, run_ids=args.runs)
    store.add_stability_report(corpus_id, report.to_dict())
    _print(report.to_dict())


def cmd_atlas(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    atlas = store.promote_atlas(corpus_id, args.run)
    _print({"corpus_id": corpus_id, "atlas_version": atlas.version, "run_id": args.run})


def cmd_export(store: DataStore, args) -> None:
    corpus_id = _resolve_corpus_id(store, args.corpus)
    state = store.get(corpus_id)
    doc = bundle_to_dict(state)
    if args.output:
        Path(args.output).write_text(canonical_json(doc), encoding="utf-8")
        _print({"corpus_id": corpus_id, "written": args.output})
    else:
        _print(doc)


def cmd_import(store: DataStore, args) -> None:
    doc = json.loads(Path(args.bundle).read_text(encoding="utf-8"))
    state = bundle_from_dict(doc)
    store.import_state(state)
    _print({"corpus_id": state.corpus.corpus_id, "studies": len(state.corpus.studies)})


def cmd_serve(args) -> None:
    import uvicorn

    from .server import create_app

    app = create_app(args.data_dir)
    uvicorn.run(app, host=args.host, port=args.port)


def cmd_demo(args) -> None:
    from .demo import demo_csv_text

    out = Path(args.output)
    out.write_text(demo_csv_text(), encoding="utf-8")
    _print({"written": str(out)})


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evatlas", description="Interactive evidence maps for coded review data.")
    parser.add_argument("--data-dir", default=None, help="state directory (default: $EVATLAS_DATA_DIR or ./evatlas-data)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse a coded CSV into a corpus")
    p.add_argument("csv")
    p.add_argument("--title-col", default="title")
    p.add_argument("--authors-col", default="authors")
    p.add_argument("--year-col", default="year")
    p.add_argument("--abstract-col", default="abstract")
    p.add_argument("--id-col", default="id")
    p.add_argument("--delimiter", default=";")

    p = sub.add_parser("topics", help="run a topic model and promote its atlas")
    p.add_argument("--corpus", default=None)
    p.add_argument("--backend", choices=["lexical", "llm"], default="lexical")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--model", default="")
    p.add_argument("--min-topics", type=int, default=6)
    p.add_argument("--max-topics", type=int, default=8)

    p = sub.add_parser("atlas", help="promote an existing run to the active atlas")
    p.add_argument("--corpus", default=None)
    p.add_argument("--run", required=True)

    p = sub.add_parser("layout", help="compute and store the map layout")
    p.add_argument("--corpus", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--width", type=float, default=1600.0)
    p.add_argument("--height", type=float, default=1000.0)

    p = sub.add_parser("query", help="evaluate a filter state")
    p.add_argument("--corpus", default=None)
    p.add_argument("--filter", default="", help='JSON, e.g. {"topic_ids":["T1"],"facets":{"Grade Level":["primary"]}}')

    p = sub.add_parser("gaps", help="cross-tabulate two facets")
    p.add_argument("--corpus", default=None)
    p.add_argument("--row", required=True)
    p.add_argument("--col", required=True)
    p.add_argument("--filter", default="")

    p = sub.add_parser("stability", help="compare runs on one corpus")
    p.add_argument("--corpus", default=None)
    p.add_argument("--runs", nargs="+", required=True)

    p = sub.add_parser("export", help="write a self-contained bundle")
    p.add_argument("--corpus", default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("import", help="import a bundle")
    p.add_argument("bundle")

    p = sub.add_parser("serve", help="start the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("EVATLAS_PORT", "8237")))

    p = sub.add_parser("demo", help="write the bundled demo corpus CSV")
    p.add_argument("-o", "--output", default="demo.csv")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "serve":
            cmd_serve(args)
            return 0
        if args.command == "demo":
            cmd_demo(args)
            return 0
        store = DataStore(args.data_dir or default_data_dir())
        handler = {
            "ingest": cmd_ingest,
            "topics": cmd_topics,
            "atlas": cmd_atlas,
            "layout": cmd_layout,
            "query": cmd_query,
            "gaps": cmd_gaps,
            "stability": cmd_stability,
            "export": cmd_export,
            "import": cmd_import,
        }[args.command]
        handler(store, args)
        return 0
    except EvatlasError as exc:
        print(canonical_json(exc.to_dict()), file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(canonical_json({"error": type(exc).__name__, "detail": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
