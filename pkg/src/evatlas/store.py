"""Filesystem-backed store for corpora, runs, atlases, and layouts.

One bundle document per corpus under <data_dir>/corpora/<corpus_id>.json,
written atomically (tmp + rename). Reads are served from an in-memory cache
of immutable snapshots; mutations are append-only and atlas promotion is an
atomic swap, so concurrent readers always see a consistent state.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path

from .atlas import EvidenceAtlas, build_atlas
from .bundle import CorpusState, RunRecord, bundle_from_dict, bundle_to_dict, canonical_json
from .errors import InconsistentInputs, StaleCorpus, UnknownCorpus, UnknownRun
from .ingest import Corpus
from .layout import compute_layout
from .topics import LlmClient, RunConfig, run_digest, run_topic_model

DATA_DIR_ENV = "EVATLAS_DATA_DIR"
DEFAULT_DATA_DIR = "evatlas-data"


def default_data_dir() -> Path:
    return Path(os.environ.get(DATA_DIR_ENV, DEFAULT_DATA_DIR))


class DataStore:
    def __init__(self, data_dir: str | Path | None = None):
        self.data_dir = Path(data_dir) if data_dir else default_data_dir()
        self._corpora_dir = self.data_dir / "corpora"
        self._corpora_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.RLock()
        self._states: dict[str, CorpusState] = {}
        self._atlases: dict[str, EvidenceAtlas] = {}
        self._run_locks: dict[str, threading.Lock] = {}
        self._load_all()

    # --- persistence -------------------------------------------------------

    def _load_all(self) -> None:
        for path in sorted(self._corpora_dir.glob("*.json")):
            try:
                state = bundle_from_dict(json.loads(path.read_text(encoding="utf-8")))
            except Exception:
                continue  # skip unreadable documents rather than refuse to start
            self._states[state.corpus.corpus_id] = state

    def _persist(self, state: CorpusState) -> None:
        path = self._corpora_dir / f"{state.corpus.corpus_id}.json"
        fd, tmp = tempfile.mkstemp(dir=self._corpora_dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(bundle_to_dict(state)))
            os.replace(tmp, path)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)

    # --- corpora -----------------------------------------------------------

    def put_corpus(self, corpus: Corpus) -> CorpusState:
        with self._lock:
            state = self._states.get(corpus.corpus_id)
            if state is None:
                state = CorpusState(corpus=corpus)
                self._states[corpus.corpus_id] = state
                self._persist(state)
            return state

    def import_state(self, state: CorpusState) -> CorpusState:
        with self._lock:
            self._states[state.corpus.corpus_id] = state
            self._atlases.pop(state.corpus.corpus_id, None)
            self._persist(state)
            return state

    def get(self, corpus_id: str) -> CorpusState:
        with self._lock:
            state = self._states.get(corpus_id)
            if state is None:
                raise UnknownCorpus(f"unknown corpus {corpus_id!r}")
            return state

    def list_corpora(self) -> list[CorpusState]:
        with self._lock:
            return list(self._states.values())

    def latest_corpus_id(self) -> str:
        with self._lock:
            if not self._states:
                raise UnknownCorpus("no corpora in the data directory; run ingest first")
            return list(self._states)[-1]

    # --- runs ---------------------------------------------------------------

    def create_run(self, corpus_id: str, config: RunConfig) -> RunRecord:
        with self._lock:
            state = self.get(corpus_id)
            record = RunRecord(run_id=state.next_run_id(), status="pending", config=config)
            state.runs.append(record)
            return record

    def run_lock(self, corpus_id: str) -> threading.Lock:
        with self._lock:
            return self._run_locks.setdefault(corpus_id, threading.Lock())

    def execute_run(self, corpus_id: str, run_id: str, client: LlmClient | None = None) -> RunRecord:
        """Run the configured backend and persist the outcome. LLM runs hold
        the per-corpus run lock so only one remote call is in flight per
        corpus at a time."""
        state = self.get(corpus_id)
        record = state.run(run_id)
        if record is None:
            raise UnknownRun(f"unknown run {run_id!r}")
        lock = self.run_lock(corpus_id) if record.config.backend == "llm" else None
        try:
            if lock:
                lock.acquire()
            try:
                result = run_topic_model(state.corpus, record.config, client=client)
            finally:
                if lock:
                    lock.release()
            record.model = result.model
            record.table = result.table
            record.raw_reply = result.raw_reply
            record.warnings = result.warnings
            record.digest = run_digest(result.model, result.table)
            record.status = "done"
        except Exception as exc:  # failure is a terminal run state, not a crash
            record.status = "failed"
            code = getattr(exc, "code", type(exc).__name__)
            record.error = {"error": code, "detail": str(exc)}
            record.raw_reply = getattr(exc, "raw_reply", record.raw_reply)
        with self._lock:
            self._persist(state)
        return record

    def find_run(self, run_id: str) -> tuple[CorpusState, RunRecord]:
        with self._lock:
            for state in self._states.values():
                record = state.run(run_id)
                if record is not None:
                    return state, record
        raise UnknownRun(f"unknown run {run_id!r}")

    # --- atlases -------------------------------------------------------------

    def promote_atlas(self, corpus_id: str, run_id: str) -> EvidenceAtlas:
        with self._lock:
            state = self.get(corpus_id)
            record = state.run(run_id)
            if record is None:
                # the run may exist under another corpus: that is a stale reference
                try:
                    other_state, _ = self.find_run(run_id)
                    raise StaleCorpus(
                        f"run {run_id!r} belongs to corpus {other_state.corpus.corpus_id!r}, not {corpus_id!r}"
                    )
                except UnknownRun:
                    raise UnknownRun(f"unknown run {run_id!r}") from None
            if record.status != "done" or record.model is None or record.table is None:
                raise InconsistentInputs(f"run {run_id!r} is {record.status}; only completed runs can be promoted")
            atlas = build_atlas(state.corpus, record.model, record.table)
            state.active_run_id = run_id
            state.atlas_version = atlas.version
            if state.layout is None:
                state.layout = compute_layout(atlas)
            self._atlases[corpus_id] = atlas
            self._persist(state)
            return atlas

    def atlas(self, corpus_id: str) -> EvidenceAtlas:
        with self._lock:
            cached = self._atlases.get(corpus_id)
            if cached is not None:
                return cached
            state = self.get(corpus_id)
            if not state.active_run_id:
                raise InconsistentInputs(f"corpus {corpus_id!r} has no active atlas; promote a run first")
            record = state.run(state.active_run_id)
            if record is None or record.model is None or record.table is None:
                raise InconsistentInputs(f"active run {state.active_run_id!r} is incomplete")
            atlas = build_atlas(state.corpus, record.model, record.table)
            self._atlases[corpus_id] = atlas
            return atlas

    # --- layout / stability ----------------------------------------------------

    def set_layout(self, corpus_id: str, layout) -> None:
        with self._lock:
            state = self.get(corpus_id)
            state.layout = layout
            self._persist(state)

    def add_stability_report(self, corpus_id: str, report: dict) -> None:
        with self._lock:
            state = self.get(corpus_id)
            state.stability_reports.append(report)
            self._persist(state)
