"""Corpus ingestion: parse coded-review CSVs into a validated Corpus.

One CSV row per study. Bibliographic columns (title, authors, year,
abstract, optional id) are fixed by IngestConfig; every other column is a
coded feature whose kind (categorical, multi_categorical, numeric,
free_text) is inferred from the observed cells.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from .errors import EmptyCorpus, MalformedBundle, MalformedCsv, MissingRequiredColumn

CATEGORICAL = "categorical"
MULTI_CATEGORICAL = "multi_categorical"
NUMERIC = "numeric"
FREE_TEXT = "free_text"

_INT_RE = re.compile(r"^[+-]?\d+$")
_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class IngestConfig:
    """Column mapping and inference thresholds for one ingest."""

    title_col: str = "title"
    authors_col: str = "authors"
    year_col: str = "year"
    abstract_col: str = "abstract"
    id_col: str = "id"
    delimiter: str = ";"
    # free_text thresholds: mean cell length, and distinct-value cap factors
    free_text_mean_len: float = 200.0
    free_text_distinct_min: int = 20
    free_text_distinct_frac: float = 0.5

    def required_columns(self) -> list[str]:
        return [self.title_col, self.authors_col, self.year_col, self.abstract_col]

    def to_dict(self) -> dict:
        return {
            "title_col": self.title_col,
            "authors_col": self.authors_col,
            "year_col": self.year_col,
            "abstract_col": self.abstract_col,
            "id_col": self.id_col,
            "delimiter": self.delimiter,
        }


@dataclass(frozen=True)
class Study:
    id: str
    title: str
    authors: str
    year: int | None  # None = unknown
    abstract: str
    features: dict[str, frozenset[str]] = field(default_factory=dict)


@dataclass(frozen=True)
class FeatureDef:
    name: str
    kind: str  # categorical | multi_categorical | numeric | free_text
    values: tuple[str, ...] = ()

    @property
    def filterable(self) -> bool:
        return self.kind != FREE_TEXT


@dataclass(frozen=True)
class Corpus:
    corpus_id: str
    studies: tuple[Study, ...]
    schema: tuple[FeatureDef, ...]
    source: str = ""
    ingested_at: str = ""

    def feature(self, name: str) -> FeatureDef | None:
        for f in self.schema:
            if f.name == name:
                return f
        return None

    def study(self, study_id: str) -> Study | None:
        for s in self.studies:
            if s.id == study_id:
                return s
        return None

    def study_ids(self) -> list[str]:
        return [s.id for s in self.studies]


@dataclass
class ValidationReport:
    errors: list[tuple[int, str]] = field(default_factory=list)
    warnings: list[tuple[int, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors

    def to_dict(self) -> dict:
        return {
            "errors": [{"row": r, "message": m} for r, m in self.errors],
            "warnings": [{"row": r, "message": m} for r, m in self.warnings],
        }


def normalize_value(raw: str) -> str:
    """Trim and collapse internal whitespace runs; case is preserved."""
    return _WS_RE.sub(" ", raw.strip())


def value_key(value: str) -> str:
    """Canonical key for case-insensitive facet-value equality."""
    return normalize_value(value).casefold()


def _sorted_values(values: list[str]) -> tuple[str, ...]:
    """Case-insensitive dedupe (first spelling wins), lexicographic order."""
    seen: dict[str, str] = {}
    for v in values:
        k = v.casefold()
        if k not in seen:
            seen[k] = v
    return tuple(sorted(seen.values(), key=lambda v: (v.casefold(), v)))


def infer_feature_schema(
    headers: list[str],
    rows: list[list[str]],
    config: IngestConfig = IngestConfig(),
) -> list[FeatureDef]:
    """Classify each non-bibliographic column into a FeatureDef.

    Rules, in order: all non-empty cells parse as integers -> numeric;
    mean non-empty cell length > threshold OR distinct value count >
    max(20, 50% of rows) -> free_text; any cell contains the delimiter ->
    multi_categorical; else categorical.
    """
    n_rows = len(rows)
    defs: list[FeatureDef] = []
    for col, name in enumerate(headers):
        cells = [normalize_value(row[col]) for row in rows if col < len(row)]
        non_empty = [c for c in cells if c]
        if non_empty and all(_INT_RE.match(c) for c in non_empty):
            values = sorted({str(int(c)) for c in non_empty}, key=int)
            defs.append(FeatureDef(name=name, kind=NUMERIC, values=tuple(values)))
            continue
        has_delim = any(config.delimiter in c for c in non_empty)
        if has_delim:
            parts = []
            for c in non_empty:
                parts.extend(p for p in (normalize_value(x) for x in c.split(config.delimiter)) if p)
        else:
            parts = non_empty
        distinct = len({p.casefold() for p in parts})
        cap = max(config.free_text_distinct_min, int(config.free_text_distinct_frac * n_rows))
        if non_empty:
            mean_len = sum(len(c) for c in non_empty) / len(non_empty)
            if mean_len > config.free_text_mean_len or distinct > cap:
                defs.append(FeatureDef(name=name, kind=FREE_TEXT, values=()))
                continue
        kind = MULTI_CATEGORICAL if has_delim else CATEGORICAL
        defs.append(FeatureDef(name=name, kind=kind, values=_sorted_values(parts)))
    return defs


def _cell_values(cell: str, fdef: FeatureDef, delimiter: str) -> frozenset[str]:
    if fdef.kind == FREE_TEXT:
        return frozenset({cell})
    if fdef.kind == NUMERIC:
        return frozenset({str(int(cell))}) if _INT_RE.match(cell) else frozenset({cell})
    if fdef.kind == MULTI_CATEGORICAL:
        parts = {normalize_value(p) for p in cell.split(delimiter)}
        return frozenset(p for p in parts if p)
    return frozenset({cell})


def parse_corpus(csv_text: str, config: IngestConfig = IngestConfig(), source: str = "") -> tuple[Corpus, ValidationReport]:
    """Parse UTF-8 CSV text into a Corpus plus a ValidationReport.

    Raises MalformedCsv, MissingRequiredColumn, or EmptyCorpus; all other
    anomalies are reported, not raised. Row numbers in the report are
    1-based data-row indices (the header is row 0).
    """
    if csv_text.startswith("﻿"):
        csv_text = csv_text[1:]
    try:
        raw_rows = list(csv.reader(io.StringIO(csv_text), strict=True))
    except csv.Error as exc:
        raise MalformedCsv(f"unbalanced quoting or malformed CSV: {exc}") from exc
    if not raw_rows:
        raise EmptyCorpus("no header row")

    headers = [normalize_value(h) for h in raw_rows[0]]
    header_index: dict[str, int] = {}
    for i, h in enumerate(headers):
        header_index.setdefault(h.casefold(), i)  # first occurrence wins on duplicate headers
    for col in config.required_columns():
        if col.casefold() not in header_index:
            raise MissingRequiredColumn(f"required column {col!r} not in header")

    data_rows = raw_rows[1:]
    if not data_rows:
        raise EmptyCorpus("no data rows")

    report = ValidationReport()
    width = len(headers)
    padded: list[list[str]] = []
    for i, row in enumerate(data_rows, start=1):
        if len(row) != width:
            report.warnings.append((i, f"row has {len(row)} cells, expected {width}"))
            row = (row + [""] * width)[:width]
        padded.append(row)

    bib_cols = {config.id_col.casefold()} | {c.casefold() for c in config.required_columns()}
    feature_headers = []
    seen_headers: set[str] = set()
    for h in headers:
        k = h.casefold()
        if k in bib_cols or k in seen_headers:
            continue
        seen_headers.add(k)
        feature_headers.append(h)
    feature_idx = [header_index[h.casefold()] for h in feature_headers]
    schema = infer_feature_schema(feature_headers, [[row[i] for i in feature_idx] for row in padded], config)
    schema_by_name = {f.name: f for f in schema}

    id_idx = header_index.get(config.id_col.casefold())
    title_idx = header_index[config.title_col.casefold()]
    authors_idx = header_index[config.authors_col.casefold()]
    year_idx = header_index[config.year_col.casefold()]
    abstract_idx = header_index[config.abstract_col.casefold()]

    studies: list[Study] = []
    for i, row in enumerate(padded, start=1):
        study_id = normalize_value(row[id_idx]) if id_idx is not None else ""
        if not study_id:
            study_id = f"S{i}"
            if id_idx is not None:
                report.warnings.append((i, f"empty id cell, assigned {study_id}"))
        year_raw = normalize_value(row[year_idx])
        year: int | None = None
        if _INT_RE.match(year_raw):
            year = int(year_raw)
        elif year_raw:
            # empty years are covered by validate_corpus's unknown-year warning
            report.warnings.append((i, f"unparseable year {year_raw!r}, treated as unknown"))
        features: dict[str, frozenset[str]] = {}
        for name, col in zip(feature_headers, feature_idx):
            cell = normalize_value(row[col])
            if not cell:
                continue  # empty cell = feature absent, never an empty value
            features[name] = _cell_values(cell, schema_by_name[name], config.delimiter)
        studies.append(
            Study(
                id=study_id,
                title=normalize_value(row[title_idx]),
                authors=normalize_value(row[authors_idx]),
                year=year,
                abstract=row[abstract_idx].strip(),
                features=features,
            )
        )

    corpus = Corpus(
        corpus_id="",
        studies=tuple(studies),
        schema=tuple(schema),
        source=source,
        ingested_at=datetime.now(timezone.utc).isoformat(),
    )
    corpus = replace(corpus, corpus_id=corpus_digest(corpus))
    full_report = validate_corpus(corpus)
    full_report.warnings = sorted(report.warnings + full_report.warnings)
    return corpus, full_report


def validate_corpus(corpus: Corpus) -> ValidationReport:
    """Duplicate ids and emptiness are errors; blank text fields are warnings."""
    report = ValidationReport()
    if not corpus.studies:
        report.errors.append((0, "corpus has no studies"))
        return report
    seen: dict[str, int] = {}
    for i, s in enumerate(corpus.studies, start=1):
        if s.id in seen:
            report.errors.append((i, f"duplicate study id {s.id!r} (first at row {seen[s.id]})"))
        else:
            seen[s.id] = i
        if not s.title:
            report.warnings.append((i, "empty title"))
        if not s.abstract:
            report.warnings.append((i, "empty abstract"))
        if s.year is None:
            report.warnings.append((i, "unknown year"))
    return report


# --- serialization ----------------------------------------------------------

def study_to_dict(s: Study) -> dict:
    return {
        "id": s.id,
        "title": s.title,
        "authors": s.authors,
        "year": s.year,
        "abstract": s.abstract,
        "features": {k: sorted(v, key=lambda x: (x.casefold(), x)) for k, v in sorted(s.features.items())},
    }


def corpus_to_dict(corpus: Corpus) -> dict:
    return {
        "corpus_id": corpus.corpus_id,
        "studies": [study_to_dict(s) for s in corpus.studies],
        "schema": [{"name": f.name, "kind": f.kind, "values": list(f.values)} for f in corpus.schema],
        "provenance": {"source": corpus.source, "ingested_at": corpus.ingested_at},
    }


def corpus_from_dict(doc: dict) -> Corpus:
    try:
        studies = tuple(
            Study(
                id=s["id"],
                title=s["title"],
                authors=s["authors"],
                year=s["year"],
                abstract=s["abstract"],
                features={k: frozenset(v) for k, v in s.get("features", {}).items()},
            )
            for s in doc["studies"]
        )
        schema = tuple(
            FeatureDef(name=f["name"], kind=f["kind"], values=tuple(f["values"]))
            for f in doc["schema"]
        )
        prov = doc.get("provenance", {})
    except (KeyError, TypeError) as exc:
        raise MalformedBundle(f"bad corpus document: {exc}") from exc
    corpus = Corpus(
        corpus_id="",
        studies=studies,
        schema=schema,
        source=prov.get("source", ""),
        ingested_at=prov.get("ingested_at", ""),
    )
    return replace(corpus, corpus_id=corpus_digest(corpus))


def corpus_digest(corpus: Corpus) -> str:
    """Content-derived corpus id: equal studies+schema always hash alike."""
    payload = {
        "studies": [study_to_dict(s) for s in corpus.studies],
        "schema": [{"name": f.name, "kind": f.kind, "values": list(f.values)} for f in corpus.schema],
    }
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return "c" + hashlib.sha256(blob).hexdigest()[:12]


def corpus_to_csv(corpus: Corpus, config: IngestConfig = IngestConfig()) -> str:
    """Serialize back to CSV; re-parsing yields an equal corpus."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    feature_names = [f.name for f in corpus.schema]
    writer.writerow([config.id_col, config.title_col, config.authors_col, config.year_col, config.abstract_col] + feature_names)
    for s in corpus.studies:
        cells = [s.id, s.title, s.authors, "" if s.year is None else str(s.year), s.abstract]
        for name in feature_names:
            vals = sorted(s.features.get(name, ()), key=lambda x: (x.casefold(), x))
            cells.append(f"{config.delimiter} ".join(vals))
        writer.writerow(cells)
    return out.getvalue()
