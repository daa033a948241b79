"""Filter evaluation, faceted counting, gap matrices, and summary stats.

Combination semantics: within one dimension selections are OR'd (union over
selected values); across dimensions they are AND'd (intersection). Topic and
subtopic selections form a single dimension: a study matches it when its
primary topic or its subtopic is selected. Studies missing a facet's coding
never match a selection on that facet.

Per-value counts are disjunctive ("how many would match if I added this
value"): each facet is counted against the filter with that facet's own
selections removed, which is what keeps sibling values from zeroing out the
moment one of them is selected.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .atlas import EvidenceAtlas
from .errors import SameFacet, UnknownFacet, UnknownTopic, UnknownValue
from .ingest import value_key
from .topics import UNCLASSIFIED_TOPIC_ID

TOPIC_PSEUDO_FACET = "topic"


@dataclass(frozen=True)
class FilterState:
    topic_ids: frozenset[str] = frozenset()
    subtopic_ids: frozenset[str] = frozenset()
    facet_selections: dict[str, frozenset[str]] = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return not self.topic_ids and not self.subtopic_ids and not any(self.facet_selections.values())

    def without_topic_dimension(self) -> "FilterState":
        return replace(self, topic_ids=frozenset(), subtopic_ids=frozenset())

    def without_facet(self, name: str) -> "FilterState":
        if name not in self.facet_selections:
            return self
        remaining = {k: v for k, v in self.facet_selections.items() if k != name}
        return replace(self, facet_selections=remaining)

    def to_dict(self) -> dict:
        return {
            "topic_ids": sorted(self.topic_ids),
            "subtopic_ids": sorted(self.subtopic_ids),
            "facets": {k: sorted(v) for k, v in sorted(self.facet_selections.items()) if v},
        }

    def canonical(self) -> str:
        """Byte-stable serialized form (sorted keys and value lists)."""
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_dict(cls, doc: dict) -> "FilterState":
        return cls(
            topic_ids=frozenset(doc.get("topic_ids", ())),
            subtopic_ids=frozenset(doc.get("subtopic_ids", ())),
            facet_selections={k: frozenset(v) for k, v in doc.get("facets", {}).items()},
        )


def validate_filter(atlas: EvidenceAtlas, fs: FilterState) -> None:
    known_topics = set(atlas.model.topic_ids()) | {UNCLASSIFIED_TOPIC_ID}
    for tid in fs.topic_ids:
        if tid not in known_topics:
            raise UnknownTopic(f"unknown topic id {tid!r}")
    known_subs = set(atlas.model.subtopic_ids())
    for sid in fs.subtopic_ids:
        if sid not in known_subs:
            raise UnknownTopic(f"unknown subtopic id {sid!r}")
    for fname, values in fs.facet_selections.items():
        if fname not in atlas.facet_index:
            raise UnknownFacet(f"unknown or unfilterable facet {fname!r}")
        known = {value_key(v) for v in atlas.corpus.feature(fname).values}
        for v in values:
            if value_key(v) not in known:
                raise UnknownValue(f"unknown value {v!r} for facet {fname!r}")


def _topic_dimension(atlas: EvidenceAtlas, fs: FilterState) -> frozenset[str] | None:
    """Union of members for selected topics/subtopics, or None if unconstrained."""
    if not fs.topic_ids and not fs.subtopic_ids:
        return None
    members: set[str] = set()
    for tid in fs.topic_ids:
        members |= atlas.topic_index.get(tid, frozenset())
    for sid in fs.subtopic_ids:
        members |= atlas.subtopic_index.get(sid, frozenset())
    return frozenset(members)


def _facet_dimension(atlas: EvidenceAtlas, fname: str, values: frozenset[str]) -> frozenset[str] | None:
    if not values:
        return None
    members: set[str] = set()
    index = atlas.facet_index[fname]
    for v in values:
        members |= index.get(value_key(v), frozenset())
    return frozenset(members)


def _match_set(atlas: EvidenceAtlas, fs: FilterState) -> frozenset[str]:
    result: frozenset[str] | None = None
    for dim in [_topic_dimension(atlas, fs)] + [
        _facet_dimension(atlas, f, v) for f, v in fs.facet_selections.items()
    ]:
        if dim is None:
            continue
        result = dim if result is None else result & dim
    if result is None:
        return frozenset(s.id for s in atlas.corpus.studies)
    return result


def evaluate_filter(atlas: EvidenceAtlas, fs: FilterState) -> list[str]:
    """Matching study ids, ordered by id."""
    validate_filter(atlas, fs)
    return sorted(_match_set(atlas, fs))


def facet_counts(atlas: EvidenceAtlas, fs: FilterState) -> dict:
    """Per-value counts for every filterable facet plus topics and subtopics.

    Facet f is counted against fs with f's own selections removed; topic and
    subtopic counts are computed against fs minus the whole topic dimension.
    """
    validate_filter(atlas, fs)
    out_facets: dict[str, dict[str, int]] = {}
    for fdef in atlas.filterable_facets():
        base = _match_set(atlas, fs.without_facet(fdef.name))
        index = atlas.facet_index[fdef.name]
        out_facets[fdef.name] = {
            v: len(base & index.get(value_key(v), frozenset())) for v in fdef.values
        }
    topic_base = _match_set(atlas, fs.without_topic_dimension())
    topics = {tid: len(topic_base & atlas.topic_index.get(tid, frozenset())) for tid in atlas.ordered_topic_ids()}
    subtopics = {
        sid: len(topic_base & atlas.subtopic_index.get(sid, frozenset()))
        for sid in atlas.model.subtopic_ids()
    }
    return {"facets": out_facets, "topics": topics, "subtopics": subtopics}


def facet_availability(atlas: EvidenceAtlas, fs: FilterState) -> dict:
    """Active/inactive flag per facet value and topic: active iff its
    disjunctive count is positive."""
    counts = facet_counts(atlas, fs)
    return {
        "facets": {f: {v: c > 0 for v, c in vals.items()} for f, vals in counts["facets"].items()},
        "topics": {t: c > 0 for t, c in counts["topics"].items()},
        "subtopics": {s: c > 0 for s, c in counts["subtopics"].items()},
    }


@dataclass(frozen=True)
class GapMatrix:
    row_facet: str
    col_facet: str
    row_values: tuple[str, ...]
    col_values: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]  # cells[i][j] = count for row i, col j

    def gap_flags(self) -> tuple[tuple[bool, ...], ...]:
        return tuple(tuple(c == 0 for c in row) for row in self.cells)

    def to_dict(self) -> dict:
        return {
            "row_facet": self.row_facet,
            "col_facet": self.col_facet,
            "row_values": list(self.row_values),
            "col_values": list(self.col_values),
            "cells": [list(r) for r in self.cells],
            "gaps": [[c == 0 for c in row] for row in self.cells],
        }


def _axis_members(atlas: EvidenceAtlas, facet: str) -> tuple[tuple[str, ...], list[frozenset[str]]]:
    if facet == TOPIC_PSEUDO_FACET:
        ids = atlas.ordered_topic_ids()
        return tuple(ids), [atlas.topic_index.get(t, frozenset()) for t in ids]
    fdef = atlas.corpus.feature(facet)
    if fdef is None or not fdef.filterable:
        raise UnknownFacet(f"unknown or unfilterable facet {facet!r}")
    index = atlas.facet_index[facet]
    return tuple(fdef.values), [index.get(value_key(v), frozenset()) for v in fdef.values]


def _strip_axis(fs: FilterState, facet: str) -> FilterState:
    return fs.without_topic_dimension() if facet == TOPIC_PSEUDO_FACET else fs.without_facet(facet)


def gap_matrix(atlas: EvidenceAtlas, row_facet: str, col_facet: str, fs: FilterState = FilterState()) -> GapMatrix:
    """Cross-tabulation of two facets (or the topic pseudo-facet) under the
    ambient filter; zero cells are the evidence gaps. A study with several
    values in a multi-valued facet counts in each matching cell."""
    if row_facet == col_facet:
        raise SameFacet(f"row and column facet are both {row_facet!r}")
    validate_filter(atlas, fs)
    row_values, row_members = _axis_members(atlas, row_facet)
    col_values, col_members = _axis_members(atlas, col_facet)
    ambient = _match_set(atlas, _strip_axis(_strip_axis(fs, row_facet), col_facet))
    cells = tuple(
        tuple(len(ambient & rm & cm) for cm in col_members) for rm in row_members
    )
    return GapMatrix(
        row_facet=row_facet,
        col_facet=col_facet,
        row_values=row_values,
        col_values=col_values,
        cells=cells,
    )


@dataclass(frozen=True)
class SummaryStats:
    total: int
    topic_counts: dict[str, int]
    year_histogram: tuple[tuple[int, int], ...]  # (year, count) ascending, unknown excluded
    filter_echo: dict

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "topic_counts": self.topic_counts,
            "year_histogram": [[y, c] for y, c in self.year_histogram],
            "filter": self.filter_echo,
        }


def summary_stats(atlas: EvidenceAtlas, fs: FilterState) -> SummaryStats:
    """Totals over the current result set: per-topic counts (they sum to the
    total) and a per-year histogram with unknown years excluded."""
    validate_filter(atlas, fs)
    matched = _match_set(atlas, fs)
    topic_counts = {
        tid: len(matched & atlas.topic_index.get(tid, frozenset())) for tid in atlas.ordered_topic_ids()
    }
    years: dict[int, int] = {}
    for s in atlas.corpus.studies:
        if s.id in matched and s.year is not None:
            years[s.year] = years.get(s.year, 0) + 1
    return SummaryStats(
        total=len(matched),
        topic_counts=topic_counts,
        year_histogram=tuple(sorted(years.items())),
        filter_echo=fs.to_dict(),
    )
