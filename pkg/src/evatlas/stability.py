"""Agreement metrics between repeated topic-model runs on one corpus.

A partition is a plain mapping study_id -> cluster key (primary topic ids,
with unclassified participating as a normal cluster). All metrics are label
invariant; the adjusted Rand index is computed with exact rational
arithmetic so hand-derivable values come out exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DomainMismatch, TooFewRuns
from .topics import AssignmentTable, TopicModel

Partition = Mapping[str, str]


def partition_of(table: AssignmentTable) -> dict[str, str]:
    return table.partition()


def _check_domain(a: Partition, b: Partition) -> None:
    if set(a) != set(b):
        only_a = len(set(a) - set(b))
        only_b = len(set(b) - set(a))
        raise DomainMismatch(f"partitions cover different study ids ({only_a} extra left, {only_b} extra right)")


def _comb2(n: int) -> int:
    return n * (n - 1) // 2


def adjusted_rand_index(a: Partition, b: Partition) -> float:
    """Chance-corrected agreement in [-1, 1]; 1.0 for identical partitions,
    invariant under relabeling of either side."""
    _check_domain(a, b)
    n = len(a)
    if n == 0:
        raise DomainMismatch("empty partitions")
    contingency: dict[tuple[str, str], int] = {}
    a_sizes: dict[str, int] = {}
    b_sizes: dict[str, int] = {}
    for sid, ca in a.items():
        cb = b[sid]
        contingency[(ca, cb)] = contingency.get((ca, cb), 0) + 1
        a_sizes[ca] = a_sizes.get(ca, 0) + 1
        b_sizes[cb] = b_sizes.get(cb, 0) + 1
    index = sum(_comb2(v) for v in contingency.values())
    sum_a = sum(_comb2(v) for v in a_sizes.values())
    sum_b = sum(_comb2(v) for v in b_sizes.values())
    total = _comb2(n)
    expected = Fraction(sum_a * sum_b, total) if total else Fraction(0)
    max_index = Fraction(sum_a + sum_b, 2)
    if max_index == expected:
        # both partitions trivial (all-singletons or single cluster): identical by construction
        return 1.0
    return float((index - expected) / (max_index - expected))


def _topic_members(table: AssignmentTable) -> dict[str, frozenset[str]]:
    members: dict[str, set[str]] = {}
    for a in table.assignments:
        members.setdefault(a.topic_id, set()).add(a.study_id)
    return {k: frozenset(v) for k, v in members.items()}


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def align_topic_labels(
    reference: tuple[TopicModel, AssignmentTable],
    other: tuple[TopicModel, AssignmentTable],
) -> dict[str, str | None]:
    """Greedy maximum-Jaccard matching of topic member-sets.

    Ties break to the lower topic index on both sides; topics with no
    overlapping candidate map to None.
    """
    ref_model, ref_table = reference
    oth_model, oth_table = other
    _check_domain(ref_table.partition(), oth_table.partition())
    ref_members = _topic_members(ref_table)
    oth_members = _topic_members(oth_table)
    ref_ids = [t.topic_id for t in ref_model.topics] + [tid for tid in ref_members if tid not in ref_model.topic_ids()]
    oth_ids = [t.topic_id for t in oth_model.topics] + [tid for tid in oth_members if tid not in oth_model.topic_ids()]

    pairs = []
    for i, rid in enumerate(ref_ids):
        for j, oid in enumerate(oth_ids):
            score = _jaccard(ref_members.get(rid, frozenset()), oth_members.get(oid, frozenset()))
            if score > 0:
                pairs.append((-score, i, j, rid, oid))
    pairs.sort()
    mapping: dict[str, str | None] = {rid: None for rid in ref_ids}
    taken: set[str] = set()
    for _neg, _i, _j, rid, oid in pairs:
        if mapping[rid] is None and oid not in taken:
            mapping[rid] = oid
            taken.add(oid)
    return mapping


@dataclass
class CoAssignmentMatrix:
    study_ids: list[str]  # sorted
    frequencies: dict[tuple[str, str], float]  # key: (lower id, higher id)

    def frequency(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        return self.frequencies[key]

    @property
    def mean(self) -> float:
        if not self.frequencies:
            return 0.0
        return sum(self.frequencies.values()) / len(self.frequencies)

    @property
    def fraction_extreme(self) -> float:
        """Fraction of pairs whose frequency is exactly 0 or 1 (fully stable)."""
        if not self.frequencies:
            return 1.0
        hits = sum(1 for v in self.frequencies.values() if v in (0.0, 1.0))
        return hits / len(self.frequencies)


def co_assignment_matrix(runs: Sequence[Partition]) -> CoAssignmentMatrix:
    """Per unordered study pair: fraction of runs placing the pair in the
    same cluster."""
    if not runs:
        raise TooFewRuns("need at least one run")
    first = runs[0]
    for other in runs[1:]:
        _check_domain(first, other)
    ids = sorted(first)
    n_runs = len(runs)
    freqs: dict[tuple[str, str], float] = {}
    for a, b in itertools.combinations(ids, 2):
        same = sum(1 for run in runs if run[a] == run[b])
        freqs[(a, b)] = same / n_runs
    return CoAssignmentMatrix(study_ids=ids, frequencies=freqs)


@dataclass
class StabilityReport:
    run_ids: list[str]
    ari_matrix: list[list[float]]
    mean_ari: float
    co_assignment_mean: float
    co_assignment_fraction_extreme: float
    persistence: dict[str, dict[str, float]]  # reference topic -> run_id -> best Jaccard

    def to_dict(self) -> dict:
        return {
            "run_ids": self.run_ids,
            "ari_matrix": self.ari_matrix,
            "mean_ari": self.mean_ari,
            "co_assignment": {
                "mean": self.co_assignment_mean,
                "fraction_extreme": self.co_assignment_fraction_extreme,
            },
            "persistence": self.persistence,
        }


def stability_report(
    runs: Sequence[tuple[TopicModel, AssignmentTable]],
    run_ids: Sequence[str] | None = None,
) -> StabilityReport:
    """Aggregate pairwise ARI, co-assignment summary, and per-topic
    persistence (best member-set Jaccard of each reference-run topic against
    every other run). The first run is the reference."""
    if len(runs) < 2:
        raise TooFewRuns(f"need at least 2 runs, got {len(runs)}")
    ids = list(run_ids) if run_ids else [f"run{i + 1}" for i in range(len(runs))]
    if len(ids) != len(runs):
        raise DomainMismatch("run_ids length does not match runs")
    partitions = [table.partition() for _, table in runs]
    for p in partitions[1:]:
        _check_domain(partitions[0], p)

    k = len(runs)
    ari = [[1.0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i + 1, k):
            v = adjusted_rand_index(partitions[i], partitions[j])
            ari[i][j] = ari[j][i] = v
    off_diag = [ari[i][j] for i in range(k) for j in range(i + 1, k)]
    mean_ari = sum(off_diag) / len(off_diag)

    co = co_assignment_matrix(partitions)

    ref_model, ref_table = runs[0]
    ref_members = _topic_members(ref_table)
    persistence: dict[str, dict[str, float]] = {}
    for tid in list(ref_model.topic_ids()) + [t for t in ref_members if t not in ref_model.topic_ids()]:
        row: dict[str, float] = {}
        for idx in range(1, k):
            other_members = _topic_members(runs[idx][1])
            best = max(
                (_jaccard(ref_members.get(tid, frozenset()), m) for m in other_members.values()),
                default=0.0,
            )
            row[ids[idx]] = best
        persistence[tid] = row

    return StabilityReport(
        run_ids=ids,
        ari_matrix=ari,
        mean_ari=mean_ari,
        co_assignment_mean=co.mean,
        co_assignment_fraction_extreme=co.fraction_extreme,
        persistence=persistence,
    )
