"""Deterministic lexical topic backend: TF-IDF + seeded k-means.

Everything here is a pure function of (corpus, config). Studies are processed
in id-sorted order regardless of corpus row order, initialization draws from
a generator seeded only by (config.seed, k), and every tie-break is explicit,
so repeated runs are byte-identical and row permutations cannot change the
clustering.
"""

from __future__ import annotations

import math
from datetime import datetime, timezone

import numpy as np

from ..errors import EmptyText
from ..ingest import Corpus
from ..textproc import tokenize
from .types import (
    UNCLASSIFIED_TOPIC_ID,
    Assignment,
    AssignmentTable,
    RunConfig,
    RunMeta,
    Subtopic,
    Topic,
    TopicModel,
    study_text,
)

_MAX_ITER = 100


def _tfidf_matrix(token_lists: list[list[str]]) -> tuple[np.ndarray, list[str]]:
    """Row-normalized TF-IDF matrix over the given documents."""
    vocab = sorted({t for toks in token_lists for t in toks})
    index = {t: i for i, t in enumerate(vocab)}
    n_docs = len(token_lists)
    counts = np.zeros((n_docs, len(vocab)), dtype=np.float64)
    for r, toks in enumerate(token_lists):
        for t in toks:
            counts[r, index[t]] += 1.0
    df = (counts > 0).sum(axis=0)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    mat = counts * idf
    norms = np.linalg.norm(mat, axis=1)
    nonzero = norms > 0
    mat[nonzero] /= norms[nonzero, None]
    return mat, vocab


def _kmeans_pp_init(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Seeded k-means++: weighted draws via cumulative sums (deterministic)."""
    n = X.shape[0]
    centers = [int(rng.integers(n))]
    d2 = np.sum((X - X[centers[0]]) ** 2, axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            # all remaining points coincide with a chosen center
            remaining = [i for i in range(n) if i not in centers]
            centers.append(remaining[0] if remaining else centers[-1])
            continue
        target = rng.random() * total
        idx = int(np.searchsorted(np.cumsum(d2), target, side="right"))
        idx = min(idx, n - 1)
        centers.append(idx)
        d2 = np.minimum(d2, np.sum((X - X[idx]) ** 2, axis=1))
    return X[centers].copy()


def _kmeans(X: np.ndarray, k: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd's algorithm; returns (labels, centroids). Ties go to the lower
    centroid index; empty clusters steal the point farthest from its centroid."""
    centroids = _kmeans_pp_init(X, k, rng)
    labels = np.full(X.shape[0], -1, dtype=np.int64)
    for _it in range(_MAX_ITER):
        d2 = ((X[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_labels = np.argmin(d2, axis=1)
        for j in range(k):
            if not np.any(new_labels == j):
                dist_own = d2[np.arange(len(new_labels)), new_labels]
                sizes = np.bincount(new_labels, minlength=k)
                movable = sizes[new_labels] > 1
                dist_own = np.where(movable, dist_own, -1.0)
                new_labels[int(np.argmax(dist_own))] = j
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = X[labels == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    return labels, centroids


def _mean_silhouette(X: np.ndarray, labels: np.ndarray) -> float:
    """Mean silhouette with Euclidean distance; singleton clusters score 0."""
    n = X.shape[0]
    uniq = np.unique(labels)
    if len(uniq) < 2 or len(uniq) >= n:
        return -1.0
    sq = np.sum(X ** 2, axis=1)
    d2 = np.maximum(sq[:, None] + sq[None, :] - 2.0 * (X @ X.T), 0.0)
    dist = np.sqrt(d2)
    total = 0.0
    for i in range(n):
        own = labels[i]
        a_mask = labels == own
        n_own = a_mask.sum()
        if n_own == 1:
            continue  # silhouette of a singleton is defined as 0
        a = dist[i, a_mask].sum() / (n_own - 1)
        b = min(dist[i, labels == c].mean() for c in uniq if c != own)
        denom = max(a, b)
        if denom > 0:
            total += (b - a) / denom
    return total / n


def _n_distinct_rows(X: np.ndarray) -> int:
    return len(np.unique(X, axis=0))


def _ctfidf_terms(count_per_class: np.ndarray, vocab: list[str], top: int) -> list[list[str]]:
    """Top terms per class by class-based TF-IDF weighting."""
    class_totals = count_per_class.sum(axis=1)
    class_totals[class_totals == 0] = 1.0
    tf = count_per_class / class_totals[:, None]
    term_freq = count_per_class.sum(axis=0)
    avg_class_size = count_per_class.sum() / count_per_class.shape[0]
    with np.errstate(divide="ignore"):
        iwf = np.log(1.0 + avg_class_size / np.maximum(term_freq, 1e-12))
    weights = tf * iwf[None, :]
    results = []
    for c in range(weights.shape[0]):
        order = sorted(range(len(vocab)), key=lambda t: (-weights[c, t], vocab[t]))
        results.append([vocab[t] for t in order[:top] if weights[c, t] > 0])
    return results


def _class_counts(token_lists: list[list[str]], members_per_class: list[list[int]], vocab: list[str]) -> np.ndarray:
    index = {t: i for i, t in enumerate(vocab)}
    counts = np.zeros((len(members_per_class), len(vocab)), dtype=np.float64)
    for c, members in enumerate(members_per_class):
        for m in members:
            for t in token_lists[m]:
                counts[c, index[t]] += 1.0
    return counts


def _cosine_to_centroids(x: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    c_norms = np.linalg.norm(centroids, axis=1)
    x_norm = np.linalg.norm(x)
    if x_norm == 0:
        return np.zeros(len(centroids))
    sims = centroids @ x / np.where(c_norms > 0, c_norms * x_norm, 1.0)
    sims[c_norms == 0] = 0.0
    return np.clip(sims, 0.0, 1.0)


def extract_topics_lexical(corpus: Corpus, config: RunConfig = RunConfig()) -> tuple[TopicModel, AssignmentTable]:
    """Cluster study text into labeled topics with per-study assignments.

    k is the value in config.topic_range maximizing mean silhouette (ties to
    the smaller k), clamped to the number of distinct document vectors.
    Topic labels come from top class-based terms; each cluster of four or
    more studies is split into seeded sub-clusters for subtopics. Studies
    whose text shares no vocabulary (zero vector) land in the unclassified
    bucket with score 0.
    """
    studies = sorted(corpus.studies, key=lambda s: s.id)
    token_lists = [tokenize(study_text(s, config.text_fields)) for s in studies]
    usable = [i for i, toks in enumerate(token_lists) if toks]
    if not usable:
        raise EmptyText("no study has usable text in the configured fields")

    X_all, vocab = _tfidf_matrix(token_lists)
    X = X_all[usable]

    tmin, tmax = config.topic_range
    n_distinct = _n_distinct_rows(X)
    candidates = [k for k in range(tmin, tmax + 1) if k <= n_distinct]
    if not candidates:
        candidates = [max(1, n_distinct)]
    if len(candidates) == 1:
        best_k = candidates[0]
        labels, centroids = _kmeans(X, best_k, np.random.default_rng([config.seed, best_k]))
    else:
        best = None
        for k in candidates:
            lab, cen = _kmeans(X, k, np.random.default_rng([config.seed, k]))
            score = _mean_silhouette(X, lab)
            if best is None or score > best[0]:
                best = (score, k, lab, cen)
        _, best_k, labels, centroids = best

    # order clusters by size desc, then smallest member study id
    members_by_cluster = {j: [i for i in range(len(usable)) if labels[i] == j] for j in range(best_k)}
    order = sorted(
        members_by_cluster,
        key=lambda j: (-len(members_by_cluster[j]), min((studies[usable[i]].id for i in members_by_cluster[j]), default="")),
    )

    usable_tokens = [token_lists[i] for i in usable]
    label_terms = _ctfidf_terms(
        _class_counts(usable_tokens, [members_by_cluster[j] for j in order], vocab), vocab, top=8
    )

    smin, smax = config.subtopic_range
    sub_k_target = min(max(2, smin), smax)
    topics: list[Topic] = []
    sub_centroids: dict[str, np.ndarray] = {}
    for rank, j in enumerate(order, start=1):
        terms = label_terms[rank - 1] or ["(no distinctive terms)"]
        members = members_by_cluster[j]
        topic_id = f"T{rank}"
        sub_groups: list[list[int]]
        if len(members) >= 4 and sub_k_target >= 2:
            Xm = X[members]
            k_sub = min(sub_k_target, _n_distinct_rows(Xm))
            if k_sub >= 2:
                sub_labels, sub_cent = _kmeans(Xm, k_sub, np.random.default_rng([config.seed, best_k, rank]))
                groups = {g: [members[i] for i in range(len(members)) if sub_labels[i] == g] for g in range(k_sub)}
                sub_order = sorted(
                    groups,
                    key=lambda g: (-len(groups[g]), min((studies[usable[i]].id for i in groups[g]), default="")),
                )
                sub_groups = [groups[g] for g in sub_order]
                sub_centroids[topic_id] = sub_cent[sub_order]
            else:
                sub_groups = [members]
        else:
            sub_groups = [members]
        if len(sub_groups) == 1:
            sub_centroids[topic_id] = centroids[j][None, :]
            subtopics = [Subtopic(f"{topic_id}.1", ", ".join(terms[:3]), "General studies in this topic.")]
        else:
            sub_terms = _ctfidf_terms(_class_counts(usable_tokens, sub_groups, vocab), vocab, top=3)
            subtopics = [
                Subtopic(
                    f"{topic_id}.{g + 1}",
                    ", ".join(st or terms[:3]),
                    f"Subgroup of {len(sub_groups[g])} studies.",
                )
                for g, st in enumerate(sub_terms)
            ]
        topics.append(
            Topic(
                topic_id=topic_id,
                label=", ".join(terms[:3]),
                description=f"Cluster of {len(members)} studies with prominent terms: {', '.join(terms)}.",
                subtopics=tuple(subtopics),
                palette_index=rank - 1,
            )
        )

    ordered_centroids = centroids[order]
    n_alt = max(config.alternates - 1, 0)
    assignments = []
    for pos, s in enumerate(studies):
        sims = _cosine_to_centroids(X_all[pos], ordered_centroids)
        ranked = sorted(range(len(topics)), key=lambda t: (-sims[t], t))
        if sims[ranked[0]] == 0.0:
            alternates = tuple((topics[t].topic_id, 0.0) for t in ranked[:n_alt])
            assignments.append(Assignment(s.id, UNCLASSIFIED_TOPIC_ID, None, 0.0, alternates))
            continue
        best_t = ranked[0]
        topic = topics[best_t]
        sc = sub_centroids[topic.topic_id]
        if len(topic.subtopics) == 1:
            sub_id = topic.subtopics[0].subtopic_id
        else:
            sub_sims = _cosine_to_centroids(X_all[pos], sc)
            sub_id = topic.subtopics[int(np.argmax(sub_sims))].subtopic_id
        alternates = tuple((topics[t].topic_id, float(sims[t])) for t in ranked[1 : 1 + n_alt])
        assignments.append(Assignment(s.id, topic.topic_id, sub_id, float(sims[best_t]), alternates))

    model = TopicModel(
        topics=tuple(topics),
        run_meta=RunMeta(
            backend="lexical",
            model="",
            seed=config.seed,
            temperature=config.temperature,
            timestamp=datetime.now(timezone.utc).isoformat(),
            text_fields=config.text_fields,
        ),
    )
    return model, AssignmentTable(tuple(assignments))
