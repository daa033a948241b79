"""Deterministic spatial layout: one circle per topic, nodes packed inside.

Cluster area is proportional to study count (above a minimum radius floor).
Clusters walk outward on an Archimedean spiral from the canvas center until
disjoint from everything already placed; nodes fill each circle along a
sunflower (phyllotaxis) spiral in study-id order. No randomness and no
physics: identical (atlas, seed, canvas) inputs give coordinate-identical
layouts, which is what makes layouts testable and exportable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .atlas import EvidenceAtlas
from .errors import CanvasTooSmall
from .topics import UNCLASSIFIED_TOPIC_ID

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

_SPIRAL_STEP = 0.02  # radians per probe step
_SPIRAL_MAX_THETA = 2000.0  # give up past this angle: canvas cannot hold the circles


@dataclass(frozen=True)
class ClusterCircle:
    topic_id: str
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class NodePoint:
    study_id: str
    x: float
    y: float
    radius: float


@dataclass(frozen=True)
class MapLayout:
    canvas: tuple[float, float]
    clusters: tuple[ClusterCircle, ...]
    nodes: tuple[NodePoint, ...]
    seed: int

    def cluster(self, topic_id: str) -> ClusterCircle | None:
        for c in self.clusters:
            if c.topic_id == topic_id:
                return c
        return None

    def to_dict(self) -> dict:
        return {
            "canvas": {"width": self.canvas[0], "height": self.canvas[1]},
            "seed": self.seed,
            "clusters": [
                {"topic_id": c.topic_id, "x": c.x, "y": c.y, "radius": c.radius} for c in self.clusters
            ],
            "nodes": [
                {"study_id": n.study_id, "x": n.x, "y": n.y, "radius": n.radius} for n in self.nodes
            ],
        }


def layout_from_dict(doc: dict) -> MapLayout:
    return MapLayout(
        canvas=(doc["canvas"]["width"], doc["canvas"]["height"]),
        seed=doc["seed"],
        clusters=tuple(
            ClusterCircle(c["topic_id"], c["x"], c["y"], c["radius"]) for c in doc["clusters"]
        ),
        nodes=tuple(NodePoint(n["study_id"], n["x"], n["y"], n["radius"]) for n in doc["nodes"]),
    )


def cluster_radius(count: int, total: int, canvas: tuple[float, float]) -> float:
    """Radius with area proportional to count/total, floored for visibility."""
    min_dim = min(canvas)
    r_base = 0.25 * min_dim
    r_min = 0.02 * min_dim
    if total <= 0:
        raise ValueError("total must be positive")
    return max(r_min, r_base * math.sqrt(count / total))


def _gap(canvas: tuple[float, float]) -> float:
    return 0.01 * min(canvas)


def _node_radius(count: int, cluster_r: float, canvas: tuple[float, float]) -> float:
    r_min = 0.02 * min(canvas)
    return min(0.25 * r_min, cluster_r / (2.0 * math.sqrt(count + 1)))


def _place_on_spiral(
    radius: float,
    placed: list[ClusterCircle],
    canvas: tuple[float, float],
    theta0: float,
) -> tuple[float, float]:
    w, h = canvas
    cx, cy = w / 2.0, h / 2.0
    gap = _gap(canvas)
    # radial growth per radian: one gap width per full turn keeps probes dense
    b = max(gap, 0.002 * min(canvas)) / (2.0 * math.pi)
    # past the canvas's bounding disk no probe can ever be in bounds again
    max_rho = math.hypot(w, h) / 2.0 + radius
    theta = 0.0
    while theta <= _SPIRAL_MAX_THETA:
        rho = b * theta * 8.0
        if rho > max_rho:
            break
        x = cx + rho * math.cos(theta0 + theta)
        y = cy + rho * math.sin(theta0 + theta)
        in_bounds = radius <= x <= w - radius and radius <= y <= h - radius
        if in_bounds and all(
            math.hypot(x - c.x, y - c.y) >= radius + c.radius + gap for c in placed
        ):
            return x, y
        theta += _SPIRAL_STEP
    raise CanvasTooSmall(
        f"cannot place circle of radius {radius:.1f} on a {w:.0f}x{h:.0f} canvas; enlarge the canvas"
    )


def compute_layout(
    atlas: EvidenceAtlas,
    seed: int = 0,
    canvas: tuple[float, float] = (1600.0, 1000.0),
) -> MapLayout:
    """Place topic circles (descending count, unclassified always last) and
    pack study nodes inside their circle by phyllotaxis in id order."""
    total = len(atlas.corpus.studies)
    topic_ids = atlas.ordered_topic_ids()
    regular = [t for t in topic_ids if t != UNCLASSIFIED_TOPIC_ID]
    regular.sort(key=lambda t: (-atlas.topic_counts.get(t, 0), t))
    ordered = regular + ([UNCLASSIFIED_TOPIC_ID] if UNCLASSIFIED_TOPIC_ID in topic_ids else [])

    theta0 = (seed % 360) * math.pi / 180.0
    clusters: list[ClusterCircle] = []
    for tid in ordered:
        r = cluster_radius(atlas.topic_counts.get(tid, 0), total, canvas)
        x, y = _place_on_spiral(r, clusters, canvas, theta0)
        clusters.append(ClusterCircle(topic_id=tid, x=x, y=y, radius=r))

    nodes: list[NodePoint] = []
    rotation = theta0
    for c in clusters:
        members = sorted(atlas.topic_index.get(c.topic_id, frozenset()))
        if not members:
            continue
        count = len(members)
        node_r = _node_radius(count, c.radius, canvas)
        rho_max = (c.radius - node_r) * 0.999
        for m, sid in enumerate(members):
            rho = rho_max * math.sqrt(m / count)
            ang = rotation + m * GOLDEN_ANGLE
            nodes.append(
                NodePoint(study_id=sid, x=c.x + rho * math.cos(ang), y=c.y + rho * math.sin(ang), radius=node_r)
            )

    return MapLayout(canvas=canvas, clusters=tuple(clusters), nodes=tuple(nodes), seed=seed)


@dataclass(frozen=True)
class MinimapFrame:
    x: float
    y: float
    width: float
    height: float

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "width": self.width, "height": self.height}


def minimap_frame(
    layout: MapLayout,
    viewport: tuple[float, float, float, float],
    minimap_size: tuple[float, float] = (200.0, 125.0),
) -> MinimapFrame:
    """Viewport rectangle scaled into minimap coordinates and clamped to its
    bounds."""
    vw, vh = layout.canvas
    mw, mh = minimap_size
    sx, sy = mw / vw, mh / vh
    x0, y0, w, h = viewport
    x1 = min(max(x0 * sx, 0.0), mw)
    y1 = min(max(y0 * sy, 0.0), mh)
    x2 = min(max((x0 + w) * sx, 0.0), mw)
    y2 = min(max((y0 + h) * sy, 0.0), mh)
    return MinimapFrame(x=x1, y=y1, width=x2 - x1, height=y2 - y1)
