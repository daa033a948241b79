/** SVG evidence map: cluster circles, study nodes, emphasis, zoom tiers.
 *
 * Geometry is built once from the map payload and never moves with filter
 * changes; filtered-out nodes are de-emphasized via a class, not removed, so
 * the user's spatial memory survives cross-filtering.
 */

import { topicColor, UNCLASSIFIED_COLOR } from "./palette.js";
import type { MapPayload, Viewport, ZoomTier } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface SceneCallbacks {
  onNodeSelect: (studyId: string) => void;
  onNodeHover: (studyId: string | null) => void;
  onViewportChange: (viewport: Viewport) => void;
}

export class Scene {
  readonly svg: SVGSVGElement;
  private nodesById = new Map<string, SVGCircleElement>();
  private tier: ZoomTier = "overview";
  private viewport: Viewport;
  private canvas: { width: number; height: number };

  constructor(payload: MapPayload, private readonly callbacks: SceneCallbacks) {
    this.canvas = payload.layout.canvas;
    this.viewport = { x: 0, y: 0, width: this.canvas.width, height: this.canvas.height };
    this.svg = document.createElementNS(SVG_NS, "svg");
    this.svg.classList.add("ev-map-svg", "tier-overview");
    this.svg.setAttribute("viewBox", `0 0 ${this.canvas.width} ${this.canvas.height}`);
    this.svg.setAttribute("preserveAspectRatio", "xMidYMid meet");

    const paletteByTopic = new Map(payload.topics.map((t) => [t.topic_id, t.palette_index]));
    const labelByTopic = new Map(payload.topics.map((t) => [t.topic_id, t.label]));
    const clusterLayer = document.createElementNS(SVG_NS, "g");
    const nodeLayer = document.createElementNS(SVG_NS, "g");
    const labelLayer = document.createElementNS(SVG_NS, "g");
    this.svg.append(clusterLayer, nodeLayer, labelLayer);

    for (const c of payload.layout.clusters) {
      const idx = paletteByTopic.get(c.topic_id);
      const color = idx === undefined ? UNCLASSIFIED_COLOR : topicColor(idx);
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.classList.add("ev-cluster");
      circle.dataset.topicId = c.topic_id;
      circle.setAttribute("cx", String(c.x));
      circle.setAttribute("cy", String(c.y));
      circle.setAttribute("r", String(c.radius));
      circle.setAttribute("fill", color);
      circle.setAttribute("fill-opacity", "0.12");
      circle.setAttribute("stroke", color);
      clusterLayer.appendChild(circle);

      const label = document.createElementNS(SVG_NS, "text");
      label.classList.add("ev-cluster-label");
      label.dataset.topicId = c.topic_id;
      label.setAttribute("x", String(c.x));
      label.setAttribute("y", String(c.y - c.radius - 6));
      label.setAttribute("text-anchor", "middle");
      label.textContent = labelByTopic.get(c.topic_id) ?? "Unclassified";
      labelLayer.appendChild(label);

      const topic = payload.topics.find((t) => t.topic_id === c.topic_id);
      if (topic) {
        topic.subtopics.forEach((sub, i) => {
          const subLabel = document.createElementNS(SVG_NS, "text");
          subLabel.classList.add("ev-subtopic-label");
          subLabel.dataset.subtopicId = sub.subtopic_id;
          subLabel.setAttribute("x", String(c.x));
          subLabel.setAttribute("y", String(c.y + 14 * (i + 1)));
          subLabel.setAttribute("text-anchor", "middle");
          subLabel.textContent = sub.label;
          labelLayer.appendChild(subLabel);
        });
      }
    }

    // node color comes from the (disjoint) cluster circle containing it
    const nodeTopic = new Map<string, string>();
    for (const n of payload.layout.nodes) {
      for (const c of payload.layout.clusters) {
        const dx = n.x - c.x;
        const dy = n.y - c.y;
        if (dx * dx + dy * dy <= c.radius * c.radius + 1e-6) {
          nodeTopic.set(n.study_id, c.topic_id);
          break;
        }
      }
    }

    for (const n of payload.layout.nodes) {
      const node = document.createElementNS(SVG_NS, "circle");
      node.classList.add("ev-node");
      node.dataset.studyId = n.study_id;
      node.setAttribute("cx", String(n.x));
      node.setAttribute("cy", String(n.y));
      node.setAttribute("r", String(n.radius));
      const tid = nodeTopic.get(n.study_id);
      const idx = tid === undefined ? undefined : paletteByTopic.get(tid);
      node.setAttribute("fill", idx === undefined ? UNCLASSIFIED_COLOR : topicColor(idx));
      node.addEventListener("click", () => {
        if (this.tier === "node") this.callbacks.onNodeSelect(n.study_id);
      });
      node.addEventListener("pointerenter", () => this.callbacks.onNodeHover(n.study_id));
      node.addEventListener("pointerleave", () => this.callbacks.onNodeHover(null));
      nodeLayer.appendChild(node);
      this.nodesById.set(n.study_id, node);
    }

    this.wirePanZoom();
  }

  private wirePanZoom(): void {
    let dragging: { startX: number; startY: number; viewport: Viewport } | null = null;
    this.svg.addEventListener("pointerdown", (ev) => {
      dragging = { startX: ev.clientX, startY: ev.clientY, viewport: { ...this.viewport } };
    });
    this.svg.addEventListener("pointermove", (ev) => {
      if (!dragging) return;
      const scale = this.viewport.width / Math.max(this.svg.clientWidth || this.canvas.width, 1);
      this.callbacks.onViewportChange({
        ...dragging.viewport,
        x: dragging.viewport.x - (ev.clientX - dragging.startX) * scale,
        y: dragging.viewport.y - (ev.clientY - dragging.startY) * scale,
      });
    });
    this.svg.addEventListener("pointerup", () => {
      dragging = null;
    });
    this.svg.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY > 0 ? 1.2 : 1 / 1.2;
      const v = this.viewport;
      const cx = v.x + v.width / 2;
      const cy = v.y + v.height / 2;
      this.callbacks.onViewportChange({
        x: cx - (v.width * factor) / 2,
        y: cy - (v.height * factor) / 2,
        width: v.width * factor,
        height: v.height * factor,
      });
    });
  }

  setViewport(viewport: Viewport, tier: ZoomTier): void {
    this.viewport = viewport;
    this.tier = tier;
    this.svg.setAttribute(
      "viewBox",
      `${viewport.x} ${viewport.y} ${viewport.width} ${viewport.height}`,
    );
    this.svg.classList.remove("tier-overview", "tier-cluster", "tier-node");
    this.svg.classList.add(`tier-${tier}`);
  }

  /** De-emphasize nodes outside the result set; never remove geometry. */
  setEmphasis(resultIds: Set<string>): void {
    for (const [sid, node] of this.nodesById) {
      node.classList.toggle("dim", !resultIds.has(sid));
    }
  }

  setSelected(studyId: string | null): void {
    for (const [sid, node] of this.nodesById) {
      node.classList.toggle("selected", sid === studyId);
    }
  }

  emphasizedCount(): number {
    let n = 0;
    for (const node of this.nodesById.values()) if (!node.classList.contains("dim")) n += 1;
    return n;
  }
}
