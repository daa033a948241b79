/** Navigation minimap: scaled-down cluster circles plus a frame rectangle
 * mirroring the viewport; clicking or dragging recenters the viewport. */

import { topicColor, UNCLASSIFIED_COLOR } from "./palette.js";
import type { MapPayload, Viewport } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface FrameRect {
  x: number;
  y: number;
  width: number;
  height: number;
}

/** Proportional scaling with clamping, matching the server's minimap-frame
 * contract: frame = viewport * (minimap size / canvas size). */
export function frameForViewport(
  viewport: Viewport,
  canvas: { width: number; height: number },
  minimap: { width: number; height: number },
): FrameRect {
  const sx = minimap.width / canvas.width;
  const sy = minimap.height / canvas.height;
  const clamp = (v: number, hi: number) => Math.min(Math.max(v, 0), hi);
  const x1 = clamp(viewport.x * sx, minimap.width);
  const y1 = clamp(viewport.y * sy, minimap.height);
  const x2 = clamp((viewport.x + viewport.width) * sx, minimap.width);
  const y2 = clamp((viewport.y + viewport.height) * sy, minimap.height);
  return { x: x1, y: y1, width: x2 - x1, height: y2 - y1 };
}

export class Minimap {
  readonly root: SVGSVGElement;
  private frame: SVGRectElement;
  private canvas: { width: number; height: number };
  readonly size = { width: 200, height: 125 };

  constructor(payload: MapPayload, private readonly onViewport: (center: { x: number; y: number }) => void) {
    this.canvas = payload.layout.canvas;
    this.root = document.createElementNS(SVG_NS, "svg");
    this.root.classList.add("ev-minimap-svg");
    this.root.setAttribute("width", String(this.size.width));
    this.root.setAttribute("height", String(this.size.height));
    this.root.setAttribute("viewBox", `0 0 ${this.size.width} ${this.size.height}`);

    const paletteByTopic = new Map(payload.topics.map((t) => [t.topic_id, t.palette_index]));
    const sx = this.size.width / this.canvas.width;
    const sy = this.size.height / this.canvas.height;
    for (const c of payload.layout.clusters) {
      const circle = document.createElementNS(SVG_NS, "circle");
      circle.setAttribute("cx", String(c.x * sx));
      circle.setAttribute("cy", String(c.y * sy));
      circle.setAttribute("r", String(Math.max(c.radius * sx, 1.5)));
      const idx = paletteByTopic.get(c.topic_id);
      circle.setAttribute("fill", idx === undefined ? UNCLASSIFIED_COLOR : topicColor(idx));
      circle.setAttribute("opacity", "0.5");
      this.root.appendChild(circle);
    }

    this.frame = document.createElementNS(SVG_NS, "rect");
    this.frame.classList.add("ev-minimap-frame");
    this.frame.setAttribute("fill", "none");
    this.frame.setAttribute("stroke", "#1a73e8");
    this.frame.setAttribute("stroke-width", "1.5");
    this.root.appendChild(this.frame);

    let dragging = false;
    const recenter = (ev: { offsetX?: number; offsetY?: number; clientX: number; clientY: number }) => {
      // jsdom has no layout: fall back to client coords relative to 0
      const px = ev.offsetX ?? ev.clientX;
      const py = ev.offsetY ?? ev.clientY;
      this.onViewport({ x: px / sx, y: py / sy });
    };
    this.root.addEventListener("pointerdown", (ev) => {
      dragging = true;
      recenter(ev as PointerEvent);
    });
    this.root.addEventListener("pointermove", (ev) => {
      if (dragging) recenter(ev as PointerEvent);
    });
    this.root.addEventListener("pointerup", () => {
      dragging = false;
    });
  }

  update(viewport: Viewport): void {
    const f = frameForViewport(viewport, this.canvas, this.size);
    this.frame.setAttribute("x", f.x.toFixed(2));
    this.frame.setAttribute("y", f.y.toFixed(2));
    this.frame.setAttribute("width", f.width.toFixed(2));
    this.frame.setAttribute("height", f.height.toFixed(2));
  }

  frameRect(): FrameRect {
    return {
      x: Number(this.frame.getAttribute("x")),
      y: Number(this.frame.getAttribute("y")),
      width: Number(this.frame.getAttribute("width")),
      height: Number(this.frame.getAttribute("height")),
    };
  }
}
