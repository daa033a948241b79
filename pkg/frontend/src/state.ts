/** Client-side source of truth: every view renders from this ViewState. */

import type { FilterStateWire, Viewport, ZoomTier } from "./types.js";

export interface ViewState {
  filter: {
    topics: Set<string>;
    subtopics: Set<string>;
    facets: Map<string, Set<string>>;
  };
  viewport: Viewport;
  hovered: string | null;
  selected: string | null;
  tier: ZoomTier;
}

export function initialState(canvas: { width: number; height: number }): ViewState {
  return {
    filter: { topics: new Set(), subtopics: new Set(), facets: new Map() },
    viewport: { x: 0, y: 0, width: canvas.width, height: canvas.height },
    hovered: null,
    selected: null,
    tier: "overview",
  };
}

export function filterIsEmpty(state: ViewState): boolean {
  const f = state.filter;
  if (f.topics.size || f.subtopics.size) return false;
  for (const values of f.facets.values()) if (values.size) return false;
  return true;
}

/** Canonical wire form: sorted keys and sorted value lists, matching the
 * server's byte-stable serialization. */
export function filterToWire(state: ViewState): FilterStateWire {
  const facets: Record<string, string[]> = {};
  for (const name of [...state.filter.facets.keys()].sort()) {
    const values = state.filter.facets.get(name)!;
    if (values.size) facets[name] = [...values].sort();
  }
  return {
    topic_ids: [...state.filter.topics].sort(),
    subtopic_ids: [...state.filter.subtopics].sort(),
    facets,
  };
}

export function filterKey(state: ViewState): string {
  return JSON.stringify(filterToWire(state));
}

function toggle(set: Set<string>, id: string): void {
  if (set.has(id)) set.delete(id);
  else set.add(id);
}

export function toggleTopic(state: ViewState, id: string): void {
  toggle(state.filter.topics, id);
}

export function toggleSubtopic(state: ViewState, id: string): void {
  toggle(state.filter.subtopics, id);
}

export function toggleFacetValue(state: ViewState, facet: string, value: string): void {
  let values = state.filter.facets.get(facet);
  if (!values) {
    values = new Set();
    state.filter.facets.set(facet, values);
  }
  toggle(values, value);
  if (!values.size) state.filter.facets.delete(facet);
}

/** Zoom tier from the viewport scale: zoomed out shows the cluster overview,
 * mid zoom reveals subtopic labels, deep zoom enables node selection. */
export function tierForViewport(viewport: Viewport, canvas: { width: number; height: number }): ZoomTier {
  const scale = canvas.width / viewport.width;
  if (scale >= 4) return "node";
  if (scale >= 1.8) return "cluster";
  return "overview";
}

export function clampViewport(v: Viewport, canvas: { width: number; height: number }): Viewport {
  const width = Math.min(Math.max(v.width, canvas.width / 40), canvas.width);
  const height = Math.min(Math.max(v.height, canvas.height / 40), canvas.height);
  const x = Math.min(Math.max(v.x, 0), canvas.width - width);
  const y = Math.min(Math.max(v.y, 0), canvas.height - height);
  return { x, y, width, height };
}
