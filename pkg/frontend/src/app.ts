/** Application wiring: one ViewState, coordinated views, one /query per
 * settled interaction (rapid toggles debounce into a single request, stale
 * responses are discarded, and a response applies to all views at once). */

import { ApiClient, type FetchFn } from "./api.js";
import { Minimap } from "./minimap.js";
import { DetailPanel, FacetPanel, StatsTile, TopicPanel } from "./panels.js";
import { Scene } from "./scene.js";
import {
  clampViewport,
  filterToWire,
  initialState,
  tierForViewport,
  toggleFacetValue,
  toggleSubtopic,
  toggleTopic,
  type ViewState,
} from "./state.js";
import type { MapPayload, QueryResponse, Viewport } from "./types.js";

const DEBOUNCE_MS = 150;

export interface AppOptions {
  fetchFn?: FetchFn;
  corpusId?: string;
  debounceMs?: number;
}

export class App {
  state!: ViewState;
  scene!: Scene;
  topicPanel!: TopicPanel;
  facetPanel!: FacetPanel;
  statsTile!: StatsTile;
  detailPanel!: DetailPanel;
  minimap!: Minimap;
  map!: MapPayload;
  lastResponse: QueryResponse | null = null;

  private client: ApiClient;
  private corpusId = "";
  private debounceMs: number;
  private pendingTimer: ReturnType<typeof setTimeout> | null = null;
  private inflight: Promise<void> | null = null;
  private topicLabels = new Map<string, string>();

  constructor(private readonly root: HTMLElement, apiBase: string, private readonly options: AppOptions = {}) {
    this.client = new ApiClient(apiBase, options.fetchFn);
    this.debounceMs = options.debounceMs ?? DEBOUNCE_MS;
  }

  async init(): Promise<void> {
    this.corpusId = this.options.corpusId ?? (await this.client.listCorpora()).corpora[0]?.corpus_id;
    if (!this.corpusId) throw new Error("no corpus available; ingest one first");
    this.map = await this.client.fetchMap(this.corpusId);
    this.state = initialState(this.map.layout.canvas);
    for (const t of this.map.topics) this.topicLabels.set(t.topic_id, t.label);
    this.topicLabels.set(this.map.unclassified.topic_id, "Unclassified");

    const callbacks = {
      onToggleTopic: (id: string) => this.handleToggle(() => toggleTopic(this.state, id)),
      onToggleSubtopic: (id: string) => this.handleToggle(() => toggleSubtopic(this.state, id)),
      onToggleFacet: (facet: string, value: string) =>
        this.handleToggle(() => toggleFacetValue(this.state, facet, value)),
    };
    this.scene = new Scene(this.map, {
      onNodeSelect: (sid) => this.selectStudy(sid),
      onNodeHover: (sid) => this.hoverStudy(sid),
      onViewportChange: (v) => this.setViewport(v),
    });
    this.topicPanel = new TopicPanel(this.map, callbacks);
    this.facetPanel = new FacetPanel(this.map, callbacks);
    this.statsTile = new StatsTile();
    this.detailPanel = new DetailPanel();
    this.minimap = new Minimap(this.map, (center) => this.centerViewport(center));

    this.buildDom();
    this.applyViewport();
    await this.runQuery(); // initial coordinated state
  }

  private buildDom(): void {
    this.root.replaceChildren();
    this.root.classList.add("ev-root");

    const corner = document.createElement("div");
    corner.classList.add("ev-corner");
    const minimapBox = document.createElement("div");
    minimapBox.classList.add("ev-minimap");
    minimapBox.appendChild(this.minimap.root);
    corner.append(this.statsTile.root, minimapBox);

    const center = document.createElement("div");
    center.classList.add("ev-center");
    center.appendChild(this.scene.svg);

    this.root.append(corner, center, this.topicPanel.root, this.facetPanel.root, this.detailPanel.root);
  }

  // --- filter round trips ----------------------------------------------------

  private handleToggle(mutate: () => void): void {
    mutate();
    this.scheduleQuery();
  }

  private scheduleQuery(): void {
    if (this.pendingTimer !== null) clearTimeout(this.pendingTimer);
    this.pendingTimer = setTimeout(() => {
      this.pendingTimer = null;
      void this.runQuery();
    }, this.debounceMs);
  }

  private runQuery(): Promise<void> {
    const run = this.client
      .query(this.corpusId, filterToWire(this.state))
      .then((response) => {
        if (response) this.applyResponse(response);
      })
      .finally(() => {
        if (this.inflight === run) this.inflight = null;
      });
    this.inflight = run;
    return run;
  }

  /** All coordinated views update from one response; nothing is partial. */
  private applyResponse(response: QueryResponse): void {
    this.lastResponse = response;
    this.scene.setEmphasis(new Set(response.result_ids));
    this.topicPanel.update(response, this.state);
    this.facetPanel.update(response, this.state);
    this.statsTile.update(response);
  }

  /** Flush any pending debounce and wait for the in-flight query to apply. */
  async settle(): Promise<void> {
    if (this.pendingTimer !== null) {
      clearTimeout(this.pendingTimer);
      this.pendingTimer = null;
      await this.runQuery();
    }
    while (this.inflight) await this.inflight;
  }

  // --- viewport / navigation -------------------------------------------------

  setViewport(v: Viewport): void {
    this.state.viewport = clampViewport(v, this.map.layout.canvas);
    this.state.tier = tierForViewport(this.state.viewport, this.map.layout.canvas);
    this.applyViewport();
  }

  private centerViewport(center: { x: number; y: number }): void {
    const v = this.state.viewport;
    this.setViewport({ x: center.x - v.width / 2, y: center.y - v.height / 2, width: v.width, height: v.height });
  }

  private applyViewport(): void {
    this.scene.setViewport(this.state.viewport, this.state.tier);
    this.minimap.update(this.state.viewport);
  }

  zoomTo(scale: number, centerX?: number, centerY?: number): void {
    const canvas = this.map.layout.canvas;
    const width = canvas.width / scale;
    const height = canvas.height / scale;
    const cx = centerX ?? this.state.viewport.x + this.state.viewport.width / 2;
    const cy = centerY ?? this.state.viewport.y + this.state.viewport.height / 2;
    this.setViewport({ x: cx - width / 2, y: cy - height / 2, width, height });
  }

  // --- detail panel ------------------------------------------------------------

  private hoverStudy(studyId: string | null): void {
    this.state.hovered = studyId;
    if (studyId && !this.state.selected) void this.loadDetail(studyId);
    if (!studyId && !this.state.selected) this.detailPanel.clear();
  }

  private selectStudy(studyId: string): void {
    if (this.state.selected === studyId) {
      this.state.selected = null;
      this.scene.setSelected(null);
      this.detailPanel.clear();
      return;
    }
    this.state.selected = studyId;
    this.scene.setSelected(studyId);
    void this.loadDetail(studyId);
  }

  private loadDetail(studyId: string): Promise<void> {
    const load = this.client
      .fetchDetail(this.corpusId, studyId)
      .then((detail) => this.detailPanel.show(detail, this.topicLabels))
      .catch(() => this.detailPanel.showError(() => void this.loadDetail(studyId)));
    this.detailLoad = load;
    return load;
  }

  detailLoad: Promise<void> | null = null;
}

export async function mount(root: HTMLElement, apiBase: string, options: AppOptions = {}): Promise<App> {
  const app = new App(root, apiBase, options);
  await app.init();
  return app;
}
