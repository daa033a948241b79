/** Wire types mirroring the API's canonical JSON payloads. */

export interface ClusterCircle {
  topic_id: string;
  x: number;
  y: number;
  radius: number;
}

export interface NodePoint {
  study_id: string;
  x: number;
  y: number;
  radius: number;
}

export interface LayoutPayload {
  canvas: { width: number; height: number };
  seed: number;
  clusters: ClusterCircle[];
  nodes: NodePoint[];
}

export interface SubtopicPayload {
  subtopic_id: string;
  label: string;
  description: string;
}

export interface TopicPayload {
  topic_id: string;
  label: string;
  description: string;
  palette_index: number;
  subtopics: SubtopicPayload[];
  count: number;
}

export interface FacetDef {
  name: string;
  kind: string;
  values: string[];
}

export interface MapPayload {
  corpus_id: string;
  atlas_version: string;
  total: number;
  layout: LayoutPayload;
  topics: TopicPayload[];
  unclassified: { topic_id: string; count: number };
  facet_schema: FacetDef[];
}

export interface QueryCounts {
  facets: Record<string, Record<string, number>>;
  topics: Record<string, number>;
  subtopics: Record<string, number>;
}

export interface QueryAvailability {
  facets: Record<string, Record<string, boolean>>;
  topics: Record<string, boolean>;
  subtopics: Record<string, boolean>;
}

export interface QueryStats {
  total: number;
  topic_counts: Record<string, number>;
  year_histogram: [number, number][];
  filter: FilterStateWire;
}

export interface QueryResponse {
  atlas_version: string;
  result_ids: string[];
  counts: QueryCounts;
  availability: QueryAvailability;
  stats: QueryStats;
}

export interface FilterStateWire {
  topic_ids: string[];
  subtopic_ids: string[];
  facets: Record<string, string[]>;
}

export interface StudyDetailPayload {
  id: string;
  title: string;
  authors: string;
  year: number | null;
  abstract: string;
  features: Record<string, string[]>;
  topic_id: string;
  topic_label: string;
  subtopic_id: string | null;
  subtopic_label: string | null;
  score: number;
  alternates: [string, number][];
  co_labels: string[];
}

export interface Viewport {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type ZoomTier = "overview" | "cluster" | "node";
