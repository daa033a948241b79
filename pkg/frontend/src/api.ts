/** API client with request sequencing: at most one /query result applies at
 * a time and stale responses are discarded by sequence number. */

import type { FilterStateWire, MapPayload, QueryResponse, StudyDetailPayload } from "./types.js";

export type FetchFn = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private seq = 0;
  private applied = 0;

  constructor(
    readonly base: string,
    private readonly fetchFn: FetchFn = (input, init) => fetch(input, init),
  ) {}

  private async getJson<T>(path: string): Promise<T> {
    const resp = await this.fetchFn(`${this.base}${path}`);
    if (!resp.ok) throw new Error(`GET ${path} -> ${resp.status}`);
    return (await resp.json()) as T;
  }

  async listCorpora(): Promise<{ corpora: { corpus_id: string; studies: number }[] }> {
    return this.getJson("/corpora");
  }

  async fetchMap(corpusId: string): Promise<MapPayload> {
    return this.getJson(`/corpora/${corpusId}/map`);
  }

  async fetchDetail(corpusId: string, studyId: string): Promise<StudyDetailPayload> {
    return this.getJson(`/corpora/${corpusId}/studies/${studyId}`);
  }

  /** Resolves null when a newer query superseded this one. */
  async query(corpusId: string, filter: FilterStateWire): Promise<QueryResponse | null> {
    const mySeq = ++this.seq;
    const resp = await this.fetchFn(`${this.base}/corpora/${corpusId}/query`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(filter),
    });
    if (!resp.ok) throw new Error(`POST /query -> ${resp.status}`);
    const doc = (await resp.json()) as QueryResponse;
    if (mySeq < this.seq || mySeq <= this.applied) return null; // superseded
    this.applied = mySeq;
    return doc;
  }
}
