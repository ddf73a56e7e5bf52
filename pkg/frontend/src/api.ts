// Thin typed wrapper over the gateway HTTP API. The console performs no
// analysis of its own: every number it renders originates here.

import type { ChatResponse, GraphDoc, ProfileDoc } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class HttpError extends Error {
  constructor(
    public status: number,
    public errorCode: string,
    detail: string,
  ) {
    super(`${errorCode}: ${detail}`);
  }
}

async function parseError(res: Response): Promise<HttpError> {
  try {
    const body = await res.json();
    return new HttpError(res.status, body.error ?? "error", body.detail ?? "");
  } catch {
    return new HttpError(res.status, "error", res.statusText);
  }
}

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async getJson<T>(path: string): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`);
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as T;
  }

  async uploadDataset(file: File | Blob, name: string): Promise<string> {
    const form = new FormData();
    form.append("file", file, name);
    const res = await this.fetchFn(`${this.baseUrl}/datasets`, {
      method: "POST",
      body: form,
    });
    if (!res.ok) throw await parseError(res);
    const body = await res.json();
    return body.dataset_id as string;
  }

  async createSession(datasetId: string): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ dataset_id: datasetId }),
    });
    if (!res.ok) throw await parseError(res);
    const body = await res.json();
    return body.session_id as string;
  }

  async sendMessage(sessionId: string, utterance: string): Promise<ChatResponse> {
    const res = await this.fetchFn(
      `${this.baseUrl}/sessions/${sessionId}/messages`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ utterance }),
      },
    );
    if (!res.ok) throw await parseError(res);
    return (await res.json()) as ChatResponse;
  }

  fetchGraph(sessionId: string): Promise<GraphDoc> {
    return this.getJson<GraphDoc>(`/sessions/${sessionId}/graph`);
  }

  fetchProfile(sessionId: string): Promise<ProfileDoc> {
    return this.getJson<ProfileDoc>(`/sessions/${sessionId}/profile`);
  }

  async fetchReport(sessionId: string): Promise<string> {
    const body = await this.getJson<{ markdown: string }>(
      `/sessions/${sessionId}/report`,
    );
    return body.markdown;
  }

  eventsUrl(sessionId: string): string {
    return `${this.baseUrl}/sessions/${sessionId}/events`;
  }
}
