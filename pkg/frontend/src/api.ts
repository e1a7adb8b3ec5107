/** Thin JSON client for the evaluation service. */

import type {
  HealthResponse,
  QuestionItem,
  RatingAck,
  RatingPayload,
  ReportResponse,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

/** Server answered but rejected the request (4xx/5xx); not retryable offline. */
export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  private fetchImpl: FetchLike;

  constructor(public baseUrl: string, fetchImpl?: FetchLike) {
    this.fetchImpl = fetchImpl ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    const body = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      throw new ApiError(resp.status, (body as { error?: string }).error ?? resp.statusText);
    }
    return body as T;
  }

  async getQuestions(raterId: string, n: number): Promise<QuestionItem[]> {
    const query = `rater=${encodeURIComponent(raterId)}&n=${n}`;
    const data = await this.request<{ questions: QuestionItem[] }>(`/api/questions?${query}`);
    return data.questions;
  }

  async postRating(payload: RatingPayload): Promise<RatingAck> {
    return this.request<RatingAck>("/api/ratings", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  async getReport(): Promise<ReportResponse> {
    return this.request<ReportResponse>("/api/report");
  }

  async health(): Promise<HealthResponse> {
    return this.request<HealthResponse>("/api/health");
  }
}
