/** Thin client for the scoring service.
 *
 * The UI never computes a score locally: every displayed number comes from
 * one of these calls. What-if curves are cached per (model, variable,
 * applicant-minus-that-variable) since the curve sweeps the variable and
 * therefore cannot depend on its current value.
 */
import type { Applicant, AttributionDoc, ModelsDoc, ScoreResponse, WhatIfDoc } from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service error ${status}: ${JSON.stringify(detail)}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Stable fingerprint of an applicant, independent of key order. */
export function applicantHash(applicant: Applicant, omit?: string): string {
  const entries = Object.entries(applicant)
    .filter(([k]) => k !== omit)
    .sort(([a], [b]) => (a < b ? -1 : a > b ? 1 : 0));
  return JSON.stringify(entries);
}

export class ServiceClient {
  private curveCache = new Map<string, Promise<WhatIfDoc>>();

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchFn(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    try {
      body = await res.json();
    } catch {
      body = null;
    }
    if (!res.ok) {
      const detail =
        body && typeof body === "object" && "detail" in (body as Record<string, unknown>)
          ? (body as Record<string, unknown>)["detail"]
          : body;
      throw new ServiceError(res.status, detail);
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
  }

  models(): Promise<ModelsDoc> {
    return this.request<ModelsDoc>("/models");
  }

  score(model: string, applicant: Applicant): Promise<ScoreResponse> {
    return this.post<ScoreResponse>(`/models/${model}/score`, { applicant });
  }

  explainLocal(
    model: string,
    applicant: Applicant,
    method: "breakdown" | "shap" = "breakdown",
    topK = 3,
  ): Promise<AttributionDoc> {
    return this.post<AttributionDoc>(`/models/${model}/explain/local`, {
      applicant,
      method,
      top_k: topK,
    });
  }

  /** One-off what-if query; bypasses the curve cache (used for markers). */
  whatifAt(model: string, applicant: Applicant, variable: string, value: number): Promise<WhatIfDoc> {
    return this.post<WhatIfDoc>(`/models/${model}/whatif`, {
      applicant,
      variable,
      grid: [value],
    });
  }

  /** Full response curve for a variable, fetched once per applicant state. */
  whatifCurve(model: string, applicant: Applicant, variable: string): Promise<WhatIfDoc> {
    const key = `${model}|${variable}|${applicantHash(applicant, variable)}`;
    const cached = this.curveCache.get(key);
    if (cached) return cached;
    const pending = this.post<WhatIfDoc>(`/models/${model}/whatif`, { applicant, variable }).catch(
      (err) => {
        this.curveCache.delete(key); // do not cache failures
        throw err;
      },
    );
    this.curveCache.set(key, pending);
    return pending;
  }

  curveCacheSize(): number {
    return this.curveCache.size;
  }
}
