/** Deterministic fake service used by the UI tests.
 *
 * Scoring is a pure function of the applicant, so the /score and /whatif
 * endpoints agree exactly at the applicant's own value, mirroring the real
 * service's identity guarantee.
 */
import type { Applicant, ScoreResponse, WhatIfDoc } from "../src/types.js";

export function fakePd(applicant: Applicant): number {
  const a = Number(applicant["a"] ?? 0);
  const b = Number(applicant["b"] ?? 0);
  return 0.3 + 0.04 * a - 0.02 * b;
}

export function fakeScore(applicant: Applicant): ScoreResponse {
  return {
    model: "scorecard",
    pd: fakePd(applicant),
    points: Math.round(600 - 400 * fakePd(applicant)),
    intercept_points: 385,
    per_variable_points: { a: 10, b: -5 },
  };
}

export interface RecordedCall {
  url: string;
  payload: Record<string, unknown>;
}

export function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

/** Instant fake: answers score and whatif from fakePd, records every call. */
export function instantService(calls: RecordedCall[]) {
  return async (url: string, init?: RequestInit): Promise<Response> => {
    const payload = init?.body ? JSON.parse(String(init.body)) : {};
    calls.push({ url, payload });
    if (url.endsWith("/score")) {
      return jsonResponse(fakeScore(payload.applicant));
    }
    if (url.endsWith("/whatif")) {
      const applicant: Applicant = payload.applicant;
      const variable: string = payload.variable;
      const grid: number[] = payload.grid ?? [0, 1, 2, 3, 4];
      const responses = grid.map((z) => fakePd({ ...applicant, [variable]: z }));
      const doc: WhatIfDoc = {
        model: "scorecard",
        variable,
        grid,
        responses,
        anchor: { value: applicant[variable], response: fakePd(applicant) },
      };
      return jsonResponse(doc);
    }
    if (url.endsWith("/explain/local")) {
      const applicant: Applicant = payload.applicant;
      const prediction = fakePd(applicant);
      const baseline = fakePd({ a: 0.5, b: 0.5 });
      const deltaA = 0.04 * (Number(applicant["a"] ?? 0) - 0.5);
      return jsonResponse({
        model: "scorecard",
        method: payload.method ?? "breakdown",
        baseline,
        prediction,
        segments: [
          { variable: "a", delta: deltaA },
          { variable: "b", delta: prediction - baseline - deltaA },
        ],
        completeness_residual: 0,
      });
    }
    return jsonResponse({ detail: `unexpected ${url}` }, 500);
  };
}
