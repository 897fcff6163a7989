/** View model of the score panel: PD, total points, per-variable table. */
import type { ScoreResponse } from "./types.js";

export interface ScoreRow {
  variable: string;
  points: number;
}

export interface ScorePanelModel {
  pd: number;
  pdText: string;
  points: number | null;
  interceptPoints: number | null;
  rows: ScoreRow[];
}

export function scorePanelModel(response: ScoreResponse): ScorePanelModel {
  const rows: ScoreRow[] = Object.entries(response.per_variable_points ?? {})
    .map(([variable, points]) => ({ variable, points }))
    .sort((a, b) => b.points - a.points || (a.variable < b.variable ? -1 : 1));
  return {
    pd: response.pd,
    pdText: `${(response.pd * 100).toFixed(2)}%`,
    points: response.points ?? null,
    interceptPoints: response.intercept_points ?? null,
    rows,
  };
}

export interface Banner {
  kind: "error";
  message: string;
}

export function errorBanner(err: unknown): Banner {
  if (err && typeof err === "object" && "status" in err && "detail" in err) {
    const e = err as { status: number; detail: unknown };
    const fields =
      e.detail && typeof e.detail === "object" && "fields" in (e.detail as object)
        ? ` (${((e.detail as Record<string, unknown>)["fields"] as string[]).join(", ")})`
        : "";
    const message =
      e.detail && typeof e.detail === "object" && "error" in (e.detail as object)
        ? String((e.detail as Record<string, unknown>)["error"])
        : String(e.detail);
    return { kind: "error", message: `${e.status}: ${message}${fields}` };
  }
  return { kind: "error", message: String(err) };
}
