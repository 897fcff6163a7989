/** Wire types of the scoring service (the UI's single source of truth). */

export type ColumnKind = "numeric" | "categorical";

export interface ColumnInfo {
  name: string;
  kind: ColumnKind;
  special_codes: number[];
}

export interface SchemaDoc {
  target: string;
  columns: ColumnInfo[];
}

export interface ModelInfo {
  name: string;
  features: string[];
}

export interface ModelsDoc {
  models: ModelInfo[];
  schema: SchemaDoc;
}

export type Applicant = Record<string, number | string>;

export interface ScoreResponse {
  model: string;
  pd: number;
  points?: number;
  intercept_points?: number;
  per_variable_points?: Record<string, number>;
}

export interface Segment {
  variable: string;
  delta: number;
}

export interface AttributionDoc {
  model: string;
  method: string;
  baseline: number;
  prediction: number;
  segments: Segment[];
  completeness_residual: number;
  n_paths?: number;
  spread?: Record<string, number>;
}

export interface WhatIfDoc {
  model: string;
  variable: string;
  grid: number[];
  responses: number[];
  anchor: { value: number | string; response: number };
}
