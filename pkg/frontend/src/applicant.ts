/** Applicant form state validated against the served schema. */
import type { Applicant, ColumnInfo, SchemaDoc } from "./types.js";

export interface FieldState {
  raw: string;
  error: string | null;
  touched: boolean;
}

const INDICATOR_PREFIX = "NoValid";

/** Columns the service derives on its own (NoValid<Source> indicators). */
export function derivableColumns(schema: SchemaDoc): Set<string> {
  const byName = new Map(schema.columns.map((c) => [c.name, c]));
  const out = new Set<string>();
  for (const column of schema.columns) {
    if (!column.name.startsWith(INDICATOR_PREFIX)) continue;
    const source = byName.get(column.name.slice(INDICATOR_PREFIX.length));
    if (source && source.kind === "numeric" && source.special_codes.length > 0) {
      out.add(column.name);
    }
  }
  return out;
}

export class ApplicantDraft {
  readonly fields = new Map<string, FieldState>();
  private readonly kinds = new Map<string, ColumnInfo>();
  modelName: string;

  constructor(schema: SchemaDoc, modelName: string) {
    this.modelName = modelName;
    const derived = derivableColumns(schema);
    for (const column of schema.columns) {
      if (column.name === schema.target || derived.has(column.name)) continue;
      this.kinds.set(column.name, column);
      this.fields.set(column.name, { raw: "", error: "required", touched: false });
    }
  }

  fieldNames(): string[] {
    return [...this.fields.keys()];
  }

  setField(name: string, raw: string): FieldState {
    const column = this.kinds.get(name);
    if (!column) throw new Error(`unknown field ${name}`);
    const trimmed = raw.trim();
    let error: string | null = null;
    if (trimmed === "") {
      error = "required";
    } else if (column.kind === "numeric" && !Number.isFinite(Number(trimmed))) {
      error = "not a number";
    }
    const state = { raw: trimmed, error, touched: true };
    this.fields.set(name, state);
    return state;
  }

  /** Submit stays disabled until every field validates. */
  canSubmit(): boolean {
    for (const state of this.fields.values()) {
      if (state.error !== null) return false;
    }
    return true;
  }

  errors(): Record<string, string> {
    const out: Record<string, string> = {};
    for (const [name, state] of this.fields) {
      if (state.error) out[name] = state.error;
    }
    return out;
  }

  toApplicant(): Applicant {
    if (!this.canSubmit()) {
      throw new Error("applicant draft has invalid fields");
    }
    const out: Applicant = {};
    for (const [name, state] of this.fields) {
      const column = this.kinds.get(name)!;
      out[name] = column.kind === "numeric" ? Number(state.raw) : state.raw;
    }
    return out;
  }

  prefill(applicant: Applicant): void {
    for (const [name, value] of Object.entries(applicant)) {
      if (this.fields.has(name)) this.setField(name, String(value));
    }
  }
}
