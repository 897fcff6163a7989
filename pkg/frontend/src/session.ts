/** What-if session: a base applicant plus an undoable history of edits.
 *
 * The current applicant is always recomputed by replaying the history onto
 * the base, so replay determinism holds by construction and undo needs no
 * inverse bookkeeping.
 */
import type { Applicant, ScoreResponse } from "./types.js";

export interface WhatIfStep {
  variable: string;
  value: number | string;
  score: ScoreResponse;
}

export class WhatIfSession {
  private steps: WhatIfStep[] = [];

  constructor(
    readonly base: Applicant,
    readonly baseScore: ScoreResponse,
  ) {}

  history(): readonly WhatIfStep[] {
    return this.steps;
  }

  /** Replay the history onto a copy of the base. */
  current(): Applicant {
    const out: Applicant = { ...this.base };
    for (const step of this.steps) {
      out[step.variable] = step.value;
    }
    return out;
  }

  currentScore(): ScoreResponse {
    return this.steps.length ? this.steps[this.steps.length - 1].score : this.baseScore;
  }

  commit(variable: string, value: number | string, score: ScoreResponse): WhatIfStep {
    if (!(variable in this.base)) {
      throw new Error(`unknown variable ${variable}`);
    }
    const step = { variable, value, score };
    this.steps.push(step);
    return step;
  }

  undo(): WhatIfStep | undefined {
    return this.steps.pop();
  }

  reset(): void {
    this.steps = [];
  }
}
