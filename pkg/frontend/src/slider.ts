/** What-if slider controller for one variable.
 *
 * The response curve is fetched once per applicant state (cached in the
 * client); slider moves re-query the service for the marker, debounced at
 * 150 ms, with stale responses dropped by sequence number (last write
 * wins). Committing a value records a history step in the session.
 */
import type { ServiceClient } from "./api.js";
import type { WhatIfSession } from "./session.js";
import type { WhatIfDoc } from "./types.js";

export interface Marker {
  value: number;
  response: number;
}

export interface SliderEvents {
  onCurve?: (doc: WhatIfDoc) => void;
  onMarker?: (marker: Marker) => void;
  onError?: (err: unknown) => void;
}

export const DEFAULT_DEBOUNCE_MS = 150;

export class WhatIfSlider {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;
  private applied = 0;
  marker: Marker | null = null;
  curve: WhatIfDoc | null = null;

  constructor(
    private readonly client: ServiceClient,
    private readonly session: WhatIfSession,
    readonly variable: string,
    private readonly events: SliderEvents = {},
    private readonly debounceMs: number = DEFAULT_DEBOUNCE_MS,
  ) {}

  private model(): string {
    return this.session.baseScore.model;
  }

  /** Fetch the curve and pin the marker to the served score at the current value. */
  async init(): Promise<void> {
    const applicant = this.session.current();
    try {
      const curve = await this.client.whatifCurve(this.model(), applicant, this.variable);
      this.curve = curve;
      this.events.onCurve?.(curve);
      // the marker at the applicant's own value is the /score probability:
      // the score response is the single source of truth, not a recomputation
      this.marker = {
        value: Number(applicant[this.variable]),
        response: this.session.currentScore().pd,
      };
      this.events.onMarker?.(this.marker);
    } catch (err) {
      this.events.onError?.(err);
    }
  }

  /** Debounced slider movement: one marker query per pause. */
  moveTo(value: number): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.queryMarker(value);
    }, this.debounceMs);
  }

  private async queryMarker(value: number): Promise<void> {
    const ticket = ++this.seq;
    try {
      const doc = await this.client.whatifAt(
        this.model(),
        this.session.current(),
        this.variable,
        value,
      );
      if (ticket < this.applied) return; // a newer response already landed
      this.applied = ticket;
      this.marker = { value, response: doc.responses[0] };
      this.events.onMarker?.(this.marker);
    } catch (err) {
      if (ticket >= this.applied) this.events.onError?.(err);
    }
  }

  /** Apply the value: re-score through the service and record a history step. */
  async commit(value: number): Promise<void> {
    const applicant = { ...this.session.current(), [this.variable]: value };
    try {
      const score = await this.client.score(this.model(), applicant);
      this.session.commit(this.variable, value, score);
      this.marker = { value, response: score.pd };
      this.events.onMarker?.(this.marker);
    } catch (err) {
      this.events.onError?.(err);
    }
  }

  /** Flush a pending debounce immediately (test hook and page teardown). */
  async flush(value?: number): Promise<void> {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (value !== undefined) await this.queryMarker(value);
  }
}
