/** View model of the attribution waterfall.
 *
 * Bars run from the baseline through the ordered segments; the final bar
 * must land on the served prediction. A residual above the badge threshold
 * is surfaced rather than hidden.
 */
import type { AttributionDoc } from "./types.js";

export const RESIDUAL_BADGE_THRESHOLD = 1e-6;

export interface WaterfallBar {
  label: string;
  start: number;
  end: number;
  delta: number;
}

export interface WaterfallModel {
  baseline: number;
  prediction: number;
  bars: WaterfallBar[];
  finalLevel: number;
  residual: number;
  showResidualBadge: boolean;
  /** max |value| for axis scaling */
  extent: [number, number];
}

export function waterfallModel(
  doc: AttributionDoc,
  badgeThreshold: number = RESIDUAL_BADGE_THRESHOLD,
): WaterfallModel {
  const bars: WaterfallBar[] = [];
  let level = doc.baseline;
  for (const segment of doc.segments) {
    const end = level + segment.delta;
    bars.push({ label: segment.variable, start: level, end, delta: segment.delta });
    level = end;
  }
  const values = [doc.baseline, doc.prediction, ...bars.flatMap((b) => [b.start, b.end])];
  return {
    baseline: doc.baseline,
    prediction: doc.prediction,
    bars,
    finalLevel: level,
    residual: doc.completeness_residual,
    showResidualBadge: Math.abs(doc.completeness_residual) > badgeThreshold,
    extent: [Math.min(...values), Math.max(...values)],
  };
}
