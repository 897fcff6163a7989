import { describe, expect, it } from "vitest";

import type { AttributionDoc } from "../src/types.js";
import { waterfallModel } from "../src/waterfall.js";

function doc(overrides: Partial<AttributionDoc> = {}): AttributionDoc {
  return {
    model: "scorecard",
    method: "breakdown",
    baseline: 0.5,
    prediction: 0.62,
    segments: [
      { variable: "a", delta: 0.2 },
      { variable: "b", delta: -0.1 },
      { variable: "all other variables", delta: 0.02 },
    ],
    completeness_residual: 1e-12,
    ...overrides,
  };
}

describe("waterfallModel", () => {
  it("chains bars from the baseline", () => {
    const model = waterfallModel(doc());
    expect(model.bars.map((b) => [b.start, b.end])).toEqual([
      [0.5, 0.7],
      [0.7, 0.6],
      [0.6, 0.62],
    ]);
  });

  it("segments visually sum to the prediction when completeness holds", () => {
    const model = waterfallModel(doc());
    expect(model.finalLevel).toBeCloseTo(model.prediction, 10);
    expect(model.showResidualBadge).toBe(false); // residual below 1e-6
  });

  it("surfaces a residual above the badge threshold", () => {
    const broken = doc({ completeness_residual: 3e-4 });
    const model = waterfallModel(broken);
    expect(model.showResidualBadge).toBe(true);
    expect(model.residual).toBe(3e-4);
  });

  it("keeps the segment order served by the backend", () => {
    const model = waterfallModel(doc());
    expect(model.bars.map((b) => b.label)).toEqual(["a", "b", "all other variables"]);
  });

  it("extends the axis to cover baseline, bars and prediction", () => {
    const model = waterfallModel(doc());
    expect(model.extent[0]).toBeLessThanOrEqual(0.5);
    expect(model.extent[1]).toBeGreaterThanOrEqual(0.7);
  });

  it("an additive model shows the same waterfall for both methods", () => {
    // breakdown and path-averaged docs with identical deltas render alike
    const a = waterfallModel(doc({ method: "breakdown" }));
    const b = waterfallModel(doc({ method: "shap" }));
    expect(a.bars).toEqual(b.bars);
  });
});
