import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ServiceClient } from "../src/api.js";
import { WhatIfSession } from "../src/session.js";
import { WhatIfSlider, type Marker } from "../src/slider.js";
import type { WhatIfDoc } from "../src/types.js";
import { fakePd, fakeScore, instantService, jsonResponse, type RecordedCall } from "./helpers.js";

const base = { a: 1, b: 2 };

function build(calls: RecordedCall[], events: Parameters<typeof collect>[0] = {}) {
  const client = new ServiceClient("", instantService(calls));
  const session = new WhatIfSession(base, fakeScore(base));
  const slider = new WhatIfSlider(client, session, "a", events);
  return { client, session, slider };
}

function collect(events: { markers?: Marker[]; curves?: WhatIfDoc[]; errors?: unknown[] }) {
  return {
    onMarker: (m: Marker) => events.markers?.push(m),
    onCurve: (c: WhatIfDoc) => events.curves?.push(c),
    onError: (e: unknown) => events.errors?.push(e),
  };
}

describe("WhatIfSlider", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("shows exactly the served score PD at the applicant's current value", async () => {
    const calls: RecordedCall[] = [];
    const markers: Marker[] = [];
    const { slider, session } = build(calls, collect({ markers }));
    await slider.init();
    // the marker IS the /score probability, not a recomputation
    expect(markers[0].response).toBe(session.currentScore().pd);
    expect(markers[0].value).toBe(base.a);
  });

  it("debounces rapid movements into a single query", async () => {
    const calls: RecordedCall[] = [];
    const markers: Marker[] = [];
    const { slider } = build(calls, collect({ markers }));
    await slider.init();
    const before = calls.length;
    slider.moveTo(2);
    vi.advanceTimersByTime(100);
    slider.moveTo(3);
    vi.advanceTimersByTime(100);
    slider.moveTo(4);
    expect(calls.length).toBe(before); // nothing fired inside the debounce window
    await vi.advanceTimersByTimeAsync(150);
    expect(calls.length).toBe(before + 1);
    const last = calls[calls.length - 1];
    expect(last.payload).toMatchObject({ variable: "a", grid: [4] });
    expect(markers[markers.length - 1]).toEqual({ value: 4, response: fakePd({ ...base, a: 4 }) });
  });

  it("applies responses last-write-wins when they resolve out of order", async () => {
    vi.useRealTimers();
    const markers: Marker[] = [];
    const resolvers: Array<() => void> = [];
    const gatedFetch = async (url: string, init?: RequestInit): Promise<Response> => {
      const payload = JSON.parse(String(init?.body));
      await new Promise<void>((resolve) => resolvers.push(resolve));
      const value = payload.grid[0];
      const doc: WhatIfDoc = {
        model: "scorecard",
        variable: "a",
        grid: [value],
        responses: [fakePd({ ...base, a: value })],
        anchor: { value: base.a, response: fakePd(base) },
      };
      return jsonResponse(doc);
    };
    const client = new ServiceClient("", gatedFetch);
    const session = new WhatIfSession(base, fakeScore(base));
    const slider = new WhatIfSlider(client, session, "a", collect({ markers }), 0);

    const first = slider.flush(10);
    const second = slider.flush(20);
    expect(resolvers).toHaveLength(2);
    resolvers[1]!(); // newer request lands first
    await second;
    resolvers[0]!(); // stale response afterwards
    await first;
    expect(markers.map((m) => m.value)).toEqual([20]); // stale one was dropped
  });

  it("commit records a history step and undo restores the base applicant", async () => {
    vi.useRealTimers();
    const calls: RecordedCall[] = [];
    const { slider, session } = build(calls, collect({}));
    await slider.init();
    await slider.commit(6);
    expect(session.history()).toHaveLength(1);
    expect(session.current()).toEqual({ ...base, a: 6 });
    expect(session.currentScore().pd).toBe(fakePd({ ...base, a: 6 }));
    session.undo();
    expect(session.current()).toEqual(base);
    expect(session.currentScore().pd).toBe(fakePd(base));
  });

  it("routes service failures to the error handler", async () => {
    vi.useRealTimers();
    const errors: unknown[] = [];
    const client = new ServiceClient("", async () => jsonResponse({ detail: "down" }, 503));
    const session = new WhatIfSession(base, fakeScore(base));
    const slider = new WhatIfSlider(client, session, "a", collect({ errors }), 0);
    await slider.init();
    expect(errors).toHaveLength(1);
  });

  it("reuses the cached curve across sliders on the same applicant", async () => {
    vi.useRealTimers();
    const calls: RecordedCall[] = [];
    const client = new ServiceClient("", instantService(calls));
    const session = new WhatIfSession(base, fakeScore(base));
    const one = new WhatIfSlider(client, session, "a", {}, 0);
    const two = new WhatIfSlider(client, session, "a", {}, 0);
    await one.init();
    await two.init();
    const curveCalls = calls.filter((c) => c.url.includes("whatif"));
    expect(curveCalls).toHaveLength(1);
  });
});
