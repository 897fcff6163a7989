/** Page wiring: applicant form, score panel, waterfall and what-if sliders.
 *
 * Everything displayed comes from service responses; this file only moves
 * data between the DOM and the typed client.
 */
import { ServiceClient } from "./api.js";
import { ApplicantDraft } from "./applicant.js";
import { scorePanelModel, errorBanner } from "./scorePanel.js";
import { WhatIfSession } from "./session.js";
import { WhatIfSlider } from "./slider.js";
import type { AttributionDoc, ModelsDoc, WhatIfDoc } from "./types.js";
import { waterfallModel } from "./waterfall.js";

const SERVICE_URL = (window as unknown as { CREDISCOPE_URL?: string }).CREDISCOPE_URL ?? "";
const TOP_K = 3;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

function showBanner(err: unknown): void {
  const banner = document.getElementById("banner")!;
  banner.textContent = errorBanner(err).message;
  banner.classList.add("visible");
}

function clearBanner(): void {
  const banner = document.getElementById("banner")!;
  banner.textContent = "";
  banner.classList.remove("visible");
}

function renderScorePanel(model: ReturnType<typeof scorePanelModel>): void {
  const panel = document.getElementById("score-panel")!;
  panel.replaceChildren();
  panel.append(el("div", { class: "pd" }, `PD ${model.pdText}`));
  if (model.points !== null) {
    panel.append(el("div", { class: "points" }, `${model.points} points`));
    const table = el("table");
    if (model.interceptPoints !== null) {
      const tr = el("tr");
      tr.append(el("td", {}, "intercept"), el("td", {}, String(model.interceptPoints)));
      table.append(tr);
    }
    for (const row of model.rows) {
      const tr = el("tr");
      tr.append(el("td", {}, row.variable), el("td", {}, String(row.points)));
      table.append(tr);
    }
    panel.append(table);
  }
}

function renderWaterfall(doc: AttributionDoc): void {
  const host = document.getElementById("waterfall")!;
  host.replaceChildren();
  const model = waterfallModel(doc);
  const [lo, hi] = model.extent;
  const span = hi - lo || 1;
  const pct = (v: number) => `${(((v - lo) / span) * 100).toFixed(2)}%`;
  host.append(el("div", { class: "wf-anchor" }, `baseline ${model.baseline.toFixed(4)}`));
  for (const bar of model.bars) {
    const row = el("div", { class: "wf-row" });
    const left = Math.min(bar.start, bar.end);
    const width = Math.abs(bar.end - bar.start);
    const fill = el("div", {
      class: `wf-bar ${bar.delta >= 0 ? "up" : "down"}`,
      style: `margin-left:${pct(left)};width:${(width / span) * 100}%`,
    });
    row.append(el("span", { class: "wf-label" }, bar.label), fill,
      el("span", { class: "wf-delta" }, bar.delta.toFixed(4)));
    host.append(row);
  }
  host.append(el("div", { class: "wf-anchor" }, `prediction ${model.prediction.toFixed(4)}`));
  if (model.showResidualBadge) {
    host.append(el("div", { class: "wf-residual" }, `residual ${model.residual.toExponential(2)}`));
  }
}

async function boot(): Promise<void> {
  const client = new ServiceClient(SERVICE_URL);
  let doc: ModelsDoc;
  try {
    doc = await client.models();
  } catch (err) {
    showBanner(err);
    return;
  }

  const modelSelect = document.getElementById("model") as HTMLSelectElement;
  for (const m of doc.models) modelSelect.append(el("option", { value: m.name }, m.name));

  const form = document.getElementById("applicant-form")!;
  const submit = document.getElementById("submit") as HTMLButtonElement;
  let draft = new ApplicantDraft(doc.schema, modelSelect.value);

  const buildForm = () => {
    draft = new ApplicantDraft(doc.schema, modelSelect.value);
    form.replaceChildren();
    for (const name of draft.fieldNames()) {
      const label = el("label", {}, name);
      const input = el("input", { name, autocomplete: "off" });
      input.addEventListener("input", () => {
        const state = draft.setField(name, input.value);
        input.classList.toggle("invalid", state.error !== null);
        submit.disabled = !draft.canSubmit();
      });
      label.append(input);
      form.append(label);
    }
    submit.disabled = true;
  };
  modelSelect.addEventListener("change", buildForm);
  buildForm();

  submit.addEventListener("click", async () => {
    clearBanner();
    const applicant = draft.toApplicant();
    const model = modelSelect.value;
    try {
      const score = await client.score(model, applicant);
      const session = new WhatIfSession(applicant, score);
      renderScorePanel(scorePanelModel(score));
      const attribution = await client.explainLocal(model, applicant, "breakdown", TOP_K);
      renderWaterfall(attribution);
      await buildSliders(client, session, attribution);
    } catch (err) {
      showBanner(err);
    }
  });
}

async function buildSliders(
  client: ServiceClient,
  session: WhatIfSession,
  attribution: AttributionDoc,
): Promise<void> {
  const host = document.getElementById("sliders")!;
  host.replaceChildren();
  const variables = attribution.segments
    .map((s) => s.variable)
    .filter((v) => v !== "all other variables" && v in session.base);

  for (const variable of variables) {
    const block = el("div", { class: "slider-block" });
    block.append(el("h3", {}, variable));
    const canvas = el("div", { class: "cp-curve" });
    const marker = el("div", { class: "cp-marker" });
    const input = el("input", { type: "range" }) as HTMLInputElement;
    const readout = el("span", { class: "cp-readout" });

    const slider = new WhatIfSlider(client, session, variable, {
      onCurve: (curve: WhatIfDoc) => {
        const lo = Math.min(...curve.grid);
        const hi = Math.max(...curve.grid);
        input.min = String(lo);
        input.max = String(hi);
        input.step = String((hi - lo) / 100 || 1);
        canvas.dataset.points = String(curve.grid.length);
      },
      onMarker: (m) => {
        readout.textContent = `x=${m.value} PD=${(m.response * 100).toFixed(2)}%`;
        marker.dataset.value = String(m.value);
      },
      onError: showBanner,
    });

    input.value = String(session.current()[variable]);
    input.addEventListener("input", () => slider.moveTo(Number(input.value)));
    const apply = el("button", {}, "apply");
    apply.addEventListener("click", () => void slider.commit(Number(input.value)));
    const undo = el("button", {}, "undo");
    undo.addEventListener("click", () => {
      session.undo();
      renderScorePanel(scorePanelModel(session.currentScore()));
      input.value = String(session.current()[variable]);
    });

    block.append(canvas, marker, input, readout, apply, undo);
    host.append(block);
    await slider.init();
  }
}

if (typeof document !== "undefined" && document.getElementById("applicant-form")) {
  void boot();
}
