// Entry point: wires the service client, scenario draft, graph, sliders
// and result panels into the edit -> POST /whatif -> re-render loop.

import { ApiError, ServiceClient } from "./api.js";
import { renderContributionBars, renderPdfOverlay } from "./charts.js";
import { LatestWins } from "./debounce.js";
import { formatDeltaSeconds, formatProbability } from "./format.js";
import { highlightEdge, renderGraph } from "./graph.js";
import { ScenarioDraft } from "./scenario.js";
import { Edit, ModelResponse, WhatifResponse, keyLabel } from "./types.js";

interface Submission {
  edits: Edit[];
  full: boolean;
  committed: Edit | null; // the edit whose control triggered this submission
}

function serviceBaseUrl(): string {
  const fromQuery = new URLSearchParams(window.location.search).get("service");
  return (fromQuery ?? "http://localhost:8000").replace(/\/$/, "");
}

class App {
  private readonly client = new ServiceClient(serviceBaseUrl());
  private readonly draft = new ScenarioDraft();
  private model!: ModelResponse;
  private lastGood = new Map<string, number>(); // control id -> last accepted value
  private fullAnalysis = false;

  private readonly queue = new LatestWins<Submission, WhatifResponse>(
    (s) => this.client.whatif(s.edits, s.full),
    (s, result) => this.onResult(s, result),
    (s, error) => this.onError(s, error),
  );

  private $(id: string): HTMLElement {
    return document.getElementById(id)!;
  }

  async start(): Promise<void> {
    this.model = await this.client.getModel();
    this.renderBaseline();
    this.buildControls();
    (this.$("reset") as HTMLButtonElement).addEventListener("click", () => this.reset());
    const fullBox = this.$("full-analysis") as HTMLInputElement;
    fullBox.addEventListener("change", () => {
      this.fullAnalysis = fullBox.checked;
      this.submit(null);
    });
  }

  private renderBaseline(): void {
    const { model, report } = this.model;
    renderGraph(this.$("graph"), model, report);
    renderContributionBars(this.$("contributions"), report);
    this.$("baseline-mu").textContent = report.mean_formatted;
    this.$("scenario-mu").textContent = report.mean_formatted;
    this.$("delta-mu").textContent = "±0s";
    this.$("status").textContent = "baseline";
  }

  private buildControls(): void {
    const { model } = this.model;
    const edgePanel = this.$("edge-controls");
    const statePanel = this.$("state-controls");
    edgePanel.textContent = "";
    statePanel.textContent = "";

    const endId = model.states.find((s) => s.key === "END")!.id;
    const rows = new Map<number, number>();
    for (const e of model.edges) rows.set(e.from, (rows.get(e.from) ?? 0) + 1);

    for (const edge of model.edges) {
      if (edge.from === endId || (rows.get(edge.from) ?? 0) < 2) continue;
      const fromKey = model.states[edge.from].key;
      const toKey = model.states[edge.to].key;
      const id = `p-${edge.from}-${edge.to}`;
      const row = document.createElement("label");
      row.className = "control-row";
      const caption = document.createElement("span");
      caption.textContent = `${keyLabel(fromKey)} → ${keyLabel(toKey)}`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0";
      slider.max = "1";
      slider.step = "0.01";
      slider.value = String(edge.p);
      slider.id = id;
      const value = document.createElement("span");
      value.className = "value";
      value.textContent = formatProbability(edge.p);
      this.lastGood.set(id, edge.p);
      slider.addEventListener("input", () => {
        value.textContent = `${formatProbability(Number(slider.value))} (pending)`;
      });
      slider.addEventListener("change", () => {
        const p = Number(slider.value);
        value.textContent = formatProbability(p);
        const edit: Edit = { op: "set_probability", from: fromKey, to: toKey, value: p };
        this.draft.upsert(edit);
        this.submit(edit, id, p);
      });
      row.append(caption, slider, value);
      edgePanel.appendChild(row);
    }

    for (const state of model.states) {
      const label = keyLabel(state.key);
      if (label === "START" || label === "END") continue;
      const id = `s-${state.id}`;
      const row = document.createElement("label");
      row.className = "control-row";
      const caption = document.createElement("span");
      caption.textContent = `${label} mean ×`;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "0.1";
      slider.max = "3";
      slider.step = "0.05";
      slider.value = "1";
      slider.id = id;
      const value = document.createElement("span");
      value.className = "value";
      value.textContent = "1.00";
      this.lastGood.set(id, 1.0);
      slider.addEventListener("input", () => {
        value.textContent = `${Number(slider.value).toFixed(2)} (pending)`;
      });
      slider.addEventListener("change", () => {
        const factor = Number(slider.value);
        value.textContent = factor.toFixed(2);
        const edit: Edit = { op: "scale_state_mean", state: state.key, factor };
        if (factor === 1.0) {
          this.draft.remove(edit);
          this.submit(null, id, factor);
        } else {
          this.draft.upsert(edit);
          this.submit(edit, id, factor);
        }
      });
      row.append(caption, slider, value);
      statePanel.appendChild(row);
    }
  }

  private submit(committed: Edit | null, controlId?: string, value?: number): void {
    this.$("status").textContent = "computing…";
    if (controlId !== undefined && value !== undefined) {
      this.pendingControl = { id: controlId, value };
    } else {
      this.pendingControl = null;
    }
    this.queue.submit({
      edits: [...this.draft.list()],
      full: this.fullAnalysis,
      committed,
    });
  }

  private pendingControl: { id: string; value: number } | null = null;

  private onResult(submission: Submission, result: WhatifResponse): void {
    if (this.pendingControl) {
      this.lastGood.set(this.pendingControl.id, this.pendingControl.value);
      this.pendingControl = null;
    }
    // scenario values re-rendered verbatim from the response
    renderGraph(this.$("graph"), this.model.model, result.report);
    renderContributionBars(this.$("contributions"), result.report);
    this.$("baseline-mu").textContent = result.baseline.mean_formatted;
    this.$("scenario-mu").textContent = result.report.mean_formatted;
    this.$("delta-mu").textContent = formatDeltaSeconds(
      result.baseline.mean_seconds,
      result.report.mean_seconds,
    );
    this.$("status").textContent = this.draft.isEmpty() ? "baseline" : "scenario";
    const overlay = this.$("pdf-overlay");
    if (result.baseline_pdf && result.scenario_pdf) {
      renderPdfOverlay(overlay, result.baseline_pdf, result.scenario_pdf);
    } else {
      overlay.textContent = "";
    }
  }

  private onError(submission: Submission, error: unknown): void {
    if (error instanceof ApiError && error.isEditRejection && submission.committed) {
      const edit = submission.committed;
      this.$("status").textContent = `edit rejected: ${error.message}`;
      if (edit.op === "set_probability" || edit.op === "set_edge_mean") {
        const from = this.model.model.states.find((s) => keyLabel(s.key) === keyLabel(edit.from));
        const to = this.model.model.states.find((s) => keyLabel(s.key) === keyLabel(edit.to));
        if (from && to) {
          highlightEdge(this.$("graph"), from.id, to.id, true);
          window.setTimeout(() => highlightEdge(this.$("graph"), from.id, to.id, false), 4000);
        }
      }
      this.draft.remove(edit);
      this.revertControl(edit);
      return;
    }
    this.$("status").textContent = `error: ${error instanceof Error ? error.message : String(error)}`;
  }

  private revertControl(edit: Edit): void {
    let id: string | null = null;
    if (edit.op === "set_probability") {
      const from = this.model.model.states.find((s) => keyLabel(s.key) === keyLabel(edit.from));
      const to = this.model.model.states.find((s) => keyLabel(s.key) === keyLabel(edit.to));
      if (from && to) id = `p-${from.id}-${to.id}`;
    } else if (edit.op === "scale_state_mean") {
      const state = this.model.model.states.find((s) => keyLabel(s.key) === keyLabel(edit.state));
      if (state) id = `s-${state.id}`;
    }
    if (!id) return;
    const slider = document.getElementById(id) as HTMLInputElement | null;
    const last = this.lastGood.get(id);
    if (slider && last !== undefined) {
      slider.value = String(last);
      const value = slider.parentElement?.querySelector(".value");
      if (value) value.textContent = id.startsWith("p-") ? formatProbability(last) : last.toFixed(2);
    }
  }

  private reset(): void {
    this.draft.reset();
    this.lastGood.clear();
    this.renderBaseline();
    this.buildControls();
    this.$("pdf-overlay").textContent = "";
    if (this.fullAnalysis) this.submit(null);
  }
}

new App().start().catch((err) => {
  const status = document.getElementById("status");
  if (status) status.textContent = `failed to load model: ${err}`;
});
