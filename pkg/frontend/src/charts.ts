// Contribution bars (pi_i * mu_i per state, max highlighted) and the
// baseline-vs-scenario execution-time PDF overlay. Plain SVG.

import { formatHoursShort } from "./format.js";
import { PdfPayload, Report, keyLabel } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";

function el<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

/** The state whose contribution dominates the overall time. */
export function maxContributionLabel(report: Report): string | null {
  let best: string | null = null;
  let bestValue = -Infinity;
  for (const s of report.states) {
    if (s.contribution_hours > bestValue) {
      bestValue = s.contribution_hours;
      best = keyLabel(s.key);
    }
  }
  return bestValue > 0 ? best : null;
}

export function renderContributionBars(container: HTMLElement, report: Report): void {
  container.textContent = "";
  const rows = report.states
    .filter((s) => {
      const label = keyLabel(s.key);
      return label !== "START" && label !== "END";
    })
    .sort((a, b) => b.contribution_hours - a.contribution_hours);
  const maxLabel = maxContributionLabel(report);
  const maxValue = Math.max(...rows.map((r) => r.contribution_hours), 1e-12);

  const rowH = 26;
  const width = 460;
  const barLeft = 150;
  const svg = el("svg", {
    viewBox: `0 0 ${width} ${rows.length * rowH + 8}`,
    width: String(width),
    height: String(rows.length * rowH + 8),
  });
  rows.forEach((s, i) => {
    const label = keyLabel(s.key);
    const y = 4 + i * rowH;
    const text = el("text", { x: String(barLeft - 8), y: String(y + 15), "text-anchor": "end", "font-size": "12" });
    text.textContent = label.length > 18 ? `${label.slice(0, 17)}…` : label;
    svg.appendChild(text);
    const w = Math.max(2, (s.contribution_hours / maxValue) * (width - barLeft - 90));
    const bar = el("rect", {
      x: String(barLeft), y: String(y + 3), width: String(w), height: String(rowH - 9), rx: "3",
      fill: label === maxLabel ? "#d4543c" : "#5a76c9",
    });
    if (label === maxLabel) bar.classList.add("max-contribution");
    svg.appendChild(bar);
    const value = el("text", { x: String(barLeft + w + 6), y: String(y + 15), "font-size": "11", fill: "#333" });
    value.textContent = formatHoursShort(s.contribution_hours);
    svg.appendChild(value);
  });
  container.appendChild(svg);
}

export function renderPdfOverlay(
  container: HTMLElement,
  baseline: PdfPayload,
  scenario: PdfPayload | null,
): void {
  container.textContent = "";
  const width = 560;
  const height = 240;
  const pad = { left: 46, right: 12, top: 10, bottom: 28 };

  const curves = scenario ? [baseline, scenario] : [baseline];
  const tMax = Math.max(...curves.map((c) => c.curve.t_hours[c.curve.t_hours.length - 1]));
  const dMax = Math.max(...curves.map((c) => Math.max(...c.curve.density)), 1e-12);

  const sx = (t: number) => pad.left + (t / tMax) * (width - pad.left - pad.right);
  const sy = (d: number) => height - pad.bottom - (d / dMax) * (height - pad.top - pad.bottom);

  const svg = el("svg", { viewBox: `0 0 ${width} ${height}`, width: String(width), height: String(height) });
  svg.appendChild(el("line", {
    x1: String(pad.left), y1: String(height - pad.bottom),
    x2: String(width - pad.right), y2: String(height - pad.bottom),
    stroke: "#888", "stroke-width": "1",
  }));
  svg.appendChild(el("line", {
    x1: String(pad.left), y1: String(pad.top),
    x2: String(pad.left), y2: String(height - pad.bottom),
    stroke: "#888", "stroke-width": "1",
  }));
  for (let i = 0; i <= 4; i++) {
    const t = (tMax * i) / 4;
    const tick = el("text", {
      x: String(sx(t)), y: String(height - 8), "text-anchor": "middle", "font-size": "10", fill: "#555",
    });
    tick.textContent = `${Math.round(t)} h`;
    svg.appendChild(tick);
  }

  const colors = ["#5a76c9", "#d4543c"];
  curves.forEach((payload, idx) => {
    const points = payload.curve.t_hours
      .map((t, i) => `${sx(t).toFixed(1)},${sy(payload.curve.density[i]).toFixed(1)}`)
      .join(" ");
    const line = el("polyline", {
      points, fill: "none", stroke: colors[idx], "stroke-width": "1.8",
    });
    line.classList.add(idx === 0 ? "curve-baseline" : "curve-scenario");
    svg.appendChild(line);
  });

  const legend = el("text", { x: String(width - pad.right), y: String(pad.top + 10), "text-anchor": "end", "font-size": "11" });
  legend.textContent = scenario ? "baseline (blue) vs scenario (red)" : "baseline";
  svg.appendChild(legend);
  container.appendChild(svg);
}
