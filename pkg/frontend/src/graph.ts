// SVG rendering of the flow graph: nodes carry the state label with its
// limiting probability, mean waiting time and contribution; edges carry
// probability and mean wait. Pure DOM, no chart dependency.

import { formatHoursShort, formatProbability } from "./format.js";
import { ModelJson, Report, keyLabel } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const COL_W = 190;
const ROW_H = 96;
const NODE_R = 34;

export interface GraphCallbacks {
  onEdgeClick?: (fromId: number, toId: number) => void;
}

interface Layout {
  x: number[];
  y: number[];
  width: number;
  height: number;
}

function layeredLayout(model: ModelJson): Layout {
  const n = model.states.length;
  const out = new Map<number, number[]>();
  for (const e of model.edges) {
    if (!out.has(e.from)) out.set(e.from, []);
    out.get(e.from)!.push(e.to);
  }
  const startId = model.states.find((s) => s.key === "START")!.id;
  const endId = model.states.find((s) => s.key === "END")!.id;

  const depth = new Array<number>(n).fill(-1);
  depth[startId] = 0;
  const queue = [startId];
  while (queue.length) {
    const u = queue.shift()!;
    for (const v of out.get(u) ?? []) {
      if (depth[v] === -1) {
        depth[v] = depth[u] + 1;
        queue.push(v);
      }
    }
  }
  const maxDepth = Math.max(...depth);
  depth[endId] = maxDepth === depth[endId] ? maxDepth : maxDepth + (depth.some((d, i) => i !== endId && d === maxDepth) ? 1 : 0);

  const columns = new Map<number, number[]>();
  for (let i = 0; i < n; i++) {
    const d = depth[i] === -1 ? 0 : depth[i];
    if (!columns.has(d)) columns.set(d, []);
    columns.get(d)!.push(i);
  }
  const x = new Array<number>(n).fill(0);
  const y = new Array<number>(n).fill(0);
  let rows = 1;
  for (const [d, ids] of columns) {
    rows = Math.max(rows, ids.length);
    ids.forEach((id, row) => {
      x[id] = 70 + d * COL_W;
      y[id] = 70 + row * ROW_H;
    });
  }
  return {
    x,
    y,
    width: 140 + (Math.max(...depth) + 0) * COL_W,
    height: 60 + rows * ROW_H,
  };
}

function el<K extends keyof SVGElementTagNameMap>(tag: K, attrs: Record<string, string>): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

export function edgeDomId(fromId: number, toId: number): string {
  return `edge-${fromId}-${toId}`;
}

export function renderGraph(
  container: HTMLElement,
  model: ModelJson,
  report: Report,
  callbacks: GraphCallbacks = {},
): void {
  container.textContent = "";
  const layout = layeredLayout(model);
  const svg = el("svg", {
    viewBox: `0 0 ${layout.width} ${layout.height}`,
    width: String(layout.width),
    height: String(layout.height),
  });
  svg.classList.add("flow-graph");

  const defs = el("defs", {});
  const marker = el("marker", {
    id: "arrow", viewBox: "0 0 10 10", refX: "9", refY: "5",
    markerWidth: "7", markerHeight: "7", orient: "auto-start-reverse",
  });
  marker.appendChild(el("path", { d: "M 0 0 L 10 5 L 0 10 z", fill: "#667" }));
  defs.appendChild(marker);
  svg.appendChild(defs);

  const reportByLabel = new Map(report.states.map((s) => [keyLabel(s.key), s]));

  for (const edge of model.edges) {
    const x1 = layout.x[edge.from], y1 = layout.y[edge.from];
    const x2 = layout.x[edge.to], y2 = layout.y[edge.to];
    const group = el("g", { id: edgeDomId(edge.from, edge.to) });
    group.classList.add("edge");
    let labelX: number, labelY: number;
    if (edge.from === edge.to) {
      const path = el("path", {
        d: `M ${x1 - 12} ${y1 - NODE_R} C ${x1 - 46} ${y1 - NODE_R - 52}, ${x1 + 46} ${y1 - NODE_R - 52}, ${x1 + 12} ${y1 - NODE_R}`,
        fill: "none", stroke: "#667", "stroke-width": "1.4", "marker-end": "url(#arrow)",
      });
      group.appendChild(path);
      labelX = x1;
      labelY = y1 - NODE_R - 44;
    } else {
      const dx = x2 - x1, dy = y2 - y1;
      const len = Math.hypot(dx, dy) || 1;
      const sx = x1 + (dx / len) * NODE_R, sy = y1 + (dy / len) * NODE_R;
      const ex = x2 - (dx / len) * NODE_R, ey = y2 - (dy / len) * NODE_R;
      const bend = x2 < x1 ? 46 : 14; // back edges arc visibly
      const mx = (sx + ex) / 2 - (dy / len) * bend;
      const my = (sy + ey) / 2 + (dx / len) * bend;
      group.appendChild(el("path", {
        d: `M ${sx} ${sy} Q ${mx} ${my} ${ex} ${ey}`,
        fill: "none", stroke: "#667", "stroke-width": "1.4", "marker-end": "url(#arrow)",
      }));
      labelX = mx;
      labelY = my - 5;
    }
    const label = el("text", { x: String(labelX), y: String(labelY), "text-anchor": "middle", "font-size": "11" });
    label.textContent = `p=${formatProbability(edge.p)}  ${formatHoursShort(edge.mean_hours)}`;
    group.appendChild(label);
    if (callbacks.onEdgeClick) {
      group.addEventListener("click", () => callbacks.onEdgeClick!(edge.from, edge.to));
    }
    svg.appendChild(group);
  }

  for (const state of model.states) {
    const label = keyLabel(state.key);
    const stats = reportByLabel.get(label);
    const g = el("g", {});
    g.classList.add("node");
    const sentinel = label === "START" || label === "END";
    const circle = el("circle", {
      cx: String(layout.x[state.id]), cy: String(layout.y[state.id]), r: String(NODE_R),
      fill: sentinel ? "#e8ecf8" : "#fff", stroke: "#334", "stroke-width": "1.6",
    });
    g.appendChild(circle);
    const name = el("text", {
      x: String(layout.x[state.id]), y: String(layout.y[state.id] - 4),
      "text-anchor": "middle", "font-size": "12", "font-weight": "600",
    });
    name.textContent = label.length > 14 ? `${label.slice(0, 13)}…` : label;
    g.appendChild(name);
    if (stats) {
      const pi = el("text", {
        x: String(layout.x[state.id]), y: String(layout.y[state.id] + 10),
        "text-anchor": "middle", "font-size": "10",
      });
      pi.textContent = `π=${formatProbability(stats.pi)}`;
      g.appendChild(pi);
      const mu = el("text", {
        x: String(layout.x[state.id]), y: String(layout.y[state.id] + 22),
        "text-anchor": "middle", "font-size": "10", fill: "#445",
      });
      mu.textContent = `μ=${formatHoursShort(stats.mean_hours)}`;
      g.appendChild(mu);
    }
    svg.appendChild(g);
  }

  container.appendChild(svg);
}

export function highlightEdge(container: HTMLElement, fromId: number, toId: number, on: boolean): void {
  const group = container.querySelector(`#${edgeDomId(fromId, toId)}`);
  if (group) group.classList.toggle("rejected", on);
}
