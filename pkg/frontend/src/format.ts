// Display helpers. Durations shown to the analyst come verbatim from the
// service's mean_formatted strings; the client only formats auxiliary
// numbers (probabilities, deltas between two service-provided values).

export function formatProbability(p: number): string {
  return p.toFixed(3).replace(/0+$/, "").replace(/\.$/, ".0");
}

export function formatHoursShort(hours: number): string {
  if (!isFinite(hours)) return "-";
  if (Math.abs(hours) < 0.01 && hours !== 0) return hours.toExponential(1);
  return `${hours.toFixed(2)} h`;
}

/** Signed difference between two service-reported second counts. */
export function formatDeltaSeconds(baselineSeconds: number, scenarioSeconds: number): string {
  const delta = scenarioSeconds - baselineSeconds;
  if (Math.abs(delta) < 0.5) return "±0s";
  const sign = delta > 0 ? "+" : "-";
  let total = Math.round(Math.abs(delta));
  const d = Math.floor(total / 86400);
  total -= d * 86400;
  const h = Math.floor(total / 3600);
  total -= h * 3600;
  const m = Math.floor(total / 60);
  const s = total - m * 60;
  const parts: string[] = [];
  if (d) parts.push(`${d}d`);
  if (h) parts.push(`${h}h`);
  if (m) parts.push(`${m}m`);
  if (s || parts.length === 0) parts.push(`${s}s`);
  return sign + parts.join(" ");
}

export function formatPercent(p: number): string {
  return `${(100 * p).toFixed(1)}%`;
}
