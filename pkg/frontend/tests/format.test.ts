import { describe, expect, it } from "vitest";

import { formatDeltaSeconds, formatHoursShort, formatPercent, formatProbability } from "../src/format.js";
import { maxContributionLabel } from "../src/charts.js";
import { Report } from "../src/types.js";

describe("formatting", () => {
  it("probabilities keep up to three decimals", () => {
    expect(formatProbability(0.5)).toBe("0.5");
    expect(formatProbability(1 / 3)).toBe("0.333");
    expect(formatProbability(1)).toBe("1.0");
  });

  it("deltas between service second-counts are d/h/m/s strings", () => {
    // 3d 1h 42m 5s baseline vs 2d 17h 56m 21s scenario
    expect(formatDeltaSeconds(265325, 237381)).toBe("-7h 45m 44s");
    expect(formatDeltaSeconds(237381, 265325)).toBe("+7h 45m 44s");
    expect(formatDeltaSeconds(100, 100.2)).toBe("±0s");
    expect(formatDeltaSeconds(0, 90061)).toBe("+1d 1h 1m 1s");
  });

  it("hours render compactly", () => {
    expect(formatHoursShort(13.41)).toBe("13.41 h");
    expect(formatHoursShort(0)).toBe("0.00 h");
  });

  it("percentages", () => {
    expect(formatPercent(1 / 6)).toBe("16.7%");
  });
});

describe("maxContributionLabel", () => {
  it("finds the dominant pi*mu state", () => {
    const report: Report = {
      states: [
        { key: "START", pi: 1 / 6, mean_hours: 0, contribution_hours: 0 },
        { key: ["Claim"], pi: 1 / 9, mean_hours: 30.98, contribution_hours: 3.44 },
        { key: ["Resolve"], pi: 2 / 9, mean_hours: 13.41, contribution_hours: 2.98 },
        { key: "END", pi: 1 / 6, mean_hours: 0, contribution_hours: 0 },
      ],
      mean_hours: 73.7,
      mean_seconds: 265325,
      mean_formatted: "3d 1h 42m 5s",
      start_pi: 1 / 6,
    };
    expect(maxContributionLabel(report)).toBe("Claim");
  });

  it("returns null when every contribution is zero", () => {
    const report: Report = {
      states: [{ key: "START", pi: 0.5, mean_hours: 0, contribution_hours: 0 }],
      mean_hours: 0,
      mean_seconds: 0,
      mean_formatted: "0d 0h 0m 0s",
      start_pi: 0.5,
    };
    expect(maxContributionLabel(report)).toBeNull();
  });
});
