import { describe, expect, it } from "vitest";

import { divergingColor, heatmapCells, renderHeatmapHtml } from "../src/heatmap.js";
import type { ProfileDoc } from "../src/types.js";

function profileWith(names: string[], corr: number[][]): ProfileDoc {
  return {
    columns: names.map((n) => ({
      name: n,
      kind: "continuous",
      missing_rate: 0,
      unique_count: 10,
      mean: 0,
      std: 1,
      min: -1,
      max: 1,
      histogram: [],
    })),
    continuous_names: names,
    correlation: corr,
    friendliness: 100,
    friendliness_reasons: [],
    warnings: [],
  };
}

describe("divergingColor", () => {
  it("maps the scale endpoints and midpoint", () => {
    expect(divergingColor(1)).toBe("rgb(255, 0, 0)");
    expect(divergingColor(-1)).toBe("rgb(0, 0, 255)");
    expect(divergingColor(0)).toBe("rgb(255, 255, 255)");
  });

  it("clamps out-of-range values", () => {
    expect(divergingColor(3)).toBe(divergingColor(1));
    expect(divergingColor(-3)).toBe(divergingColor(-1));
  });
});

describe("heatmapCells", () => {
  it("exposes the exact correlation to three decimals in the tooltip", () => {
    const profile = profileWith(["x", "y"], [[1, 0.4567], [0.4567, 1]]);
    const cells = heatmapCells(profile);
    const xy = cells.find((c) => c.row === "x" && c.col === "y")!;
    expect(xy.tooltip).toBe("x × y: 0.457");
    expect(xy.value).toBe(0.4567);
  });

  it("renders an identity matrix with a uniform red diagonal", () => {
    const profile = profileWith(
      ["a", "b", "c"],
      [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    );
    const diag = heatmapCells(profile).filter((c) => c.row === c.col);
    expect(new Set(diag.map((c) => c.color))).toEqual(new Set(["rgb(255, 0, 0)"]));
  });
});

describe("renderHeatmapHtml", () => {
  it("labels an 11x11 matrix fully", () => {
    const names = [
      "Raf", "Mek", "Plcg", "PIP2", "PIP3", "Erk", "Akt", "PKA", "PKC",
      "P38", "Jnk",
    ];
    const corr = names.map((_, i) =>
      names.map((_, j) => (i === j ? 1 : 0.1)),
    );
    const html = renderHeatmapHtml(profileWith(names, corr));
    for (const n of names) {
      expect(html).toContain(`>${n}</th>`);
    }
    expect((html.match(/hm-cell/g) ?? []).length).toBe(121);
  });

  it("shows an empty hint without continuous columns", () => {
    const html = renderHeatmapHtml(profileWith([], []));
    expect(html).toContain("No continuous columns");
  });
});
