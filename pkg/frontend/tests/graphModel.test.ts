import { describe, expect, it } from "vitest";

import {
  GraphModel,
  explainUtterance,
  interveneUtterance,
} from "../src/graphModel.js";
import { forceLayout } from "../src/layout.js";
import type { GraphDoc } from "../src/types.js";

const SACHS_LIKE: GraphDoc = {
  nodes: ["PKA", "Raf", "Mek", "Erk"],
  edges: [
    { from: "PKA", to: "Raf", kind: "directed" },
    { from: "Raf", to: "Mek", kind: "directed" },
    { from: "Mek", to: "Erk", kind: "directed" },
    { from: "PKA", to: "Erk", kind: "undirected" },
  ],
};

describe("GraphModel", () => {
  it("mirrors the fetched edge set exactly", () => {
    const model = new GraphModel();
    model.setGraph(SACHS_LIKE);
    expect(model.edgeList()).toEqual(SACHS_LIKE.edges);
  });

  it("dragging nodes never alters the edge list", () => {
    const model = new GraphModel();
    model.setGraph(SACHS_LIKE);
    const before = JSON.stringify(model.edgeList());
    model.setPosition("PKA", 10, 10);
    model.dragBy("PKA", 55, -20);
    model.dragBy("PKA", -5, 3);
    model.zoomAt(1.5, 100, 100);
    model.panBy(30, 40);
    expect(JSON.stringify(model.edgeList())).toBe(before);
    expect(model.positions.get("PKA")).toEqual({ x: 60, y: -7 });
  });

  it("descendants follow directed edges only", () => {
    const model = new GraphModel();
    model.setGraph(SACHS_LIKE);
    expect(model.descendants("PKA")).toEqual(new Set(["Raf", "Mek", "Erk"]));
    expect(model.descendants("Erk")).toEqual(new Set());
    // the undirected PKA-Erk edge must not make Erk reach PKA
    expect(model.descendants("Mek")).toEqual(new Set(["Erk"]));
  });

  it("selecting a node highlights its descendants", () => {
    const model = new GraphModel();
    model.setGraph(SACHS_LIKE);
    model.select("Raf");
    expect(model.highlighted()).toEqual(new Set(["Mek", "Erk"]));
    model.select(null);
    expect(model.highlighted()).toEqual(new Set());
  });

  it("drops stale positions and selection when the graph changes", () => {
    const model = new GraphModel();
    model.setGraph(SACHS_LIKE);
    model.setPosition("PKA", 1, 2);
    model.select("Erk");
    model.setGraph({ nodes: ["A"], edges: [] });
    expect(model.positions.has("PKA")).toBe(false);
    expect(model.selected).toBeNull();
  });

  it("zoom is clamped and keeps the anchor fixed", () => {
    const model = new GraphModel();
    for (let i = 0; i < 50; i++) model.zoomAt(2, 100, 100);
    expect(model.transform.scale).toBeLessThanOrEqual(8);
    const anchor = { x: 100, y: 100 };
    const before = {
      x: (anchor.x - model.transform.tx) / model.transform.scale,
      y: (anchor.y - model.transform.ty) / model.transform.scale,
    };
    model.zoomAt(0.5, anchor.x, anchor.y);
    const after = {
      x: (anchor.x - model.transform.tx) / model.transform.scale,
      y: (anchor.y - model.transform.ty) / model.transform.scale,
    };
    expect(after.x).toBeCloseTo(before.x, 9);
    expect(after.y).toBeCloseTo(before.y, 9);
  });
});

describe("utterance builders", () => {
  it("intervene-here produces the exact what-if phrasing", () => {
    expect(interveneUtterance("Mek")).toBe("What if we intervene on Mek?");
  });

  it("edge click produces an explain question", () => {
    expect(explainUtterance("Raf", "Mek")).toBe("Why are Raf and Mek related?");
  });
});

describe("forceLayout", () => {
  it("positions every node inside a finite frame", () => {
    const pos = forceLayout(SACHS_LIKE.nodes, SACHS_LIKE.edges, {
      width: 640,
      height: 480,
    });
    expect(pos.size).toBe(4);
    for (const p of pos.values()) {
      expect(Number.isFinite(p.x)).toBe(true);
      expect(Number.isFinite(p.y)).toBe(true);
    }
  });

  it("pulls linked nodes closer than unlinked ones on a path graph", () => {
    const nodes = ["a", "b", "c"];
    const edges = [
      { from: "a", to: "b", kind: "directed" as const },
      { from: "b", to: "c", kind: "directed" as const },
    ];
    const pos = forceLayout(nodes, edges, { width: 600, height: 600 });
    const d = (u: string, v: string) => {
      const p = pos.get(u)!;
      const q = pos.get(v)!;
      return Math.hypot(p.x - q.x, p.y - q.y);
    };
    expect(d("a", "b")).toBeLessThan(d("a", "c"));
  });

  it("is deterministic", () => {
    const a = forceLayout(SACHS_LIKE.nodes, SACHS_LIKE.edges, {
      width: 640,
      height: 480,
    });
    const b = forceLayout(SACHS_LIKE.nodes, SACHS_LIKE.edges, {
      width: 640,
      height: 480,
    });
    expect(a).toEqual(b);
  });
});
