// Graph view-model: the edge list mirrors the last fetched graph JSON
// verbatim, while node positions and the zoom/pan transform are purely
// presentational. Dragging mutates positions only, never edges.

import type { GraphDoc, GraphEdge } from "./types.js";

export interface NodePosition {
  x: number;
  y: number;
}

export interface ViewTransform {
  scale: number;
  tx: number;
  ty: number;
}

export class GraphModel {
  nodes: string[] = [];
  edges: GraphEdge[] = [];
  positions = new Map<string, NodePosition>();
  transform: ViewTransform = { scale: 1, tx: 0, ty: 0 };
  selected: string | null = null;

  setGraph(doc: GraphDoc): void {
    this.nodes = [...doc.nodes];
    this.edges = doc.edges.map((e) => ({ ...e }));
    for (const name of [...this.positions.keys()]) {
      if (!this.nodes.includes(name)) this.positions.delete(name);
    }
    if (this.selected && !this.nodes.includes(this.selected)) {
      this.selected = null;
    }
  }

  edgeList(): GraphEdge[] {
    return this.edges.map((e) => ({ ...e }));
  }

  setPosition(node: string, x: number, y: number): void {
    if (!this.nodes.includes(node)) return;
    this.positions.set(node, { x, y });
  }

  dragBy(node: string, dx: number, dy: number): void {
    const p = this.positions.get(node);
    if (!p) return;
    this.positions.set(node, { x: p.x + dx, y: p.y + dy });
  }

  zoomAt(factor: number, cx: number, cy: number): void {
    const next = Math.min(8, Math.max(0.125, this.transform.scale * factor));
    const applied = next / this.transform.scale;
    this.transform.tx = cx - (cx - this.transform.tx) * applied;
    this.transform.ty = cy - (cy - this.transform.ty) * applied;
    this.transform.scale = next;
  }

  panBy(dx: number, dy: number): void {
    this.transform.tx += dx;
    this.transform.ty += dy;
  }

  // descendants along directed edges only: what an intervention can reach
  descendants(node: string): Set<string> {
    const children = new Map<string, string[]>();
    for (const e of this.edges) {
      if (e.kind !== "directed") continue;
      const list = children.get(e.from) ?? [];
      list.push(e.to);
      children.set(e.from, list);
    }
    const seen = new Set<string>();
    const stack = [...(children.get(node) ?? [])];
    while (stack.length) {
      const v = stack.pop()!;
      if (seen.has(v) || v === node) continue;
      seen.add(v);
      for (const w of children.get(v) ?? []) stack.push(w);
    }
    return seen;
  }

  select(node: string | null): void {
    this.selected = node && this.nodes.includes(node) ? node : null;
  }

  highlighted(): Set<string> {
    return this.selected ? this.descendants(this.selected) : new Set();
  }
}

export function interveneUtterance(node: string): string {
  return `What if we intervene on ${node}?`;
}

export function explainUtterance(a: string, b: string): string {
  return `Why are ${a} and ${b} related?`;
}
