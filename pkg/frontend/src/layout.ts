// Small deterministic force layout: nodes start on a circle, springs pull
// linked nodes together, all pairs repel, and a gentle centering force
// keeps the picture in frame. A fixed iteration count keeps it cheap and
// reproducible; the user refines by dragging.

import type { GraphEdge } from "./types.js";
import type { NodePosition } from "./graphModel.js";

export interface LayoutOptions {
  width: number;
  height: number;
  iterations?: number;
  springLength?: number;
}

export function forceLayout(
  nodes: string[],
  edges: GraphEdge[],
  opts: LayoutOptions,
): Map<string, NodePosition> {
  const { width, height } = opts;
  const iterations = opts.iterations ?? 200;
  const springLength = opts.springLength ?? Math.min(width, height) / 4;
  const n = nodes.length;
  const pos = new Map<string, NodePosition>();
  if (n === 0) return pos;

  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) / 3;
  nodes.forEach((name, i) => {
    const angle = (2 * Math.PI * i) / n;
    pos.set(name, {
      x: cx + radius * Math.cos(angle),
      y: cy + radius * Math.sin(angle),
    });
  });
  if (n === 1) return pos;

  const links = edges
    .filter((e) => e.from !== e.to)
    .map((e) => [e.from, e.to] as const);
  const repulsion = springLength * springLength;

  for (let it = 0; it < iterations; it++) {
    const force = new Map<string, { fx: number; fy: number }>(
      nodes.map((v) => [v, { fx: 0, fy: 0 }]),
    );
    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        const a = pos.get(nodes[i])!;
        const b = pos.get(nodes[j])!;
        let dx = a.x - b.x;
        let dy = a.y - b.y;
        let d2 = dx * dx + dy * dy;
        if (d2 < 1e-6) {
          dx = 0.01 * (i - j);
          dy = 0.01;
          d2 = dx * dx + dy * dy;
        }
        const f = repulsion / d2;
        const d = Math.sqrt(d2);
        const fa = force.get(nodes[i])!;
        const fb = force.get(nodes[j])!;
        fa.fx += (dx / d) * f;
        fa.fy += (dy / d) * f;
        fb.fx -= (dx / d) * f;
        fb.fy -= (dy / d) * f;
      }
    }
    for (const [u, v] of links) {
      const a = pos.get(u)!;
      const b = pos.get(v)!;
      const dx = b.x - a.x;
      const dy = b.y - a.y;
      const d = Math.max(Math.sqrt(dx * dx + dy * dy), 1e-3);
      const f = (d - springLength) * 0.05;
      const fa = force.get(u)!;
      const fb = force.get(v)!;
      fa.fx += (dx / d) * f;
      fa.fy += (dy / d) * f;
      fb.fx -= (dx / d) * f;
      fb.fy -= (dy / d) * f;
    }
    const cooling = 1 - it / iterations;
    for (const name of nodes) {
      const p = pos.get(name)!;
      const f = force.get(name)!;
      f.fx += (cx - p.x) * 0.01;
      f.fy += (cy - p.y) * 0.01;
      const step = 2 * cooling;
      p.x += Math.max(-step * 10, Math.min(step * 10, f.fx * step));
      p.y += Math.max(-step * 10, Math.min(step * 10, f.fy * step));
    }
  }
  return pos;
}
