// SVG rendering and pointer interactions for the causal graph panel.
// All state lives in the GraphModel; this module only draws it and
// translates pointer gestures into model updates.

import { GraphModel, interveneUtterance, explainUtterance } from "./graphModel.js";
import { forceLayout } from "./layout.js";
import { escapeHtml } from "./checklist.js";

const NS = "http://www.w3.org/2000/svg";

export interface GraphViewCallbacks {
  onUtterance: (utterance: string) => void;
}

export class GraphView {
  private svg: SVGSVGElement;
  private dragging: string | null = null;
  private panning = false;
  private lastPointer: [number, number] = [0, 0];

  constructor(
    private container: HTMLElement,
    public model: GraphModel,
    private callbacks: GraphViewCallbacks,
  ) {
    this.svg = document.createElementNS(NS, "svg") as SVGSVGElement;
    this.svg.setAttribute("class", "graph-svg");
    this.container.appendChild(this.svg);
    this.bindPointerEvents();
  }

  layoutIfNeeded(): void {
    const missing = this.model.nodes.filter((n) => !this.model.positions.has(n));
    if (missing.length === 0) return;
    const rect = this.container.getBoundingClientRect();
    const positions = forceLayout(this.model.nodes, this.model.edges, {
      width: rect.width || 640,
      height: rect.height || 420,
    });
    for (const name of missing) {
      const p = positions.get(name);
      if (p) this.model.setPosition(name, p.x, p.y);
    }
  }

  render(): void {
    this.layoutIfNeeded();
    const m = this.model;
    this.svg.innerHTML = "";
    if (m.nodes.length === 0) {
      const hint = document.createElementNS(NS, "text");
      hint.setAttribute("x", "16");
      hint.setAttribute("y", "28");
      hint.setAttribute("class", "empty-hint");
      hint.textContent = "No graph yet — run an analysis to see the structure.";
      this.svg.appendChild(hint);
      return;
    }
    const root = document.createElementNS(NS, "g");
    const { scale, tx, ty } = m.transform;
    root.setAttribute("transform", `translate(${tx} ${ty}) scale(${scale})`);
    this.svg.appendChild(root);
    this.appendArrowMarker();

    const highlighted = m.highlighted();
    for (const edge of m.edges) {
      const a = m.positions.get(edge.from);
      const b = m.positions.get(edge.to);
      if (!a || !b) continue;
      const line = document.createElementNS(NS, "line");
      line.setAttribute("x1", String(a.x));
      line.setAttribute("y1", String(a.y));
      line.setAttribute("x2", String(b.x));
      line.setAttribute("y2", String(b.y));
      line.setAttribute(
        "class",
        edge.kind === "directed" ? "edge directed" : "edge undirected",
      );
      if (edge.kind === "directed") {
        line.setAttribute("marker-end", "url(#arrow)");
      }
      line.addEventListener("click", (ev) => {
        ev.stopPropagation();
        this.callbacks.onUtterance(explainUtterance(edge.from, edge.to));
      });
      root.appendChild(line);
    }

    for (const name of m.nodes) {
      const p = m.positions.get(name);
      if (!p) continue;
      const group = document.createElementNS(NS, "g");
      group.setAttribute("class", "node-group");
      const circle = document.createElementNS(NS, "circle");
      circle.setAttribute("cx", String(p.x));
      circle.setAttribute("cy", String(p.y));
      circle.setAttribute("r", "16");
      let cls = "node";
      if (m.selected === name) cls += " selected";
      else if (highlighted.has(name)) cls += " downstream";
      circle.setAttribute("class", cls);
      circle.addEventListener("pointerdown", (ev) => {
        ev.stopPropagation();
        this.dragging = name;
        this.lastPointer = [ev.clientX, ev.clientY];
      });
      circle.addEventListener("click", (ev) => {
        ev.stopPropagation();
        m.select(m.selected === name ? null : name);
        this.render();
      });
      circle.addEventListener("contextmenu", (ev) => {
        ev.preventDefault();
        this.callbacks.onUtterance(interveneUtterance(name));
      });
      const label = document.createElementNS(NS, "text");
      label.setAttribute("x", String(p.x));
      label.setAttribute("y", String(p.y - 22));
      label.setAttribute("class", "node-label");
      label.textContent = name;
      group.appendChild(circle);
      group.appendChild(label);
      root.appendChild(group);
    }

    if (m.selected) {
      const bar = document.createElementNS(NS, "text");
      bar.setAttribute("x", "16");
      bar.setAttribute("y", "20");
      bar.setAttribute("class", "action-hint");
      bar.textContent =
        `${m.selected}: right-click to ask "` +
        `${interveneUtterance(m.selected)}"`;
      this.svg.appendChild(bar);
    }
  }

  private appendArrowMarker(): void {
    const defs = document.createElementNS(NS, "defs");
    defs.innerHTML =
      `<marker id="arrow" viewBox="0 0 10 10" refX="24" refY="5" ` +
      `markerWidth="7" markerHeight="7" orient="auto-start-reverse">` +
      `<path d="M 0 0 L 10 5 L 0 10 z" class="arrow-head"/></marker>`;
    this.svg.appendChild(defs);
  }

  private bindPointerEvents(): void {
    this.svg.addEventListener("pointerdown", (ev) => {
      this.panning = true;
      this.lastPointer = [ev.clientX, ev.clientY];
    });
    window.addEventListener("pointermove", (ev) => {
      const [lx, ly] = this.lastPointer;
      const dx = ev.clientX - lx;
      const dy = ev.clientY - ly;
      if (this.dragging) {
        const s = this.model.transform.scale;
        this.model.dragBy(this.dragging, dx / s, dy / s);
        this.lastPointer = [ev.clientX, ev.clientY];
        this.render();
      } else if (this.panning) {
        this.model.panBy(dx, dy);
        this.lastPointer = [ev.clientX, ev.clientY];
        this.render();
      }
    });
    window.addEventListener("pointerup", () => {
      this.dragging = null;
      this.panning = false;
    });
    this.svg.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const factor = ev.deltaY < 0 ? 1.1 : 1 / 1.1;
      const rect = this.svg.getBoundingClientRect();
      this.model.zoomAt(factor, ev.clientX - rect.left, ev.clientY - rect.top);
      this.render();
    });
    this.svg.addEventListener("click", () => {
      this.model.select(null);
      this.render();
    });
  }
}

export function renderLegendHtml(): string {
  return (
    `<div class="legend">` +
    `<span>${escapeHtml("→ directed")}</span>` +
    `<span>${escapeHtml("— undirected (orientation open)")}</span>` +
    `<span>click: highlight descendants · right-click: intervene here · ` +
    `click edge: explain</span></div>`
  );
}
