// Progress checklist fed by the SSE stream. Items appear in event order;
// a Started event opens an item (spinner), Done checks it off, Failed
// crosses it out. Replaying the same events is idempotent.

import type { ProgressEvent } from "./types.js";

export type ItemState = "running" | "done" | "failed";

export interface ChecklistItem {
  stage: string;
  state: ItemState;
  detail: string;
  firstSeq: number;
}

export class ChecklistModel {
  items: ChecklistItem[] = [];
  private lastSeq = 0;

  apply(ev: ProgressEvent): void {
    if (ev.seq <= this.lastSeq) return; // replayed frame
    this.lastSeq = ev.seq;
    if (ev.status === "started") {
      this.items.push({
        stage: ev.stage,
        state: "running",
        detail: ev.detail,
        firstSeq: ev.seq,
      });
      return;
    }
    // terminal events close the most recent open item for the stage
    for (let i = this.items.length - 1; i >= 0; i--) {
      const item = this.items[i];
      if (item.stage === ev.stage && item.state === "running") {
        item.state = ev.status === "done" ? "done" : "failed";
        item.detail = ev.detail;
        return;
      }
    }
    // terminal without a matching start (e.g. partial replay): show it
    this.items.push({
      stage: ev.stage,
      state: ev.status === "done" ? "done" : "failed",
      detail: ev.detail,
      firstSeq: ev.seq,
    });
  }

  stagesInOrder(): string[] {
    return this.items.map((i) => i.stage);
  }

  allSettled(): boolean {
    return this.items.every((i) => i.state !== "running");
  }

  reset(): void {
    this.items = [];
    this.lastSeq = 0;
  }
}

const MARKS: Record<ItemState, string> = {
  running: "…",
  done: "✓",
  failed: "✗",
};

export function renderChecklistHtml(model: ChecklistModel): string {
  const rows = model.items.map((item) => {
    const mark = MARKS[item.state];
    const detail = item.detail ? ` <small>${escapeHtml(item.detail)}</small>` : "";
    return `<li class="check-${item.state}"><span class="mark">${mark}</span> ` +
      `${escapeHtml(item.stage)}${detail}</li>`;
  });
  return `<ul class="checklist">${rows.join("")}</ul>`;
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}
