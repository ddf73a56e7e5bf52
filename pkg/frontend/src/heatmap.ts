// Correlation heatmap cells with a blue-white-red diverging scale and a
// tooltip showing the exact value to three decimals.

import type { ProfileDoc } from "./types.js";
import { escapeHtml } from "./checklist.js";

export interface HeatmapCell {
  row: string;
  col: string;
  value: number;
  color: string;
  tooltip: string;
}

// r = -1 -> saturated blue, 0 -> white, +1 -> saturated red
export function divergingColor(r: number): string {
  const v = Math.max(-1, Math.min(1, r));
  const t = Math.abs(v);
  const other = Math.round(255 * (1 - t));
  return v >= 0
    ? `rgb(255, ${other}, ${other})`
    : `rgb(${other}, ${other}, 255)`;
}

export function heatmapCells(profile: ProfileDoc): HeatmapCell[] {
  const names = profile.continuous_names;
  const cells: HeatmapCell[] = [];
  names.forEach((row, i) => {
    names.forEach((col, j) => {
      const value = profile.correlation[i][j];
      cells.push({
        row,
        col,
        value,
        color: divergingColor(value),
        tooltip: `${row} × ${col}: ${value.toFixed(3)}`,
      });
    });
  });
  return cells;
}

export function renderHeatmapHtml(profile: ProfileDoc): string {
  const names = profile.continuous_names;
  if (names.length === 0) {
    return `<p class="empty">No continuous columns to correlate.</p>`;
  }
  const header = names
    .map((n) => `<th scope="col">${escapeHtml(n)}</th>`)
    .join("");
  const cells = heatmapCells(profile);
  const rows = names.map((rowName, i) => {
    const tds = names
      .map((_, j) => {
        const cell = cells[i * names.length + j];
        return (
          `<td class="hm-cell" style="background:${cell.color}" ` +
          `title="${escapeHtml(cell.tooltip)}"></td>`
        );
      })
      .join("");
    return `<tr><th scope="row">${escapeHtml(rowName)}</th>${tds}</tr>`;
  });
  return (
    `<table class="heatmap"><thead><tr><th></th>${header}</tr></thead>` +
    `<tbody>${rows.join("")}</tbody></table>`
  );
}
