// Workbench: the paged grid of ranked GUIs or aspect-GUIs. Pure string
// rendering; DOM wiring lives in main.ts.

import type {
  AspectGuiView,
  GuiDocumentView,
  RankedGuiView,
} from "./types.js";
import { renderPlaceholder, renderWireframe } from "./wireframe.js";

// Cards shown per workbench page.
export const PAGE_SIZE = 10;

export type DocumentLookup = (guiId: string) => GuiDocumentView | undefined;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function pageCount(total: number): number {
  return Math.max(1, Math.ceil(total / PAGE_SIZE));
}

export function pageSlice<T>(items: T[], page: number): T[] {
  const start = page * PAGE_SIZE;
  return items.slice(start, start + PAGE_SIZE);
}

function scoreLine(entry: RankedGuiView): string {
  const parts = [`ensemble ${entry.ensemble.toFixed(3)}`, `s1 ${entry.s1.toFixed(3)}`];
  if (entry.s2 !== null) {
    parts.push(`s2 ${entry.s2.toFixed(3)}`);
  }
  if (entry.rerank_score !== null) {
    parts.push(`rerank ${entry.rerank_score.toFixed(3)}`);
  }
  return parts.join(" · ");
}

function cardBody(guiId: string, lookup: DocumentLookup, highlightId: string | null): string {
  const document = lookup(guiId);
  if (!document) {
    return renderPlaceholder(guiId);
  }
  return renderWireframe(document, highlightId);
}

/** Grid of ranked GUIs for the current page. */
export function renderRankingGrid(
  ranking: RankedGuiView[],
  lookup: DocumentLookup,
  page: number,
  selectedGui: string | null,
): string {
  const cards = pageSlice(ranking, page).map((entry) => {
    const selected = entry.gui_id === selectedGui ? " card-selected" : "";
    return (
      `<article class="card gui-card${selected}" data-gui-id="${escapeHtml(entry.gui_id)}">` +
      `<header><span class="rank">#${entry.rank}</span> ` +
      `<span class="gui-id">${escapeHtml(entry.gui_id)}</span></header>` +
      cardBody(entry.gui_id, lookup, null) +
      `<footer class="scores">${scoreLine(entry)}</footer>` +
      `<button class="select-gui" data-gui-id="${escapeHtml(entry.gui_id)}">Use this screen</button>` +
      `</article>`
    );
  });
  return `<div class="grid">${cards.join("")}</div>`;
}

/** Grid of aspect-GUIs with the matched component highlighted. */
export function renderAspectGrid(
  aspects: AspectGuiView[],
  lookup: DocumentLookup,
  page: number,
): string {
  const cards = pageSlice(aspects, page).map((aspect, i) => {
    const rank = page * PAGE_SIZE + i + 1;
    return (
      `<article class="card aspect-card" data-gui-id="${escapeHtml(aspect.gui_id)}" ` +
      `data-component-id="${escapeHtml(aspect.component_id ?? "")}">` +
      `<header><span class="rank">#${rank}</span> ` +
      `<span class="gui-id">${escapeHtml(aspect.gui_id)}</span></header>` +
      cardBody(aspect.gui_id, lookup, aspect.component_id) +
      `<footer class="scores">match ${aspect.gui_score.toFixed(3)}</footer>` +
      `<button class="select-aspect" data-gui-id="${escapeHtml(aspect.gui_id)}" ` +
      `data-component-id="${escapeHtml(aspect.component_id ?? "")}">This one matches</button>` +
      `</article>`
    );
  });
  return `<div class="grid">${cards.join("")}</div>`;
}

export function renderPager(page: number, total: number): string {
  const pages = pageCount(total);
  if (pages <= 1) {
    return "";
  }
  return (
    `<nav class="pager">` +
    `<button class="page-prev" ${page === 0 ? "disabled" : ""}>&laquo;</button>` +
    `<span>page ${page + 1} / ${pages}</span>` +
    `<button class="page-next" ${page >= pages - 1 ? "disabled" : ""}>&raquo;</button>` +
    `</nav>`
  );
}
