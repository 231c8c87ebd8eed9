// Wireframe rendering: fixtures ship without screenshots, so GUI cards are
// drawn as SVG rectangles straight from the component bounds. The matched
// component of an aspect-GUI gets a highlight outline.

import type { GuiComponentView, GuiDocumentView } from "./types.js";

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function walk(
  component: GuiComponentView,
  highlightId: string | null,
  out: string[],
): void {
  const [left, top, right, bottom] = component.bounds;
  const width = Math.max(right - left, 1);
  const height = Math.max(bottom - top, 1);
  const highlighted = component.component_id === highlightId;
  const cls = highlighted ? "wf-component wf-highlight" : "wf-component";
  out.push(
    `<rect class="${cls}" data-component-id="${escapeXml(component.component_id)}" ` +
      `x="${left}" y="${top}" width="${width}" height="${height}" />`,
  );
  if (component.displayed_text) {
    const fontSize = Math.min(Math.max(Math.floor(height / 3), 28), 72);
    out.push(
      `<text class="wf-text" x="${left + 16}" y="${top + height / 2}" font-size="${fontSize}">` +
        `${escapeXml(component.displayed_text.slice(0, 28))}</text>`,
    );
  }
  for (const child of component.children) {
    walk(child, highlightId, out);
  }
}

/** Render a GUI document as an SVG wireframe string. */
export function renderWireframe(
  document: GuiDocumentView,
  highlightId: string | null = null,
): string {
  const [left, top, right, bottom] = document.root.bounds;
  const parts: string[] = [];
  walk(document.root, highlightId, parts);
  return (
    `<svg class="wireframe" viewBox="${left} ${top} ${Math.max(right - left, 1)} ` +
    `${Math.max(bottom - top, 1)}" preserveAspectRatio="xMidYMid meet" ` +
    `role="img" aria-label="wireframe of ${escapeXml(document.gui_id)}">` +
    parts.join("") +
    `</svg>`
  );
}

/** Placeholder when the GUI document has not been fetched yet. */
export function renderPlaceholder(guiId: string): string {
  return `<div class="wireframe-placeholder">${escapeXml(guiId)}</div>`;
}
