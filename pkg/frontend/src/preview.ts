// Linear app preview of completed slots, plus artifact download helpers.

import type { ArtifactView, GuiDocumentView, SlotView } from "./types.js";
import { renderPlaceholder, renderWireframe } from "./wireframe.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** One preview step per completed slot, in slot order. */
export function renderPreview(
  slots: SlotView[],
  lookup: (guiId: string) => GuiDocumentView | undefined,
): string {
  if (slots.length === 0) {
    return `<p class="preview-empty">Completed screens appear here.</p>`;
  }
  const steps = slots.map((slot, i) => {
    const guiId = slot.selected_gui ?? "";
    const doc = guiId ? lookup(guiId) : undefined;
    const body = doc ? renderWireframe(doc) : renderPlaceholder(guiId);
    return (
      `<figure class="preview-step" data-gui-id="${escapeHtml(guiId)}">` +
      `<figcaption>${i + 1}. ${escapeHtml(slot.nlr_gui)}</figcaption>` +
      body +
      `</figure>`
    );
  });
  return `<div class="preview-strip">${steps.join("")}</div>`;
}

export interface ArtifactDownload {
  filename: string;
  mimeType: string;
  content: string;
}

/** Serialize the artifact for a client-side download. */
export function buildArtifactDownload(artifact: ArtifactView): ArtifactDownload {
  const slug = artifact.app_name.toLowerCase().replace(/[^a-z0-9]+/g, "-");
  return {
    filename: `${slug || "prototype"}-artifact.json`,
    mimeType: "application/json",
    content: JSON.stringify(artifact, null, 2) + "\n",
  };
}

/** Export is only meaningful once at least one slot is completed. */
export function exportEnabled(slots: SlotView[]): boolean {
  return slots.some((slot) => slot.phase === "done");
}
