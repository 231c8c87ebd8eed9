// DOM wiring: chat section on the left, workbench grid in the middle,
// prototype preview on the right. All logic lives in the imported modules.

import { GuiScoutApi } from "./api.js";
import { ChatFlow } from "./chat.js";
import { buildArtifactDownload, exportEnabled, renderPreview } from "./preview.js";
import type { GuiDocumentView } from "./types.js";
import {
  renderAspectGrid,
  renderPager,
  renderRankingGrid,
} from "./workbench.js";

const api = new GuiScoutApi();
const flow = new ChatFlow(api);
const documents = new Map<string, GuiDocumentView>();
let page = 0;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function ensureDocuments(guiIds: string[]): Promise<void> {
  const missing = guiIds.filter((id) => !documents.has(id));
  await Promise.all(
    missing.map(async (id) => {
      try {
        documents.set(id, await api.getGui(id));
      } catch {
        // placeholder rendering covers missing documents
      }
    }),
  );
}

function renderChat(): void {
  const log = el<HTMLDivElement>("chat-log");
  log.innerHTML = flow.messages
    .map((m) => {
      const retry = m.retryable
        ? ` <button id="retry-banner" class="retry">retry</button>`
        : "";
      return `<p class="msg msg-${m.role}">${m.text}${retry}</p>`;
    })
    .join("");
  log.scrollTop = log.scrollHeight;
}

function renderWorkbench(): void {
  const container = el<HTMLDivElement>("workbench");
  const slot = flow.slot;
  const lookup = (id: string) => documents.get(id);
  if (!slot || flow.focus.kind === "empty") {
    container.innerHTML = `<p class="workbench-empty">Ranked screens appear here.</p>`;
  } else if (flow.focus.kind === "aspects") {
    container.innerHTML =
      renderAspectGrid(flow.focus.aspects, lookup, page) +
      renderPager(page, flow.focus.aspects.length) +
      `<div class="aspect-actions">` +
      `<button id="feature-text-only">Keep as text requirement</button>` +
      `<button id="feature-reject">Discard feature</button></div>`;
  } else {
    container.innerHTML =
      renderRankingGrid(slot.current_ranking, lookup, page, slot.selected_gui) +
      renderPager(page, slot.current_ranking.length);
  }
  renderRecommendationCard();
}

function renderRecommendationCard(): void {
  const host = el<HTMLDivElement>("recommendation-card");
  const rec = flow.currentRecommendation;
  if (!rec) {
    host.innerHTML = "";
    host.hidden = true;
    return;
  }
  host.hidden = false;
  host.innerHTML =
    `<h3>Suggested: ${rec.feature.text}</h3>` +
    `<p class="explanation">${rec.explanation}</p>` +
    `<p class="scores">coverage ${rec.coverage_score.toFixed(3)}</p>` +
    `<div class="rec-actions">` +
    `<button id="rec-aspect">Select best match</button>` +
    `<button id="rec-text">Relevant, no match</button>` +
    `<button id="rec-skip">Not relevant</button></div>`;
  el<HTMLButtonElement>("rec-aspect").onclick = () =>
    run(() => flow.decideRecommendation("select_aspect", rec.aspect_ranking[0]));
  el<HTMLButtonElement>("rec-text").onclick = () =>
    run(() => flow.decideRecommendation("relevant_no_aspect"));
  el<HTMLButtonElement>("rec-skip").onclick = () =>
    run(() => flow.decideRecommendation("not_relevant"));
}

async function renderPreviewPane(): Promise<void> {
  const host = el<HTMLDivElement>("preview");
  const completed = flow.completedSlots;
  await ensureDocuments(
    completed.map((s) => s.selected_gui).filter((id): id is string => !!id),
  );
  host.innerHTML = renderPreview(completed, (id) => documents.get(id));
  el<HTMLButtonElement>("export-button").disabled = !exportEnabled(
    flow.session?.slots ?? [],
  );
}

async function refresh(): Promise<void> {
  const slot = flow.slot;
  if (slot) {
    await ensureDocuments(slot.current_ranking.map((r) => r.gui_id));
    if (flow.focus.kind === "aspects") {
      await ensureDocuments(flow.focus.aspects.map((a) => a.gui_id));
    }
  }
  renderChat();
  renderWorkbench();
  await renderPreviewPane();
  wireWorkbenchButtons();
}

async function run(action: () => Promise<unknown>): Promise<void> {
  try {
    await action();
  } catch {
    // the flow already recorded the error message; keep the UI alive
  }
  page = 0;
  await refresh();
}

function wireWorkbenchButtons(): void {
  const container = el<HTMLDivElement>("workbench");
  container.querySelectorAll<HTMLButtonElement>(".select-gui").forEach((button) => {
    button.onclick = () => run(() => flow.selectGui(button.dataset.guiId ?? ""));
  });
  container.querySelectorAll<HTMLButtonElement>(".select-aspect").forEach((button) => {
    button.onclick = () => {
      if (flow.focus.kind !== "aspects") return;
      const aspect = flow.focus.aspects.find(
        (a) =>
          a.gui_id === button.dataset.guiId &&
          (a.component_id ?? "") === (button.dataset.componentId ?? ""),
      );
      const featureId = flow.focus.featureId;
      run(() => flow.decideFeature(featureId, "select_aspect", aspect));
    };
  });
  const textOnly = document.getElementById("feature-text-only");
  if (textOnly && flow.focus.kind === "aspects") {
    const featureId = flow.focus.featureId;
    (textOnly as HTMLButtonElement).onclick = () =>
      run(() => flow.decideFeature(featureId, "text_only"));
  }
  const reject = document.getElementById("feature-reject");
  if (reject && flow.focus.kind === "aspects") {
    const featureId = flow.focus.featureId;
    (reject as HTMLButtonElement).onclick = () =>
      run(() => flow.decideFeature(featureId, "reject"));
  }
  container.querySelector<HTMLButtonElement>(".page-prev")?.addEventListener(
    "click",
    async () => {
      page = Math.max(0, page - 1);
      renderWorkbench();
      wireWorkbenchButtons();
    },
  );
  container.querySelector<HTMLButtonElement>(".page-next")?.addEventListener(
    "click",
    async () => {
      page += 1;
      renderWorkbench();
      wireWorkbenchButtons();
    },
  );
}

function setup(): void {
  const form = el<HTMLFormElement>("chat-form");
  const input = el<HTMLInputElement>("chat-input");
  const mode = el<HTMLSelectElement>("chat-mode");
  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = "";
    if (!flow.session) {
      run(() => flow.start(text));
    } else if (mode.value === "feature") {
      run(() => flow.submitFeature(text));
    } else {
      run(() => flow.submitQuery(text));
    }
  });
  el<HTMLButtonElement>("recommend-button").onclick = () =>
    run(() => flow.requestRecommendations());
  el<HTMLButtonElement>("complete-button").onclick = () =>
    run(() => flow.completeSlot());
  el<HTMLButtonElement>("export-button").onclick = async () => {
    try {
      const artifact = await flow.fetchArtifact();
      const download = buildArtifactDownload(artifact);
      const blob = new Blob([download.content], { type: download.mimeType });
      const url = URL.createObjectURL(blob);
      const link = document.createElement("a");
      link.href = url;
      link.download = download.filename;
      link.click();
      URL.revokeObjectURL(url);
    } catch {
      await refresh();
    }
  };
  flow.messages.push({
    role: "assistant",
    text: "Name the app you want to prototype to begin.",
  });
  renderChat();
}

setup();
