// Page bootstrap: wires upload, chat, the SSE checklist, the heatmap and
// the graph panel to the gateway API. The console reconstructs all state
// from server responses on reload; only layout positions are local.

import { ApiClient } from "./api.js";
import { ChatModel, verdictLabel } from "./chat.js";
import { ChecklistModel, escapeHtml, renderChecklistHtml } from "./checklist.js";
import { GraphModel } from "./graphModel.js";
import { GraphView, renderLegendHtml } from "./graphView.js";
import { renderHeatmapHtml } from "./heatmap.js";
import { subscribeEvents } from "./sse.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const apiBase =
  localStorage.getItem("causalab.apiBase") ?? window.location.origin;
el<HTMLInputElement>("api-base").value = apiBase;

const api = new ApiClient(apiBase);
let sessionId: string | null = null;
let chat: ChatModel | null = null;
const checklist = new ChecklistModel();
const graphModel = new GraphModel();
let graphView: GraphView | null = null;

function renderChat(): void {
  if (!chat) return;
  const box = el("transcript");
  box.innerHTML = chat.transcript
    .map((entry) => {
      let extra = "";
      if (entry.verdicts) {
        const rows = Object.entries(entry.verdicts)
          .map(
            ([node, v]) =>
              `<li>${escapeHtml(node)}: ${escapeHtml(verdictLabel(v))}</li>`,
          )
          .join("");
        const effect =
          entry.effect != null
            ? `<p class="effect">estimated effect: ${entry.effect}</p>`
            : "";
        extra = `<ul class="verdicts">${rows}</ul>${effect}`;
      }
      return `<div class="msg ${entry.role}"><p>${escapeHtml(entry.text)}</p>${extra}</div>`;
    })
    .join("");
  box.scrollTop = box.scrollHeight;
  const input = el<HTMLInputElement>("utterance");
  input.disabled = chat.inputDisabled || chat.analysisRunning;
  el("notice").textContent =
    chat.notice ?? (chat.analysisRunning ? "analysis running…" : "");
}

function renderChecklist(): void {
  el("checklist-box").innerHTML = renderChecklistHtml(checklist);
}

async function refreshArtifacts(): Promise<void> {
  if (!sessionId) return;
  try {
    const profile = await api.fetchProfile(sessionId);
    el("heatmap-box").innerHTML = renderHeatmapHtml(profile);
    el("friendliness").textContent =
      `friendliness ${profile.friendliness}/100`;
  } catch {
    /* profile not ready yet */
  }
  try {
    const graph = await api.fetchGraph(sessionId);
    graphModel.setGraph(graph);
    graphView?.render();
  } catch {
    /* graph not ready yet */
  }
  try {
    const markdown = await api.fetchReport(sessionId);
    el("report-box").textContent = markdown;
  } catch {
    /* report not ready yet */
  }
}

function followEvents(): void {
  if (!sessionId) return;
  subscribeEvents(
    api.eventsUrl(sessionId),
    (ev) => {
      checklist.apply(ev);
      renderChecklist();
    },
    () => {
      chat?.analysisFinished();
      renderChat();
      void refreshArtifacts();
    },
  );
}

async function sendUtterance(utterance: string): Promise<void> {
  if (!chat || !sessionId) return;
  const res = await chat.send(utterance);
  renderChat();
  if (res?.status === "accepted") {
    followEvents();
  } else if (res) {
    await refreshArtifacts();
  }
}

el<HTMLButtonElement>("upload-btn").addEventListener("click", async () => {
  const fileInput = el<HTMLInputElement>("csv-file");
  const file = fileInput.files?.[0];
  if (!file) return;
  try {
    const datasetId = await api.uploadDataset(file, file.name);
    sessionId = await api.createSession(datasetId);
    chat = new ChatModel(api, sessionId);
    checklist.reset();
    el("session-label").textContent = `session ${sessionId.slice(0, 8)}…`;
    graphView = graphView ?? new GraphView(el("graph-box"), graphModel, {
      onUtterance: (u) => void sendUtterance(u),
    });
    followEvents();
    renderChat();
  } catch (err) {
    el("notice").textContent = String(err);
  }
});

el<HTMLFormElement>("chat-form").addEventListener("submit", (ev) => {
  ev.preventDefault();
  const input = el<HTMLInputElement>("utterance");
  const text = input.value.trim();
  if (!text) return;
  input.value = "";
  void sendUtterance(text);
});

el<HTMLInputElement>("api-base").addEventListener("change", (ev) => {
  const value = (ev.target as HTMLInputElement).value.trim();
  localStorage.setItem("causalab.apiBase", value);
  window.location.reload();
});

el("legend-box").innerHTML = renderLegendHtml();
