// DOM wiring for the console: one event-stream consumer per tab, UI state
// updated strictly in arrival order. The console only reads state and sends
// utterances/stimuli; it never mutates the agent any other way.

import { ApiClient } from "./api.js";
import {
  ConsoleModel,
  applyEvent,
  emptyModel,
  intentionRowClass,
  SEC_CHECKS,
  secLevel,
  sortEmotions,
  stateShapeProblems,
} from "./model.js";
import type { AgentEvent, ConnectionStatus, StateView } from "./types.js";

const client = new ApiClient("");
let model: ConsoleModel = emptyModel();
let sessionId = "";
let stateTimer: number | undefined;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function escapeHtml(text: string): string {
  return text
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}

function badgeHtml(badges: [string, string][]): string {
  return badges
    .map(([check, label]) => `<span class="badge" title="${escapeHtml(check)}">${escapeHtml(label)}</span>`)
    .join("");
}

function renderTranscript(): void {
  const pane = el<HTMLDivElement>("transcript");
  pane.innerHTML = model.bubbles
    .map((bubble) => {
      const act = bubble.actName ? `<span class="act-name">${escapeHtml(bubble.actName)}</span>` : "";
      return `<div class="bubble ${bubble.role}">
        <div class="bubble-meta">t${bubble.tick} ${act}</div>
        <div class="bubble-text">${escapeHtml(bubble.text)}</div>
        <div class="bubble-badges">${badgeHtml(bubble.badges)}</div>
      </div>`;
    })
    .join("");
  pane.scrollTop = pane.scrollHeight;
}

function renderTimeline(): void {
  const pane = el<HTMLDivElement>("timeline");
  pane.innerHTML = model.timeline
    .map(
      (entry) => `<div class="timeline-row">
        <span class="tick">${entry.tick}</span>
        <span class="kind kind-${entry.kind}">${entry.kind}</span>
        <span class="summary">${escapeHtml(entry.summary)}</span>
      </div>`,
    )
    .join("");
  pane.scrollTop = pane.scrollHeight;
}

function renderState(state: StateView): void {
  const problems = stateShapeProblems(state);
  const warning = el<HTMLDivElement>("schema-warning");
  if (problems.length > 0) {
    warning.textContent = `state schema mismatch: ${problems.join(", ")}`;
    warning.classList.remove("hidden");
    return;
  }
  warning.classList.add("hidden");

  el<HTMLDivElement>("emotions").innerHTML =
    sortEmotions(state.emotions)
      .map(
        (emotion) => `<div class="row">
          <span class="name">${escapeHtml(emotion.category)}${emotion.target ? " → " + escapeHtml(emotion.target) : ""}</span>
          <span class="detail">${escapeHtml(emotion.content)}</span>
          <span class="meter"><span class="fill" style="width:${Math.round(emotion.intensity * 100)}%"></span></span>
          <span class="value">${emotion.intensity.toFixed(2)}${emotion.expressed ? " ✓" : ""}</span>
        </div>`,
      )
      .join("") || `<div class="empty">none</div>`;

  el<HTMLDivElement>("intentions").innerHTML =
    state.intentions
      .map(
        (intention) => `<div class="row ${intentionRowClass(intention)}">
          <span class="band band-${intention.band}">${intention.band}</span>
          <span class="name">${escapeHtml(intention.kind)}</span>
          <span class="detail">${escapeHtml(intention.goal)}</span>
          <span class="value">${intention.score.toFixed(2)} · ${intention.status}</span>
        </div>`,
      )
      .join("") || `<div class="empty">none</div>`;

  const sec = state.last_sec;
  el<HTMLDivElement>("sec-gauges").innerHTML = sec
    ? SEC_CHECKS.map((check) => {
        const value = sec[check];
        const label = sec.labels.find((pair) => pair[0] === check)?.[1] ?? "";
        const width = Math.round(Math.abs(value) * 50);
        const side = value < 0 ? "right:50%" : "left:50%";
        return `<div class="gauge">
          <span class="gauge-name">${check.replace("_", " ")}</span>
          <span class="gauge-bar"><span class="gauge-fill ${secLevel(check, value)}" style="${side};width:${width}%"></span></span>
          <span class="gauge-label">${escapeHtml(label)} (${value.toFixed(2)})</span>
        </div>`;
      }).join("")
    : `<div class="empty">no act appraised yet</div>`;

  const factList = (entries: { formula: string; tick: number }[]) =>
    entries
      .map((f) => `<div class="row"><span class="detail">${escapeHtml(f.formula)}</span><span class="value">t${f.tick}</span></div>`)
      .join("") || `<div class="empty">none</div>`;
  el<HTMLDivElement>("beliefs").innerHTML = factList(state.beliefs);
  el<HTMLDivElement>("goals").innerHTML = factList([...state.goals, ...state.ideals]);
  el<HTMLDivElement>("obligations").innerHTML =
    state.obligations
      .map(
        (ob) => `<div class="row ${ob.discharged ? "discharged" : ""}">
          <span class="name">${escapeHtml(ob.kind)}</span>
          <span class="detail">${escapeHtml(ob.bearer)}: ${escapeHtml(ob.content)}</span>
          <span class="value">${ob.discharged ? "done" : "open"}</span>
        </div>`,
      )
      .join("") || `<div class="empty">none</div>`;
  el<HTMLDivElement>("plan").textContent = state.plan
    ? state.plan.steps.map((step, i) => `${i === state.plan!.index ? "➤ " : ""}${step}`).join("\n")
    : "idle";
}

function setStatus(status: ConnectionStatus): void {
  const pill = el<HTMLSpanElement>("status");
  pill.textContent = status;
  pill.className = `pill ${status}`;
  el<HTMLDivElement>("banner").classList.toggle("hidden", status !== "disconnected");
}

function scheduleStateRefresh(): void {
  if (stateTimer !== undefined) window.clearTimeout(stateTimer);
  stateTimer = window.setTimeout(async () => {
    try {
      renderState(await client.getState(sessionId));
    } catch {
      setStatus("disconnected");
    }
  }, 120);
}

function onEvent(event: AgentEvent): void {
  model = applyEvent(model, event);
  renderTranscript();
  renderTimeline();
  scheduleStateRefresh();
}

async function send(): Promise<void> {
  const input = el<HTMLInputElement>("say");
  const text = input.value.trim();
  if (!text) return;
  input.value = "";
  updateSendEnabled();
  try {
    await client.postUtterance(sessionId, text);
  } catch {
    setStatus("disconnected");
  }
}

function updateSendEnabled(): void {
  el<HTMLButtonElement>("send").disabled = el<HTMLInputElement>("say").value.trim() === "";
}

async function boot(): Promise<void> {
  setStatus("connecting");
  try {
    const descriptor = await client.createSession({});
    sessionId = descriptor.id;
    el<HTMLSpanElement>("session-label").textContent =
      `${descriptor.agents.interlocutor} ↔ ${descriptor.agents.self} (${sessionId.slice(0, 8)}…)`;
    client.streamEvents(sessionId, 0, { onEvent, onStatus: setStatus });
    renderState(await client.getState(sessionId));
  } catch {
    setStatus("disconnected");
  }
  el<HTMLButtonElement>("send").addEventListener("click", () => void send());
  el<HTMLInputElement>("say").addEventListener("keydown", (keyEvent) => {
    if (keyEvent.key === "Enter") void send();
  });
  el<HTMLInputElement>("say").addEventListener("input", updateSendEnabled);
  updateSendEnabled();
}

void boot();
