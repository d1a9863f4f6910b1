// Pure view-model layer: folding the event stream into the transcript and
// timeline, and shaping StateView payloads for the panels. Everything here
// is deterministic in its inputs, so replaying a stream reproduces the
// identical model.

import type { AgentEvent, EmotionView, IntentionView, StateView } from "./types.js";

export interface ChatBubble {
  role: "user" | "agent" | "system";
  tick: number;
  text: string;
  actName?: string;
  badges: [string, string][];
}

export interface TimelineEntry {
  tick: number;
  kind: string;
  summary: string;
}

export interface ConsoleModel {
  bubbles: ChatBubble[];
  timeline: TimelineEntry[];
  lastTick: number;
}

export function emptyModel(): ConsoleModel {
  return { bubbles: [], timeline: [], lastTick: 0 };
}

function asString(value: unknown): string {
  return typeof value === "string" ? value : JSON.stringify(value ?? "");
}

function asBadges(value: unknown): [string, string][] {
  if (!Array.isArray(value)) return [];
  const out: [string, string][] = [];
  for (const pair of value) {
    if (Array.isArray(pair) && pair.length === 2) {
      out.push([asString(pair[0]), asString(pair[1])]);
    }
  }
  return out;
}

export function summarize(event: AgentEvent): string {
  const p = event.payload;
  switch (event.kind) {
    case "act_received":
      return p.unrecognized
        ? `unrecognized input: ${asString(p.text)}`
        : `${asString(p.definition)}(${asString(p.content)}) from ${asString(p.speaker)}`;
    case "facts_asserted": {
      const added = Array.isArray(p.added) ? p.added.length : 0;
      const retracted = Array.isArray(p.retracted) ? p.retracted.length : 0;
      return `${asString(p.source)}: +${added}${retracted ? ` -${retracted}` : ""}`;
    }
    case "emotion_triggered":
      return `${asString(p.category)}(${asString(p.content)}) intensity ${asString(p.intensity)}`;
    case "sec_profile":
      return `appraised ${asString(p.act)} (${asString(p.direction)})`;
    case "expression_rendered":
      return asBadges(p.expression).map(([, label]) => label).join(" · ");
    case "intention_adopted":
      return `${asString(p.intention)} → ${asString(p.goal)}`;
    case "plan_found": {
      const steps = Array.isArray(p.steps) ? p.steps.map(asString).join(", ") : "";
      return `[${steps}]${p.replan ? " (replan)" : ""}`;
    }
    case "plan_failed":
      return `cannot reach ${asString(p.goal)} (${asString(p.reason)})`;
    case "action_executed":
      return asString(p.step);
    case "action_failed":
      return `${asString(p.step)}: ${asString(p.reason)}`;
    case "utterance_out":
      return `${asString(p.definition)}: ${asString(p.text)}`;
    default:
      return event.kind;
  }
}

export function applyEvent(model: ConsoleModel, event: AgentEvent): ConsoleModel {
  const timeline = [...model.timeline, { tick: event.tick, kind: event.kind, summary: summarize(event) }];
  const bubbles = [...model.bubbles];
  const p = event.payload;
  if (event.kind === "act_received") {
    if (p.unrecognized) {
      bubbles.push({ role: "user", tick: event.tick, text: asString(p.text), badges: [] });
    } else if (p.stimulus) {
      bubbles.push({
        role: "system",
        tick: event.tick,
        text: `perceived: ${asString(p.content)}`,
        actName: asString(p.definition),
        badges: [],
      });
    } else {
      bubbles.push({
        role: "user",
        tick: event.tick,
        text: asString(p.text ?? p.content),
        actName: asString(p.definition),
        badges: [],
      });
    }
  } else if (event.kind === "utterance_out") {
    bubbles.push({
      role: "agent",
      tick: event.tick,
      text: asString(p.text),
      actName: asString(p.definition),
      badges: asBadges(p.expression),
    });
  }
  return { bubbles, timeline, lastTick: Math.max(model.lastTick, event.tick) };
}

export function reduceEvents(events: AgentEvent[]): ConsoleModel {
  let model = emptyModel();
  for (const event of events) {
    model = applyEvent(model, event);
  }
  return model;
}

// --- panel shaping ---

export function sortEmotions(emotions: EmotionView[]): EmotionView[] {
  return [...emotions].sort((a, b) => b.intensity - a.intensity || a.tick - b.tick);
}

export function intentionRowClass(intention: IntentionView): string {
  return intention.status === "abandoned" ? "abandoned" : intention.status;
}

export const SEC_CHECKS = [
  "novelty",
  "pleasantness",
  "goal_congruence",
  "coping_potential",
  "norm_compatibility",
] as const;

// Mirrors the engine's default label thresholds; purely presentational.
export function secLevel(check: string, value: number): "neg" | "neutral" | "pos" {
  if (check === "novelty") return value >= 0.5 ? "neutral" : "pos";
  if (check === "coping_potential") return value <= 0.4 ? "neg" : "pos";
  if (value <= -0.3) return "neg";
  if (value >= 0.3) return "pos";
  return "neutral";
}

const REQUIRED_STATE_KEYS = [
  "tick",
  "agents",
  "beliefs",
  "goals",
  "ideals",
  "responsibilities",
  "emotions",
  "intentions",
  "obligations",
  "plan",
  "last_sec",
  "history",
] as const;

export function stateShapeProblems(state: unknown): string[] {
  if (typeof state !== "object" || state === null) {
    return ["state is not an object"];
  }
  const problems: string[] = [];
  for (const key of REQUIRED_STATE_KEYS) {
    if (!(key in (state as Record<string, unknown>))) {
      problems.push(`missing field: ${key}`);
    }
  }
  return problems;
}

export function isStateView(state: unknown): state is StateView {
  return stateShapeProblems(state).length === 0;
}
