// Mirrors the service API schema (src/caio/data/api_schema.json).
// The console renders only what these payloads carry; it never infers state.

export type EventKind =
  | "act_received"
  | "facts_asserted"
  | "emotion_triggered"
  | "sec_profile"
  | "expression_rendered"
  | "intention_adopted"
  | "plan_found"
  | "plan_failed"
  | "action_executed"
  | "action_failed"
  | "utterance_out";

export interface AgentEvent {
  tick: number;
  kind: EventKind;
  payload: Record<string, unknown>;
}

export interface SessionDescriptor {
  id: string;
  agents: { self: string; interlocutor: string };
  scenario?: string | null;
  created: number;
}

export interface FactEntry {
  formula: string;
  tick: number;
  source: string;
  priority?: number;
}

export interface EmotionView {
  id: string;
  category: string;
  holder: string;
  target: string | null;
  content: string;
  intensity: number;
  expressed: boolean;
  tick: number;
}

export interface IntentionView {
  kind: "emotional" | "obligation" | "global";
  band: "high" | "medium" | "low";
  goal: string;
  score: number;
  status: "pending" | "planned" | "achieved" | "abandoned";
  origin: string;
}

export interface ObligationView {
  id: string;
  bearer: string;
  kind: string;
  content: string;
  discharged: boolean;
  tick: number;
}

export interface SecView {
  novelty: number;
  pleasantness: number;
  goal_congruence: number;
  coping_potential: number;
  norm_compatibility: number;
  labels: [string, string][];
}

export interface StateView {
  tick: number;
  agents: { self: string; interlocutor: string };
  dialogue_type?: string;
  beliefs: FactEntry[];
  goals: FactEntry[];
  ideals: FactEntry[];
  responsibilities: FactEntry[];
  other?: FactEntry[];
  emotions: EmotionView[];
  intentions: IntentionView[];
  obligations: ObligationView[];
  plan: { steps: string[]; index: number } | null;
  last_sec: SecView | null;
  history: Record<string, unknown>[];
}

export type ConnectionStatus = "connecting" | "connected" | "disconnected";
