// Payload shapes mirrored from the gateway HTTP API.

export type EdgeKind = "directed" | "undirected";

export interface GraphEdge {
  from: string;
  to: string;
  kind: EdgeKind;
}

export interface GraphDoc {
  nodes: string[];
  edges: GraphEdge[];
}

export interface ProgressEvent {
  seq: number;
  stage: string;
  status: "started" | "done" | "failed";
  detail: string;
  ts: number;
}

export interface ColumnProfile {
  name: string;
  kind: string;
  missing_rate: number;
  unique_count: number;
  mean: number | null;
  std: number | null;
  min: number | null;
  max: number | null;
  histogram: [number, number, number][];
}

export interface ProfileDoc {
  columns: ColumnProfile[];
  continuous_names: string[];
  correlation: number[][];
  friendliness: number;
  friendliness_reasons: string[];
  warnings: string[];
}

export interface InterventionAnswer {
  target: string;
  verdicts: Record<string, string>;
  effect_estimate: number | null;
  adjustment_set: string[] | null;
  narrative: string;
}

export interface ChatResponse {
  text: string;
  intervention?: InterventionAnswer;
  graph_ref?: string;
  report_ref?: string;
  turn_id?: number;
  status?: string;
}

export interface ApiError {
  error: string;
  detail: string;
}
