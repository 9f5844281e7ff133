/** Shared types mirroring the prediction service's JSON contract. */

export interface ScenarioRequest {
  title?: string | null;
  movie_id?: string | null;
  cast: string[];
  director_id?: string | null;
  genres: string[];
  rating: string;
  planned_release_date: string | null;
  budget_usd?: number | null;
  synopsis?: string | null;
  adaptation: string[];
}

/** Client-side scenario being edited; serializes losslessly to a request. */
export interface ScenarioDraft {
  clientId: string;
  label: string;
  dirty: boolean;
  request: ScenarioRequest;
}

export interface FeatureEcho {
  name: string;
  group: string;
  value: number;
}

export interface ColdStartFlags {
  unknown_cast: string[];
  unknown_director: boolean;
  extrapolated_year: boolean;
}

export interface PredictionResponse {
  schema_fingerprint: string;
  label_spec: { kind: string; classes: string[]; [k: string]: unknown };
  cold_start: ColdStartFlags;
  features: FeatureEcho[];
  probabilities: Record<string, number>;
  decision: string;
  cost_sensitive_decision?: string;
  log_roi1: number;
  roi_estimate: number;
}

export interface WhatIfEntry extends PredictionResponse {
  patch: Partial<ScenarioRequest> | null;
}

export interface WhatIfResponse {
  responses: WhatIfEntry[];
}

export interface ModelInfo {
  model_kind: string;
  label_spec: { kind: string; classes: string[]; [k: string]: unknown };
  schema_fingerprint: string;
  corpus_fingerprint: string;
  columns: { name: string; group: string; is_new: boolean }[];
}

/** Error body for every non-2xx service response. */
export interface ApiErrorBody {
  code: string;
  message: string;
  field?: string;
}

export interface FieldError {
  field: string;
  message: string;
}
