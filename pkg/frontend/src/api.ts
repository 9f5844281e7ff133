/** Thin typed client for the prediction service.
 *
 * At most one what-if batch is considered "current": every submission bumps a
 * sequence number and responses from superseded submissions resolve as stale
 * so the caller can drop them without touching board state.
 */

import type {
  ApiErrorBody,
  ModelInfo,
  PredictionResponse,
  ScenarioRequest,
  WhatIfResponse,
} from './types';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(body.message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export type WhatIfResult =
  | { kind: 'ok'; response: WhatIfResponse }
  | { kind: 'stale' };

export class ApiClient {
  private whatifSeq = 0;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    const body = await response.json();
    if (!response.ok) {
      throw new ApiError(response.status, body as ApiErrorBody);
    }
    return body as T;
  }

  modelInfo(): Promise<ModelInfo> {
    return this.request<ModelInfo>('/v1/model');
  }

  predict(scenario: ScenarioRequest): Promise<PredictionResponse> {
    return this.request<PredictionResponse>('/v1/predict', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(scenario),
    });
  }

  explain(scenario: ScenarioRequest): Promise<unknown> {
    return this.request('/v1/explain', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(scenario),
    });
  }

  /** Runs a what-if batch; a result is stale when a newer batch was submitted
   *  while this one was in flight. */
  async whatif(
    base: ScenarioRequest,
    edits: Partial<ScenarioRequest>[],
  ): Promise<WhatIfResult> {
    const seq = ++this.whatifSeq;
    const response = await this.request<WhatIfResponse>('/v1/whatif', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ base, edits }),
    });
    if (seq !== this.whatifSeq) {
      return { kind: 'stale' };
    }
    return { kind: 'ok', response };
  }
}
