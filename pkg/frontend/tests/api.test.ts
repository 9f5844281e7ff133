import { describe, expect, it } from 'vitest';
import { ApiClient, ApiError } from '../src/api';
import type { ModelInfo, PredictionResponse, ScenarioRequest } from '../src/types';
import { fetchStub, fixture, type RecordedCall, type WhatIfFixture } from './helpers';

const whatif = fixture<WhatIfFixture>('whatif.json');
const badEdit = fixture<WhatIfFixture>('whatif_bad_edit.json');
const predict = fixture<RecordedCall<ScenarioRequest, PredictionResponse>>('predict.json');
const model = fixture<{ status: number; body: ModelInfo }>('model.json');
const unknownGenre = fixture<RecordedCall<ScenarioRequest, { code: string; field: string }>>(
  'predict_unknown_genre.json',
);

describe('ApiClient', () => {
  it('returns the recorded model info', async () => {
    const calls: string[] = [];
    const client = new ApiClient('http://svc', async (url, init) => {
      calls.push(url);
      expect(init).toBeUndefined();
      return new Response(JSON.stringify(model.body), { status: model.status });
    });
    expect(await client.modelInfo()).toEqual(model.body);
    expect(calls).toEqual(['http://svc/v1/model']);
  });

  it('POSTs the scenario and returns the recorded prediction', async () => {
    const client = new ApiClient('http://svc', async (url, init) => {
      expect(url).toBe('http://svc/v1/predict');
      expect(init?.method).toBe('POST');
      expect(JSON.parse(String(init?.body))).toEqual(predict.request);
      return new Response(JSON.stringify(predict.body), { status: predict.status });
    });
    expect(await client.predict(predict.request)).toEqual(predict.body);
  });

  it('maps non-2xx responses to ApiError with the service body', async () => {
    const client = new ApiClient('http://svc', fetchStub(unknownGenre.status, unknownGenre.body));
    const err = await client.predict(unknownGenre.request).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.body).toEqual(unknownGenre.body);
  });

  it('surfaces per-edit validation errors with their field path', async () => {
    const client = new ApiClient('http://svc', fetchStub(badEdit.status, badEdit.body));
    const err = await client
      .whatif(badEdit.request.base, badEdit.request.edits)
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(400);
    expect(err.body.field).toBe('edits.0');
    expect(err.body.message).toContain('popcorn_sales');
  });

  it('returns the recorded what-if batch', async () => {
    const client = new ApiClient('http://svc', fetchStub(whatif.status, whatif.body));
    const result = await client.whatif(whatif.request.base, whatif.request.edits);
    expect(result.kind).toBe('ok');
    if (result.kind === 'ok') {
      expect(result.response.responses).toHaveLength(3);
      expect(result.response).toEqual(whatif.body);
    }
  });

  it('marks a superseded what-if batch as stale', async () => {
    let releaseFirst!: () => void;
    const gate = new Promise<void>((resolve) => {
      releaseFirst = resolve;
    });
    let call = 0;
    const client = new ApiClient('http://svc', async () => {
      call += 1;
      if (call === 1) {
        await gate;
      }
      return new Response(JSON.stringify(whatif.body), { status: 200 });
    });
    const first = client.whatif(whatif.request.base, whatif.request.edits);
    const second = client.whatif(whatif.request.base, []);
    expect(await second).toEqual({ kind: 'ok', response: whatif.body });
    releaseFirst();
    expect(await first).toEqual({ kind: 'stale' });
  });
});
