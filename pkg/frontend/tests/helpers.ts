import { readFileSync } from 'node:fs';
import { fileURLToPath } from 'node:url';
import type { ScenarioDraft, ScenarioRequest, WhatIfEntry } from '../src/types';

export interface RecordedCall<TReq, TBody> {
  request: TReq;
  status: number;
  body: TBody;
}

export function fixture<T>(name: string): T {
  const path = fileURLToPath(new URL(`./fixtures/${name}`, import.meta.url));
  return JSON.parse(readFileSync(path, 'utf-8')) as T;
}

export interface WhatIfFixture {
  request: { base: ScenarioRequest; edits: Partial<ScenarioRequest>[] };
  status: number;
  body: { responses: WhatIfEntry[] };
}

export function baseDraft(request: ScenarioRequest): ScenarioDraft {
  return { clientId: 'base', label: 'baseline', dirty: false, request };
}

/** Fetch stub that serves a fixed JSON body for every call. */
export function fetchStub(
  status: number,
  body: unknown,
  options: { delayed?: Promise<void> } = {},
): (url: string, init?: RequestInit) => Promise<Response> {
  return async () => {
    if (options.delayed) {
      await options.delayed;
    }
    return new Response(JSON.stringify(body), {
      status,
      headers: { 'content-type': 'application/json' },
    });
  };
}
