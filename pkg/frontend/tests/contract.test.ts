import { describe, expect, it } from 'vitest';
import { ApiClient } from '../src/api';
import { boardFromWhatIf, exportBoard, importBoard } from '../src/board';
import { columnsOf, renderBoardHtml } from '../src/render';
import { canSubmit, validateDraft } from '../src/validation';
import { baseDraft, fetchStub, fixture, type WhatIfFixture } from './helpers';

const recorded = fixture<WhatIfFixture>('whatif.json');

function report(n: number, ok: boolean, detail: string) {
  // eslint-disable-next-line no-console
  console.log(`UI CONTRACT ${n}: ${ok ? 'PASS' : 'FAIL'} - ${detail}`);
  expect(ok, detail).toBe(true);
}

describe('service contract', () => {
  it('baseline plus two edits renders three columns equal to the recorded responses', async () => {
    const client = new ApiClient('http://svc', fetchStub(recorded.status, recorded.body));
    const result = await client.whatif(recorded.request.base, recorded.request.edits);
    expect(result.kind).toBe('ok');
    if (result.kind !== 'ok') return;

    const board = boardFromWhatIf(baseDraft(recorded.request.base), result.response.responses);
    const columns = columnsOf(board);
    expect(columns).toHaveLength(3);
    expect(columns[0].isBaseline).toBe(true);

    let worst = 0;
    columns.forEach((col, i) => {
      const want = recorded.body.responses[i];
      for (const [cls, p] of Object.entries(want.probabilities)) {
        expect(col.probabilities[cls]).toBe(p);
        worst = Math.max(worst, Math.abs(col.probabilities[cls] - p));
      }
      expect(col.roiEstimate).toBe(want.roi_estimate);
      expect(col.decision).toBe(want.decision);
      expect(col.deltas.roi_estimate).toBe(want.roi_estimate - recorded.body.responses[0].roi_estimate);
    });

    const html = renderBoardHtml(board);
    expect(html).toContain('baseline');
    expect((html.match(/<th class=/g) ?? []).length).toBe(3);

    report(
      1,
      columns.length === 3 && worst === 0,
      `3 columns, all numbers identical to the recorded service responses (max dev ${worst})`,
    );
  });

  it('an invalid cast blocks submission with a field message', () => {
    const draft = baseDraft({ ...recorded.request.base, cast: [] });
    const errors = validateDraft(draft);
    const blocked = !canSubmit(draft);
    const fieldMessage = errors.find((e) => e.field === 'cast');
    expect(blocked).toBe(true);
    expect(fieldMessage).toBeDefined();
    report(
      2,
      blocked && fieldMessage !== undefined,
      `submission blocked, cast message: '${fieldMessage?.message}'`,
    );
  });

  it('board export/import round-trips exactly', () => {
    const board = boardFromWhatIf(baseDraft(recorded.request.base), recorded.body.responses);
    const text = exportBoard(board);
    const restored = importBoard(text);
    const identical = JSON.stringify(restored) === JSON.stringify(board) && exportBoard(restored) === text;
    expect(restored).toEqual(board);
    report(3, identical, 'exported board re-imports to identical state and identical bytes');
  });
});
