/** Comparison board: ordered (draft, prediction) pairs with one baseline.
 *
 * The board never computes model numbers itself; every figure rendered comes
 * from a stored service response. State is plain data so it serializes to a
 * shareable JSON file and reloads identically.
 */

import type {
  PredictionResponse,
  ScenarioDraft,
  ScenarioRequest,
  WhatIfEntry,
} from './types';

export const MAX_SCENARIOS = 12;

export interface BoardEntry {
  draft: ScenarioDraft;
  prediction: PredictionResponse;
  patch: Partial<ScenarioRequest> | null;
}

export interface ComparisonBoard {
  entries: BoardEntry[];
  baselineId: string;
}

export class BoardError extends Error {}

export function createBoard(baseline: BoardEntry): ComparisonBoard {
  return { entries: [baseline], baselineId: baseline.draft.clientId };
}

export function addEntry(board: ComparisonBoard, entry: BoardEntry): ComparisonBoard {
  if (board.entries.length >= MAX_SCENARIOS) {
    throw new BoardError(`board holds at most ${MAX_SCENARIOS} scenarios`);
  }
  if (board.entries.some((e) => e.draft.clientId === entry.draft.clientId)) {
    throw new BoardError(`duplicate scenario id '${entry.draft.clientId}'`);
  }
  return { entries: [...board.entries, entry], baselineId: board.baselineId };
}

export function setBaseline(board: ComparisonBoard, clientId: string): ComparisonBoard {
  if (!board.entries.some((e) => e.draft.clientId === clientId)) {
    throw new BoardError(`no scenario '${clientId}' on the board`);
  }
  return { entries: board.entries, baselineId: clientId };
}

export function baselineOf(board: ComparisonBoard): BoardEntry {
  const entry = board.entries.find((e) => e.draft.clientId === board.baselineId);
  if (!entry) {
    throw new BoardError('board has no baseline');
  }
  return entry;
}

/** Builds a board from one what-if batch: entry 0 is the base scenario. */
export function boardFromWhatIf(
  base: ScenarioDraft,
  responses: WhatIfEntry[],
  labelFor: (patch: Partial<ScenarioRequest>, index: number) => string = (_, i) =>
    `edit ${i}`,
): ComparisonBoard {
  if (responses.length === 0 || responses[0].patch !== null) {
    throw new BoardError('what-if responses must start with the unpatched base');
  }
  let board = createBoard({
    draft: base,
    prediction: stripPatch(responses[0]),
    patch: null,
  });
  responses.slice(1).forEach((entry, i) => {
    const patch = entry.patch ?? {};
    board = addEntry(board, {
      draft: {
        clientId: `${base.clientId}/edit-${i + 1}`,
        label: labelFor(patch, i + 1),
        dirty: false,
        request: { ...base.request, ...patch },
      },
      prediction: stripPatch(entry),
      patch,
    });
  });
  return board;
}

function stripPatch(entry: WhatIfEntry): PredictionResponse {
  const { patch: _patch, ...prediction } = entry;
  return prediction;
}

export interface EntryDeltas {
  probabilities: Record<string, number>;
  roi_estimate: number;
}

/** Signed changes vs the baseline; zero for the baseline itself. */
export function deltasVsBaseline(board: ComparisonBoard, entry: BoardEntry): EntryDeltas {
  const base = baselineOf(board).prediction;
  const probabilities: Record<string, number> = {};
  for (const [cls, p] of Object.entries(entry.prediction.probabilities)) {
    probabilities[cls] = p - (base.probabilities[cls] ?? 0);
  }
  return {
    probabilities,
    roi_estimate: entry.prediction.roi_estimate - base.roi_estimate,
  };
}

/** Stable JSON export; importing it reproduces the exact board state. */
export function exportBoard(board: ComparisonBoard): string {
  return JSON.stringify({ version: 1, board }, null, 2);
}

export function importBoard(text: string): ComparisonBoard {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new BoardError(`not a board file: ${(err as Error).message}`);
  }
  const payload = parsed as { version?: number; board?: ComparisonBoard };
  if (payload.version !== 1 || !payload.board) {
    throw new BoardError('not a board file: missing version/board');
  }
  const board = payload.board;
  if (!Array.isArray(board.entries) || board.entries.length === 0) {
    throw new BoardError('board file has no scenarios');
  }
  if (board.entries.length > MAX_SCENARIOS) {
    throw new BoardError(`board holds at most ${MAX_SCENARIOS} scenarios`);
  }
  baselineOf(board); // throws when the baseline marker dangles
  return board;
}
