/** Page wiring: form -> draft -> what-if batch -> comparison board. */

import { ApiClient, ApiError } from './api';
import {
  boardFromWhatIf,
  exportBoard,
  importBoard,
  type ComparisonBoard,
} from './board';
import { debounce, personLookup, type PersonIndexEntry } from './lookup';
import { renderBoardHtml } from './render';
import type { ScenarioDraft, ScenarioRequest } from './types';
import { validateDraft } from './validation';

const SERVICE_URL = (window as { MIAS_SERVICE_URL?: string }).MIAS_SERVICE_URL
  ?? 'http://127.0.0.1:8337';

const client = new ApiClient(SERVICE_URL);
let board: ComparisonBoard | null = null;
let personIndex: PersonIndexEntry[] = [];

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function listField(id: string): string[] {
  return el<HTMLInputElement>(id)
    .value.split(',')
    .map((v) => v.trim())
    .filter((v) => v.length > 0);
}

function draftFromForm(): ScenarioDraft {
  const budget = el<HTMLInputElement>('budget').value;
  const request: ScenarioRequest = {
    title: el<HTMLInputElement>('title').value || null,
    cast: listField('cast'),
    director_id: el<HTMLInputElement>('director').value || null,
    genres: listField('genres'),
    rating: el<HTMLSelectElement>('rating').value,
    planned_release_date: el<HTMLInputElement>('release-date').value || null,
    budget_usd: budget ? Number(budget) : null,
    synopsis: el<HTMLTextAreaElement>('synopsis').value || null,
    adaptation: listField('adaptation'),
  };
  return { clientId: 'baseline', label: 'baseline', dirty: true, request };
}

function editsFromForm(): Partial<ScenarioRequest>[] {
  const text = el<HTMLTextAreaElement>('edits').value.trim();
  if (!text) {
    return [];
  }
  return JSON.parse(text) as Partial<ScenarioRequest>[];
}

function showErrors(errors: { field: string; message: string }[]): void {
  el('errors').innerHTML = errors
    .map((e) => `<li data-field="${e.field}">${e.field}: ${e.message}</li>`)
    .join('');
}

function showBanner(message: string): void {
  const banner = el('banner');
  banner.textContent = message;
  banner.hidden = message.length === 0;
}

function redraw(): void {
  el('board').innerHTML = board ? renderBoardHtml(board) : '';
}

async function submit(): Promise<void> {
  showBanner('');
  const draft = draftFromForm();
  const errors = validateDraft(draft);
  showErrors(errors);
  if (errors.length > 0) {
    return; // submission blocked; field messages stay on screen
  }
  try {
    const result = await client.whatif(draft.request, editsFromForm());
    if (result.kind === 'stale') {
      return; // a newer submission superseded this one
    }
    board = boardFromWhatIf(draft, result.response.responses);
    redraw();
  } catch (err) {
    if (err instanceof ApiError && err.body.field) {
      showErrors([{ field: err.body.field, message: err.body.message }]);
    } else {
      // board stays as it was; the error is only a banner
      showBanner(`request failed: ${(err as Error).message}`);
    }
  }
}

function wireLookup(): void {
  const input = el<HTMLInputElement>('person-query');
  const output = el('person-suggestions');
  const update = debounce(() => {
    const suggestions = personLookup(personIndex, input.value);
    output.innerHTML = suggestions
      .map((s) =>
        s.kind === 'person'
          ? `<li data-id="${s.id}">${s.name} <code>${s.id}</code></li>`
          : `<li data-id="${s.name}">use hypothetical person "${s.name}"</li>`,
      )
      .join('');
  }, 150);
  input.addEventListener('input', update);
  output.addEventListener('click', (event) => {
    const item = (event.target as HTMLElement).closest('li');
    if (item?.dataset.id) {
      const cast = el<HTMLInputElement>('cast');
      cast.value = cast.value ? `${cast.value}, ${item.dataset.id}` : item.dataset.id;
    }
  });
}

function wireExport(): void {
  el('export').addEventListener('click', () => {
    if (!board) {
      return;
    }
    const blob = new Blob([exportBoard(board)], { type: 'application/json' });
    const link = document.createElement('a');
    link.href = URL.createObjectURL(blob);
    link.download = 'comparison-board.json';
    link.click();
    URL.revokeObjectURL(link.href);
  });
  el<HTMLInputElement>('import').addEventListener('change', async (event) => {
    const file = (event.target as HTMLInputElement).files?.[0];
    if (!file) {
      return;
    }
    try {
      board = importBoard(await file.text());
      redraw();
    } catch (err) {
      showBanner((err as Error).message);
    }
  });
}

async function init(): Promise<void> {
  try {
    const response = await fetch('person_index.json');
    personIndex = ((await response.json()) as { persons: PersonIndexEntry[] }).persons;
  } catch {
    personIndex = []; // lookup degrades to hypothetical-only
  }
  el('submit').addEventListener('click', () => void submit());
  wireLookup();
  wireExport();
}

if (typeof document !== 'undefined' && document.getElementById('submit')) {
  void init();
}
