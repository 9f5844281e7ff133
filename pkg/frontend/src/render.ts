/** View-model construction and HTML rendering for the comparison board.
 *
 * Numbers pass through from service responses untouched; formatting happens
 * only at the HTML layer so the view model can be asserted exactly in tests.
 */

import {
  baselineOf,
  deltasVsBaseline,
  type BoardEntry,
  type ComparisonBoard,
} from './board';

export interface PredictionColumn {
  label: string;
  isBaseline: boolean;
  probabilities: Record<string, number>;
  decision: string;
  costSensitiveDecision?: string;
  roiEstimate: number;
  deltas: { probabilities: Record<string, number>; roi_estimate: number };
  coldStart: string[];
  topFeatures: { name: string; group: string; value: number }[];
}

export function columnsOf(board: ComparisonBoard, topK = 5): PredictionColumn[] {
  return board.entries.map((entry) => columnOf(board, entry, topK));
}

function columnOf(board: ComparisonBoard, entry: BoardEntry, topK: number): PredictionColumn {
  const p = entry.prediction;
  const flags: string[] = [];
  for (const name of p.cold_start.unknown_cast) {
    flags.push(`new face: ${name}`);
  }
  if (p.cold_start.unknown_director) {
    flags.push('new director');
  }
  if (p.cold_start.extrapolated_year) {
    flags.push('release year beyond corpus coverage');
  }
  return {
    label: entry.draft.label,
    isBaseline: entry.draft.clientId === baselineOf(board).draft.clientId,
    probabilities: { ...p.probabilities },
    decision: p.decision,
    costSensitiveDecision: p.cost_sensitive_decision,
    roiEstimate: p.roi_estimate,
    deltas: deltasVsBaseline(board, entry),
    coldStart: flags,
    topFeatures: [...p.features]
      .sort((a, b) => Math.abs(b.value) - Math.abs(a.value) || a.name.localeCompare(b.name))
      .slice(0, topK),
  };
}

const fmtProb = (v: number): string => `${(100 * v).toFixed(1)}%`;
const fmtDelta = (v: number): string => `${v >= 0 ? '+' : ''}${(100 * v).toFixed(1)}pp`;
const fmtRoi = (v: number): string => `${v >= 0 ? '+' : ''}${(100 * v).toFixed(1)}%`;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderBoardHtml(board: ComparisonBoard): string {
  const columns = columnsOf(board);
  const classes = Object.keys(columns[0].probabilities);
  const header = columns
    .map(
      (c) =>
        `<th class="${c.isBaseline ? 'baseline' : ''}">${escapeHtml(c.label)}` +
        (c.isBaseline ? ' <span class="tag">baseline</span>' : '') +
        '</th>',
    )
    .join('');
  const probRows = classes
    .map((cls) => {
      const cells = columns
        .map((c) => {
          const delta = c.isBaseline ? '' : ` <small>${fmtDelta(c.deltas.probabilities[cls])}</small>`;
          return `<td>${fmtProb(c.probabilities[cls])}${delta}</td>`;
        })
        .join('');
      return `<tr><th>${escapeHtml(cls)}</th>${cells}</tr>`;
    })
    .join('');
  const decisionRow = columns
    .map((c) => `<td>${escapeHtml(c.costSensitiveDecision ?? c.decision)}</td>`)
    .join('');
  const roiRow = columns
    .map((c) => {
      const delta = c.isBaseline ? '' : ` <small>${fmtRoi(c.deltas.roi_estimate)}</small>`;
      return `<td>${fmtRoi(c.roiEstimate)}${delta}</td>`;
    })
    .join('');
  const flagsRow = columns
    .map((c) => `<td>${c.coldStart.map(escapeHtml).join('<br>') || '&mdash;'}</td>`)
    .join('');
  return [
    '<table class="board">',
    `<thead><tr><th></th>${header}</tr></thead>`,
    '<tbody>',
    probRows,
    `<tr><th>decision</th>${decisionRow}</tr>`,
    `<tr><th>ROI estimate</th>${roiRow}</tr>`,
    `<tr><th>flags</th>${flagsRow}</tr>`,
    '</tbody></table>',
  ].join('\n');
}
