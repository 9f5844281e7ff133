/** Client-side scenario validation mirroring the server's 400 schema. */

import type { FieldError, ScenarioDraft, ScenarioRequest } from './types';

export const ADAPTATION_KINDS = ['comic', 'true_story', 'book'] as const;

const ISO_DATE = /^\d{4}-\d{2}-\d{2}$/;

/** True for real calendar dates; Date.parse alone rolls 2003-02-30 into March. */
function isCalendarDate(text: string): boolean {
  if (!ISO_DATE.test(text)) {
    return false;
  }
  const parsed = new Date(`${text}T00:00:00Z`);
  return !Number.isNaN(parsed.getTime()) && parsed.toISOString().slice(0, 10) === text;
}

export function validateRequest(request: ScenarioRequest): FieldError[] {
  const errors: FieldError[] = [];
  const cast = request.cast.map((c) => c.trim()).filter((c) => c.length > 0);
  if (cast.length === 0) {
    errors.push({ field: 'cast', message: 'at least one cast member is required' });
  }
  if (new Set(cast).size !== cast.length) {
    errors.push({ field: 'cast', message: 'cast members must be unique' });
  }
  if (request.genres.length === 0) {
    errors.push({ field: 'genres', message: 'at least one genre is required' });
  }
  if (request.budget_usd != null && request.budget_usd <= 0) {
    errors.push({ field: 'budget_usd', message: 'budget_usd must be positive' });
  }
  if (!request.planned_release_date) {
    errors.push({
      field: 'planned_release_date',
      message: 'planned_release_date is required',
    });
  } else if (!isCalendarDate(request.planned_release_date)) {
    errors.push({
      field: 'planned_release_date',
      message: 'planned_release_date must be an ISO date (YYYY-MM-DD)',
    });
  }
  for (const kind of request.adaptation) {
    if (!(ADAPTATION_KINDS as readonly string[]).includes(kind)) {
      errors.push({ field: 'adaptation', message: `unknown adaptation kind '${kind}'` });
    }
  }
  return errors;
}

export function validateDraft(draft: ScenarioDraft): FieldError[] {
  return validateRequest(draft.request);
}

/** True when the draft may be submitted; callers render errors otherwise. */
export function canSubmit(draft: ScenarioDraft): boolean {
  return validateDraft(draft).length === 0;
}

/** The request a draft serializes to; never loses or invents fields. */
export function toRequest(draft: ScenarioDraft): ScenarioRequest {
  return { ...draft.request, cast: [...draft.request.cast] };
}
