/** Person lookup against the bundled corpus index.
 *
 * Selecting a suggestion inserts the exact person_id. Queries with no match
 * offer a "hypothetical person" entry so cold-start casts stay composable.
 */

export interface PersonIndexEntry {
  id: string;
  name: string;
}

export type Suggestion =
  | { kind: 'person'; id: string; name: string }
  | { kind: 'hypothetical'; name: string };

export const MIN_QUERY_LENGTH = 2;
export const MAX_SUGGESTIONS = 8;

export function personLookup(index: PersonIndexEntry[], query: string): Suggestion[] {
  const needle = query.trim().toLowerCase();
  if (needle.length < MIN_QUERY_LENGTH) {
    return [];
  }
  const matches = index
    .filter(
      (p) => p.name.toLowerCase().includes(needle) || p.id.toLowerCase() === needle,
    )
    .sort((a, b) => a.name.localeCompare(b.name) || a.id.localeCompare(b.id))
    .slice(0, MAX_SUGGESTIONS)
    .map((p): Suggestion => ({ kind: 'person', id: p.id, name: p.name }));
  if (matches.length === 0) {
    return [{ kind: 'hypothetical', name: query.trim() }];
  }
  return matches;
}

/** Trailing-edge debounce for input handlers. */
export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): (...args: A) => void {
  let timer: ReturnType<typeof setTimeout> | undefined;
  return (...args: A) => {
    if (timer !== undefined) {
      clearTimeout(timer);
    }
    timer = setTimeout(() => fn(...args), waitMs);
  };
}
