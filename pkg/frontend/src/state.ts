/**
 * Form state: 11 editable numeric fields built from the service schema.
 * Text is the source of truth; a field is valid when its text parses to a
 * finite number.  Loading a Pareto decision writes String(value) so the
 * round trip form -> request -> form preserves values exactly.
 */
import type { ColumnInfo, SchemaResponse } from './api.js';

export interface FieldState {
  info: ColumnInfo;
  text: string;
  extrapolated: boolean;
}

export function buildForm(schema: SchemaResponse): FieldState[] {
  return schema.features.map((info) => ({
    info,
    text: '',
    extrapolated: false,
  }));
}

export function fieldNumber(field: FieldState): number | null {
  const trimmed = field.text.trim();
  if (trimmed === '') return null;
  const value = Number(trimmed);
  return Number.isFinite(value) ? value : null;
}

export function formValid(fields: FieldState[]): boolean {
  return fields.every((f) => fieldNumber(f) !== null);
}

export function formValues(fields: FieldState[]): Record<string, number> {
  const out: Record<string, number> = {};
  for (const f of fields) {
    const value = fieldNumber(f);
    if (value === null) throw new Error(`field ${f.info.key} is not numeric`);
    out[f.info.key] = value;
  }
  return out;
}

export function loadDecision(fields: FieldState[], decision: Record<string, number>): void {
  for (const f of fields) {
    if (f.info.key in decision) {
      f.text = String(decision[f.info.key]);
      f.extrapolated = false;
    }
  }
}

export function applyExtrapolationFlags(
  fields: FieldState[],
  flags: Record<string, boolean>,
): void {
  for (const f of fields) {
    f.extrapolated = Boolean(flags[f.info.key]);
  }
}

export function midpoints(fields: FieldState[]): void {
  for (const f of fields) {
    f.text = String((f.info.min + f.info.max) / 2);
    f.extrapolated = false;
  }
}

/** Monotone sequence counters so stale responses are discarded per flow. */
export class FlowGate {
  private counter = 0;

  next(): number {
    return ++this.counter;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.counter;
  }
}
