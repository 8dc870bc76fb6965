// Schema-driven validation of one measurement vector. The submit button
// stays disabled until every entry is valid for the declared kind.

import type { ValueKind } from "./api.js";

export interface ValidationResult {
  ok: boolean;
  values: number[];
  errors: string[];
}

export function validateValues(
  raw: Array<string | number | boolean>,
  kind: ValueKind,
  p: number,
): ValidationResult {
  const errors: string[] = [];
  if (raw.length !== p) {
    return { ok: false, values: [], errors: [`expected ${p} values, got ${raw.length}`] };
  }
  const values: number[] = [];
  raw.forEach((entry, idx) => {
    let num: number;
    if (typeof entry === "boolean") {
      num = entry ? 1 : 0;
    } else if (typeof entry === "number") {
      num = entry;
    } else {
      const text = entry.trim();
      if (text === "") {
        errors.push(`value ${idx} is empty`);
        values.push(NaN);
        return;
      }
      num = Number(text);
    }
    if (!Number.isFinite(num)) {
      errors.push(`value ${idx} is not a finite number`);
    } else if (kind === "binary" && num !== 0 && num !== 1) {
      errors.push(`value ${idx} must be 0 or 1`);
    }
    values.push(num);
  });
  return { ok: errors.length === 0, values, errors };
}

export function checkboxValues(checked: boolean[]): number[] {
  return checked.map((c) => (c ? 1 : 0));
}
