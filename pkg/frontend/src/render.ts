// DOM rendering for the annotation console. Everything renders
// server-confirmed state only; no optimistic updates.

import type { Estimate, MeasurementSchema, Proposal } from "./api.js";
import { binarizeRow } from "./session.js";

export function featureLabels(schema: MeasurementSchema): string[] {
  if (schema.feature_names && schema.feature_names.length === schema.p) {
    return schema.feature_names;
  }
  return Array.from({ length: schema.p }, (_, j) => `f${j}`);
}

export function renderProposal(container: HTMLElement, proposal: Proposal | null): void {
  container.innerHTML = "";
  if (proposal === null || proposal.vertex === null) {
    container.textContent = proposal?.status === "complete"
      ? "Session complete. Every budgeted measurement is in."
      : "Waiting for a proposal...";
    return;
  }
  const title = document.createElement("h3");
  const meta = proposal.vertex_meta ?? {};
  title.textContent = meta["label"] ?? `vertex #${proposal.vertex}`;
  container.appendChild(title);
  if (meta["image_url"]) {
    const img = document.createElement("img");
    img.src = meta["image_url"];
    img.alt = title.textContent ?? "";
    img.className = "proposal-image";
    container.appendChild(img);
  }
  const info = document.createElement("p");
  info.className = "proposal-info";
  const delta = proposal.delta === null ? "?" : proposal.delta.toPrecision(6);
  info.textContent = `vertex ${proposal.vertex} · benefit ${delta}`;
  container.appendChild(info);
}

/** Build the measurement inputs for the schema: number fields for real
 * values, a checkbox grid for binary multi-label vectors. */
export function renderInputs(
  container: HTMLElement,
  schema: MeasurementSchema,
  onInput: () => void,
): void {
  container.innerHTML = "";
  const labels = featureLabels(schema);
  labels.forEach((label, j) => {
    const wrap = document.createElement("label");
    wrap.className = "measurement-field";
    const caption = document.createElement("span");
    caption.textContent = label;
    const input = document.createElement("input");
    input.dataset.feature = String(j);
    if (schema.kind === "binary") {
      input.type = "checkbox";
    } else {
      input.type = "number";
      input.step = "any";
      input.placeholder = "0.0";
    }
    input.addEventListener("input", onInput);
    input.addEventListener("change", onInput);
    wrap.appendChild(caption);
    wrap.appendChild(input);
    container.appendChild(wrap);
  });
}

export function readInputs(
  container: HTMLElement,
  schema: MeasurementSchema,
): Array<string | boolean> {
  const inputs = Array.from(
    container.querySelectorAll<HTMLInputElement>("input[data-feature]"),
  );
  return inputs.map((el) => (schema.kind === "binary" ? el.checked : el.value));
}

export function clearInputs(container: HTMLElement): void {
  container
    .querySelectorAll<HTMLInputElement>("input[data-feature]")
    .forEach((el) => {
      if (el.type === "checkbox") el.checked = false;
      else el.value = "";
    });
}

export function renderProgress(el: HTMLElement, observed: number, budget: number): void {
  el.textContent = `${observed} / ${budget} observed`;
}

export interface SortSpec {
  column: number; // -1 sorts by vertex id
  descending: boolean;
}

/** Estimate table for unobserved vertices; rows whose thresholded values
 * changed since the last observation carry the `changed` class. */
export function renderEstimateTable(
  container: HTMLElement,
  estimate: Estimate | null,
  schema: MeasurementSchema,
  changedRows: number[],
  threshold: number,
  sort: SortSpec,
  onSort: (column: number) => void,
): void {
  container.innerHTML = "";
  if (estimate === null) {
    container.textContent = "No estimate yet.";
    return;
  }
  const changed = new Set(changedRows);
  const rows = estimate.values
    .map((values, vertex) => ({ vertex, values }))
    .filter((row) => !estimate.observed[row.vertex]);
  rows.sort((a, b) => {
    const key = (r: { vertex: number; values: number[] }) =>
      sort.column < 0 ? r.vertex : r.values[sort.column];
    const diff = key(a) - key(b);
    return sort.descending ? -diff : diff;
  });

  const table = document.createElement("table");
  table.className = "estimates";
  const head = document.createElement("tr");
  const labels = ["vertex", ...featureLabels(schema)];
  labels.forEach((label, idx) => {
    const th = document.createElement("th");
    th.textContent = label;
    const column = idx - 1;
    th.addEventListener("click", () => onSort(column));
    if (column === sort.column) {
      th.className = sort.descending ? "sorted-desc" : "sorted-asc";
    }
    head.appendChild(th);
  });
  table.appendChild(head);

  rows.forEach(({ vertex, values }) => {
    const tr = document.createElement("tr");
    if (changed.has(vertex)) tr.className = "changed";
    const id = document.createElement("td");
    id.textContent = String(vertex);
    tr.appendChild(id);
    const flags = binarizeRow(values, threshold);
    values.forEach((v, j) => {
      const td = document.createElement("td");
      td.textContent = v.toPrecision(4);
      if (flags[j] === 1) td.className = "above-threshold";
      tr.appendChild(td);
    });
    table.appendChild(tr);
  });
  container.appendChild(table);
}

export function setSubmitEnabled(button: HTMLButtonElement, enabled: boolean): void {
  button.disabled = !enabled;
}
