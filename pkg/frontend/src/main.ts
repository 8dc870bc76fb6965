// Wiring: create or resume a session, poll the proposal, submit
// measurements, refresh the estimate table.

import { ApiClient } from "./api.js";
import type { MeasurementSchema, ValueKind } from "./api.js";
import { ConsoleSession } from "./session.js";
import {
  clearInputs,
  readInputs,
  renderEstimateTable,
  renderInputs,
  renderProgress,
  renderProposal,
  setSubmitEnabled,
  type SortSpec,
} from "./render.js";
import { validateValues } from "./validate.js";

const POLL_MS = 3000;

const $ = <T extends HTMLElement>(id: string): T => {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
};

let session: ConsoleSession | null = null;
let sort: SortSpec = { column: -1, descending: false };
let pollTimer: number | undefined;

function threshold(): number {
  const raw = Number(($("threshold") as HTMLInputElement).value);
  return Number.isFinite(raw) ? raw : 0.15;
}

function redraw(): void {
  if (!session) return;
  renderProposal($("proposal"), session.proposal);
  renderProgress($("progress"), session.observedCount, session.budget);
  $("notice").textContent = session.notice ?? "";
  renderEstimateTable(
    $("estimate-table"),
    session.estimate,
    session.schema,
    session.changedRows,
    session.threshold,
    sort,
    (column) => {
      sort = {
        column,
        descending: sort.column === column ? !sort.descending : false,
      };
      redraw();
    },
  );
  const form = $("measurement-form");
  form.style.display = session.complete ? "none" : "";
  refreshSubmitState();
}

function refreshSubmitState(): void {
  if (!session) return;
  const raw = readInputs($("inputs"), session.schema);
  const check = validateValues(raw, session.schema.kind, session.schema.p);
  setSubmitEnabled($("submit") as HTMLButtonElement, check.ok && !session.complete);
}

async function attach(sessionId: string, schema: MeasurementSchema, budget: number) {
  const api = new ApiClient("");
  session = new ConsoleSession(api, sessionId, schema, budget, threshold());
  await session.start();
  await session.refreshEstimate();
  renderInputs($("inputs"), schema, refreshSubmitState);
  $("setup").style.display = "none";
  $("workbench").style.display = "";
  if (pollTimer !== undefined) window.clearInterval(pollTimer);
  pollTimer = window.setInterval(async () => {
    if (!session || session.complete) return;
    await session.refreshProposal();
    redraw();
  }, POLL_MS);
  redraw();
}

async function createSession(): Promise<void> {
  const api = new ApiClient("");
  const schema: MeasurementSchema = {
    p: Number(($("schema-p") as HTMLInputElement).value),
    kind: ($("schema-kind") as HTMLSelectElement).value as ValueKind,
  };
  const budget = Number(($("budget") as HTMLInputElement).value);
  const created = await api.createSession({
    graph: ($("graph-path") as HTMLInputElement).value,
    meta: ($("meta-path") as HTMLInputElement).value || null,
    k: Number(($("band") as HTMLInputElement).value),
    xi: Number(($("xi") as HTMLInputElement).value),
    alpha: Number(($("alpha") as HTMLInputElement).value),
    m: budget,
    schema,
  });
  ($("session-id") as HTMLInputElement).value = created.id;
  await attach(created.id, schema, budget);
}

async function resumeSession(): Promise<void> {
  const api = new ApiClient("");
  const sid = ($("session-id") as HTMLInputElement).value.trim();
  const state = await api.state(sid);
  await attach(sid, state.schema, state.m);
}

async function submit(): Promise<void> {
  if (!session) return;
  const raw = readInputs($("inputs"), session.schema);
  const outcome = await session.submit(raw);
  if (outcome.submitted) clearInputs($("inputs"));
  redraw();
}

function guard(action: () => Promise<void>): () => void {
  return () => {
    action().catch((err) => {
      $("notice").textContent = String(err instanceof Error ? err.message : err);
    });
  };
}

export function init(): void {
  $("create").addEventListener("click", guard(createSession));
  $("resume").addEventListener("click", guard(resumeSession));
  $("submit").addEventListener("click", guard(submit));
}

if (typeof document !== "undefined" && document.getElementById("create")) {
  init();
}
