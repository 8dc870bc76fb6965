// Console-side view of one measurement session. Pure client of the HTTP
// API: it never decides which vertex comes next, it only renders what the
// server proposes and reports which estimate rows flipped after each
// observation.

import { ApiClient, ApiError } from "./api.js";
import type { Estimate, MeasurementSchema, Proposal } from "./api.js";
import { validateValues } from "./validate.js";

export interface SubmitOutcome {
  submitted: boolean;
  errors: string[];
  refreshed: boolean;
}

export class ConsoleSession {
  proposal: Proposal | null = null;
  estimate: Estimate | null = null;
  changedRows: number[] = [];
  observedCount = 0;
  status = "awaiting_observation";
  notice: string | null = null;

  constructor(
    readonly api: ApiClient,
    readonly sessionId: string,
    readonly schema: MeasurementSchema,
    readonly budget: number,
    readonly threshold = 0.15,
  ) {}

  get complete(): boolean {
    return this.status === "complete";
  }

  async start(): Promise<void> {
    await this.refreshProposal();
    this.estimate = await this.api.estimate(this.sessionId);
    this.observedCount = this.estimate.observed.filter(Boolean).length;
  }

  async refreshProposal(): Promise<void> {
    this.proposal = await this.api.next(this.sessionId);
    this.status = this.proposal.status;
  }

  /** Validate and submit one measurement for the proposed vertex. On a 409
   * (someone else advanced the session) the proposal refreshes instead. */
  async submit(raw: Array<string | number | boolean>): Promise<SubmitOutcome> {
    const check = validateValues(raw, this.schema.kind, this.schema.p);
    if (!check.ok) {
      this.notice = check.errors.join("; ");
      return { submitted: false, errors: check.errors, refreshed: false };
    }
    if (this.proposal === null || this.proposal.vertex === null) {
      this.notice = "no vertex is awaiting a measurement";
      return { submitted: false, errors: [this.notice], refreshed: false };
    }
    try {
      const result = await this.api.observe(
        this.sessionId,
        this.proposal.vertex,
        check.values,
      );
      this.status = result.status;
      this.observedCount = result.observed_count;
      this.proposal = {
        vertex: result.vertex,
        vertex_meta: result.vertex_meta,
        delta: result.delta,
        status: result.status,
      };
      this.notice = null;
      await this.refreshEstimate();
      return { submitted: true, errors: [], refreshed: false };
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        await this.refreshProposal();
        this.notice = "proposal was stale; refreshed";
        return { submitted: false, errors: [err.message], refreshed: true };
      }
      throw err;
    }
  }

  /** Fetch the latest estimate and mark rows whose thresholded values
   * changed since the previous one. */
  async refreshEstimate(): Promise<void> {
    const previous = this.estimate;
    this.estimate = await this.api.estimate(this.sessionId);
    this.changedRows = changedRowIndices(previous, this.estimate, this.threshold);
  }
}

export function binarizeRow(row: number[], threshold: number): number[] {
  return row.map((v) => (v > threshold ? 1 : 0));
}

export function changedRowIndices(
  previous: Estimate | null,
  current: Estimate,
  threshold: number,
): number[] {
  if (previous === null) {
    return current.values.map((_, i) => i);
  }
  const changed: number[] = [];
  current.values.forEach((row, i) => {
    const before = binarizeRow(previous.values[i] ?? [], threshold);
    const after = binarizeRow(row, threshold);
    if (
      before.length !== after.length ||
      after.some((v, j) => v !== before[j])
    ) {
      changed.push(i);
    }
  });
  return changed;
}
