// The trial table is derived from the polled performance payload alone;
// the mirror stream is presentation-only and never feeds it.

import type { PerformancePayload, TrialRecordWire } from "./types.js";

export interface TrialRow {
  index: number;
  tEcSeconds: number | null;
  tRrSeconds: number | null;
  respondedSide: string;
  correct: "yes" | "no" | "-";
}

export function toRow(trial: TrialRecordWire): TrialRow {
  return {
    index: trial.trial_index,
    tEcSeconds: trial.t_ec_s,
    tRrSeconds: trial.t_rr_s,
    respondedSide: trial.responded_side ?? "-",
    correct: trial.correct === null ? "-" : trial.correct ? "yes" : "no",
  };
}

/**
 * Append-only merge: published records never change, so an already seen
 * index must be identical to what the server sends now.
 */
export function mergeTrials(
  existing: TrialRow[],
  payload: PerformancePayload,
): TrialRow[] {
  const rows = payload.trials.map(toRow);
  if (rows.length < existing.length) {
    throw new Error(
      `trial table shrank: had ${existing.length} rows, payload has ${rows.length}`,
    );
  }
  for (let i = 0; i < existing.length; i++) {
    if (JSON.stringify(existing[i]) !== JSON.stringify(rows[i])) {
      throw new Error(`published trial ${existing[i]!.index} changed after the fact`);
    }
  }
  return rows;
}
