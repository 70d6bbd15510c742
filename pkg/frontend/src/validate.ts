// Client-side validation mirroring the service's config invariants, so bad
// forms are rejected inline and no request is sent.

import type { SessionForm } from "./types.js";

export type FieldErrors = Partial<Record<keyof SessionForm, string>>;

export function validateForm(form: SessionForm): FieldErrors {
  const errors: FieldErrors = {};
  const positiveDurations: (keyof SessionForm)[] = [
    "eye_contact_dwell_ms",
    "response_dwell_ms",
    "cue_duration_ms",
  ];
  for (const field of positiveDurations) {
    const value = form[field] as number;
    if (!Number.isFinite(value) || value <= 0) {
      errors[field] = "must be a positive duration in ms";
    }
  }
  if (!Number.isInteger(form.trials_per_session) || form.trials_per_session < 1) {
    errors.trials_per_session = "must be an integer ≥ 1";
  }
  if (!Number.isInteger(form.rng_seed)) {
    errors.rng_seed = "must be an integer";
  }
  if (form.profile.trim() === "") {
    errors.profile = "choose a behaviour profile";
  }
  if (form.timing_mode !== "fast" && form.timing_mode !== "real") {
    errors.timing_mode = "must be 'fast' or 'real'";
  }
  return errors;
}

export function isValid(errors: FieldErrors): boolean {
  return Object.keys(errors).length === 0;
}
