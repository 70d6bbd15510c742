// Wire types matching the session service's published JSON schemas.

export type Side = "left" | "right";

export type Phase =
  | "created"
  | "await_eye_contact"
  | "cue_head_turn"
  | "cue_finger_point"
  | "await_response"
  | "feedback"
  | "done"
  | "terminated";

export interface CircleShape {
  kind: "circle";
  cx: number;
  cy: number;
  radius: number;
}

export interface RectShape {
  kind: "rect";
  x_min: number;
  y_min: number;
  x_max: number;
  y_max: number;
}

export interface RoiDef {
  id: string;
  shape: CircleShape | RectShape;
}

export interface MirrorFrame {
  schema_version: "1";
  t_ms: number;
  phase: Phase;
  rois: RoiDef[];
  gaze: { x: number; y: number } | null;
  cue_side: Side | null;
  last_feedback: "positive" | "negative" | null;
}

export interface TrialRecordWire {
  trial_index: number;
  left_object_id: string;
  right_object_id: string;
  target_side: Side;
  cued_side: Side;
  stimulus_onset_s: number;
  eye_contact_registered_s: number | null;
  cue_start_s: number | null;
  cue_end_s: number | null;
  response_registered_s: number | null;
  responded_side: Side | null;
  t_ec_s: number | null;
  t_rr_s: number | null;
  correct: boolean | null;
  done: boolean;
}

export interface PerformancePayload {
  schema_version: "1";
  session_id: string;
  participant: {
    participant_id: string;
    group: "ASD" | "NT";
    age_years: number;
    cars_score: number;
    synthetic: boolean;
  };
  phase: Phase;
  trials: TrialRecordWire[];
  last_update_ms: number;
}

// Operator-editable form state: the four task parameters plus seed/profile.
export interface SessionForm {
  eye_contact_dwell_ms: number;
  response_dwell_ms: number;
  cue_duration_ms: number;
  trials_per_session: number;
  rng_seed: number;
  profile: string; // preset name
  timing_mode: "fast" | "real";
}

export const DEFAULT_FORM: SessionForm = {
  eye_contact_dwell_ms: 2000,
  response_dwell_ms: 2000,
  cue_duration_ms: 5000,
  trials_per_session: 2,
  rng_seed: 0,
  profile: "NT_VR",
  timing_mode: "real",
};
