// Operator console state: one session at a time, all transitions confirmed
// by server responses (no optimistic UI). The trial table survives
// connection loss; only a fresh session clears it.

import { SessionApi } from "./api.js";
import type { MirrorFrame, Phase, SessionForm } from "./types.js";
import { mergeTrials, TrialRow } from "./trialTable.js";
import { validateForm, isValid, FieldErrors } from "./validate.js";

export type ConnectionStatus = "idle" | "connecting" | "live" | "reconnecting" | "closed";

export interface ConsoleState {
  sessionId: string | null;
  phase: Phase | null;
  trials: TrialRow[];
  connection: ConnectionStatus;
  lastFrame: MirrorFrame | null;
  errors: FieldErrors;
  feedbackEnabled: boolean;
}

export class ConsoleSession {
  state: ConsoleState = {
    sessionId: null,
    phase: null,
    trials: [],
    connection: "idle",
    lastFrame: null,
    errors: {},
    feedbackEnabled: false,
  };
  onChange: (state: ConsoleState) => void = () => {};

  private pollTimer: ReturnType<typeof setInterval> | null = null;
  private streamAbort: AbortController | null = null;

  constructor(
    private api: SessionApi,
    private pollIntervalMs: number = 1000,
  ) {}

  private emit(): void {
    this.onChange(this.state);
  }

  /** Validate, create, start, and subscribe. Returns false on form errors. */
  async configureAndStart(form: SessionForm): Promise<boolean> {
    const errors = validateForm(form);
    this.state.errors = errors;
    if (!isValid(errors)) {
      this.emit();
      return false; // invalid form: no request leaves the console
    }
    this.state = {
      ...this.state,
      trials: [],
      phase: null,
      connection: "connecting",
      feedbackEnabled: false,
    };
    this.emit();
    const sessionId = await this.api.createSession(form);
    this.state.sessionId = sessionId;
    await this.api.start(sessionId);
    this.subscribe(sessionId);
    this.startPolling(sessionId);
    this.emit();
    return true;
  }

  private subscribe(sessionId: string): void {
    this.streamAbort = new AbortController();
    this.state.connection = "live";
    this.api
      .streamFrames(
        sessionId,
        (frame) => {
          this.state.lastFrame = frame;
          this.state.phase = frame.phase;
          if (frame.phase === "terminated") {
            this.state.feedbackEnabled = true;
            this.state.connection = "closed";
          }
          this.emit();
        },
        this.streamAbort.signal,
      )
      .then(() => {
        if (this.state.connection !== "closed") {
          // Stream ended without a terminal frame: show reconnect state but
          // keep the trial table intact.
          this.state.connection = "reconnecting";
          this.emit();
        }
      })
      .catch(() => {
        if (this.state.connection !== "closed") {
          this.state.connection = "reconnecting";
          this.emit();
        }
      });
  }

  private startPolling(sessionId: string): void {
    this.stopPolling();
    this.pollTimer = setInterval(() => {
      void this.pollOnce(sessionId);
    }, this.pollIntervalMs);
  }

  async pollOnce(sessionId: string): Promise<void> {
    const payload = await this.api.performance(sessionId);
    this.state.trials = mergeTrials(this.state.trials, payload);
    this.state.phase = payload.phase;
    if (payload.phase === "terminated") {
      this.state.feedbackEnabled = true;
      this.stopPolling();
    }
    this.emit();
  }

  async stopSession(): Promise<void> {
    if (this.state.sessionId === null) {
      return;
    }
    await this.api.stop(this.state.sessionId);
  }

  async submitFeedback(note: string): Promise<void> {
    if (this.state.sessionId === null || !this.state.feedbackEnabled) {
      throw new Error("feedback is only available after the session ends");
    }
    await this.api.submitFeedback(this.state.sessionId, note);
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  dispose(): void {
    this.stopPolling();
    this.streamAbort?.abort();
  }
}
