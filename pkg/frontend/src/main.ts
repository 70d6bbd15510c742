// DOM wiring: form, mirror canvas, trial table, feedback box.

import { SessionApi } from "./api.js";
import { ConsoleSession, ConsoleState } from "./console.js";
import { CANVAS_SIZE, DrawOp, renderFrame, StalenessTracker } from "./mirror.js";
import { DEFAULT_FORM, SessionForm } from "./types.js";

const api = new SessionApi("");
const session = new ConsoleSession(api);
const staleness = new StalenessTracker(3000);

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function readForm(): SessionForm {
  return {
    eye_contact_dwell_ms: Number(el<HTMLInputElement>("eye-contact-dwell").value),
    response_dwell_ms: Number(el<HTMLInputElement>("response-dwell").value),
    cue_duration_ms: Number(el<HTMLInputElement>("cue-duration").value),
    trials_per_session: Number(el<HTMLInputElement>("trials").value),
    rng_seed: Number(el<HTMLInputElement>("seed").value),
    profile: el<HTMLSelectElement>("profile").value,
    timing_mode: el<HTMLSelectElement>("timing").value as SessionForm["timing_mode"],
  };
}

function paint(ops: DrawOp[]): void {
  const canvas = el<HTMLCanvasElement>("mirror");
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  for (const op of ops) {
    switch (op.op) {
      case "clear":
        ctx.clearRect(0, 0, op.width, op.height);
        ctx.fillStyle = "#101418";
        ctx.fillRect(0, 0, op.width, op.height);
        break;
      case "roi_circle":
        ctx.strokeStyle = "#7fb2ff";
        ctx.lineWidth = 2;
        ctx.beginPath();
        ctx.arc(op.cx, op.cy, op.r, 0, Math.PI * 2);
        ctx.stroke();
        break;
      case "roi_rect":
        ctx.strokeStyle = "#7fb2ff";
        ctx.lineWidth = 2;
        ctx.strokeRect(op.x, op.y, op.w, op.h);
        break;
      case "cursor":
        ctx.fillStyle = "#ffd866";
        ctx.beginPath();
        ctx.arc(op.x, op.y, 5, 0, Math.PI * 2);
        ctx.fill();
        break;
      case "arrow": {
        const sign = op.dir === "left" ? -1 : 1;
        ctx.strokeStyle = "#ff9e64";
        ctx.lineWidth = 4;
        ctx.beginPath();
        ctx.moveTo(op.x, op.y);
        ctx.lineTo(op.x + sign * op.length, op.y);
        ctx.lineTo(op.x + sign * (op.length - 12), op.y - 8);
        ctx.moveTo(op.x + sign * op.length, op.y);
        ctx.lineTo(op.x + sign * (op.length - 12), op.y + 8);
        ctx.stroke();
        break;
      }
      case "flash":
        ctx.strokeStyle = op.color === "green" ? "#9ece6a" : "#f7768e";
        ctx.lineWidth = 10;
        ctx.strokeRect(0, 0, CANVAS_SIZE, CANVAS_SIZE);
        break;
      case "label":
        ctx.fillStyle = "#c0caf5";
        ctx.font = "13px monospace";
        ctx.fillText(op.text, op.x, op.y);
        break;
    }
  }
}

function renderState(state: ConsoleState): void {
  el("phase-chip").textContent = state.phase ?? "idle";
  el("connection").textContent = state.connection;
  el("session-id").textContent = state.sessionId ?? "-";
  el<HTMLButtonElement>("stop").disabled = state.sessionId === null || state.feedbackEnabled;
  el<HTMLButtonElement>("send-feedback").disabled = !state.feedbackEnabled;
  const tbody = el<HTMLTableSectionElement>("trial-rows");
  tbody.innerHTML = "";
  for (const row of state.trials) {
    const tr = document.createElement("tr");
    const fmt = (v: number | null) => (v === null ? "-" : v.toFixed(3));
    for (const cell of [String(row.index), fmt(row.tEcSeconds), fmt(row.tRrSeconds),
                        row.respondedSide, row.correct]) {
      const td = document.createElement("td");
      td.textContent = cell;
      tr.appendChild(td);
    }
    tbody.appendChild(tr);
  }
  for (const [field, message] of Object.entries(state.errors)) {
    const slot = document.getElementById(`error-${field}`);
    if (slot !== null) {
      slot.textContent = message ?? "";
    }
  }
  if (state.lastFrame !== null) {
    staleness.seen(Date.now());
    paint(renderFrame(state.lastFrame));
  }
}

session.onChange = renderState;

setInterval(() => {
  el("staleness").textContent = staleness.isStale(Date.now()) ? "stream stalled" : "";
}, 500);

el<HTMLButtonElement>("start").addEventListener("click", () => {
  document.querySelectorAll("[id^=error-]").forEach((node) => (node.textContent = ""));
  void session.configureAndStart(readForm());
});

el<HTMLButtonElement>("stop").addEventListener("click", () => {
  void session.stopSession();
});

el<HTMLButtonElement>("send-feedback").addEventListener("click", async () => {
  await session.submitFeedback(el<HTMLTextAreaElement>("feedback-note").value);
  el("feedback-status").textContent = "stored";
});

el<HTMLButtonElement>("download-log").addEventListener("click", async () => {
  if (session.state.sessionId === null) {
    return;
  }
  const log = await api.downloadLog(session.state.sessionId);
  const blob = new Blob([JSON.stringify(log, null, 2)], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = `${session.state.sessionId}.json`;
  link.click();
});

// Prefill the form with the task defaults.
el<HTMLInputElement>("eye-contact-dwell").value = String(DEFAULT_FORM.eye_contact_dwell_ms);
el<HTMLInputElement>("response-dwell").value = String(DEFAULT_FORM.response_dwell_ms);
el<HTMLInputElement>("cue-duration").value = String(DEFAULT_FORM.cue_duration_ms);
el<HTMLInputElement>("trials").value = String(DEFAULT_FORM.trials_per_session);
el<HTMLInputElement>("seed").value = String(DEFAULT_FORM.rng_seed);
