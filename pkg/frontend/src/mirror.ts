// Pure schematic renderer: a mirror frame becomes a deterministic list of
// draw operations. The canvas layer just replays the ops, which is what
// makes golden-replay testing possible without a browser.

import type { MirrorFrame, RoiDef } from "./types.js";

export interface ClearOp {
  op: "clear";
  width: number;
  height: number;
}
export interface RoiCircleOp {
  op: "roi_circle";
  id: string;
  cx: number;
  cy: number;
  r: number;
}
export interface RoiRectOp {
  op: "roi_rect";
  id: string;
  x: number;
  y: number;
  w: number;
  h: number;
}
export interface CursorOp {
  op: "cursor";
  x: number;
  y: number;
}
export interface ArrowOp {
  op: "arrow";
  dir: "left" | "right";
  x: number;
  y: number;
  length: number;
}
export interface FlashOp {
  op: "flash";
  color: "green" | "red";
}
export interface LabelOp {
  op: "label";
  text: string;
  x: number;
  y: number;
}

export type DrawOp =
  | ClearOp
  | RoiCircleOp
  | RoiRectOp
  | CursorOp
  | ArrowOp
  | FlashOp
  | LabelOp;

export const CANVAS_SIZE = 480;
const ARROW_LENGTH = 120;

// Scene coordinates span [-1, 1] on both axes with y pointing up; the
// canvas has y pointing down.
export function toCanvas(x: number, y: number, size: number = CANVAS_SIZE): [number, number] {
  const px = ((x + 1) / 2) * size;
  const py = ((1 - y) / 2) * size;
  return [round2(px), round2(py)];
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

function roiOps(roi: RoiDef, size: number): DrawOp {
  if (roi.shape.kind === "circle") {
    const [cx, cy] = toCanvas(roi.shape.cx, roi.shape.cy, size);
    return { op: "roi_circle", id: roi.id, cx, cy, r: round2((roi.shape.radius / 2) * size) };
  }
  const [x0, y0] = toCanvas(roi.shape.x_min, roi.shape.y_max, size); // top-left
  const [x1, y1] = toCanvas(roi.shape.x_max, roi.shape.y_min, size); // bottom-right
  return { op: "roi_rect", id: roi.id, x: x0, y: y0, w: round2(x1 - x0), h: round2(y1 - y0) };
}

const CUE_PHASES = new Set(["cue_head_turn", "cue_finger_point"]);

export function renderFrame(frame: MirrorFrame, size: number = CANVAS_SIZE): DrawOp[] {
  const ops: DrawOp[] = [{ op: "clear", width: size, height: size }];
  for (const roi of frame.rois) {
    ops.push(roiOps(roi, size));
  }
  if (CUE_PHASES.has(frame.phase) && frame.cue_side !== null) {
    // Arrow from the avatar's position toward the cued side.
    const [x, y] = toCanvas(0, 0.1, size);
    ops.push({
      op: "arrow",
      dir: frame.cue_side,
      x,
      y,
      length: round2((ARROW_LENGTH / CANVAS_SIZE) * size),
    });
  }
  if (frame.gaze !== null) {
    const [x, y] = toCanvas(frame.gaze.x, frame.gaze.y, size);
    ops.push({ op: "cursor", x, y });
  }
  if (frame.last_feedback !== null) {
    ops.push({ op: "flash", color: frame.last_feedback === "positive" ? "green" : "red" });
  }
  ops.push({ op: "label", text: frame.phase, x: 8, y: 16 });
  return ops;
}

/** Tracks whether the stream has gone quiet for longer than the threshold. */
export class StalenessTracker {
  private lastSeenAt: number | null = null;

  constructor(private thresholdMs: number = 3000) {}

  seen(nowMs: number): void {
    this.lastSeenAt = nowMs;
  }

  isStale(nowMs: number): boolean {
    return this.lastSeenAt !== null && nowMs - this.lastSeenAt > this.thresholdMs;
  }
}
