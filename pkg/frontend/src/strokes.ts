/**
 * Pointer capture for the design layers.
 *
 * Mouse buttons carry intent everywhere: the primary button adds
 * (scribble geometry, kept regions, painted content), the secondary button
 * removes (erased scribbles, dropped regions, paint-to-background). Other
 * buttons are ignored. Points clamp to the viewport because the server
 * rejects out-of-view coordinates.
 */

import type { StrokeJson, StrokeSetJson } from "./api.js";

export const PRIMARY_BUTTON = 0;
export const SECONDARY_BUTTON = 2;

export class StrokeCapture {
  private added: StrokeJson[] = [];
  private removed: StrokeJson[] = [];
  private current: { points: [number, number][]; erase: boolean } | null = null;

  constructor(
    public width: number,
    public height: number,
    public radius = 4,
  ) {}

  private clamp(x: number, y: number): [number, number] {
    return [
      Math.min(this.width - 1, Math.max(0, x)),
      Math.min(this.height - 1, Math.max(0, y)),
    ];
  }

  /** Start a stroke; returns false for buttons that carry no drawing intent. */
  begin(x: number, y: number, button: number): boolean {
    if (button !== PRIMARY_BUTTON && button !== SECONDARY_BUTTON) return false;
    this.current = { points: [this.clamp(x, y)], erase: button === SECONDARY_BUTTON };
    return true;
  }

  move(x: number, y: number): void {
    this.current?.points.push(this.clamp(x, y));
  }

  end(): void {
    if (this.current === null) return;
    const stroke: StrokeJson = { points: this.current.points, radius: this.radius };
    (this.current.erase ? this.removed : this.added).push(stroke);
    this.current = null;
  }

  cancel(): void {
    this.current = null;
  }

  get empty(): boolean {
    return this.added.length === 0 && this.removed.length === 0;
  }

  clear(): void {
    this.added = [];
    this.removed = [];
    this.current = null;
  }

  toJSON(): StrokeSetJson {
    return { add_strokes: [...this.added], remove_strokes: [...this.removed] };
  }

  /** Committed plus in-progress strokes, for live canvas feedback. */
  previewStrokes(): { points: [number, number][]; erase: boolean }[] {
    const out = [
      ...this.added.map((s) => ({ points: s.points, erase: false })),
      ...this.removed.map((s) => ({ points: s.points, erase: true })),
    ];
    if (this.current !== null) out.push({ points: this.current.points, erase: this.current.erase });
    return out;
  }
}

export interface BoxSelection {
  box: [number, number, number, number];
  intent: "keep" | "remove";
}

export class BoxCapture {
  private start: { x: number; y: number; intent: "keep" | "remove" } | null = null;
  private corner: { x: number; y: number } | null = null;

  constructor(
    public width: number,
    public height: number,
  ) {}

  begin(x: number, y: number, button: number): boolean {
    if (button !== PRIMARY_BUTTON && button !== SECONDARY_BUTTON) return false;
    this.start = { x, y, intent: button === SECONDARY_BUTTON ? "remove" : "keep" };
    this.corner = { x, y };
    return true;
  }

  drag(x: number, y: number): void {
    if (this.start !== null) this.corner = { x, y };
  }

  /** Finish the drag; degenerate (empty) boxes return null. */
  end(): BoxSelection | null {
    if (this.start === null || this.corner === null) return null;
    const left = Math.max(0, Math.round(Math.min(this.start.x, this.corner.x)));
    const top = Math.max(0, Math.round(Math.min(this.start.y, this.corner.y)));
    const right = Math.min(this.width, Math.round(Math.max(this.start.x, this.corner.x)));
    const bottom = Math.min(this.height, Math.round(Math.max(this.start.y, this.corner.y)));
    const intent = this.start.intent;
    this.start = null;
    this.corner = null;
    if (right <= left || bottom <= top) return null;
    return { box: [left, top, right, bottom], intent };
  }

  preview(): [number, number, number, number] | null {
    if (this.start === null || this.corner === null) return null;
    return [
      Math.min(this.start.x, this.corner.x),
      Math.min(this.start.y, this.corner.y),
      Math.max(this.start.x, this.corner.x),
      Math.max(this.start.y, this.corner.y),
    ];
  }
}
