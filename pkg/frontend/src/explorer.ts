/**
 * Server-rendered 3D explorer.
 *
 * The backend rasterizer is the single source of pixels, so the explorer
 * keeps only an orbit pose, fetches a fresh frame after each gesture, and
 * never blocks: frames carry a sequence number and stale ones are dropped,
 * exactly like suggestion responses.
 */

import type { ApiClient } from "./api.js";
import { DEFAULT_POSE, formatPose, pan, rotate, zoom, type OrbitPose } from "./orbit.js";

export interface ExplorerOptions {
  width?: number;
  height?: number;
  onPoseChange?: (pose: OrbitPose) => void;
}

export class OrbitExplorer {
  pose: OrbitPose = { ...DEFAULT_POSE, target: [...DEFAULT_POSE.target] };

  readonly viewport: HTMLDivElement;
  private image: HTMLImageElement;
  private readout: HTMLDivElement;
  private width: number;
  private height: number;
  private frameSeq = 0;
  private refreshTimer: ReturnType<typeof setTimeout> | null = null;
  private objectUrl: string | null = null;
  private dragging: { button: number; x: number; y: number; shift: boolean } | null = null;
  private onPoseChange?: (pose: OrbitPose) => void;

  constructor(
    container: HTMLElement,
    private api: ApiClient,
    private projectId: string,
    options: ExplorerOptions = {},
  ) {
    this.width = options.width ?? 512;
    this.height = options.height ?? 512;
    this.onPoseChange = options.onPoseChange;

    this.viewport = document.createElement("div");
    this.viewport.className = "explorer";
    this.viewport.style.width = `${this.width}px`;
    this.viewport.style.height = `${this.height}px`;

    this.image = document.createElement("img");
    this.image.className = "explorer-frame";
    this.image.width = this.width;
    this.image.height = this.height;
    this.image.draggable = false;
    this.viewport.appendChild(this.image);

    this.readout = document.createElement("div");
    this.readout.className = "explorer-readout";
    this.viewport.appendChild(this.readout);

    this.viewport.addEventListener("pointerdown", this.onDown);
    this.viewport.addEventListener("pointermove", this.onMove);
    this.viewport.addEventListener("pointerup", this.onUp);
    this.viewport.addEventListener("pointercancel", this.onUp);
    this.viewport.addEventListener("wheel", this.onWheel, { passive: false });
    this.viewport.addEventListener("contextmenu", (e) => e.preventDefault());

    container.appendChild(this.viewport);
    this.refresh();
  }

  getPose(): OrbitPose {
    return { ...this.pose, target: [...this.pose.target] };
  }

  snapTo(pose: OrbitPose): void {
    this.pose = { ...pose, target: [...pose.target] };
    this.refresh();
  }

  private onDown = (event: PointerEvent) => {
    this.viewport.setPointerCapture(event.pointerId);
    this.dragging = { button: event.button, x: event.clientX, y: event.clientY, shift: event.shiftKey };
  };

  private onMove = (event: PointerEvent) => {
    if (this.dragging === null) return;
    const dx = event.clientX - this.dragging.x;
    const dy = event.clientY - this.dragging.y;
    this.dragging.x = event.clientX;
    this.dragging.y = event.clientY;
    // Secondary button or shift-drag pans; primary orbits.
    if (this.dragging.button === 2 || this.dragging.shift) {
      this.pose = pan(this.pose, dx, dy);
    } else {
      this.pose = rotate(this.pose, dx, dy);
    }
    this.scheduleRefresh();
  };

  private onUp = () => {
    this.dragging = null;
    this.scheduleRefresh(0);
  };

  private onWheel = (event: WheelEvent) => {
    event.preventDefault();
    this.pose = zoom(this.pose, event.deltaY > 0 ? 1.1 : 1 / 1.1);
    this.scheduleRefresh();
  };

  /** Coalesce gesture updates so at most ~12 renders/second hit the server. */
  private scheduleRefresh(delayMs = 80): void {
    this.readout.textContent = formatPose(this.pose);
    this.onPoseChange?.(this.getPose());
    if (this.refreshTimer !== null) return;
    this.refreshTimer = setTimeout(() => {
      this.refreshTimer = null;
      this.refresh();
    }, delayMs);
  }

  refresh(): void {
    this.readout.textContent = formatPose(this.pose);
    const seq = ++this.frameSeq;
    this.api
      .renderView(this.projectId, this.pose, this.width, this.height)
      .then((blob) => {
        if (seq !== this.frameSeq) return; // a newer frame is already on its way
        const url = URL.createObjectURL(blob);
        if (this.objectUrl !== null) URL.revokeObjectURL(this.objectUrl);
        this.objectUrl = url;
        this.image.src = url;
      })
      .catch(() => {
        if (seq === this.frameSeq) this.readout.textContent = "render failed";
      });
  }

  dispose(): void {
    if (this.refreshTimer !== null) clearTimeout(this.refreshTimer);
    if (this.objectUrl !== null) URL.revokeObjectURL(this.objectUrl);
    this.viewport.remove();
  }
}
