/**
 * Design-layer panel: pick a layer, draw on the overlay, submit a modifier
 * job, and watch its progress without blocking the rest of the UI.
 *
 * Layers map to server modifier kinds:
 *   scribble -> text-scribble (freehand strokes guide generation)
 *   genai    -> grab-n-go     (box over a prior result keeps/removes a region)
 *   painting -> text-paint    (strokes become inpainting masks)
 */

import type { ApiClient, JobJson, ModifierKind, ModifierPayload } from "./api.js";
import { JobFailedError, pollJob } from "./jobs.js";
import type { DesignLayer } from "./session.js";
import { BoxCapture, StrokeCapture, type BoxSelection } from "./strokes.js";

export const LAYER_KINDS: Record<DesignLayer, ModifierKind> = {
  scribble: "text-scribble",
  genai: "grab-n-go",
  painting: "text-paint",
};

const LAYER_LABELS: Record<DesignLayer, string> = {
  scribble: "Scribble",
  genai: "GenAI object",
  painting: "Painting",
};

export interface ModifierPanelOptions {
  width: number;
  height: number;
  onDone: (job: JobJson) => void;
  onToast: (message: string, tone: "info" | "error") => void;
}

export class ModifierPanel {
  readonly element: HTMLDivElement;
  readonly overlay: HTMLCanvasElement;

  layer: DesignLayer = "scribble";

  private strokes: StrokeCapture;
  private boxes: BoxCapture;
  private selection: BoxSelection | null = null;
  private commentId: string | null = null;
  private drawing = false;
  private busy = false;

  private layerSelect: HTMLSelectElement;
  private promptInput: HTMLInputElement;
  private seedInput: HTMLInputElement;
  private stagingInput: HTMLInputElement;
  private priorSelect: HTMLSelectElement;
  private drawToggle: HTMLButtonElement;
  private submitButton: HTMLButtonElement;
  private status: HTMLSpanElement;

  constructor(
    private api: ApiClient,
    overlayHost: HTMLElement,
    private options: ModifierPanelOptions,
  ) {
    this.strokes = new StrokeCapture(options.width, options.height);
    this.boxes = new BoxCapture(options.width, options.height);

    this.overlay = document.createElement("canvas");
    this.overlay.className = "modifier-overlay";
    this.overlay.width = options.width;
    this.overlay.height = options.height;
    this.overlay.addEventListener("pointerdown", this.onDown);
    this.overlay.addEventListener("pointermove", this.onMove);
    this.overlay.addEventListener("pointerup", this.onUp);
    this.overlay.addEventListener("pointercancel", this.onUp);
    this.overlay.addEventListener("contextmenu", (e) => e.preventDefault());
    overlayHost.appendChild(this.overlay);

    this.element = document.createElement("div");
    this.element.className = "modifier-panel";

    this.layerSelect = document.createElement("select");
    for (const layer of Object.keys(LAYER_KINDS) as DesignLayer[]) {
      const option = document.createElement("option");
      option.value = layer;
      option.textContent = LAYER_LABELS[layer];
      this.layerSelect.appendChild(option);
    }
    this.layerSelect.addEventListener("change", () => {
      this.setLayer(this.layerSelect.value as DesignLayer);
    });

    this.promptInput = document.createElement("input");
    this.promptInput.type = "text";
    this.promptInput.placeholder = "prompt (defaults to comment text)";

    this.seedInput = document.createElement("input");
    this.seedInput.type = "number";
    this.seedInput.placeholder = "seed";
    this.seedInput.className = "seed-input";

    this.stagingInput = document.createElement("input");
    this.stagingInput.type = "checkbox";

    this.priorSelect = document.createElement("select");

    this.drawToggle = document.createElement("button");
    this.drawToggle.type = "button";
    this.drawToggle.textContent = "Draw";
    this.drawToggle.addEventListener("click", () => this.setDrawing(!this.drawing));

    const clearButton = document.createElement("button");
    clearButton.type = "button";
    clearButton.textContent = "Clear";
    clearButton.addEventListener("click", () => {
      this.strokes.clear();
      this.selection = null;
      this.redraw();
    });

    this.submitButton = document.createElement("button");
    this.submitButton.type = "button";
    this.submitButton.textContent = "Apply";
    this.submitButton.addEventListener("click", () => void this.submit());

    this.status = document.createElement("span");
    this.status.className = "modifier-status";

    this.element.append(
      labeled("Layer", this.layerSelect),
      labeled("Prompt", this.promptInput),
      labeled("Seed", this.seedInput),
      labeled("Stage object", this.stagingInput),
      labeled("Prior result", this.priorSelect),
      this.drawToggle,
      clearButton,
      this.submitButton,
      this.status,
    );

    this.setLayer("scribble");
    this.setComment(null, []);
  }

  setLayer(layer: DesignLayer): void {
    this.layer = layer;
    this.layerSelect.value = layer;
    this.strokes.clear();
    this.selection = null;
    const genai = layer === "genai";
    this.promptInput.disabled = genai;
    this.seedInput.disabled = genai;
    this.stagingInput.disabled = !genai;
    this.redraw();
  }

  /** Enable the panel for a comment and offer its attachments as priors. */
  setComment(commentId: string | null, attachments: string[]): void {
    this.commentId = commentId;
    const current = this.priorSelect.value;
    this.priorSelect.replaceChildren();
    const none = document.createElement("option");
    none.value = "";
    none.textContent = "(none)";
    this.priorSelect.appendChild(none);
    for (const id of attachments) {
      const option = document.createElement("option");
      option.value = id;
      option.textContent = id.slice(0, 8);
      this.priorSelect.appendChild(option);
    }
    // Keep the previous pick when it still exists, else default to the
    // newest attachment so chained edits build on the latest result.
    if (attachments.includes(current)) {
      this.priorSelect.value = current;
    } else if (attachments.length > 0) {
      this.priorSelect.value = attachments[attachments.length - 1]!;
    }
    this.submitButton.disabled = commentId === null || this.busy;
    if (commentId === null) this.setDrawing(false);
  }

  setDrawing(on: boolean): void {
    this.drawing = on;
    this.drawToggle.classList.toggle("active", on);
    this.overlay.classList.toggle("active", on);
  }

  private onDown = (event: PointerEvent) => {
    if (!this.drawing) return;
    event.preventDefault();
    const started =
      this.layer === "genai"
        ? this.boxes.begin(event.offsetX, event.offsetY, event.button)
        : this.strokes.begin(event.offsetX, event.offsetY, event.button);
    if (started) this.overlay.setPointerCapture(event.pointerId);
  };

  private onMove = (event: PointerEvent) => {
    if (!this.drawing) return;
    if (this.layer === "genai") {
      this.boxes.drag(event.offsetX, event.offsetY);
    } else {
      this.strokes.move(event.offsetX, event.offsetY);
    }
    this.redraw();
  };

  private onUp = () => {
    if (this.layer === "genai") {
      const picked = this.boxes.end();
      if (picked !== null) this.selection = picked;
    } else {
      this.strokes.end();
    }
    this.redraw();
  };

  private redraw(): void {
    const ctx = this.overlay.getContext("2d");
    if (ctx === null) return;
    ctx.clearRect(0, 0, this.overlay.width, this.overlay.height);
    ctx.lineCap = "round";
    ctx.lineJoin = "round";
    for (const stroke of this.strokes.previewStrokes()) {
      ctx.strokeStyle = stroke.erase ? "rgba(229,57,53,0.8)" : "rgba(76,175,80,0.8)";
      ctx.lineWidth = this.strokes.radius * 2;
      ctx.beginPath();
      const [first, ...rest] = stroke.points;
      if (first === undefined) continue;
      ctx.moveTo(first[0], first[1]);
      for (const [x, y] of rest) ctx.lineTo(x, y);
      if (rest.length === 0) ctx.lineTo(first[0] + 0.01, first[1]);
      ctx.stroke();
    }
    const box = this.boxes.preview() ?? this.selection?.box ?? null;
    if (box !== null) {
      ctx.setLineDash([6, 4]);
      ctx.lineWidth = 2;
      ctx.strokeStyle =
        this.selection?.intent === "remove" ? "rgba(229,57,53,0.9)" : "rgba(76,175,80,0.9)";
      ctx.strokeRect(box[0], box[1], box[2] - box[0], box[3] - box[1]);
      ctx.setLineDash([]);
    }
  }

  private buildPayload(): ModifierPayload | string {
    const kind = LAYER_KINDS[this.layer];
    const payload: ModifierPayload = { kind };
    const prompt = this.promptInput.value.trim();
    const seed = this.seedInput.value.trim();
    const prior = this.priorSelect.value;

    if (kind === "grab-n-go") {
      if (this.selection === null) return "drag a box over the region first";
      if (prior === "") return "grab-n-go needs a prior result to edit";
      payload.box = this.selection.box;
      payload.intent = this.selection.intent;
      payload.staging = this.stagingInput.checked;
      payload.prior = prior;
      return payload;
    }

    if (kind === "text-paint" && this.strokes.empty) {
      return "paint some strokes first";
    }
    if (!this.strokes.empty) payload.strokes = this.strokes.toJSON();
    if (prompt !== "") payload.prompt = prompt;
    if (seed !== "") payload.seed = Number.parseInt(seed, 10);
    if (prior !== "") payload.prior = prior;
    return payload;
  }

  async submit(): Promise<void> {
    if (this.commentId === null || this.busy) return;
    const built = this.buildPayload();
    if (typeof built === "string") {
      this.options.onToast(built, "error");
      return;
    }
    this.busy = true;
    this.submitButton.disabled = true;
    this.status.textContent = "submitting...";
    try {
      const job = await this.api.submitModifier(this.commentId, built);
      const done = await pollJob(this.api, job.id, {
        onProgress: (j) => {
          this.status.textContent = `${j.state} ${Math.round(j.progress * 100)}%`;
        },
      });
      this.status.textContent = "done";
      this.strokes.clear();
      this.selection = null;
      this.redraw();
      this.options.onDone(done);
    } catch (error) {
      const message = error instanceof JobFailedError ? error.message : String(error);
      this.status.textContent = "failed";
      this.options.onToast(message, "error");
    } finally {
      this.busy = false;
      this.submitButton.disabled = this.commentId === null;
    }
  }
}

function labeled(text: string, control: HTMLElement): HTMLLabelElement {
  const label = document.createElement("label");
  const caption = document.createElement("span");
  caption.textContent = text;
  label.append(caption, control);
  return label;
}
