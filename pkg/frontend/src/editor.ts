/**
 * Comment drafting panel: a textarea feeding the idle trigger plus the
 * horizontal strip of suggested viewpoints that appears under it.
 */

import type { SuggestionJson } from "./api.js";
import { formatPose, fromAnchor } from "./orbit.js";
import type { EditorSession } from "./session.js";

export class SuggestionStrip {
  readonly element: HTMLDivElement;

  constructor(private onPick: (suggestion: SuggestionJson) => void) {
    this.element = document.createElement("div");
    this.element.className = "suggestion-strip";
    this.clear();
  }

  clear(): void {
    this.element.replaceChildren();
    this.element.dataset.state = "empty";
  }

  show(suggestions: SuggestionJson[]): void {
    this.element.replaceChildren();
    this.element.dataset.state = suggestions.length > 0 ? "ready" : "empty";
    for (const suggestion of suggestions) {
      const tile = document.createElement("button");
      tile.type = "button";
      tile.className = "suggestion-tile";
      tile.title = formatPose(fromAnchor(suggestion.viewpoint));
      if (suggestion.thumbnail !== null) {
        const img = document.createElement("img");
        img.loading = "lazy";
        img.alt = `suggested view #${suggestion.row}`;
        img.src = `data:image/png;base64,${suggestion.thumbnail}`;
        tile.appendChild(img);
      } else {
        tile.textContent = `#${suggestion.row}`;
      }
      tile.addEventListener("click", () => this.onPick(suggestion));
      this.element.appendChild(tile);
    }
  }
}

export interface CommentEditorOptions {
  placeholder?: string;
  onPick: (suggestion: SuggestionJson) => void;
}

/** Textarea + suggestion strip, bound to one EditorSession. */
export class CommentEditor {
  readonly element: HTMLDivElement;
  readonly textarea: HTMLTextAreaElement;
  readonly strip: SuggestionStrip;

  constructor(
    private session: EditorSession,
    options: CommentEditorOptions,
  ) {
    this.element = document.createElement("div");
    this.element.className = "comment-editor";

    this.textarea = document.createElement("textarea");
    this.textarea.placeholder = options.placeholder ?? "Describe the change you want...";
    this.textarea.rows = 3;
    this.textarea.addEventListener("input", () => {
      this.session.typed(this.textarea.value);
    });
    this.element.appendChild(this.textarea);

    this.strip = new SuggestionStrip(options.onPick);
    this.element.appendChild(this.strip.element);
  }

  /** Point the editor at a comment, seeding the textarea with its body. */
  open(commentId: string | null, body = ""): void {
    this.session.openComment(commentId);
    this.textarea.value = body;
    this.session.draft = body;
    this.strip.clear();
    this.textarea.disabled = commentId === null;
  }

  get draft(): string {
    return this.textarea.value;
  }
}
