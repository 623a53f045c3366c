/**
 * Editing state for one open comment, including the typing idle trigger.
 *
 * Suggestion requests fire exactly idleMs after the last keystroke and are
 * cancelled by further input, so continuous typing never hits the network.
 * Each fired request takes a sequence number; a response is applied only if
 * no newer request has started since (locally) and the server did not flag
 * it superseded, so the latest draft's suggestions always win no matter how
 * responses interleave.
 */

import type { SuggestResponse, SuggestionJson } from "./api.js";

export type DesignLayer = "scribble" | "genai" | "painting";

export interface SuggestApi {
  suggest(commentId: string, text: string, k?: number): Promise<SuggestResponse>;
}

export interface EditorSessionOptions {
  idleMs?: number;
  k?: number;
  onSuggestions?: (suggestions: SuggestionJson[]) => void;
  onError?: (error: unknown) => void;
}

export class EditorSession {
  projectId: string;
  commentId: string | null = null;
  draft = "";
  layer: DesignLayer = "scribble";
  suggestions: SuggestionJson[] = [];

  private readonly idleMs: number;
  private readonly k: number | undefined;
  private readonly onSuggestions?: (suggestions: SuggestionJson[]) => void;
  private readonly onError?: (error: unknown) => void;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private seq = 0;

  constructor(
    private api: SuggestApi,
    projectId: string,
    options: EditorSessionOptions = {},
  ) {
    this.projectId = projectId;
    this.idleMs = options.idleMs ?? 500;
    this.k = options.k;
    this.onSuggestions = options.onSuggestions;
    this.onError = options.onError;
  }

  openComment(commentId: string | null): void {
    this.cancelPending();
    this.commentId = commentId;
    this.draft = "";
    this.suggestions = [];
  }

  /** Record a keystroke: restart the idle countdown for the new draft. */
  typed(text: string): void {
    this.draft = text;
    this.cancelPending();
    if (this.commentId === null || text.trim() === "") return;
    this.timer = setTimeout(() => {
      this.timer = null;
      void this.requestSuggestions();
    }, this.idleMs);
  }

  get pending(): boolean {
    return this.timer !== null;
  }

  private cancelPending(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
  }

  private async requestSuggestions(): Promise<void> {
    const commentId = this.commentId;
    if (commentId === null) return;
    const mine = ++this.seq;
    let response: SuggestResponse;
    try {
      response = await this.api.suggest(commentId, this.draft, this.k);
    } catch (error) {
      if (mine === this.seq) this.onError?.(error);
      return;
    }
    // Drop stale responses: a newer request started locally, or the server
    // saw a newer one for this comment.
    if (mine !== this.seq || response.superseded) return;
    this.suggestions = response.suggestions;
    this.onSuggestions?.(response.suggestions);
  }

  dispose(): void {
    this.cancelPending();
  }
}
