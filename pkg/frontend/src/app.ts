/**
 * Top-level wiring: project picker, explorer, comment editor, design
 * layers, and the anchor workflow. All state lives on the server; this
 * module just keeps the widgets consistent with it.
 */

import { ApiClient, ApiError, type CommentJson, type ProjectJson, type SuggestionJson } from "./api.js";
import { CommentEditor } from "./editor.js";
import { OrbitExplorer } from "./explorer.js";
import { pollJob } from "./jobs.js";
import { ModifierPanel } from "./modifiers.js";
import { fromAnchor, posesAgree, toAnchor } from "./orbit.js";
import { EditorSession } from "./session.js";

const VIEW_SIZE = 512;

export class App {
  private api: ApiClient;

  private project: ProjectJson | null = null;
  private comment: CommentJson | null = null;

  private explorer: OrbitExplorer | null = null;
  private session: EditorSession | null = null;
  private editor: CommentEditor | null = null;
  private modifiers: ModifierPanel | null = null;

  private projectSelect!: HTMLSelectElement;
  private indexStatus!: HTMLSpanElement;
  private stage!: HTMLDivElement;
  private commentList!: HTMLUListElement;
  private editorHost!: HTMLDivElement;
  private panelHost!: HTMLDivElement;
  private gallery!: HTMLDivElement;
  private anchorStatus!: HTMLSpanElement;
  private exportLink!: HTMLAnchorElement;
  private toasts!: HTMLDivElement;

  constructor(
    private root: HTMLElement,
    api?: ApiClient,
  ) {
    this.api = api ?? new ApiClient();
    this.buildShell();
  }

  async init(): Promise<void> {
    try {
      await this.refreshProjects();
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  private buildShell(): void {
    this.root.replaceChildren();

    const header = document.createElement("header");
    const title = document.createElement("h1");
    title.textContent = "memovis";
    header.appendChild(title);

    const upload = document.createElement("input");
    upload.type = "file";
    upload.accept = ".glb";
    upload.addEventListener("change", () => {
      const file = upload.files?.[0];
      if (file) void this.uploadScene(file);
      upload.value = "";
    });
    header.appendChild(wrap("Scene", upload));

    this.projectSelect = document.createElement("select");
    this.projectSelect.addEventListener("change", () => {
      const id = this.projectSelect.value;
      if (id !== "") void this.openProjectById(id);
    });
    header.appendChild(wrap("Project", this.projectSelect));

    const indexButton = document.createElement("button");
    indexButton.type = "button";
    indexButton.textContent = "Build index";
    indexButton.addEventListener("click", () => void this.buildIndex());
    header.appendChild(indexButton);

    this.indexStatus = document.createElement("span");
    this.indexStatus.className = "index-status";
    header.appendChild(this.indexStatus);

    const main = document.createElement("main");

    const left = document.createElement("section");
    left.className = "stage-column";
    this.stage = document.createElement("div");
    this.stage.className = "stage";
    left.appendChild(this.stage);
    this.panelHost = document.createElement("div");
    left.appendChild(this.panelHost);

    const right = document.createElement("section");
    right.className = "review-column";

    const newComment = document.createElement("form");
    newComment.className = "new-comment";
    const newBody = document.createElement("input");
    newBody.type = "text";
    newBody.placeholder = "new comment...";
    const newButton = document.createElement("button");
    newButton.type = "submit";
    newButton.textContent = "Add";
    newComment.append(newBody, newButton);
    newComment.addEventListener("submit", (event) => {
      event.preventDefault();
      if (newBody.value.trim() !== "") {
        void this.createComment(newBody.value.trim());
        newBody.value = "";
      }
    });
    right.appendChild(newComment);

    this.commentList = document.createElement("ul");
    this.commentList.className = "comment-list";
    right.appendChild(this.commentList);

    this.editorHost = document.createElement("div");
    right.appendChild(this.editorHost);

    const anchorRow = document.createElement("div");
    anchorRow.className = "anchor-row";
    const anchorButton = document.createElement("button");
    anchorButton.type = "button";
    anchorButton.textContent = "Anchor this view";
    anchorButton.addEventListener("click", () => void this.anchorCurrentView());
    const gotoButton = document.createElement("button");
    gotoButton.type = "button";
    gotoButton.textContent = "Go to anchor";
    gotoButton.addEventListener("click", () => this.gotoAnchor());
    this.anchorStatus = document.createElement("span");
    anchorRow.append(anchorButton, gotoButton, this.anchorStatus);
    right.appendChild(anchorRow);

    this.gallery = document.createElement("div");
    this.gallery.className = "gallery";
    right.appendChild(this.gallery);

    const shareRow = document.createElement("div");
    shareRow.className = "share-row";
    this.exportLink = document.createElement("a");
    this.exportLink.textContent = "Export memo";
    this.exportLink.className = "export-link";
    this.exportLink.hidden = true;
    const importInput = document.createElement("input");
    importInput.type = "file";
    importInput.accept = ".zip";
    importInput.addEventListener("change", () => {
      const file = importInput.files?.[0];
      if (file) void this.importMemo(file);
      importInput.value = "";
    });
    shareRow.append(this.exportLink, wrap("Import memo", importInput));
    right.appendChild(shareRow);

    main.append(left, right);

    this.toasts = document.createElement("div");
    this.toasts.className = "toasts";

    this.root.append(header, main, this.toasts);
  }

  // ---- projects -------------------------------------------------------

  private async refreshProjects(selectId?: string): Promise<void> {
    const projects = await this.api.listProjects();
    this.projectSelect.replaceChildren();
    const blank = document.createElement("option");
    blank.value = "";
    blank.textContent = projects.length > 0 ? "(pick a project)" : "(upload a scene)";
    this.projectSelect.appendChild(blank);
    for (const project of projects) {
      const option = document.createElement("option");
      option.value = project.id;
      option.textContent = `${project.scene_filename} [${project.id.slice(0, 8)}]`;
      this.projectSelect.appendChild(option);
    }
    if (selectId !== undefined) {
      this.projectSelect.value = selectId;
      await this.openProjectById(selectId);
    }
  }

  private async uploadScene(file: File): Promise<void> {
    try {
      const project = await this.api.createProject(file.name, file);
      this.toast(`uploaded ${file.name}`, "info");
      await this.refreshProjects(project.id);
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  private async openProjectById(id: string): Promise<void> {
    try {
      const project = await this.api.getProject(id);
      this.openProject(project);
      await this.refreshComments();
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  private openProject(project: ProjectJson): void {
    this.closeProjectWidgets();
    this.project = project;
    this.comment = null;
    this.showIndexState(project);

    this.explorer = new OrbitExplorer(this.stage, this.api, project.id, {
      width: VIEW_SIZE,
      height: VIEW_SIZE,
    });
    this.modifiers = new ModifierPanel(this.api, this.explorer.viewport, {
      width: VIEW_SIZE,
      height: VIEW_SIZE,
      onDone: () => void this.refreshOpenComment(),
      onToast: (message, tone) => this.toast(message, tone),
    });
    this.panelHost.appendChild(this.modifiers.element);

    this.session = new EditorSession(this.api, project.id, {
      onSuggestions: (suggestions) => this.editor?.strip.show(suggestions),
      onError: (error) => {
        if (error instanceof ApiError && error.code === "index_not_ready") {
          this.toast("build the viewpoint index to get suggestions", "info");
        } else {
          this.toast(describe(error), "error");
        }
      },
    });
    this.editor = new CommentEditor(this.session, {
      onPick: (suggestion) => void this.pickSuggestion(suggestion),
    });
    this.editorHost.replaceChildren(this.editor.element);
    this.editor.open(null);
  }

  private closeProjectWidgets(): void {
    this.explorer?.dispose();
    this.session?.dispose();
    this.explorer = null;
    this.session = null;
    this.editor = null;
    this.modifiers = null;
    this.stage.replaceChildren();
    this.panelHost.replaceChildren();
    this.editorHost.replaceChildren();
    this.gallery.replaceChildren();
    this.commentList.replaceChildren();
    this.exportLink.hidden = true;
    this.anchorStatus.textContent = "";
  }

  private showIndexState(project: ProjectJson): void {
    const { status, progress } = project.index;
    this.indexStatus.textContent =
      status === "building" ? `index: building ${Math.round(progress * 100)}%` : `index: ${status}`;
  }

  private async buildIndex(): Promise<void> {
    if (this.project === null) return;
    try {
      const job = await this.api.buildIndex(this.project.id);
      await pollJob(this.api, job.id, {
        onProgress: (j) => {
          this.indexStatus.textContent = `index: building ${Math.round(j.progress * 100)}%`;
        },
      });
      const project = await this.api.getProject(this.project.id);
      this.project = project;
      this.showIndexState(project);
      this.toast("viewpoint index ready", "info");
    } catch (error) {
      this.indexStatus.textContent = "index: failed";
      this.toast(describe(error), "error");
    }
  }

  // ---- comments -------------------------------------------------------

  private async refreshComments(openId?: string): Promise<void> {
    if (this.project === null) return;
    const comments = await this.api.listComments(this.project.id);
    this.commentList.replaceChildren();
    for (const comment of comments) {
      const item = document.createElement("li");
      const button = document.createElement("button");
      button.type = "button";
      button.className = "comment-item";
      if (comment.id === (openId ?? this.comment?.id)) button.classList.add("open");
      const mark = comment.anchor !== null ? " ⚓" : "";
      button.textContent = `${comment.body.slice(0, 60)}${mark}`;
      button.addEventListener("click", () => void this.openComment(comment.id));
      item.appendChild(button);
      this.commentList.appendChild(item);
    }
    if (openId !== undefined) await this.openComment(openId);
  }

  private async createComment(body: string): Promise<void> {
    if (this.project === null) return;
    try {
      const comment = await this.api.createComment(this.project.id, body);
      await this.refreshComments(comment.id);
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  private async openComment(id: string): Promise<void> {
    try {
      const comment = await this.api.getComment(id);
      this.comment = comment;
      this.editor?.open(comment.id, comment.body);
      this.modifiers?.setComment(comment.id, comment.attachments);
      this.exportLink.href = this.api.exportUrl(comment.id);
      this.exportLink.hidden = false;
      this.showAnchor(comment);
      this.showGallery(comment);
      for (const button of this.commentList.querySelectorAll("button.comment-item")) {
        button.classList.remove("open");
      }
      if (comment.anchor !== null) this.explorer?.snapTo(fromAnchor(comment.anchor));
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  private async refreshOpenComment(): Promise<void> {
    if (this.comment === null) return;
    const comment = await this.api.getComment(this.comment.id);
    this.comment = comment;
    this.modifiers?.setComment(comment.id, comment.attachments);
    this.showGallery(comment);
  }

  private showAnchor(comment: CommentJson): void {
    this.anchorStatus.textContent = comment.anchor === null ? "no anchor" : "anchored";
  }

  private showGallery(comment: CommentJson): void {
    this.gallery.replaceChildren();
    for (const resultId of comment.attachments) {
      const img = document.createElement("img");
      img.loading = "lazy";
      img.className = "gallery-item";
      img.alt = `result ${resultId.slice(0, 8)}`;
      img.src = this.api.resultUrl(comment.id, resultId, "reference.png");
      this.gallery.appendChild(img);
    }
  }

  // ---- anchors --------------------------------------------------------

  /** Anchor the explorer pose, then read it back and verify the round trip. */
  private async anchorCurrentView(): Promise<void> {
    if (this.comment === null || this.explorer === null) {
      this.toast("open a comment first", "info");
      return;
    }
    const pose = this.explorer.getPose();
    try {
      await this.api.setAnchor(this.comment.id, toAnchor(pose));
      const stored = await this.api.getComment(this.comment.id);
      this.comment = stored;
      this.showAnchor(stored);
      if (stored.anchor !== null && posesAgree(pose, fromAnchor(stored.anchor))) {
        this.anchorStatus.textContent = "anchored (verified)";
      } else {
        this.anchorStatus.textContent = "anchored (server stored a different pose)";
      }
      await this.refreshComments(undefined);
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  private gotoAnchor(): void {
    if (this.comment?.anchor == null) {
      this.toast("this comment has no anchor yet", "info");
      return;
    }
    this.explorer?.snapTo(fromAnchor(this.comment.anchor));
  }

  private async pickSuggestion(suggestion: SuggestionJson): Promise<void> {
    if (this.comment === null) return;
    try {
      await this.api.setAnchor(this.comment.id, suggestion.viewpoint);
      this.comment = await this.api.getComment(this.comment.id);
      this.showAnchor(this.comment);
      this.explorer?.snapTo(fromAnchor(suggestion.viewpoint));
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  // ---- sharing --------------------------------------------------------

  private async importMemo(file: File): Promise<void> {
    if (this.project === null) return;
    try {
      const comment = await this.api.importMemo(this.project.id, file);
      this.toast("memo imported", "info");
      await this.refreshComments(comment.id);
    } catch (error) {
      this.toast(describe(error), "error");
    }
  }

  // ---- toasts ---------------------------------------------------------

  toast(message: string, tone: "info" | "error"): void {
    const note = document.createElement("div");
    note.className = `toast ${tone}`;
    note.textContent = message;
    this.toasts.appendChild(note);
    setTimeout(() => note.remove(), 5000);
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}

function wrap(text: string, control: HTMLElement): HTMLLabelElement {
  const label = document.createElement("label");
  const caption = document.createElement("span");
  caption.textContent = text;
  label.append(caption, control);
  return label;
}
