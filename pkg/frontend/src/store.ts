import { ApiClient } from "./api.js";
import { ApiError, Label, SentenceRow } from "./types.js";

export type Listener = () => void;

export interface Toast {
  kind: "info" | "error";
  text: string;
}

/**
 * Workbench state machine. Holds the active query, the current page with
 * verdict hints, the selection (always a subset of the page), the label
 * registry, and the pending-write queue. Label writes are optimistic:
 * the badge flips immediately, and a server rejection rolls that row back
 * and raises a toast. Pagination waits for pending writes to flush.
 */
export class WorkbenchStore {
  query = "";
  page = 1;
  pageSize = 50;
  total = 0;
  sentences: SentenceRow[] = [];
  labels: Label[] = [];
  selection = new Set<string>();
  pending = new Set<string>();
  toasts: Toast[] = [];
  lastDatasetId: string | null = null;
  datasets: { id: string; rows: number }[] = [];
  private listeners: Listener[] = [];

  constructor(private api: ApiClient) {}

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  toast(kind: Toast["kind"], text: string): void {
    this.toasts.push({ kind, text });
    this.emit();
  }

  async loadLabels(): Promise<void> {
    this.labels = await this.api.listLabels();
    this.emit();
  }

  /** The workbench "Init" action: run the query and show the first page. */
  async init(query: string): Promise<void> {
    this.query = query;
    await this.gotoPage(1);
  }

  async gotoPage(page: number): Promise<void> {
    await this.flushPending();
    const result = await this.api.searchSentences(this.query, page, this.pageSize);
    this.page = result.page;
    this.total = result.total;
    this.sentences = result.sentences;
    // the selection never outlives the page that produced it
    this.selection = new Set(
      [...this.selection].filter((id) => this.sentences.some((s) => s.id === id)),
    );
    this.emit();
  }

  async flushPending(): Promise<void> {
    while (this.pending.size > 0) {
      await new Promise((resolve) => setTimeout(resolve, 5));
    }
  }

  toggleSelect(sentenceId: string): void {
    if (!this.sentences.some((s) => s.id === sentenceId)) return;
    if (this.selection.has(sentenceId)) this.selection.delete(sentenceId);
    else this.selection.add(sentenceId);
    this.emit();
  }

  clearSelection(): void {
    this.selection.clear();
    this.emit();
  }

  labelByValue(value: number): Label | undefined {
    return this.labels.find((l) => l.value === value);
  }

  /** Apply a label to every selected sentence; optimistic with rollback. */
  async applyLabel(labelName: string): Promise<void> {
    const targets = this.sentences.filter((s) => this.selection.has(s.id));
    await Promise.all(targets.map((row) => this.commitOne(row, labelName)));
  }

  private async commitOne(row: SentenceRow, labelName: string): Promise<void> {
    const before = { label: row.committed_label, audit: row.audit_length };
    const relabel = row.committed_label !== null && row.committed_label !== labelName;
    row.committed_label = labelName;
    this.pending.add(row.id);
    this.emit();
    try {
      const result = await this.api.annotate(row.id, labelName);
      row.audit_length = result.audit_length;
      if (relabel) {
        this.toast("info", `relabeled ${row.id}: audit trail now ${result.audit_length} entries`);
      }
    } catch (err) {
      row.committed_label = before.label;
      row.audit_length = before.audit;
      const detail = err instanceof ApiError ? `${err.status} ${err.message}` : String(err);
      this.toast("error", `label write failed for ${row.id}: ${detail}`);
    } finally {
      this.pending.delete(row.id);
      this.emit();
    }
  }

  async createLabel(name: string, value: number): Promise<string | null> {
    try {
      await this.api.createLabel(name, value);
      await this.loadLabels();
      return null;
    } catch (err) {
      return err instanceof ApiError ? err.message : String(err);
    }
  }

  async buildDataset(seed: number): Promise<string | null> {
    try {
      const info = await this.api.createDataset(seed);
      this.lastDatasetId = info.id;
      await this.refreshDatasets();
      return info.id;
    } catch (err) {
      const detail = err instanceof ApiError ? err.message : String(err);
      this.toast("error", `dataset build failed: ${detail}`);
      return null;
    }
  }

  async refreshDatasets(): Promise<void> {
    try {
      this.datasets = await this.api.listDatasets();
    } catch {
      this.datasets = [];
    }
    this.emit();
  }

  downloadUrl(datasetId?: string): string | null {
    const id = datasetId ?? this.lastDatasetId;
    return id ? this.api.datasetDownloadUrl(id) : null;
  }
}
