import { WorkbenchStore } from "./store.js";
import { SentenceRow } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  ...children: (Node | string)[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  node.append(...children);
  return node;
}

function highlightKeywords(row: SentenceRow): DocumentFragment {
  const fragment = document.createDocumentFragment();
  const spans = row.verdict?.keyword_spans ?? [];
  let cursor = 0;
  for (const span of [...spans].sort((a, b) => a.start - b.start)) {
    if (span.start > cursor) fragment.append(row.raw_text.slice(cursor, span.start));
    const mark = el("mark", { class: span.in_identifier ? "kw identifier" : "kw" });
    mark.textContent = row.raw_text.slice(span.start, span.end);
    fragment.append(mark);
    cursor = span.end;
  }
  fragment.append(row.raw_text.slice(cursor));
  return fragment;
}

/** Outlined badge for machine suggestions; criterion ids shown on hover. */
function suggestionBadge(row: SentenceRow): HTMLElement | null {
  const verdict = row.verdict;
  if (!verdict) return null;
  const badge = el("span", {
    class: `badge suggestion suggestion-${verdict.suggested_label.toLowerCase()}`,
    title: verdict.matched_rules.join(", "),
    "data-rules": verdict.matched_rules.join(","),
  });
  badge.textContent = `${verdict.suggested_label}?`;
  return badge;
}

/** Filled badge for a server-confirmed label; spinner class while pending. */
function committedBadge(row: SentenceRow, pending: boolean): HTMLElement | null {
  if (row.committed_label === null) return null;
  const badge = el("span", {
    class: `badge committed committed-${row.committed_label.toLowerCase()}${pending ? " pending" : ""}`,
    title: pending ? "write pending" : `audit entries: ${row.audit_length}`,
    "data-audit": String(row.audit_length),
  });
  badge.textContent = row.committed_label;
  return badge;
}

export class WorkbenchView {
  private labelError = "";

  constructor(
    private root: HTMLElement,
    private store: WorkbenchStore,
  ) {
    store.subscribe(() => this.render());
    this.scaffold();
    this.render();
  }

  private scaffold(): void {
    this.root.innerHTML = "";
    const search = el("form", { class: "search", id: "search-form" });
    const input = el("input", {
      id: "query",
      type: "search",
      placeholder: "search sentences, e.g. assum",
    });
    const initButton = el("button", { type: "submit", id: "init" }, "Init");
    search.append(input, initButton);
    search.addEventListener("submit", (event) => {
      event.preventDefault();
      void this.store.init((input as HTMLInputElement).value);
    });

    const labelBar = el("div", { class: "label-bar", id: "label-bar" });
    const table = el("div", { class: "sentences", id: "sentences" });
    const pager = el("div", { class: "pager", id: "pager" });
    const datasetBar = el("div", { class: "dataset-bar", id: "dataset-bar" });
    const labelManager = el("div", { class: "label-manager", id: "label-manager" });
    const toasts = el("div", { class: "toasts", id: "toasts" });
    this.root.append(search, labelBar, table, pager, datasetBar, labelManager, toasts);

    // keyboard path: digits apply the label with that value to the selection
    this.root.ownerDocument.addEventListener("keydown", (event) => {
      if ((event.target as HTMLElement | null)?.tagName === "INPUT") return;
      const label = this.store.labelByValue(Number(event.key));
      if (label && this.store.selection.size > 0) {
        event.preventDefault();
        void this.store.applyLabel(label.name);
      }
    });
  }

  private render(): void {
    this.renderLabelBar();
    this.renderSentences();
    this.renderPager();
    this.renderDatasetBar();
    this.renderLabelManager();
    this.renderToasts();
  }

  private renderLabelBar(): void {
    const bar = this.root.querySelector("#label-bar")!;
    bar.innerHTML = "";
    bar.append(`selection: ${this.store.selection.size} `);
    for (const label of this.store.labels) {
      const button = el(
        "button",
        { class: "apply-label", "data-label": label.name },
        `${label.name} (${label.value})`,
      );
      button.addEventListener("click", () => void this.store.applyLabel(label.name));
      bar.append(button);
    }
  }

  private renderSentences(): void {
    const host = this.root.querySelector("#sentences")!;
    host.innerHTML = "";
    if (this.store.sentences.length === 0) {
      host.append(el("p", { class: "empty", id: "empty" }, "no sentences; run Init"));
      return;
    }
    for (const row of this.store.sentences) {
      const item = el("div", {
        class: `sentence${this.store.selection.has(row.id) ? " selected" : ""}`,
        "data-id": row.id,
      });
      const checkbox = el("input", { type: "checkbox", class: "select" }) as HTMLInputElement;
      checkbox.checked = this.store.selection.has(row.id);
      checkbox.addEventListener("change", () => this.store.toggleSelect(row.id));
      const text = el("span", { class: "text" });
      text.append(highlightKeywords(row));
      item.append(checkbox, text);
      const suggestion = suggestionBadge(row);
      if (suggestion) item.append(suggestion);
      const committed = committedBadge(row, this.store.pending.has(row.id));
      if (committed) item.append(committed);
      // right-click labeling menu mirrors the label bar
      item.addEventListener("contextmenu", (event) => {
        event.preventDefault();
        if (!this.store.selection.has(row.id)) this.store.toggleSelect(row.id);
        this.openContextMenu(event as MouseEvent);
      });
      host.append(item);
    }
  }

  private openContextMenu(event: MouseEvent): void {
    this.root.querySelector("#context-menu")?.remove();
    const menu = el("div", { class: "context-menu", id: "context-menu" });
    for (const label of this.store.labels) {
      const entry = el("button", { "data-label": label.name }, `label as ${label.name}`);
      entry.addEventListener("click", () => {
        void this.store.applyLabel(label.name);
        menu.remove();
      });
      menu.append(entry);
    }
    menu.style.left = `${event.clientX}px`;
    menu.style.top = `${event.clientY}px`;
    this.root.append(menu);
  }

  private renderPager(): void {
    const pager = this.root.querySelector("#pager")!;
    pager.innerHTML = "";
    const pages = Math.max(1, Math.ceil(this.store.total / this.store.pageSize));
    const prev = el("button", { id: "prev" }, "prev");
    const next = el("button", { id: "next" }, "next");
    (prev as HTMLButtonElement).disabled = this.store.page <= 1;
    (next as HTMLButtonElement).disabled = this.store.page >= pages;
    prev.addEventListener("click", () => void this.store.gotoPage(this.store.page - 1));
    next.addEventListener("click", () => void this.store.gotoPage(this.store.page + 1));
    pager.append(prev, ` page ${this.store.page}/${pages} (${this.store.total} total) `, next);
  }

  private renderDatasetBar(): void {
    const bar = this.root.querySelector("#dataset-bar")!;
    bar.innerHTML = "";
    const build = el("button", { id: "build-dataset" }, "Build balanced dataset");
    build.addEventListener("click", () => void this.store.buildDataset(0));
    bar.append(build);
    const url = this.store.downloadUrl();
    if (url) {
      bar.append(
        el("a", { id: "download", href: url, download: "dataset.csv" }, "download"),
      );
    }
    if (this.store.datasets.length > 0) {
      const list = el("ul", { class: "dataset-list", id: "dataset-list" });
      for (const ds of this.store.datasets) {
        list.append(
          el(
            "li",
            { "data-id": ds.id },
            `${ds.id} (${ds.rows} rows) `,
            el("a", { href: this.store.downloadUrl(ds.id)!, download: `${ds.id}.csv` }, "csv"),
          ),
        );
      }
      bar.append(list);
    }
  }

  private renderLabelManager(): void {
    const host = this.root.querySelector("#label-manager")!;
    host.innerHTML = "";
    const list = el(
      "span",
      { id: "label-list" },
      this.store.labels.map((l) => `${l.name}=${l.value}`).join(" "),
    );
    const name = el("input", { id: "new-label-name", placeholder: "name" }) as HTMLInputElement;
    const value = el("input", { id: "new-label-value", placeholder: "value", type: "number" }) as HTMLInputElement;
    const add = el("button", { id: "add-label" }, "add label");
    const error = el("span", { class: "inline-error", id: "label-error" }, this.labelError);
    add.addEventListener("click", () => {
      void this.store.createLabel(name.value, Number(value.value)).then((problem) => {
        this.labelError = problem ?? "";
        this.render();
      });
    });
    host.append(list, name, value, add, error);
  }

  private renderToasts(): void {
    const host = this.root.querySelector("#toasts")!;
    host.innerHTML = "";
    for (const toast of this.store.toasts.slice(-4)) {
      host.append(el("div", { class: `toast ${toast.kind}` }, toast.text));
    }
  }
}
