/**
 * Acceptance checks for the workbench UI, run against the in-memory
 * backend through the real DOM rendering path.
 */

// @vitest-environment happy-dom

import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { WorkbenchStore } from "../src/store.js";
import { Verdict } from "../src/types.js";
import { WorkbenchView } from "../src/view.js";
import { FakeServer } from "./fake-server.js";

function verdict(label: string, rules: string[], spans: Verdict["keyword_spans"] = []): Verdict {
  return {
    suggested_label: label,
    matched_rules: rules,
    keyword_spans: spans,
    question_form: "none",
    confidence: "heuristic",
  };
}

async function settle(): Promise<void> {
  await new Promise((resolve) => setTimeout(resolve, 20));
}

describe("workbench", () => {
  let server: FakeServer;
  let store: WorkbenchStore;
  let root: HTMLElement;

  beforeEach(async () => {
    document.body.innerHTML = '<main id="app"></main>';
    root = document.getElementById("app")!;
    server = new FakeServer();
    server.addSentence(
      "s1",
      "the op assumes rank two input.",
      verdict("SCA", ["SCA_IC1"], [{ start: 7, end: 14, surface: "assumes", in_identifier: false }]),
    );
    server.addSentence("s2", "maybe this helps the cache.", verdict("PA", ["PA_IC1"]));
    server.addSentence("s3", "update the docs.", verdict("NA", ["SCA_EC1", "PA_EC4"]));
    store = new WorkbenchStore(new ApiClient("", server.fetch));
    new WorkbenchView(root, store);
    await store.loadLabels();
    await store.init("");
    await settle();
  });

  function rowEl(id: string): HTMLElement {
    const el = root.querySelector(`.sentence[data-id="${id}"]`);
    expect(el, `row ${id} rendered`).not.toBeNull();
    return el as HTMLElement;
  }

  function labelVia(id: string, labelName: string): void {
    const checkbox = rowEl(id).querySelector("input.select") as HTMLInputElement;
    if (!checkbox.checked) {
      checkbox.checked = true;
      checkbox.dispatchEvent(new Event("change"));
    }
    const button = root.querySelector(
      `#label-bar button[data-label="${labelName}"]`,
    ) as HTMLButtonElement;
    button.click();
  }

  it("acceptance 9: label three sentences, download CSV with 2/1/0, relabel doubles the audit", async () => {
    labelVia("s1", "SCA");
    await settle();
    store.clearSelection();
    labelVia("s2", "PA");
    await settle();
    store.clearSelection();
    labelVia("s3", "NA");
    await settle();
    store.clearSelection();

    (root.querySelector("#build-dataset") as HTMLButtonElement).click();
    await settle();
    const link = root.querySelector("#download") as HTMLAnchorElement;
    expect(link).not.toBeNull();
    const csv = await new ApiClient("", server.fetch).downloadDatasetCsv(store.lastDatasetId!);
    const lines = csv.trim().split(/\r?\n/);
    expect(lines[0]).toBe("text,label");
    const byText = new Map(lines.slice(1).map((line) => {
      const comma = line.lastIndexOf(",");
      return [line.slice(0, comma), line.slice(comma + 1)] as const;
    }));
    expect(byText.get("the op assumes rank two input.")).toBe("2");
    expect(byText.get("maybe this helps the cache.")).toBe("1");
    expect(byText.get("update the docs.")).toBe("0");

    // relabel one sentence and observe the audit trail at length 2
    labelVia("s2", "NA");
    await settle();
    const badge = rowEl("s2").querySelector(".badge.committed") as HTMLElement;
    expect(badge.textContent).toBe("NA");
    expect(badge.dataset.audit).toBe("2");
  });

  it("acceptance 10: SCA-criterion verdicts show suggestion badges listing the rule ids", async () => {
    const page = await new ApiClient("", server.fetch).searchSentences("", 1, 50);
    for (const sentence of page.sentences) {
      const rules = sentence.verdict?.matched_rules ?? [];
      const scaRules = rules.filter((r) => r.startsWith("SCA_"));
      if (scaRules.length === 0) continue;
      const badge = rowEl(sentence.id).querySelector(".badge.suggestion") as HTMLElement;
      expect(badge, `suggestion badge for ${sentence.id}`).not.toBeNull();
      const listed = (badge.dataset.rules ?? "").split(",");
      for (const rule of scaRules) {
        expect(listed).toContain(rule);
      }
      expect(badge.title).toContain(scaRules[0]);
    }
  });

  it("acceptance 10: committed labels are visually distinct from suggestions", async () => {
    labelVia("s1", "SCA");
    await settle();
    const row = rowEl("s1");
    const suggestion = row.querySelector(".badge.suggestion") as HTMLElement;
    const committed = row.querySelector(".badge.committed") as HTMLElement;
    expect(suggestion).not.toBeNull();
    expect(committed).not.toBeNull();
    expect(suggestion.className).not.toBe(committed.className);
    expect(suggestion.textContent).toBe("SCA?");
    expect(committed.textContent).toBe("SCA");
    // one committed badge at most per sentence
    expect(row.querySelectorAll(".badge.committed")).toHaveLength(1);
  });

  it("keyword highlights mark the matched span", () => {
    const mark = rowEl("s1").querySelector("mark.kw") as HTMLElement;
    expect(mark.textContent).toBe("assumes");
  });

  it("dataset list renders with per-dataset download links", async () => {
    for (const [id, label] of [["s1", "SCA"], ["s2", "PA"], ["s3", "NA"]] as const) {
      store.clearSelection();
      labelVia(id, label);
      await settle();
    }
    store.clearSelection();
    (root.querySelector("#build-dataset") as HTMLButtonElement).click();
    await settle();
    const items = root.querySelectorAll("#dataset-list li");
    expect(items.length).toBe(1);
    const link = items[0].querySelector("a") as HTMLAnchorElement;
    expect(link.getAttribute("href")).toMatch(/\/datasets\/.+\/download/);
  });

  it("keyboard path: digits label the selection", async () => {
    const checkbox = rowEl("s3").querySelector("input.select") as HTMLInputElement;
    checkbox.checked = true;
    checkbox.dispatchEvent(new Event("change"));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "2", bubbles: true }));
    await settle();
    const badge = rowEl("s3").querySelector(".badge.committed") as HTMLElement;
    expect(badge.textContent).toBe("SCA");
  });

  it("empty search shows the empty state", async () => {
    await store.init("zzz-no-match");
    await settle();
    expect(root.querySelector("#empty")).not.toBeNull();
  });

  it("duplicate label value shows an inline error", async () => {
    (root.querySelector("#new-label-name") as HTMLInputElement).value = "DUP";
    (root.querySelector("#new-label-value") as HTMLInputElement).value = "0";
    (root.querySelector("#add-label") as HTMLButtonElement).click();
    await settle();
    expect((root.querySelector("#label-error") as HTMLElement).textContent).toMatch(
      /already registered/,
    );
  });

  it("server rejection rolls the badge back and raises a toast", async () => {
    server.failNextAnnotation = 404;
    labelVia("s1", "SCA");
    await settle();
    expect(rowEl("s1").querySelector(".badge.committed")).toBeNull();
    expect(root.querySelector(".toast.error")).not.toBeNull();
  });
});
