import {
  AnnotationResult,
  ApiError,
  DatasetInfo,
  Label,
  SentencePage,
} from "./types.js";

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      detail = body.detail ?? body.message ?? JSON.stringify(body);
    } catch {
      /* non-JSON error body */
    }
    throw new ApiError(response.status, detail);
  }
  return response.json() as Promise<T>;
}

export class ApiClient {
  constructor(
    private base: string = "",
    private fetcher: typeof fetch = fetch.bind(globalThis),
  ) {}

  searchSentences(query: string, page = 1, pageSize = 50, label?: string): Promise<SentencePage> {
    const params = new URLSearchParams({
      query,
      page: String(page),
      page_size: String(pageSize),
    });
    if (label) params.set("label", label);
    return this.fetcher(`${this.base}/sentences?${params}`).then((r) => asJson<SentencePage>(r));
  }

  annotate(sentenceId: string, label: string | number): Promise<AnnotationResult> {
    return this.fetcher(`${this.base}/annotations`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ sentence_id: sentenceId, label }),
    }).then((r) => asJson<AnnotationResult>(r));
  }

  listLabels(): Promise<Label[]> {
    return this.fetcher(`${this.base}/labels`).then((r) => asJson<Label[]>(r));
  }

  createLabel(name: string, value: number): Promise<Label> {
    return this.fetcher(`${this.base}/labels`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ name, value }),
    }).then((r) => asJson<Label>(r));
  }

  createDataset(seed: number): Promise<DatasetInfo> {
    return this.fetcher(`${this.base}/datasets`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ seed }),
    }).then((r) => asJson<DatasetInfo>(r));
  }

  listDatasets(): Promise<DatasetInfo[]> {
    return this.fetcher(`${this.base}/datasets`).then((r) => asJson<DatasetInfo[]>(r));
  }

  datasetDownloadUrl(datasetId: string): string {
    return `${this.base}/datasets/${datasetId}/download`;
  }

  async downloadDatasetCsv(datasetId: string): Promise<string> {
    const response = await this.fetcher(this.datasetDownloadUrl(datasetId));
    if (!response.ok) throw new ApiError(response.status, response.statusText);
    return response.text();
  }
}
