export interface KeywordSpan {
  start: number;
  end: number;
  surface: string;
  in_identifier: boolean;
}

export interface Verdict {
  suggested_label: string;
  matched_rules: string[];
  keyword_spans: KeywordSpan[];
  question_form: "standard" | "nonstandard" | "none";
  confidence: "definite" | "heuristic";
}

export interface SentenceRow {
  id: string;
  record_id: string;
  index_in_record: number;
  raw_text: string;
  word_count: number;
  kind?: string | null;
  verdict?: Verdict | null;
  committed_label: string | null;
  audit_length: number;
}

export interface SentencePage {
  total: number;
  page: number;
  page_size: number;
  sentences: SentenceRow[];
}

export interface Label {
  name: string;
  value: number;
}

export interface AnnotationResult {
  sentence_id: string;
  label: string;
  value: number;
  audit_length: number;
}

export interface DatasetInfo {
  id: string;
  rows: number;
}

export class ApiError extends Error {
  constructor(public status: number, message: string) {
    super(message);
  }
}
