/** API payload shapes, mirroring the service's JSON exactly. */

export interface Candidate {
  rank: number;
  label: string;
  gloss: string;
  vote_score: number;
  best_similarity: number;
  variants: string[];
}

export interface QuerySession {
  query_id: string;
  created_at: string;
  index_generation: number;
  k: number;
  n: number;
  candidates: Candidate[];
  image_url: string;
  annotations?: AnnotationRecord[];
}

export type Verdict = "confirmed" | "rejected" | "uncertain";

export interface AnnotationRecord {
  annotation_id: string;
  query_id: string;
  verdict: Verdict;
  chosen_label: string | null;
  confidence: number;
  note: string;
  created_at: string;
  index_generation: number;
}

export interface AnnotationDraft {
  query_id: string;
  verdict: Verdict;
  chosen_label: string | null;
  confidence: number;
  note?: string;
}

export interface Stats {
  label_count: number;
  entry_count: number;
  index_generation: number;
  encoder_id: string;
  dim: number;
}
