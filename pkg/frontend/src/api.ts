// Typed client for the review queue and fraud-watch verdict endpoints.
// Controllers depend on the ReviewBackend interface so tests can swap in
// an in-memory double.

export type Box = [number, number, number, number];

export interface ReviewCandidate {
  bbox: Box;
  confidence: number;
}

export interface ReviewItem {
  item_id: string;
  image_path: string;
  status: "pending" | "labeled" | "deleted";
  assigned_class: number | null;
  best_candidate: ReviewCandidate | null;
}

export interface ReviewStats {
  pending: number;
  labeled: number;
  deleted: number;
  auto_rows?: number;
  human_rows?: number;
}

export type DecisionBody =
  | { action: "label"; class_id: number; bbox: Box; token?: string }
  | { action: "delete"; token?: string };

export interface DecisionResult {
  item: ReviewItem;
  stats: ReviewStats;
}

export interface Verdict {
  status: "authorized" | "fraud" | "unregistered" | "low_confidence";
  observation: { plate: string; timestamp: number; camera_id: string };
  top_class: number;
  top_prob: number;
  matched_entry: { plate: string; class_id: number } | null;
}

export class ApiError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
  }
}

export interface ReviewBackend {
  nextItem(): Promise<ReviewItem | null>;
  submit(itemId: string, body: DecisionBody): Promise<DecisionResult>;
  stats(): Promise<ReviewStats>;
  imageUrl(itemId: string): string;
}

export class HttpReviewBackend implements ReviewBackend {
  constructor(private baseUrl: string, private fetchFn: typeof fetch = fetch) {}

  async nextItem(): Promise<ReviewItem | null> {
    const resp = await this.fetchFn(`${this.baseUrl}/review/next`);
    if (resp.status === 204) return null;
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as ReviewItem;
  }

  async submit(itemId: string, body: DecisionBody): Promise<DecisionResult> {
    const resp = await this.fetchFn(`${this.baseUrl}/review/${itemId}`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as DecisionResult;
  }

  async stats(): Promise<ReviewStats> {
    const resp = await this.fetchFn(`${this.baseUrl}/review/stats`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as ReviewStats;
  }

  imageUrl(itemId: string): string {
    return `${this.baseUrl}/review/${itemId}/image`;
  }
}

export class VerdictsBackend {
  constructor(private baseUrl: string, private fetchFn: typeof fetch = fetch) {}

  async list(status?: string): Promise<Verdict[]> {
    const query = status ? `?status=${encodeURIComponent(status)}` : "";
    const resp = await this.fetchFn(`${this.baseUrl}/verdicts${query}`);
    if (!resp.ok) throw new ApiError(resp.status, await resp.text());
    return (await resp.json()) as Verdict[];
  }
}
