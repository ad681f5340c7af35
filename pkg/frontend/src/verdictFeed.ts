// Verdict dashboard state: newest first, filterable by status, fraud rows
// carrying the registered-vs-predicted class pair for the highlight.

import type { Verdict, VerdictsBackend } from "./api.js";

export type StatusFilter = Verdict["status"] | "all";

export interface FeedRow {
  verdict: Verdict;
  fraud: boolean;
  registeredClass: number | null;
  predictedClass: number;
}

export class VerdictFeed {
  private verdicts: Verdict[] = [];
  filter: StatusFilter = "all";

  constructor(private backend: VerdictsBackend) {}

  async refresh(): Promise<void> {
    const status = this.filter === "all" ? undefined : this.filter;
    this.verdicts = await this.backend.list(status);
  }

  setFilter(filter: StatusFilter): void {
    this.filter = filter;
  }

  rows(): FeedRow[] {
    const ordered = [...this.verdicts].sort(
      (a, b) => b.observation.timestamp - a.observation.timestamp,
    );
    return ordered.map((verdict) => ({
      verdict,
      fraud: verdict.status === "fraud",
      registeredClass: verdict.matched_entry?.class_id ?? null,
      predictedClass: verdict.top_class,
    }));
  }

  fraudCount(): number {
    return this.verdicts.filter((v) => v.status === "fraud").length;
  }
}
