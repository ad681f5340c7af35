// Review session controller: one pending item at a time, keyboard-first.
//
// Invariants the controller enforces client-side:
//  - a label submission needs both a selected class and a box (the
//    detector's candidate or a drawn one); otherwise it is blocked;
//  - every decision carries an idempotency token minted once per item, and
//    an in-flight guard stops double submits, so retries and double-clicks
//    cause exactly one backend mutation;
//  - stats update optimistically and roll back if the API call fails;
//  - a 409 conflict (someone else decided the item) refetches the queue.

import type { Box, DecisionResult, ReviewBackend, ReviewItem, ReviewStats } from "./api.js";
import { ApiError } from "./api.js";
import { classByHotkey } from "./labels.js";

export type SessionPhase = "loading" | "reviewing" | "complete";

export interface SessionView {
  phase: SessionPhase;
  item: ReviewItem | null;
  selectedClass: number | null;
  box: Box | null;
  drawToolEnabled: boolean;
  stats: ReviewStats;
  lastError: string | null;
}

const EMPTY_STATS: ReviewStats = { pending: 0, labeled: 0, deleted: 0 };

export class ReviewSession {
  private phase: SessionPhase = "loading";
  private item: ReviewItem | null = null;
  private selectedClass: number | null = null;
  private box: Box | null = null;
  private stats: ReviewStats = EMPTY_STATS;
  private lastError: string | null = null;
  private inFlight = false;
  private tokenSeq = 0;
  private currentToken = "";

  constructor(private backend: ReviewBackend, private onChange: (view: SessionView) => void = () => {}) {}

  view(): SessionView {
    return {
      phase: this.phase,
      item: this.item,
      selectedClass: this.selectedClass,
      box: this.box,
      drawToolEnabled: this.phase === "reviewing" && this.item?.best_candidate == null,
      stats: this.stats,
      lastError: this.lastError,
    };
  }

  private emit(): void {
    this.onChange(this.view());
  }

  async start(): Promise<void> {
    this.stats = await this.backend.stats();
    await this.fetchNext();
  }

  async fetchNext(): Promise<void> {
    this.phase = "loading";
    this.emit();
    const item = await this.backend.nextItem();
    if (item === null) {
      this.phase = "complete";
      this.item = null;
      this.stats = await this.backend.stats();
    } else {
      this.phase = "reviewing";
      this.item = item;
      this.selectedClass = null;
      this.box = item.best_candidate ? [...item.best_candidate.bbox] as Box : null;
      this.tokenSeq += 1;
      this.currentToken = `${item.item_id}-${this.tokenSeq}`;
    }
    this.lastError = null;
    this.emit();
  }

  selectClass(classId: number): void {
    if (this.phase !== "reviewing") return;
    if (classId < 0 || classId > 6) throw new Error(`class id out of range: ${classId}`);
    this.selectedClass = classId;
    this.emit();
  }

  setBox(box: Box): void {
    if (this.phase !== "reviewing") return;
    this.box = box;
    this.emit();
  }

  get canSubmitLabel(): boolean {
    return (
      this.phase === "reviewing" && !this.inFlight && this.selectedClass !== null && this.box !== null
    );
  }

  async submitLabel(): Promise<boolean> {
    if (!this.canSubmitLabel || this.item === null) return false; // blocked client-side
    return this.submit({
      action: "label",
      class_id: this.selectedClass as number,
      bbox: this.box as Box,
      token: this.currentToken,
    }, "labeled");
  }

  async submitDelete(): Promise<boolean> {
    if (this.phase !== "reviewing" || this.inFlight || this.item === null) return false;
    return this.submit({ action: "delete", token: this.currentToken }, "deleted");
  }

  /** Skip: hand the item back (its lease will lapse) and move on. */
  async skip(): Promise<void> {
    if (this.phase !== "reviewing" || this.inFlight) return;
    await this.fetchNext();
  }

  private async submit(
    body: Parameters<ReviewBackend["submit"]>[1],
    bump: "labeled" | "deleted",
  ): Promise<boolean> {
    if (this.item === null) return false;
    this.inFlight = true;
    const before = { ...this.stats };
    // optimistic: the item leaves pending immediately
    this.stats = { ...this.stats, pending: before.pending - 1, [bump]: before[bump] + 1 };
    this.emit();
    try {
      const result: DecisionResult = await this.backend.submit(this.item.item_id, body);
      this.stats = result.stats;
      this.inFlight = false;
      await this.fetchNext();
      return true;
    } catch (err) {
      this.stats = before; // roll the optimistic update back
      this.inFlight = false;
      if (err instanceof ApiError && err.status === 409) {
        await this.fetchNext(); // decided elsewhere: move on
        return false;
      }
      this.lastError = err instanceof Error ? err.message : String(err);
      this.emit();
      return false;
    }
  }

  /** Keyboard-first workflow: 1-7 pick a class, D deletes, Enter confirms. */
  async handleKey(key: string): Promise<void> {
    if (this.phase !== "reviewing") return;
    const option = classByHotkey(key);
    if (option) {
      this.selectClass(option.id);
      return;
    }
    if (key === "d" || key === "D") {
      await this.submitDelete();
    } else if (key === "Enter") {
      await this.submitLabel();
    } else if (key === "s" || key === "S") {
      await this.skip();
    }
  }
}
