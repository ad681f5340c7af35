// Box drawing for items the detector had no candidate for. Coordinates
// snap to the image bounds so no out-of-range box can reach the backend.

import type { Box } from "./api.js";

export class BboxTool {
  private startX = 0;
  private startY = 0;
  private endX = 0;
  private endY = 0;
  private drawing = false;

  constructor(private width: number, private height: number) {}

  private clampX(x: number): number {
    return Math.min(Math.max(x, 0), this.width);
  }

  private clampY(y: number): number {
    return Math.min(Math.max(y, 0), this.height);
  }

  begin(x: number, y: number): void {
    this.drawing = true;
    this.startX = this.endX = this.clampX(x);
    this.startY = this.endY = this.clampY(y);
  }

  move(x: number, y: number): void {
    if (!this.drawing) return;
    this.endX = this.clampX(x);
    this.endY = this.clampY(y);
  }

  /** Finish the gesture; null when the box would be degenerate. */
  finish(): Box | null {
    if (!this.drawing) return null;
    this.drawing = false;
    const x0 = Math.min(this.startX, this.endX);
    const x1 = Math.max(this.startX, this.endX);
    const y0 = Math.min(this.startY, this.endY);
    const y1 = Math.max(this.startY, this.endY);
    if (x1 - x0 < 1 || y1 - y0 < 1) return null;
    return [x0, y0, x1, y1];
  }

  get active(): boolean {
    return this.drawing;
  }
}
