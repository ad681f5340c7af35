import { describe, expect, it } from "vitest";

import { ReviewSession } from "../src/reviewQueue.js";
import { CLASS_OPTIONS } from "../src/labels.js";
import { StubReviewBackend } from "./stubServer.js";

describe("review session", () => {
  it("renders the next pending item with its candidate box", async () => {
    const backend = new StubReviewBackend(1);
    const session = new ReviewSession(backend);
    await session.start();
    const view = session.view();
    expect(view.phase).toBe("reviewing");
    expect(view.item?.item_id).toBe("item-0");
    expect(view.box).toEqual([5, 5, 60, 40]);
    expect(view.drawToolEnabled).toBe(false);
  });

  it("shows the completion state with stats when the queue is empty", async () => {
    const backend = new StubReviewBackend(0);
    const session = new ReviewSession(backend);
    await session.start();
    const view = session.view();
    expect(view.phase).toBe("complete");
    expect(view.stats).toEqual({ pending: 0, labeled: 0, deleted: 0 });
  });

  it("enables the draw tool when the item has no candidate", async () => {
    const backend = new StubReviewBackend(1, false);
    const session = new ReviewSession(backend);
    await session.start();
    expect(session.view().drawToolEnabled).toBe(true);
    expect(session.view().box).toBeNull();
  });

  it("blocks label submission without a selected class", async () => {
    const backend = new StubReviewBackend(1);
    const session = new ReviewSession(backend);
    await session.start();
    expect(session.canSubmitLabel).toBe(false);
    expect(await session.submitLabel()).toBe(false);
    expect(backend.mutationCount).toBe(0);
    session.selectClass(3);
    expect(session.canSubmitLabel).toBe(true);
    expect(await session.submitLabel()).toBe(true);
    expect(backend.rows[0]).toMatchObject({ class_id: 3, source: "human" });
  });

  it("blocks label submission without a box", async () => {
    const backend = new StubReviewBackend(1, false);
    const session = new ReviewSession(backend);
    await session.start();
    session.selectClass(2);
    expect(session.canSubmitLabel).toBe(false);
    session.setBox([0, 0, 20, 20]);
    expect(session.canSubmitLabel).toBe(true);
  });

  it("keyboard workflow: digits pick classes, Enter confirms, D deletes", async () => {
    const backend = new StubReviewBackend(2);
    const session = new ReviewSession(backend);
    await session.start();
    await session.handleKey("4"); // Volkswagen Polo, id 3
    expect(session.view().selectedClass).toBe(3);
    await session.handleKey("Enter");
    expect(backend.rows).toHaveLength(1);
    expect(backend.rows[0].class_id).toBe(3);
    await session.handleKey("D");
    expect(backend.mutationCount).toBe(2);
    expect(session.view().phase).toBe("complete");
  });

  it("presents exactly the seven classes in backend id order", () => {
    expect(CLASS_OPTIONS.map((c) => c.id)).toEqual([0, 1, 2, 3, 4, 5, 6]);
    expect(CLASS_OPTIONS.map((c) => c.hotkey)).toEqual(["1", "2", "3", "4", "5", "6", "7"]);
    expect(CLASS_OPTIONS[0].name).toBe("Volkswagen Passat");
    expect(CLASS_OPTIONS[6].name).toBe("Other");
  });

  it("double submit causes exactly one backend mutation", async () => {
    const backend = new StubReviewBackend(1);
    const session = new ReviewSession(backend);
    await session.start();
    session.selectClass(1);
    const [first, second] = await Promise.all([session.submitLabel(), session.submitLabel()]);
    expect(backend.mutationCount).toBe(1);
    expect([first, second].filter(Boolean)).toHaveLength(1);
  });

  it("conflict on an already-decided item refetches instead of erroring", async () => {
    const backend = new StubReviewBackend(2);
    const session = new ReviewSession(backend);
    await session.start();
    const itemId = session.view().item!.item_id;
    // someone else decides the same item out from under the session
    await backend.submit(itemId, { action: "delete" });
    session.selectClass(0);
    const ok = await session.submitLabel();
    expect(ok).toBe(false);
    expect(session.view().phase).toBe("reviewing"); // moved on to item-1
    expect(session.view().item?.item_id).toBe("item-1");
    expect(backend.mutationCount).toBe(1); // only the external delete mutated
  });

  it("rolls the optimistic stats update back when the API fails", async () => {
    const backend = new StubReviewBackend(3, true, { failNextSubmit: true });
    const session = new ReviewSession(backend);
    await session.start();
    const before = { ...session.view().stats };
    session.selectClass(0);
    const ok = await session.submitLabel();
    expect(ok).toBe(false);
    expect(session.view().stats).toEqual(before);
    expect(session.view().lastError).toContain("injected failure");
    expect(backend.mutationCount).toBe(0);
  });

  it("scripted session: 20 items, 12 labeled, 8 deleted, no duplicates", async () => {
    const backend = new StubReviewBackend(20);
    const session = new ReviewSession(backend);
    await session.start();
    for (let i = 0; i < 20; i++) {
      expect(session.view().phase).toBe("reviewing");
      if (i < 12) {
        session.selectClass(i % 7);
        expect(await session.submitLabel()).toBe(true);
      } else {
        expect(await session.submitDelete()).toBe(true);
      }
    }
    expect(session.view().phase).toBe("complete");
    const stats = await backend.stats();
    expect(stats).toEqual({ pending: 0, labeled: 12, deleted: 8 });
    expect(backend.mutationCount).toBe(20); // zero duplicate mutations
    expect(backend.rows).toHaveLength(12);
  });
});
