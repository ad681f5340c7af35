// Browser entry: mounts the review queue on the left, the verdict feed on
// the right. Expects the review API on :8001 and fraud-watch on :8000
// (override via ?review=...&fraud=... query params).

import { HttpReviewBackend, VerdictsBackend, type Box } from "./api.js";
import { BboxTool } from "./bboxTool.js";
import { CLASS_OPTIONS } from "./labels.js";
import { ReviewSession, type SessionView } from "./reviewQueue.js";
import { VerdictFeed } from "./verdictFeed.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  if (text) node.textContent = text;
  return node;
}

export function mountApp(root: HTMLElement): void {
  const params = new URLSearchParams(window.location.search);
  const reviewBase = params.get("review") ?? "http://localhost:8001";
  const fraudBase = params.get("fraud") ?? "http://localhost:8000";

  const backend = new HttpReviewBackend(reviewBase);
  const queuePane = el("div", { class: "pane queue" });
  const feedPane = el("div", { class: "pane feed" });
  root.append(queuePane, feedPane);

  let tool: BboxTool | null = null;
  let drawnBox: Box | null = null;

  const session = new ReviewSession(backend, (view) => render(view));

  function render(view: SessionView): void {
    queuePane.replaceChildren();
    const stats = el(
      "p",
      { class: "stats" },
      `pending ${view.stats.pending} / labeled ${view.stats.labeled} / deleted ${view.stats.deleted}`,
    );
    queuePane.append(stats);

    if (view.phase === "complete") {
      queuePane.append(el("h2", {}, "campaign complete"));
      return;
    }
    if (view.phase === "loading" || view.item === null) {
      queuePane.append(el("p", {}, "loading…"));
      return;
    }

    const img = el("img", { src: backend.imageUrl(view.item.item_id), class: "frame" });
    queuePane.append(img);

    if (view.drawToolEnabled) {
      queuePane.append(el("p", { class: "hint" }, "no detector candidate: drag on the image to draw a box"));
      img.addEventListener("mousedown", (e) => {
        tool = new BboxTool(img.naturalWidth || img.width, img.naturalHeight || img.height);
        tool.begin(e.offsetX, e.offsetY);
      });
      img.addEventListener("mousemove", (e) => tool?.move(e.offsetX, e.offsetY));
      img.addEventListener("mouseup", () => {
        drawnBox = tool?.finish() ?? null;
        if (drawnBox) session.setBox(drawnBox);
      });
    } else if (view.box) {
      const [x0, y0, x1, y1] = view.box;
      queuePane.append(el("p", { class: "hint" }, `candidate box (${x0}, ${y0}) – (${x1}, ${y1})`));
    }

    const picker = el("div", { class: "picker" });
    for (const option of CLASS_OPTIONS) {
      const selected = view.selectedClass === option.id ? " selected" : "";
      const btn = el("button", { class: `class-btn${selected}` }, `${option.hotkey} ${option.name}`);
      btn.addEventListener("click", () => session.selectClass(option.id));
      picker.append(btn);
    }
    queuePane.append(picker);

    const actions = el("div", { class: "actions" });
    const labelBtn = el("button", {}, "label (Enter)");
    if (!session.canSubmitLabel) labelBtn.setAttribute("disabled", "disabled");
    labelBtn.addEventListener("click", () => void session.submitLabel());
    const deleteBtn = el("button", {}, "delete (D)");
    deleteBtn.addEventListener("click", () => void session.submitDelete());
    const skipBtn = el("button", {}, "skip (S)");
    skipBtn.addEventListener("click", () => void session.skip());
    actions.append(labelBtn, deleteBtn, skipBtn);
    queuePane.append(actions);

    if (view.lastError) queuePane.append(el("p", { class: "error" }, view.lastError));
  }

  document.addEventListener("keydown", (e) => void session.handleKey(e.key));
  void session.start();

  const feed = new VerdictFeed(new VerdictsBackend(fraudBase));
  async function renderFeed(): Promise<void> {
    await feed.refresh();
    feedPane.replaceChildren(el("h2", {}, `verdicts (${feed.fraudCount()} fraud)`));
    for (const row of feed.rows()) {
      const cls = row.fraud ? "verdict fraud" : "verdict";
      const when = new Date(row.verdict.observation.timestamp * 1000).toISOString();
      const text = row.fraud
        ? `${when} ${row.verdict.observation.plate}: registered class ${row.registeredClass}, saw ${row.predictedClass}`
        : `${when} ${row.verdict.observation.plate}: ${row.verdict.status}`;
      feedPane.append(el("p", { class: cls }, text));
    }
  }
  void renderFeed();
  setInterval(() => void renderFeed(), 5000);
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mountApp(document.getElementById("app") as HTMLElement);
}
