"""HTTP review API backing the browser annotation queue.

GET  /review/next        -> next pending item (leased), 204 when done
POST /review/{id}        -> {"action": "label", "class_id": k, "bbox": [...]}
                            or {"action": "delete"}; optional "token" makes
                            retries idempotent
GET  /review/stats       -> counts by status
GET  /review/{id}/image  -> the image file for the item
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from fastapi.responses import FileResponse

from ..boxes import BoundingBox
from .store import AnnotationStore, DecisionError, Delete, Label, ReviewItem


def _item_json(item: ReviewItem) -> dict:
    return {
        "item_id": item.item_id,
        "image_path": item.image_path,
        "status": item.status,
        "assigned_class": item.assigned_class,
        "best_candidate": None
        if item.best_candidate is None
        else {
            "bbox": list(item.best_candidate.bbox.as_tuple()),
            "confidence": item.best_candidate.confidence,
        },
    }


def create_review_app(store: AnnotationStore, image_root: str | Path | None = None, lease_s: float = 300.0) -> FastAPI:
    app = FastAPI(title="annotation review")
    root = Path(image_root) if image_root is not None else None
    seen_tokens: dict[tuple[str, str], dict] = {}
    token_lock = threading.Lock()

    @app.get("/review/next")
    def review_next():
        item = store.lease_next(duration_s=lease_s)
        if item is None:
            return Response(status_code=204)
        return _item_json(item)

    @app.get("/review/stats")
    def review_stats():
        return store.stats()

    @app.post("/review/{item_id}")
    def review_decide(item_id: str, body: dict):
        token = body.get("token")
        if token is not None:
            with token_lock:
                cached = seen_tokens.get((item_id, token))
            if cached is not None:
                return cached
        action = body.get("action")
        try:
            if action == "label":
                bbox = body.get("bbox")
                if body.get("class_id") is None or bbox is None:
                    raise HTTPException(422, "label needs class_id and bbox")
                try:
                    decision = Label(int(body["class_id"]), BoundingBox(*[float(v) for v in bbox]))
                except (TypeError, ValueError) as exc:
                    raise HTTPException(422, f"bad label payload: {exc}")
                item = store.apply_decision(item_id, decision)
            elif action == "delete":
                item = store.apply_decision(item_id, Delete())
            else:
                raise HTTPException(422, f"unknown action {action!r}")
        except KeyError:
            raise HTTPException(404, f"no review item {item_id}")
        except DecisionError as exc:
            raise HTTPException(409, str(exc))
        result = {"item": _item_json(item), "stats": store.stats()}
        if token is not None:
            with token_lock:
                seen_tokens[(item_id, token)] = result
        return result

    @app.get("/review/{item_id}/image")
    def review_image(item_id: str):
        try:
            item = store.item(item_id)
        except KeyError:
            raise HTTPException(404, f"no review item {item_id}")
        path = Path(item.image_path)
        if root is not None:
            path = root / path
        if not path.is_file():
            raise HTTPException(404, f"image not found: {path}")
        return FileResponse(path)

    return app
