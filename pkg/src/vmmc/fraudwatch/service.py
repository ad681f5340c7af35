"""Fraud-watch HTTP API.

POST /registry  {"plate": "...", "class_id": k}        -> upserted entry
POST /observe   {"plate": "..." | "plate_image": path,
                 "class_scores": [{"class": k, "prob": p}, ...]
                 | "vehicle_image": path}               -> Verdict JSON
GET  /verdicts?status=fraud                             -> filtered history
"""

from __future__ import annotations

from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException

from ..classifier.network import ClassScores, ClassifierNetwork, predict
from ..dataset import preprocess
from .core import (
    DEFAULT_CONFIDENCE_FLOOR,
    AuditLog,
    Observation,
    Registry,
    SidecarPlateReader,
    evaluate,
)


def _scores_from_json(raw: list[dict]) -> ClassScores:
    try:
        return ClassScores(tuple((int(e["class"]), float(e["prob"])) for e in raw))
    except (KeyError, TypeError, ValueError) as exc:
        raise HTTPException(422, f"bad class_scores: {exc}")


def create_fraudwatch_app(
    registry: Registry,
    classifier: ClassifierNetwork | None = None,
    audit_log: AuditLog | None = None,
    confidence_floor: float = DEFAULT_CONFIDENCE_FLOOR,
    plate_reader=None,
) -> FastAPI:
    app = FastAPI(title="fraud watch")
    verdicts: list[dict] = []
    reader = plate_reader or SidecarPlateReader()
    state = {"skipped": 0}

    def _classify_image(path_str: str) -> ClassScores:
        if classifier is None:
            raise HTTPException(422, "no classifier loaded; send class_scores instead of vehicle_image")
        path = Path(path_str)
        if not path.is_file():
            raise HTTPException(404, f"vehicle_image not found: {path}")
        from PIL import Image

        with Image.open(path) as im:
            arr = np.asarray(im.convert("RGB"))
        return predict(classifier, preprocess(arr))

    @app.post("/registry")
    def upsert(body: dict):
        plate = body.get("plate")
        class_id = body.get("class_id")
        if not plate or class_id is None:
            raise HTTPException(422, "registry upsert needs plate and class_id")
        try:
            entry = registry.register(str(plate), int(class_id))
        except ValueError as exc:
            raise HTTPException(422, str(exc))
        return {"plate": entry.plate, "class_id": entry.class_id}

    @app.post("/observe")
    def observe(body: dict):
        plate = body.get("plate")
        if plate is None and body.get("plate_image"):
            plate = reader(body["plate_image"])
            if plate is None:
                state["skipped"] += 1
                return {"verdict": None, "skipped": state["skipped"]}
        if not plate:
            raise HTTPException(422, "observation needs plate or a readable plate_image")
        if body.get("class_scores") is not None:
            scores = _scores_from_json(body["class_scores"])
        elif body.get("vehicle_image"):
            scores = _classify_image(body["vehicle_image"])
        else:
            raise HTTPException(422, "observation needs class_scores or vehicle_image")
        obs = Observation(plate=str(plate), predicted=scores, camera_id=str(body.get("camera_id", "")))
        verdict = evaluate(obs, registry, confidence_floor)
        payload = verdict.as_json()
        verdicts.append(payload)
        if audit_log is not None:
            audit_log.append(verdict)
        return payload

    @app.get("/verdicts")
    def list_verdicts(status: str | None = None):
        if status is None:
            return verdicts
        return [v for v in verdicts if v["status"] == status]

    return app
