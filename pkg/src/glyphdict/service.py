"""HTTP service for the scholar workbench: query, evidence, annotations.

JSON over HTTP/1.1; image upload is multipart; variant images are served by
entry id. Annotations are append-only newline-delimited JSON with fsync, so
the log is trivially auditable; every result and annotation carries the
index generation it was computed against. 64-bit identifiers travel as
16-digit hex strings (JSON numbers cannot hold them).
"""

from __future__ import annotations

import datetime as dt
import io
import json
import os
import threading
import time

import numpy as np
from fastapi import FastAPI, File, HTTPException, Query, UploadFile
from fastapi.responses import FileResponse, JSONResponse
from PIL import Image, UnidentifiedImageError

from . import glyph as G
from .encoder import BlockGradEncoder
from .ids import load_ids_table
from .retrieval import build_index, decipher_glyph, load_index
from .rng import hash64
from .synthesis import load_dictionary

MAX_LABELS = 100
EVIDENCE_VARIANTS = 3

VERDICTS = ("confirmed", "rejected", "uncertain")


def _utc_now() -> str:
    return dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


class AnnotationStore:
    """Append-only ndjson log; single-writer, fsync per append."""

    def __init__(self, path: str):
        self.path = path
        self._lock = threading.Lock()
        self._count = 0
        if os.path.exists(path):
            with open(path, encoding="utf-8") as fh:
                self._count = sum(1 for line in fh if line.strip())

    def append(self, record: dict) -> None:
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._count += 1

    @property
    def count(self) -> int:
        return self._count

    def for_query(self, query_id: str) -> list[dict]:
        if not os.path.exists(self.path):
            return []
        out = []
        with open(self.path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                if record["query_id"] == query_id:
                    out.append(record)
        return out


def create_app(dict_dir: str, data_dir: str, static_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="glyphdict workbench")
    enc = BlockGradEncoder()

    dictionary = load_dictionary(dict_dir)
    store_path = os.path.join(dict_dir, "embeddings.bin")
    meta_path = os.path.join(dict_dir, "index_meta.json")
    if os.path.exists(store_path) and os.path.exists(meta_path):
        index = load_index(store_path, meta_path)
    else:
        index = build_index(dictionary, enc)
    entry_images = {
        f"{e.entry_id:016x}": os.path.join(dict_dir, "images", f"{e.entry_id:016x}.png")
        for e in dictionary.entries
    }
    glosses: dict[str, str] = {}
    ids_path = os.path.join(dict_dir, "ids.tsv")
    if os.path.exists(ids_path):
        glosses = {label: gloss for label, (_ids, gloss) in load_ids_table(ids_path).items()}
    variants_by_label: dict[str, list[str]] = {}
    for e in dictionary.entries:
        variants_by_label.setdefault(e.label, []).append(f"{e.entry_id:016x}")

    os.makedirs(os.path.join(data_dir, "sessions"), exist_ok=True)
    os.makedirs(os.path.join(data_dir, "queries"), exist_ok=True)
    annotations = AnnotationStore(os.path.join(data_dir, "annotations.ndjson"))
    app.state.index = index
    app.state.dictionary = dictionary

    def session_path(query_id: str) -> str:
        return os.path.join(data_dir, "sessions", f"{query_id}.json")

    @app.post("/api/query")
    async def post_query(
        image: UploadFile = File(...),
        k: int = Query(default=50, ge=1),
        n: int = Query(default=10, ge=1, le=MAX_LABELS),
    ):
        raw = await image.read()
        try:
            with Image.open(io.BytesIO(raw)) as im:
                levels = np.asarray(im.convert("L"), dtype=np.uint8)
        except UnidentifiedImageError:
            raise HTTPException(status_code=400, detail="undecodable image")
        try:
            g = G.normalize(levels)
        except G.EmptyImage as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        result = decipher_glyph(index, g, k=k, enc=enc, salt=time.time_ns(), query_bytes=raw)
        query_id = f"{result.query_id:016x}"
        candidates = []
        for rank, vote in enumerate(result.label_ranking[:n]):
            supporting = [f"{eid:016x}" for eid in vote.supporting_entry_ids[:EVIDENCE_VARIANTS]]
            if len(supporting) < EVIDENCE_VARIANTS:
                extra = [
                    h for h in variants_by_label.get(vote.label, []) if h not in supporting
                ]
                supporting += extra[: EVIDENCE_VARIANTS - len(supporting)]
            candidates.append(
                {
                    "rank": rank,
                    "label": vote.label,
                    "gloss": glosses.get(vote.label, ""),
                    "vote_score": vote.score,
                    "best_similarity": vote.best_similarity,
                    "variants": supporting,
                }
            )
        session = {
            "query_id": query_id,
            "created_at": _utc_now(),
            "index_generation": result.index_generation,
            "k": k,
            "n": n,
            "candidates": candidates,
            "image_url": f"/api/queries/{query_id}/image",
        }
        with open(os.path.join(data_dir, "queries", f"{query_id}.png"), "wb") as fh:
            fh.write(raw)
        with open(session_path(query_id), "w", encoding="utf-8") as fh:
            json.dump(session, fh, ensure_ascii=False, sort_keys=True)
        return JSONResponse(session)

    @app.get("/api/sessions/{query_id}")
    def get_session(query_id: str):
        path = session_path(query_id)
        if not os.path.exists(path):
            raise HTTPException(status_code=404, detail="unknown query_id")
        with open(path, encoding="utf-8") as fh:
            session = json.load(fh)
        session["annotations"] = annotations.for_query(query_id)
        return JSONResponse(session)

    @app.get("/api/entries/{entry_id}/image")
    def get_entry_image(entry_id: str):
        path = entry_images.get(entry_id)
        if path is None or not os.path.exists(path):
            raise HTTPException(status_code=404, detail="unknown entry_id")
        return FileResponse(path, media_type="image/png")

    @app.get("/api/queries/{query_id}/image")
    def get_query_image(query_id: str):
        path = os.path.join(data_dir, "queries", f"{query_id}.png")
        if not os.path.exists(path):
            raise HTTPException(status_code=404, detail="unknown query_id")
        return FileResponse(path, media_type="image/png")

    @app.post("/api/annotations")
    async def post_annotation(payload: dict):
        query_id = payload.get("query_id", "")
        if not os.path.exists(session_path(query_id)):
            raise HTTPException(status_code=404, detail="unknown query_id")
        verdict = payload.get("verdict")
        if verdict not in VERDICTS:
            raise HTTPException(status_code=422, detail=f"verdict must be one of {VERDICTS}")
        chosen = payload.get("chosen_label")
        if (verdict == "confirmed") != (chosen is not None and chosen != ""):
            raise HTTPException(status_code=422, detail="chosen_label is required iff verdict is confirmed")
        confidence = payload.get("confidence")
        if not isinstance(confidence, int) or not 1 <= confidence <= 5:
            raise HTTPException(status_code=422, detail="confidence must be an integer in [1, 5]")
        record = {
            "annotation_id": f"{hash64('annotation', query_id, annotations.count):016x}",
            "query_id": query_id,
            "verdict": verdict,
            "chosen_label": chosen if verdict == "confirmed" else None,
            "confidence": confidence,
            "note": str(payload.get("note", "")),
            "created_at": _utc_now(),
            "index_generation": index.generation,
        }
        annotations.append(record)
        return JSONResponse(record)

    @app.get("/api/annotations")
    def list_annotations(query_id: str = Query(...)):
        return JSONResponse(annotations.for_query(query_id))

    @app.get("/api/stats")
    def stats():
        return JSONResponse(
            {
                "label_count": len(dictionary.charset),
                "entry_count": len(dictionary.entries),
                "index_generation": index.generation,
                "encoder_id": index.encoder_id,
                "dim": index.dim,
            }
        )

    if static_dir and os.path.isdir(static_dir):
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
