"""Exact cosine retrieval over the dictionary embedding matrix plus label
voting.

The index is immutable after build. Search is exact brute force: one
matrix-vector product over unit rows, then top-k selection with ties broken
by ascending entry id. Voting aggregates match similarities per modern
label, which deduplicates the candidate list the way the review interface
expects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from . import encoder as encoder_mod
from .encoder import BlockGradEncoder
from .glyph import Glyph, normalize
from .rng import hash64


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Index:
    embeddings: np.ndarray  # (count, dim) float32, unit rows
    entry_ids: np.ndarray  # (count,) uint64
    labels: list[str]
    generation: int
    encoder_id: str
    fingerprint: str = ""

    def __post_init__(self):
        if self.embeddings.ndim != 2:
            raise ValueError("embeddings must be 2-D")
        if not (len(self.entry_ids) == len(self.labels) == self.embeddings.shape[0]):
            raise ValueError("parallel arrays must have equal length")
        self.embeddings.setflags(write=False)
        self.entry_ids.setflags(write=False)

    @property
    def count(self) -> int:
        return self.embeddings.shape[0]

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]


@dataclass(frozen=True)
class Match:
    entry_id: int
    label: str
    similarity: float
    rank: int


@dataclass(frozen=True)
class LabelVote:
    label: str
    score: float
    best_similarity: float
    supporting_entry_ids: tuple[int, ...]


@dataclass(frozen=True)
class RetrievalResult:
    query_id: int
    matches: list[Match]
    label_ranking: list[LabelVote]
    index_generation: int


def build_index(dictionary, enc=None) -> Index:
    """Embed every dictionary entry in manifest order."""
    enc = enc or BlockGradEncoder()
    if not dictionary.entries:
        raise ValueError("cannot index an empty dictionary")
    rows = np.empty((len(dictionary.entries), enc.dim), dtype=np.float32)
    for i, entry in enumerate(dictionary.entries):
        try:
            rows[i] = enc.embed(entry.glyph)
        except encoder_mod.EmptyGlyph as exc:
            raise encoder_mod.EmptyGlyph(f"entry {entry.entry_id:016x}: {exc}") from exc
    return Index(
        embeddings=rows,
        entry_ids=np.array([e.entry_id for e in dictionary.entries], dtype=np.uint64),
        labels=[e.label for e in dictionary.entries],
        generation=dictionary.generation,
        encoder_id=enc.encoder_id,
        fingerprint=dictionary.config_fingerprint,
    )


def similarities(ix: Index, q: np.ndarray) -> np.ndarray:
    """Cosine similarity of q against every row (dot of unit vectors)."""
    if q.shape != (ix.dim,):
        raise DimensionMismatch(f"query dim {q.shape} vs index dim {ix.dim}")
    return ix.embeddings @ q.astype(np.float32)


def query_topk(ix: Index, q: np.ndarray, k: int) -> list[Match]:
    """Exact top-k by cosine; ties broken by ascending entry id; k clamped."""
    if k < 1:
        raise ValueError("k must be >= 1")
    sims = similarities(ix, q)
    k = min(k, ix.count)
    if k == ix.count:
        chosen = np.arange(ix.count)
    else:
        # kth-value threshold, then exact tie handling at the boundary
        kth = np.partition(sims, ix.count - k)[ix.count - k]
        above = np.nonzero(sims > kth)[0]
        at = np.nonzero(sims == kth)[0]
        need = k - len(above)
        at = at[np.argsort(ix.entry_ids[at], kind="stable")][:need]
        chosen = np.concatenate([above, at])
    order = np.lexsort((ix.entry_ids[chosen], -sims[chosen].astype(np.float64)))
    chosen = chosen[order]
    return [
        Match(int(ix.entry_ids[i]), ix.labels[i], float(sims[i]), rank)
        for rank, i in enumerate(chosen)
    ]


def topk_oracle(ix: Index, q: np.ndarray, k: int) -> list[Match]:
    """Independent full-sort route used to cross-check query_topk."""
    sims = similarities(ix, q)
    order = np.lexsort((ix.entry_ids, -sims.astype(np.float64)))[: min(k, ix.count)]
    return [
        Match(int(ix.entry_ids[i]), ix.labels[i], float(sims[i]), rank)
        for rank, i in enumerate(order)
    ]


def vote_labels(matches: list[Match], rule: str = "sum") -> list[LabelVote]:
    """Aggregate ranked matches into a deduplicated label ranking.

    rule="sum" scores each label by the sum of its match similarities
    (default); rule="count" scores by the number of matches. Order is
    (score desc, best similarity desc, label codepoint asc).
    """
    if rule not in ("sum", "count"):
        raise ValueError(f"unknown voting rule {rule!r}")
    by_label: dict[str, list[Match]] = {}
    for m in matches:
        by_label.setdefault(m.label, []).append(m)
    votes = []
    for label, ms in by_label.items():
        score = sum(m.similarity for m in ms) if rule == "sum" else float(len(ms))
        best = max(m.similarity for m in ms)
        votes.append(LabelVote(label, score, best, tuple(m.entry_id for m in ms)))
    votes.sort(key=lambda v: (-v.score, -v.best_similarity, ord(v.label)))
    return votes


def decipher(
    ix: Index,
    image: np.ndarray,
    k: int = 50,
    enc=None,
    salt: int = 0,
    rule: str = "sum",
) -> RetrievalResult:
    """Full query path: normalize, embed, top-k, vote."""
    enc = enc or BlockGradEncoder()
    g = normalize(image)
    return decipher_glyph(ix, g, k, enc=enc, salt=salt, rule=rule, query_bytes=image.tobytes())


def decipher_glyph(
    ix: Index,
    g: Glyph,
    k: int = 50,
    enc=None,
    salt: int = 0,
    rule: str = "sum",
    query_bytes: bytes | None = None,
) -> RetrievalResult:
    enc = enc or BlockGradEncoder()
    q = enc.embed(g)
    matches = query_topk(ix, q, k)
    return RetrievalResult(
        query_id=hash64(query_bytes if query_bytes is not None else g.pixels.tobytes(), salt),
        matches=matches,
        label_ranking=vote_labels(matches, rule),
        index_generation=ix.generation,
    )


# -- persistence -------------------------------------------------------------


def save_index(ix: Index, store_path, meta_path) -> None:
    encoder_mod.save_store(store_path, ix.embeddings)
    meta = {
        "generation": ix.generation,
        "dim": ix.dim,
        "count": ix.count,
        "encoder_id": ix.encoder_id,
        "dictionary_fingerprint": ix.fingerprint,
        "entry_ids": [f"{int(e):016x}" for e in ix.entry_ids],
        "labels": list(ix.labels),
    }
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def load_index(store_path, meta_path) -> Index:
    rows = encoder_mod.load_store(store_path)
    with open(meta_path, encoding="utf-8") as fh:
        meta = json.load(fh)
    return Index(
        embeddings=rows,
        entry_ids=np.array([int(s, 16) for s in meta["entry_ids"]], dtype=np.uint64),
        labels=list(meta["labels"]),
        generation=int(meta["generation"]),
        encoder_id=meta["encoder_id"],
        fingerprint=meta.get("dictionary_fingerprint", ""),
    )
