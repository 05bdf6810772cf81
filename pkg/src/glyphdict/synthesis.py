"""Two-stage variant synthesis: drafting from font renders, then
structure-guided stroke refinement, producing the searchable dictionary.

Stage 1 (drafting) picks one font render per seed, applies a small affine
jitter, thins to a skeleton, prunes short spurs and re-strokes at a narrow
width: a procedural stand-in for a learned draft generator, behind the same
two-stage interface. Stage 2 (refinement) perturbs each component region of
the composition layout independently (branch attrition, stroke merging,
elastic warp, translation jitter) while enforcing a minimum per-region ink
retention, so component identity and layout survive the perturbation.

Every entry is generated from a seed derived solely from
(global_seed, label, variant_index), so results are independent of worker
count and scheduling order.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import glyph as G
from . import kernels
from .ids import IdsTree, LayoutParams, layout, serialize
from .rng import Rng, hash64, uniform_field

CANVAS = G.CANVAS


class EmptyDraft(RuntimeError):
    """Drafting (after retries) produced a glyph with no ink."""

    def __init__(self, msg: str, variant_index: int | None = None):
        super().__init__(msg)
        self.variant_index = variant_index


class ContainmentUnsatisfiable(RuntimeError):
    """A region could not retain enough ink within the retry budget."""

    def __init__(self, msg: str, variant_index: int | None = None):
        super().__init__(msg)
        self.variant_index = variant_index


class DuplicateLabel(ValueError):
    pass


class BuildFailed(RuntimeError):
    def __init__(self, failures: list[dict]):
        super().__init__(f"{len(failures)} character(s) produced no variants")
        self.failures = failures


@dataclass(frozen=True)
class CharSpec:
    label: str
    ids: IdsTree
    font_renders: tuple[G.Glyph, ...]

    def __post_init__(self):
        if not self.font_renders:
            raise ValueError(f"{self.label!r}: needs at least one font render")


@dataclass(frozen=True)
class SrParams:
    attrition_prob: float = 0.0
    merge_radius: int = 0
    warp_amplitude: float = 0.0
    region_jitter: int = 0
    containment_min: float = 0.7

    def __post_init__(self):
        if self.containment_min < 0.5:
            raise ValueError("containment_min must be >= 0.5")
        if self.warp_amplitude > 6:
            raise ValueError("warp_amplitude must be <= 6")
        if self.region_jitter > 5:
            raise ValueError("region_jitter must be <= 5")

    def as_dict(self) -> dict:
        return {
            "attrition_prob": self.attrition_prob,
            "merge_radius": self.merge_radius,
            "warp_amplitude": self.warp_amplitude,
            "region_jitter": self.region_jitter,
            "containment_min": self.containment_min,
        }


def schedule_params(variant_index: int) -> SrParams:
    """Per-index perturbation schedule: index 0 is the clean anchor, higher
    indices ramp linearly to the strongest setting (clamped past 7)."""
    if variant_index <= 0:
        return SrParams()
    step = (min(variant_index, 7) - 1) / 6.0
    return SrParams(
        attrition_prob=0.05 + 0.25 * step,
        merge_radius=int(round(2.0 * step)),
        warp_amplitude=1.0 + 3.0 * step,
        region_jitter=int(round(3.0 * step)),
    )


@dataclass(frozen=True)
class DictionaryEntry:
    entry_id: int
    label: str
    variant_index: int
    glyph: G.Glyph
    seed: int
    ids_string: str
    generation: int = 0
    stage_trace: dict = field(default_factory=dict, compare=False)


@dataclass
class Dictionary:
    entries: list[DictionaryEntry]
    generation: int
    charset: list[str]
    config_fingerprint: str
    k_variants: int
    global_seed: int
    canvas: int = CANVAS


# -- stage 1: drafting --------------------------------------------------------

PRUNE_MIN_LENGTH = 4
DRAFT_WIDTHS = (2, 3)
DRAFT_ROTATION_DEG = 6.0
DRAFT_SHEAR = 0.08
DRAFT_SCALE = (0.92, 1.08)


def fad_draft(spec: CharSpec, seed: int) -> G.Glyph:
    """Stage-1 draft: seeded font pick, affine jitter, thin, prune, re-stroke."""
    g, _trace = _fad_draft_traced(spec, seed)
    return g


def _fad_draft_traced(spec: CharSpec, seed: int) -> tuple[G.Glyph, dict]:
    rng = Rng(seed)
    font_index = rng.below(len(spec.font_renders))
    rotation = rng.uniform(-DRAFT_ROTATION_DEG, DRAFT_ROTATION_DEG) * np.pi / 180.0
    shear = rng.uniform(-DRAFT_SHEAR, DRAFT_SHEAR)
    scale = rng.uniform(*DRAFT_SCALE)
    width = DRAFT_WIDTHS[rng.below(len(DRAFT_WIDTHS))]

    warped = G.affine_warp(spec.font_renders[font_index], rotation, shear, scale)
    if warped.is_empty():
        raise EmptyDraft(f"{spec.label!r}: affine jitter removed all ink")
    skeleton = kernels.thin(warped.mask())
    pruned = G.prune_spurs(skeleton, PRUNE_MIN_LENGTH)
    if pruned.sum() == 0:
        raise EmptyDraft(f"{spec.label!r}: pruning removed all ink")
    stroked = kernels.dilate_disc(pruned, width // 2)
    trace = {
        "font_index": font_index,
        "rotation": rotation,
        "shear": shear,
        "scale": scale,
        "width": width,
        "skeleton_px": int(pruned.sum()),
    }
    return G.normalize_mask(stroked), trace


# -- stage 2: structure-guided refinement -------------------------------------


def _skeleton_branches(mask: np.ndarray) -> list[np.ndarray]:
    """Split a skeleton into branch segments: connected runs left after
    removing junction pixels (degree >= 3)."""
    deg = G._degree_map(mask)
    segments = mask.copy()
    segments[deg >= 3] = 0
    labels, count = kernels.label_components(segments)
    return [np.argwhere(labels == lab) for lab in range(1, count + 1)]


def _perturb_patch(sub: np.ndarray, params: SrParams, seed: int) -> np.ndarray:
    h, w = sub.shape
    rng = Rng(hash64(seed, "patch"))
    out = sub.copy()

    if params.attrition_prob > 0 and out.any():
        sk = kernels.thin(out)
        for i, seg in enumerate(_skeleton_branches(sk)):
            if rng.uniform() < params.attrition_prob:
                hole = np.zeros_like(out)
                hole[seg[:, 0], seg[:, 1]] = 1
                out = np.where(kernels.dilate_disc(hole, 2) != 0, np.uint8(0), out)

    if params.merge_radius > 0:
        r = int(params.merge_radius)
        out = kernels.erode_disc(kernels.dilate_disc(out, r), r)

    if params.warp_amplitude > 0 and h >= 4 and w >= 4:
        amp = params.warp_amplitude
        grid = 3
        fy = (uniform_field(hash64(seed, "warpy"), grid * grid) * 2.0 - 1.0) * amp
        fx = (uniform_field(hash64(seed, "warpx"), grid * grid) * 2.0 - 1.0) * amp
        dy = G._bilinear_resize(fy.reshape(grid, grid), h, w)
        dx = G._bilinear_resize(fx.reshape(grid, grid), h, w)
        ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
        out = (G._sample_bilinear(out.astype(np.float64), ys + dy, xs + dx) >= 0.5).astype(np.uint8)

    if params.region_jitter > 0:
        j = params.region_jitter
        dy = rng.below(2 * j + 1) - j
        dx = rng.below(2 * j + 1) - j
        shifted = np.zeros_like(out)
        sy0, sx0 = max(0, -dy), max(0, -dx)
        ty0, tx0 = max(0, dy), max(0, dx)
        hh, ww = h - abs(dy), w - abs(dx)
        if hh > 0 and ww > 0:
            shifted[ty0 : ty0 + hh, tx0 : tx0 + ww] = out[sy0 : sy0 + hh, sx0 : sx0 + ww]
        out = shifted

    return out


SR_REGION_ATTEMPTS = 8


def sr_refine(draft: G.Glyph, ids: IdsTree, params: SrParams, seed: int) -> G.Glyph:
    """Stage-2 refinement: perturb each component region independently,
    resampling (up to 8 attempts) any region that loses too much ink share
    relative to the draft."""
    if draft.is_empty():
        raise ValueError("draft is empty")
    size = draft.size
    canvas = (0, 0, size, size)
    regions = layout(ids, canvas, LayoutParams(jitter_seed=hash64(seed, "layout")))
    draft_shares = [G.ink_fraction(draft, r.box) for r in regions]

    work = draft.mask()
    for region, draft_share in zip(regions, draft_shares):
        x0, y0, x1, y1 = region.box
        floor = params.containment_min * draft_share
        accepted = False
        for attempt in range(SR_REGION_ATTEMPTS):
            sub_seed = hash64(seed, "region", region.leaf_index, attempt)
            candidate = work.copy()
            candidate[y0:y1, x0:x1] = _perturb_patch(work[y0:y1, x0:x1], params, sub_seed)
            total = int(candidate.sum())
            share = int(candidate[y0:y1, x0:x1].sum()) / total if total else 0.0
            if share >= floor:
                work = candidate
                accepted = True
                break
        if not accepted:
            raise ContainmentUnsatisfiable(
                f"region {region.leaf_index} kept < {params.containment_min:.2f} of its draft ink share"
            )
    if work.sum() == 0:
        raise ContainmentUnsatisfiable("refinement removed all ink")
    return G.normalize_mask(work)


# -- variant generation --------------------------------------------------------

DRAFT_RETRIES = 8
SR_RETRIES = 4


def _draft_seeds(spec: CharSpec, base_seed: int, variant_index: int) -> list[int]:
    """Derived draft seeds, reordered so the first ones select font
    variant_index % n_fonts: variants then cover every font with graded
    severities instead of clustering on whichever font the hash favors."""
    n = len(spec.font_renders)
    want = variant_index % n
    seeds = [hash64(base_seed, "draft", r) for r in range(DRAFT_RETRIES * 8)]
    preferred = [s for s in seeds if Rng(s).below(n) == want]
    rest = [s for s in seeds if Rng(s).below(n) != want]
    return (preferred + rest)[: DRAFT_RETRIES + 1]


def make_entry(
    spec: CharSpec,
    variant_index: int,
    global_seed: int,
    params: SrParams | None = None,
    generation: int = 0,
    seed: int | None = None,
) -> DictionaryEntry:
    """Generate one dictionary entry; deterministic in its arguments."""
    params = params or schedule_params(variant_index)
    base_seed = seed if seed is not None else hash64(global_seed, spec.label, variant_index)

    draft = None
    trace: dict = {}
    for draft_seed in _draft_seeds(spec, base_seed, variant_index):
        try:
            draft, trace = _fad_draft_traced(spec, draft_seed)
            break
        except EmptyDraft:
            continue
    if draft is None:
        raise EmptyDraft(f"{spec.label!r}: no draft after {DRAFT_RETRIES} retries", variant_index)

    refined = None
    for retry in range(SR_RETRIES + 1):
        try:
            refined = sr_refine(draft, spec.ids, params, hash64(base_seed, "sr", retry))
            break
        except ContainmentUnsatisfiable:
            continue
    if refined is None:
        raise ContainmentUnsatisfiable(
            f"{spec.label!r} variant {variant_index}: containment unsatisfiable", variant_index
        )

    return DictionaryEntry(
        entry_id=hash64(spec.label, variant_index, global_seed),
        label=spec.label,
        variant_index=variant_index,
        glyph=refined,
        seed=base_seed,
        ids_string=serialize(spec.ids),
        generation=generation,
        stage_trace={"draft": trace, "sr": params.as_dict()},
    )


def generate_variants(spec: CharSpec, k: int, global_seed: int, workers: int = 1) -> list[DictionaryEntry]:
    """K entries for one character; order-independent via derived seeds."""
    if k < 1:
        raise ValueError("k must be >= 1")
    indices = list(range(k))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda vi: make_entry(spec, vi, global_seed), indices))
    return [make_entry(spec, vi, global_seed) for vi in indices]


def config_fingerprint(charset: list[CharSpec], k: int, global_seed: int, canvas: int = CANVAS) -> str:
    """SHA-256 over every build input: parameters, schedule, composition
    strings, and the font render bytes themselves."""
    payload = {
        "k_variants": k,
        "global_seed": f"{global_seed & (2**64 - 1):016x}",
        "canvas": canvas,
        "schedule": [schedule_params(i).as_dict() for i in range(k)],
        "charset": [
            {
                "label": spec.label,
                "ids": serialize(spec.ids),
                "renders": f"{hash64(*[g.pixels.tobytes() for g in spec.font_renders]):016x}",
            }
            for spec in sorted(charset, key=lambda s: ord(s.label))
        ],
    }
    blob = json.dumps(payload, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


def build_dictionary(
    charset: list[CharSpec],
    k: int,
    global_seed: int,
    out_dir=None,
    workers: int = 1,
) -> tuple[Dictionary, dict]:
    """Build all variants for a charset; returns (dictionary, build report).

    Characters whose generation fails entirely are collected in the report;
    the build raises BuildFailed at the end if any exist. When out_dir is
    given the dictionary is also written to disk.
    """
    labels = [spec.label for spec in charset]
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise DuplicateLabel(f"duplicate labels in charset: {dupes}")

    fingerprint = config_fingerprint(charset, k, global_seed)
    ordered = sorted(charset, key=lambda s: ord(s.label))
    entries: list[DictionaryEntry] = []
    failures: list[dict] = []

    def build_one(spec: CharSpec):
        try:
            return spec.label, generate_variants(spec, k, global_seed), None
        except (EmptyDraft, ContainmentUnsatisfiable) as exc:
            return spec.label, [], {"label": spec.label, "error": str(exc)}

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(build_one, ordered))
    else:
        results = [build_one(spec) for spec in ordered]

    for _label, char_entries, failure in results:
        entries.extend(char_entries)
        if failure:
            failures.append(failure)

    dictionary = Dictionary(
        entries=entries,
        generation=0,
        charset=[s.label for s in ordered if s.label not in {f["label"] for f in failures}],
        config_fingerprint=fingerprint,
        k_variants=k,
        global_seed=global_seed,
    )
    seen_ids = {e.entry_id for e in entries}
    if len(seen_ids) != len(entries):
        raise RuntimeError("entry id collision; change global_seed")

    report = {
        "charset_size": len(charset),
        "entry_count": len(entries),
        "k_variants": k,
        "fingerprint": fingerprint,
        "failures": failures,
    }
    if failures:
        raise BuildFailed(failures)
    if out_dir is not None:
        save_dictionary(dictionary, out_dir)
    return dictionary, report


# -- persistence ---------------------------------------------------------------


def save_dictionary(d: Dictionary, out_dir, link_from: dict | None = None) -> None:
    """Write manifest.tsv, config.json and images/.

    link_from maps entry_id -> existing image path; those entries are
    hard-linked instead of re-encoded (refinement snapshots use this to
    keep unchanged entries byte-identical and cheap).
    """
    out_dir = os.fspath(out_dir)
    images = os.path.join(out_dir, "images")
    os.makedirs(images, exist_ok=True)
    rows = []
    for e in sorted(d.entries, key=lambda e: (ord(e.label), e.variant_index)):
        rel = f"images/{e.entry_id:016x}.png"
        dst = os.path.join(out_dir, rel)
        src = (link_from or {}).get(e.entry_id)
        if src and os.path.exists(src):
            if os.path.exists(dst):
                os.unlink(dst)
            try:
                os.link(src, dst)
            except OSError:
                G.save_png(e.glyph, dst)
        else:
            G.save_png(e.glyph, dst)
        rows.append(
            "\t".join(
                [
                    f"{e.entry_id:016x}",
                    f"{ord(e.label):04x}",
                    str(e.variant_index),
                    f"{e.seed:016x}",
                    e.ids_string,
                    rel,
                    str(e.generation),
                ]
            )
        )
    with open(os.path.join(out_dir, "manifest.tsv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + ("\n" if rows else ""))
    config = {
        "k_variants": d.k_variants,
        "global_seed": f"{d.global_seed & (2**64 - 1):016x}",
        "canvas": d.canvas,
        "generation": d.generation,
        "charset": d.charset,
        "schedule": [schedule_params(i).as_dict() for i in range(d.k_variants)],
        "fingerprint": d.config_fingerprint,
    }
    with open(os.path.join(out_dir, "config.json"), "w", encoding="utf-8") as fh:
        json.dump(config, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def load_dictionary(path) -> Dictionary:
    path = os.fspath(path)
    with open(os.path.join(path, "config.json"), encoding="utf-8") as fh:
        config = json.load(fh)
    entries = []
    with open(os.path.join(path, "manifest.tsv"), encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            eid, label_hex, vi, seed, ids_string, rel, gen = line.split("\t")
            entries.append(
                DictionaryEntry(
                    entry_id=int(eid, 16),
                    label=chr(int(label_hex, 16)),
                    variant_index=int(vi),
                    glyph=G.load_glyph_raw(os.path.join(path, rel)),
                    seed=int(seed, 16),
                    ids_string=ids_string,
                    generation=int(gen),
                )
            )
    return Dictionary(
        entries=entries,
        generation=int(config["generation"]),
        charset=list(config["charset"]),
        config_fingerprint=config["fingerprint"],
        k_variants=int(config["k_variants"]),
        global_seed=int(config["global_seed"], 16),
        canvas=int(config.get("canvas", CANVAS)),
    )
