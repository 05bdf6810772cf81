"""Self-contained demo corpus: deterministic component renders, pseudo-ancient
probe glyphs, and the disk trees the CLI consumes.

No CJK font ships with the repo, so the demo charset is rendered
procedurally: every component codepoint maps (via its hash) to a stable
set of strokes on a coarse grid, composed per the character's structural
layout. Each demo "font" varies stroke width, slant and adds small seeded
modifications, giving the structural diversity across fonts that drafting
relies on. Real per-character bitmaps can replace these renders through the
same fonts/<name>/<codepoint_hex>.png tree without touching any other code.

Pseudo-ancient probes (benchmark queries, refinement exemplars) run the
regular two-stage synthesis plus an extra strong refinement pass, are
re-stroked at rubbing-like weight, and receive light degradation, which
simulates unseen field exemplars of known labels.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from importlib.resources import files

import numpy as np

from . import glyph as G
from . import kernels
from .degradation import DegradationSpec, Kind, degrade
from .ids import IdsTree, LayoutParams, layout, load_ids_table, parse
from .rng import Rng, hash64
from .synthesis import CharSpec, ContainmentUnsatisfiable, EmptyDraft, SrParams, fad_draft, sr_refine

DEMO_CHARSET_SIZE = 200


@dataclass(frozen=True)
class FontStyle:
    name: str
    seed: int
    stroke_width: int
    slant: float
    extra_strokes: int  # face-specific accretions beyond the shared base


DEMO_FONTS = (
    FontStyle("print", 0x44, 2, 0.00, 2),
    FontStyle("carved", 0x11, 2, 0.00, 1),
    FontStyle("brush", 0x22, 2, 0.06, 1),
    FontStyle("seal", 0x33, 3, -0.05, 2),
)


def bundled_table() -> dict[str, tuple[str, str]]:
    path = files("glyphdict").joinpath("data/ids_demo.tsv")
    return load_ids_table(str(path))


def demo_labels(n: int = DEMO_CHARSET_SIZE) -> list[str]:
    labels = list(bundled_table())
    if n > len(labels):
        raise ValueError(f"demo table has only {len(labels)} characters")
    return labels[:n]


# -- procedural component rendering -------------------------------------------

_GRID = 5  # stroke endpoints snap to a coarse grid inside each region


def _draw_segment(canvas: np.ndarray, p0, p1, width: int) -> None:
    """Rasterize a thick segment: pixels within width/2 of the line."""
    y0, x0 = p0
    y1, x1 = p1
    ys, xs = np.mgrid[0 : canvas.shape[0], 0 : canvas.shape[1]].astype(np.float64)
    dy, dx = y1 - y0, x1 - x0
    seg_len2 = dy * dy + dx * dx
    if seg_len2 == 0:
        dist2 = (ys - y0) ** 2 + (xs - x0) ** 2
    else:
        t = np.clip(((ys - y0) * dy + (xs - x0) * dx) / seg_len2, 0.0, 1.0)
        dist2 = (ys - (y0 + t * dy)) ** 2 + (xs - (x0 + t * dx)) ** 2
    canvas[dist2 <= (width / 2.0) ** 2] = 1


def _grid_point(rng: Rng) -> tuple[int, int]:
    return rng.below(_GRID), rng.below(_GRID)


def _component_strokes(component: str) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Base stroke set of a component in grid coordinates; a pure function
    of the codepoint, shared by every font.

    Strokes grow as a connected network: each new stroke starts from a point
    already on the glyph, the way real stroke systems join and cross. The
    junctions keep skeleton branches short, letting downstream branch
    attrition chip glyphs instead of deleting whole strokes.
    """
    rng = Rng(hash64("component", ord(component)))
    count = 3 + rng.below(3)
    anchors = [_grid_point(rng)]
    strokes = []
    for _ in range(count):
        a = anchors[rng.below(len(anchors))]
        roll = rng.below(6)
        span = 2 + rng.below(3)
        if roll < 2:  # horizontal
            b = (a[0], min(_GRID - 1, a[1] + span) if a[1] < _GRID // 2 else max(0, a[1] - span))
        elif roll < 4:  # vertical
            b = (min(_GRID - 1, a[0] + span) if a[0] < _GRID // 2 else max(0, a[0] - span), a[1])
        else:  # diagonal
            b = _grid_point(rng)
        if b == a:
            b = ((a[0] + 2) % _GRID, (a[1] + 1) % _GRID)
        strokes.append((a, b))
        anchors.append(b)
        anchors.append(((a[0] + b[0]) // 2, (a[1] + b[1]) // 2))
    return strokes


# Ornamentation: weighted terminal and joint blobs, the print-face
# elaboration of the demo corpus (cf. weighted brush terminals in modern
# typefaces). A blob's skeleton collapses to a spur shorter than the draft
# stage's prune threshold, so synthesis strips every blob from drafts while
# plain renders keep them: the demo's structural gap between ornate modern
# renders and pared-down ancient forms.
_BLOB_RADIUS = 3


def _ornament_blobs(component: str, font_seed: int):
    """Blob centers (grid coordinates) at stroke ends and midpoints."""
    strokes = _component_strokes(component)
    rng = Rng(hash64("ornament", ord(component), font_seed))
    blobs = []
    for (ay, ax), (by, bx) in strokes:
        blobs.append((float(ay), float(ax)))
        blobs.append((float(by), float(bx)))
        if rng.uniform() < 0.5:
            blobs.append(((ay + by) / 2.0, (ax + bx) / 2.0))
    return blobs


def _frame_strokes(rng: Rng) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Border strokes for components that surround another component."""
    m = _GRID - 1
    edges = [((0, 0), (0, m)), ((0, m), (m, m)), ((m, m), (m, 0)), ((m, 0), (0, 0))]
    keep = [e for e in edges if rng.uniform() < 0.85]
    return keep or edges[:3]


def _render_component(canvas: np.ndarray, box, component: str, font: FontStyle, hollow: bool) -> None:
    x0, y0, x1, y1 = box
    w, h = x1 - x0, y1 - y0
    if w < 4 or h < 4:
        return
    mx = max(1, int(round(0.12 * w)))
    my = max(1, int(round(0.12 * h)))
    inner_w, inner_h = w - 2 * mx, h - 2 * my
    font_rng = Rng(hash64("font-mod", font.seed, ord(component)))
    if hollow:
        strokes = _frame_strokes(Rng(hash64("frame", ord(component), font.seed)))
        blobs = []
    else:
        # faces share the base network plus terminal blobs; each face adds
        # its own connected accretion strokes, the way typeface families
        # diverge structurally
        strokes = list(_component_strokes(component))
        anchors = [p for s in strokes for p in s]
        for _ in range(font.extra_strokes):
            a = anchors[font_rng.below(len(anchors))]
            b = _grid_point(font_rng)
            if a != b:
                strokes.append((a, b))
                anchors.append(b)
        blobs = _ornament_blobs(component, font.seed)
    patch = np.zeros((h, w), dtype=np.uint8)

    def to_px(p) -> tuple[float, float]:
        gy, gx = p
        jy = font_rng.uniform(-0.08, 0.08) if not hollow else 0.0
        jx = font_rng.uniform(-0.08, 0.08) if not hollow else 0.0
        py = my + (gy + jy) / (_GRID - 1) * (inner_h - 1)
        px = mx + (gx + jx) / (_GRID - 1) * (inner_w - 1)
        return py, px

    base = font.stroke_width if min(inner_w, inner_h) >= 14 else max(1, font.stroke_width - 1)
    for a, b in strokes:
        _draw_segment(patch, to_px(a), to_px(b), base)
    blob_r = 4 if min(inner_w, inner_h) >= 14 else _BLOB_RADIUS
    for c in blobs:
        _draw_segment(patch, to_px(c), to_px(c), blob_r)
    if font.slant:
        ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
        sx = xs - font.slant * (ys - h / 2.0)
        patch = (G._sample_bilinear(patch.astype(np.float64), ys, sx) >= 0.5).astype(np.uint8)
    canvas[y0:y1, x0:x1] |= patch


def _leaf_flags(tree: IdsTree) -> list[tuple[str, bool]]:
    """(component, hollow) per leaf in preorder; a leaf is hollow when it is
    the outer child of a surround operator."""
    out: list[tuple[str, bool]] = []

    def walk(t: IdsTree, hollow: bool) -> None:
        if t.is_leaf:
            out.append((t.component, hollow))
            return
        kind = t.operator.layout_kind.value
        for i, child in enumerate(t.children):
            child_hollow = kind.startswith("surround") and i == 0
            walk(child, child_hollow)

    walk(tree, False)
    return out


def render_char(label: str, tree: IdsTree, font: FontStyle, size: int = G.CANVAS) -> G.Glyph:
    """Deterministic binary render of one character in one demo font."""
    canvas = np.zeros((size, size), dtype=np.uint8)
    margin = max(2, size // 24)
    box = (margin, margin, size - margin, size - margin)
    params = LayoutParams(jitter_seed=hash64("layout", font.seed, ord(label)))
    regions = layout(tree, box, params)
    flags = _leaf_flags(tree)
    for region, (component, hollow) in zip(regions, flags):
        _render_component(canvas, region.box, component, font, hollow)
    return G.normalize_mask(canvas, size)


def demo_charspecs(n: int = DEMO_CHARSET_SIZE, fonts=DEMO_FONTS) -> list[CharSpec]:
    """In-memory charset: bundled compositions rendered in every demo font."""
    table = bundled_table()
    specs = []
    for label in demo_labels(n):
        ids_string, _gloss = table[label]
        tree = parse(ids_string)
        renders = tuple(render_char(label, tree, font) for font in fonts)
        specs.append(CharSpec(label=label, ids=tree, font_renders=renders))
    return specs


# -- disk trees (External Interfaces) -----------------------------------------


def write_font_tree(out_dir, labels: list[str], fonts=DEMO_FONTS) -> None:
    """fonts/<font_name>/<codepoint_hex>.png, dark ink on light background.

    fonts.json records the font order so disk ingestion matches the
    in-memory pipeline byte for byte.
    """
    table = bundled_table()
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "fonts.json"), "w", encoding="utf-8") as fh:
        json.dump([font.name for font in fonts], fh)
    for font in fonts:
        font_dir = os.path.join(out_dir, font.name)
        os.makedirs(font_dir, exist_ok=True)
        for label in labels:
            tree = parse(table[label][0])
            G.save_png(render_char(label, tree, font), os.path.join(font_dir, f"{ord(label):04x}.png"))


def charspecs_from_font_tree(fonts_dir, table: dict[str, tuple[str, str]], labels=None) -> list[CharSpec]:
    """Ingest a pre-rendered font tree (the path user-supplied data takes).

    fonts.json, when present, fixes the font order; otherwise directory
    names are taken in sorted order.
    """
    fonts_dir = os.fspath(fonts_dir)
    order_path = os.path.join(fonts_dir, "fonts.json")
    if os.path.exists(order_path):
        with open(order_path, encoding="utf-8") as fh:
            font_names = [n for n in json.load(fh) if os.path.isdir(os.path.join(fonts_dir, n))]
    else:
        font_names = sorted(d for d in os.listdir(fonts_dir) if os.path.isdir(os.path.join(fonts_dir, d)))
    if not font_names:
        raise FileNotFoundError(f"no font directories under {fonts_dir}")
    specs = []
    for label in labels if labels is not None else sorted(table):
        renders = []
        for name in font_names:
            path = os.path.join(fonts_dir, name, f"{ord(label):04x}.png")
            if os.path.exists(path):
                renders.append(G.load_glyph(path))
        if not renders:
            continue
        specs.append(CharSpec(label=label, ids=parse(table[label][0]), font_renders=tuple(renders)))
    return specs


# -- pseudo-ancient probes -----------------------------------------------------

PROBE_SR = SrParams(attrition_prob=0.20, merge_radius=1, warp_amplitude=3.0, region_jitter=2)
PROBE_EXTRA_SR = SrParams(attrition_prob=0.35, merge_radius=2, warp_amplitude=5.0, region_jitter=4)
PROBE_STROKE_WIDTH = 11  # rubbing-like weight so heavy erosion thins, not erases

# Additive noise is reserved for the degradation suite: baking it into
# probes lets suite blur act as a repair (smoothing speckle before the
# re-binarization), which inverts the expected severity ordering.
_PROBE_KINDS = (Kind.BLUR, Kind.ERODE, Kind.MASK)


def make_probe(spec: CharSpec, seed: int, degrade_severity: int = 1) -> G.Glyph:
    """One pseudo-ancient glyph for a label: draft + refinement + an extra
    strong refinement pass, re-stroked at rubbing weight, lightly degraded."""
    rng = Rng(hash64(seed, "probe"))
    for attempt in range(8):
        try:
            draft = fad_draft(spec, hash64(seed, "draft", attempt))
            g = sr_refine(draft, spec.ids, PROBE_SR, hash64(seed, "sr1", attempt))
            g = sr_refine(g, spec.ids, PROBE_EXTRA_SR, hash64(seed, "sr2", attempt))
            break
        except (EmptyDraft, ContainmentUnsatisfiable, G.EmptyImage):
            if attempt == 7:
                raise
    thick = kernels.dilate_disc(kernels.thin(g.mask()), PROBE_STROKE_WIDTH // 2)
    g = G.normalize_mask(thick)
    if degrade_severity > 0:
        kind = _PROBE_KINDS[rng.below(len(_PROBE_KINDS))]
        g = degrade(g, DegradationSpec(kind, degrade_severity, hash64(seed, "degrade")))
        if not (g.pixels > 0).any():
            g = G.normalize_mask(thick)
    return g


def make_probe_set(
    specs: list[CharSpec],
    per_label: int,
    seed: int,
    domain: str,
    degrade_severity: int = 1,
) -> list[tuple[G.Glyph, str]]:
    """(glyph, truth label) pairs; each probe's seed derives from
    (seed, domain, label, index) so domains never collide."""
    out = []
    for spec in specs:
        for i in range(per_label):
            out.append((make_probe(spec, hash64(seed, domain, spec.label, i), degrade_severity), spec.label))
    return out


def write_probe_tree(out_dir, probes: list[tuple[G.Glyph, str]]) -> str:
    """Write probes as exemplars/<codepoint_hex>/<i>.png plus manifest.tsv
    (image_relpath <TAB> truth_codepoint_hex). Returns the manifest path."""
    out_dir = os.fspath(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    counters: dict[str, int] = {}
    rows = []
    for g, label in probes:
        idx = counters.get(label, 0)
        counters[label] = idx + 1
        rel = f"{ord(label):04x}/{idx:03d}.png"
        os.makedirs(os.path.join(out_dir, f"{ord(label):04x}"), exist_ok=True)
        G.save_png(g, os.path.join(out_dir, rel))
        rows.append(f"{rel}\t{ord(label):04x}")
    manifest = os.path.join(out_dir, "manifest.tsv")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + ("\n" if rows else ""))
    return manifest


def load_probe_tree(path) -> list[tuple[G.Glyph, str]]:
    """Read a probe/exemplar tree: manifest.tsv when present, otherwise a
    scan of <codepoint_hex>/ subdirectories."""
    path = os.fspath(path)
    manifest = path if path.endswith(".tsv") else os.path.join(path, "manifest.tsv")
    base = os.path.dirname(manifest)
    out = []
    if os.path.exists(manifest):
        with open(manifest, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                rel, label_hex = line.split("\t")
                out.append((G.load_glyph_raw(os.path.join(base, rel)), chr(int(label_hex, 16))))
        return out
    for sub in sorted(os.listdir(path)):
        subdir = os.path.join(path, sub)
        if not os.path.isdir(subdir):
            continue
        label = chr(int(sub, 16))
        for name in sorted(os.listdir(subdir)):
            if name.lower().endswith((".png", ".pgm")):
                out.append((G.load_glyph_raw(os.path.join(subdir, name)), label))
    return out
