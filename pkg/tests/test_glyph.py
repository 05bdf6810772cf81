import numpy as np
import pytest

from glyphdict import glyph as G
from glyphdict import kernels


def test_normalize_empty_raises():
    with pytest.raises(G.EmptyImage):
        G.normalize(np.full((200, 200), 255, dtype=np.uint8))


def test_normalize_black_square_fills_80_percent():
    img = np.full((100, 100), 255, dtype=np.uint8)
    img[45:55, 45:55] = 0
    g = G.normalize(img)
    ys, xs = np.nonzero(g.mask())
    h = ys.max() - ys.min() + 1
    w = xs.max() - xs.min() + 1
    assert abs(h - 77) <= 1 and abs(w - 77) <= 1
    # centered within rounding
    assert abs((ys.min() + ys.max()) / 2 - 47.5) <= 1
    assert abs((xs.min() + xs.max()) / 2 - 47.5) <= 1


def test_normalize_polarity_flip():
    # a light glyph on dark background normalizes the same as its inverse:
    # ink is always the minority class
    dark_on_light = np.full((64, 64), 255, dtype=np.uint8)
    dark_on_light[20:30, 20:30] = 0
    light_on_dark = 255 - dark_on_light
    assert G.normalize(light_on_dark).same_bytes(G.normalize(dark_on_light))


def test_normalize_idempotent(corpus_glyphs):
    for g in corpus_glyphs[:100]:
        again = G.normalize(G.to_levels(g))
        assert again.same_bytes(G.normalize(G.to_levels(again)))


def test_skeletonize_line_unchanged():
    m = np.zeros((96, 96), dtype=np.uint8)
    m[48, 10:80] = 1
    g = G.from_mask(m)
    assert G.skeletonize(g).same_bytes(g)


def test_skeletonize_never_increases_ink(corpus_glyphs):
    for g in corpus_glyphs[:50]:
        assert G.skeletonize(g).ink_count() <= g.ink_count()


def test_skeletonize_preserves_components(corpus_glyphs):
    for g in corpus_glyphs[:100]:
        _, before = kernels.label_components(g.mask())
        _, after = kernels.label_components(G.skeletonize(g).mask())
        assert before == after


def test_restroke_width_one_is_identity():
    m = np.zeros((96, 96), dtype=np.uint8)
    m[48, 10:80] = 1
    g = G.from_mask(m)
    assert G.restroke(g, 1).same_bytes(g)


def test_restroke_width_three():
    m = np.zeros((96, 96), dtype=np.uint8)
    m[48, 10:80] = 1
    out = G.restroke(G.from_mask(m), 3)
    cols = out.mask()[:, 40]
    assert cols.sum() == 3


def test_restroke_never_decreases_ink(corpus_glyphs):
    for g in corpus_glyphs[:30]:
        sk = G.skeletonize(g)
        assert G.restroke(sk, 3).ink_count() >= sk.ink_count()


def test_restroke_skeleton_roundtrip_area():
    rng = np.random.default_rng(17)
    m = np.zeros((96, 96), dtype=np.uint8)
    m[20, 10:80] = 1
    m[10:80, 40] = 1
    m[60, 20:70] = 1
    s = G.from_mask(m)
    first = G.restroke(s, 3)
    second = G.restroke(G.skeletonize(first), 3)
    assert abs(second.ink_count() - first.ink_count()) <= 0.15 * first.ink_count()


def test_restroke_width_bounds():
    g = G.from_mask(np.ones((96, 96), dtype=np.uint8))
    with pytest.raises(ValueError):
        G.restroke(g, 0)
    with pytest.raises(ValueError):
        G.restroke(g, 8)


def test_ink_fraction_full_canvas(corpus_glyphs):
    for g in corpus_glyphs[:10]:
        assert G.ink_fraction(g, (0, 0, g.size, g.size)) == 1.0


def test_ink_fraction_empty_glyph():
    g = G.from_mask(np.zeros((96, 96), dtype=np.uint8))
    assert G.ink_fraction(g, (0, 0, 96, 96)) == 0.0


def test_ink_fraction_matches_pixel_count(corpus_glyphs):
    region = (0, 0, 48, 96)  # left half
    for g in corpus_glyphs[:30]:
        m = g.mask()
        expect = m[0:96, 0:48].sum() / m.sum()
        assert G.ink_fraction(g, region) == pytest.approx(expect, abs=0)


def test_ink_fraction_region_validation():
    g = G.from_mask(np.ones((96, 96), dtype=np.uint8))
    with pytest.raises(ValueError):
        G.ink_fraction(g, (0, 0, 97, 96))


def test_png_round_trip(tmp_path, corpus_glyphs):
    g = corpus_glyphs[0]
    path = tmp_path / "g.png"
    G.save_png(g, path)
    back = G.load_glyph_raw(path)
    assert back.same_bytes(g)


def test_pgm_round_trip(tmp_path, corpus_glyphs):
    g = corpus_glyphs[1]
    path = tmp_path / "g.pgm"
    G.save_pgm(g, path)
    levels = G.load_levels(path)
    assert np.array_equal(levels, G.to_levels(g))


def test_affine_warp_deterministic(corpus_glyphs):
    g = corpus_glyphs[2]
    a = G.affine_warp(g, 0.05, 0.02, 1.03)
    b = G.affine_warp(g, 0.05, 0.02, 1.03)
    assert a.same_bytes(b)
    assert not a.same_bytes(g)


def test_translate():
    m = np.zeros((96, 96), dtype=np.uint8)
    m[10, 10] = 1
    out = G.translate(G.from_mask(m), 2, -3)
    assert out.mask()[12, 7] == 1
    assert out.ink_count() == 1
