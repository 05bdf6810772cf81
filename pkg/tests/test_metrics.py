import numpy as np
import pytest

from glyphdict import glyph as G
from glyphdict import metrics


def test_topn_direct_ratio():
    rankings = [["a", "b"], ["c"], ["b", "a"], ["x"]]
    truths = ["a", "c", "a", "a"]
    assert metrics.topn_accuracy(rankings, truths, 10) == 0.75


def test_topn_exhaustive():
    rankings = [["a", "b", "c"]] * 3
    truths = ["a", "b", "c"]
    assert metrics.topn_accuracy(rankings, truths, 3) == 1.0


def test_topn_empty_ranking_is_miss():
    assert metrics.topn_accuracy([[]], ["a"], 5) == 0.0


def test_topn_length_mismatch():
    with pytest.raises(metrics.LengthMismatch):
        metrics.topn_accuracy([["a"]], ["a", "b"], 1)


def test_topn_matches_membership_oracle():
    rng = np.random.default_rng(0)
    labels = [chr(0x4E00 + i) for i in range(30)]
    rankings = []
    truths = []
    for _ in range(1000):
        perm = list(rng.permutation(30))
        rankings.append([labels[i] for i in perm[: int(rng.integers(0, 30))]])
        truths.append(labels[int(rng.integers(0, 30))])
    for n in (1, 5, 10, 25):
        oracle = sum(1 for r, t in zip(rankings, truths) if t in set(r[:n])) / len(truths)
        assert metrics.topn_accuracy(rankings, truths, n) == oracle


def test_topn_curve_monotone():
    rng = np.random.default_rng(1)
    labels = [chr(0x4E00 + i) for i in range(120)]
    rankings = [list(rng.permutation(labels)) for _ in range(50)]
    truths = [labels[int(rng.integers(0, 120))] for _ in range(50)]
    curve = metrics.topn_curve(rankings, truths)
    values = [curve[n] for n in sorted(curve)]
    assert values == sorted(values)


def _rand_glyph(seed):
    rng = np.random.default_rng(seed)
    return G.from_array(rng.random((96, 96)).astype(np.float32))


def test_ssim_identity():
    x = _rand_glyph(3)
    assert metrics.ssim(x, x) == pytest.approx(1.0, abs=1e-9)


def test_ssim_inverse_checkerboard_negative():
    board = np.indices((96, 96)).sum(axis=0) % 2
    x = G.from_array(board.astype(np.float32))
    inv = G.from_array((1 - board).astype(np.float32))
    assert metrics.ssim(x, inv) < 0


def test_ssim_symmetric_bit_exact():
    a, b = _rand_glyph(5), _rand_glyph(6)
    assert metrics.ssim(a, b) == metrics.ssim(b, a)


def test_ssim_size_mismatch():
    a = _rand_glyph(1)
    b = G.from_array(np.zeros((48, 48), dtype=np.float32))
    with pytest.raises(metrics.SizeMismatch):
        metrics.ssim(a, b)


def test_l1_examples():
    x = _rand_glyph(7)
    assert metrics.l1(x, x) == 0.0
    ink = G.from_array(np.ones((96, 96), dtype=np.float32))
    bg = G.from_array(np.zeros((96, 96), dtype=np.float32))
    assert metrics.l1(ink, bg) == 1.0


def test_l1_matches_direct_sum():
    a, b = _rand_glyph(8), _rand_glyph(9)
    direct = float(np.abs(a.pixels.astype(np.float64) - b.pixels.astype(np.float64)).sum() / (96 * 96))
    assert metrics.l1(a, b) == pytest.approx(direct, abs=1e-15)


def test_frechet_identical_sets():
    rng = np.random.default_rng(10)
    a = rng.standard_normal((50, 438))
    assert metrics.frechet_diag(a, a.copy()) == pytest.approx(0.0, abs=1e-9)


def test_frechet_point_clouds_at_distance():
    d = 3.0
    a = np.zeros((5, 4))
    b = np.zeros((5, 4))
    b[:, 0] = d
    assert metrics.frechet_diag(a, b) == pytest.approx(d * d, abs=1e-12)


def test_frechet_matches_moment_oracle():
    rng = np.random.default_rng(11)
    a = rng.standard_normal((50, 438))
    b = 0.5 * rng.standard_normal((60, 438)) + 0.2
    mu_a, mu_b = a.mean(axis=0), b.mean(axis=0)
    va, vb = a.var(axis=0), b.var(axis=0)
    oracle = float(((mu_a - mu_b) ** 2).sum() + (va + vb - 2 * np.sqrt(va * vb)).sum())
    assert metrics.frechet_diag(a, b) == pytest.approx(oracle, rel=1e-12)


def test_frechet_symmetric():
    rng = np.random.default_rng(12)
    a = rng.standard_normal((20, 10))
    b = rng.standard_normal((30, 10))
    assert metrics.frechet_diag(a, b) == pytest.approx(metrics.frechet_diag(b, a), rel=1e-12)


def test_frechet_insufficient_samples():
    with pytest.raises(metrics.InsufficientSamples):
        metrics.frechet_diag(np.zeros((1, 4)), np.zeros((5, 4)))
