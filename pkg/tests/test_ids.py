import random

import pytest
from hypothesis import given, settings, strategies as st

from glyphdict import ids
from glyphdict.demo import bundled_table


def test_parse_binary_operator():
    tree = ids.parse("⿰木木")
    assert not tree.is_leaf
    assert tree.operator.codepoint == 0x2FF0
    assert [c.component for c in tree.children] == ["木", "木"]


def test_parse_ternary_operator():
    tree = ids.parse("⿳亠口口")
    assert tree.operator.arity == 3
    assert [c.component for c in tree.children] == ["亠", "口", "口"]


def test_parse_truncated():
    with pytest.raises(ids.TruncatedSequence):
        ids.parse("⿰木")
    with pytest.raises(ids.TruncatedSequence):
        ids.parse("")


def test_parse_trailing():
    with pytest.raises(ids.TrailingInput):
        ids.parse("木木")


def test_single_codepoint_is_leaf():
    tree = ids.parse("水")
    assert tree.is_leaf and tree.component == "水"


def test_arity_table():
    for cp in range(0x2FF0, 0x2FFC):
        op = ids.operator_for(chr(cp))
        assert op.arity == (3 if cp in (0x2FF2, 0x2FF3) else 2)


def test_post_2ffb_codepoints_are_leaves():
    # later Unicode additions are not operators; in operator position they
    # produce parse errors through the ordinary grammar
    assert ids.parse("⿼").is_leaf
    with pytest.raises(ids.TrailingInput):
        ids.parse("⿼木木")


def test_serialize_examples():
    assert ids.serialize(ids.leaf("木")) == "木"
    assert ids.serialize(ids.node("⿱", ids.leaf("日"), ids.leaf("月"))) == "⿱日月"


def test_corpus_round_trip():
    table = bundled_table()
    assert len(table) >= 200
    for label, (s, _gloss) in table.items():
        assert ids.serialize(ids.parse(s)) == s, label


def test_deep_input_no_stack_overflow():
    deep = "⿰" * 30000 + "木" * 30001
    tree = ids.parse(deep)
    assert ids.serialize(tree) == deep
    with pytest.raises(ids.TruncatedSequence):
        ids.parse("⿰" * 30000)


_COMPONENTS = st.sampled_from(list("木日月口水火山女子心王白"))


@st.composite
def trees(draw, depth=0):
    if depth >= 4 or draw(st.booleans()):
        return ids.leaf(draw(_COMPONENTS))
    op = draw(st.sampled_from("⿰⿱⿲⿳⿴⿵⿶⿷⿸⿹⿺⿻"))
    arity = ids.operator_for(op).arity
    children = [draw(trees(depth=depth + 1)) for _ in range(arity)]
    return ids.node(op, *children)


@given(trees())
@settings(max_examples=200, deadline=None)
def test_round_trip_random_trees(tree):
    assert ids.parse(ids.serialize(tree)) == tree


@given(trees())
@settings(max_examples=100, deadline=None)
def test_layout_bijection_and_containment(tree):
    canvas = (0, 0, 96, 96)
    try:
        regions = ids.layout(tree, canvas)
    except ids.DegenerateBox:
        return  # tree too deep for the canvas: declared error
    leaves = tree.leaves()
    assert len(regions) == len(leaves)
    assert [r.leaf_index for r in regions] == list(range(len(leaves)))
    for r in regions:
        x0, y0, x1, y1 = r.box
        assert 0 <= x0 < x1 <= 96 and 0 <= y0 < y1 <= 96


def test_layout_horizontal_split():
    regions = ids.layout(ids.parse("⿰木木"), (0, 0, 96, 96), ids.LayoutParams(split_ratio=0.5))
    assert [r.box for r in regions] == [(0, 0, 48, 96), (48, 0, 96, 96)]


def test_layout_surround_inset():
    regions = ids.layout(ids.parse("⿴囗口"), (0, 0, 96, 96), ids.LayoutParams(inset_fraction=0.25))
    assert regions[0].box == (0, 0, 96, 96)
    assert regions[1].box == (24, 24, 72, 72)


def test_layout_equal_thirds():
    params = ids.LayoutParams(ternary_jitter=0.0)
    regions = ids.layout(ids.parse("⿳亠口口"), (0, 0, 96, 96), params)
    assert [r.box for r in regions] == [(0, 0, 96, 32), (0, 32, 96, 64), (0, 64, 96, 96)]


def test_layout_partial_surround_insets_closed_sides_only():
    regions = ids.layout(ids.parse("⿵门口"), (0, 0, 96, 96), ids.LayoutParams(inset_fraction=0.25))
    x0, y0, x1, y1 = regions[1].box
    assert (x0, y0, x1) == (24, 24, 72) and y1 == 96  # bottom edge open


def test_layout_deterministic_with_fixed_seed():
    params = ids.LayoutParams(jitter_seed=5)
    a = ids.layout(ids.parse("⿳亠口口"), (0, 0, 96, 96), params)
    b = ids.layout(ids.parse("⿳亠口口"), (0, 0, 96, 96), params)
    assert [r.box for r in a] == [r.box for r in b]


def test_layout_degenerate_canvas():
    with pytest.raises(ids.DegenerateBox):
        ids.layout(ids.parse("木"), (0, 0, 0, 96))


def test_layout_param_validation():
    with pytest.raises(ValueError):
        ids.LayoutParams(split_ratio=0.2)
    with pytest.raises(ValueError):
        ids.LayoutParams(inset_fraction=0.5)


def test_fuzz_totality_sample():
    # the full million-string fuzz runs in the acceptance suite; this is a
    # fast regression sample of the same property
    rng = random.Random(20260808)
    alphabet = [0x2FF0, 0x2FF5, 0x2FF2, ord("木"), ord("a"), 0x2FFC, 0x1F600]
    for _ in range(20000):
        n = rng.randrange(0, 9)
        s = "".join(chr(rng.choice(alphabet)) for _ in range(n))
        try:
            tree = ids.parse(s)
            assert ids.serialize(tree) == s
        except (ids.TruncatedSequence, ids.TrailingInput):
            pass


def test_table_loader_skips_bad_rows(tmp_path):
    path = tmp_path / "table.tsv"
    path.write_text(
        "# comment\n木\t木\ttree\n林\t⿰木木\n坏\t⿰木(口口)\tbad\n短\t⿰木\t\n",
        encoding="utf-8",
    )
    warnings = []
    table = ids.load_ids_table(path, warn=warnings.append)
    assert set(table) == {"木", "林"}
    assert table["木"] == ("木", "tree")
    assert table["林"] == ("⿰木木", "")
    assert len(warnings) == 2
