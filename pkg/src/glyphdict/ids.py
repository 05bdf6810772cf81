"""Ideographic Description Sequences: parse, serialize, spatial layout.

An IDS is a prefix-notation composition string: each description operator
(U+2FF0..U+2FFB) is followed by its two or three operands, which are either
plain component characters or nested compositions. The layout engine turns
a parsed tree into one pixel box per leaf component, which downstream
synthesis uses to confine per-component perturbations.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .rng import Rng, hash64


class LayoutKind(Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"
    HORIZONTAL3 = "horizontal3"
    VERTICAL3 = "vertical3"
    SURROUND_FULL = "surround_full"
    SURROUND_ABOVE = "surround_above"
    SURROUND_BELOW = "surround_below"
    SURROUND_LEFT_OPEN_RIGHT = "surround_left_open_right"
    SURROUND_UPPER_LEFT = "surround_upper_left"
    SURROUND_UPPER_RIGHT = "surround_upper_right"
    SURROUND_LOWER_LEFT = "surround_lower_left"
    OVERLAID = "overlaid"


_OPERATOR_TABLE = {
    0x2FF0: LayoutKind.HORIZONTAL,
    0x2FF1: LayoutKind.VERTICAL,
    0x2FF2: LayoutKind.HORIZONTAL3,
    0x2FF3: LayoutKind.VERTICAL3,
    0x2FF4: LayoutKind.SURROUND_FULL,
    0x2FF5: LayoutKind.SURROUND_ABOVE,
    0x2FF6: LayoutKind.SURROUND_BELOW,
    0x2FF7: LayoutKind.SURROUND_LEFT_OPEN_RIGHT,
    0x2FF8: LayoutKind.SURROUND_UPPER_LEFT,
    0x2FF9: LayoutKind.SURROUND_UPPER_RIGHT,
    0x2FFA: LayoutKind.SURROUND_LOWER_LEFT,
    0x2FFB: LayoutKind.OVERLAID,
}

_TERNARY = {0x2FF2, 0x2FF3}


class IdsError(ValueError):
    """Base for IDS parse failures."""


class TruncatedSequence(IdsError):
    """Input ended before all operands of an operator were read."""


class TrailingInput(IdsError):
    """A complete tree was read but input characters remain."""


class DegenerateBox(ValueError):
    """Layout produced a zero-area box: canvas too small for the tree."""


@dataclass(frozen=True)
class IdsOperator:
    codepoint: int
    arity: int
    layout_kind: LayoutKind

    @property
    def char(self) -> str:
        return chr(self.codepoint)


def is_operator(ch: str) -> bool:
    return 0x2FF0 <= ord(ch) <= 0x2FFB


def operator_for(ch: str) -> IdsOperator:
    cp = ord(ch)
    return IdsOperator(cp, 3 if cp in _TERNARY else 2, _OPERATOR_TABLE[cp])


@dataclass(frozen=True)
class IdsTree:
    """Either a leaf (operator is None, component set) or an internal node."""

    operator: IdsOperator | None = None
    children: tuple["IdsTree", ...] = ()
    component: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.operator is None

    def leaves(self) -> list[str]:
        if self.is_leaf:
            return [self.component]
        out: list[str] = []
        for child in self.children:
            out.extend(child.leaves())
        return out

    def depth(self) -> int:
        if self.is_leaf:
            return 0
        return 1 + max(child.depth() for child in self.children)


def leaf(component: str) -> IdsTree:
    if is_operator(component):
        raise ValueError(f"operator {component!r} cannot be a leaf component")
    return IdsTree(component=component)


def node(op_char: str, *children: IdsTree) -> IdsTree:
    op = operator_for(op_char)
    if len(children) != op.arity:
        raise ValueError(f"{op_char} takes {op.arity} children, got {len(children)}")
    return IdsTree(operator=op, children=tuple(children))


def parse(text: str) -> IdsTree:
    """Parse a full IDS string into a tree; the whole input must be consumed.

    Iterative (explicit stack), so arbitrarily deep operator chains cannot
    overflow the interpreter stack: any input either parses or raises
    TruncatedSequence / TrailingInput.
    """
    chars = list(text)
    pos = 0
    # stack of (operator, collected children)
    stack: list[tuple[IdsOperator, list[IdsTree]]] = []
    tree: IdsTree | None = None
    while tree is None:
        if pos >= len(chars):
            raise TruncatedSequence(f"input ended at offset {pos}, operand expected")
        ch = chars[pos]
        pos += 1
        if is_operator(ch):
            stack.append((operator_for(ch), []))
            continue
        node = IdsTree(component=ch)
        while True:
            if not stack:
                tree = node
                break
            op, children = stack[-1]
            children.append(node)
            if len(children) < op.arity:
                break
            stack.pop()
            node = IdsTree(operator=op, children=tuple(children))
    if pos != len(chars):
        raise TrailingInput(f"{len(chars) - pos} character(s) remain after a complete tree")
    return tree


def serialize(tree: IdsTree) -> str:
    out: list[str] = []
    todo = [tree]
    while todo:
        node = todo.pop()
        if node.is_leaf:
            out.append(node.component)
        else:
            out.append(node.operator.char)
            todo.extend(reversed(node.children))
    return "".join(out)


Box = tuple[int, int, int, int]  # (x0, y0, x1, y1), half-open


@dataclass(frozen=True)
class LayoutParams:
    split_ratio: float = 0.5
    inset_fraction: float = 0.25
    ternary_jitter: float = 0.06
    jitter_seed: int = 0

    def __post_init__(self):
        if not 0.3 <= self.split_ratio <= 0.7:
            raise ValueError("split_ratio must be in [0.3, 0.7]")
        if not 0.1 <= self.inset_fraction <= 0.4:
            raise ValueError("inset_fraction must be in [0.1, 0.4]")


@dataclass(frozen=True)
class LayoutRegion:
    leaf_index: int
    box: Box


def _split2(lo: int, hi: int, ratio: float) -> tuple[int, int, int]:
    cut = lo + int(round(ratio * (hi - lo)))
    return lo, cut, hi


def _split3(lo: int, hi: int, jitter: float, rng: Rng) -> tuple[int, int, int, int]:
    extent = hi - lo
    j1 = rng.uniform(-jitter, jitter) if jitter > 0 else 0.0
    j2 = rng.uniform(-jitter, jitter) if jitter > 0 else 0.0
    c1 = lo + int(round((1.0 / 3.0 + j1) * extent))
    c2 = lo + int(round((2.0 / 3.0 + j2) * extent))
    return lo, c1, c2, hi


def _inset(box: Box, frac: float, left: bool, top: bool, right: bool, bottom: bool) -> Box:
    x0, y0, x1, y1 = box
    dx = int(round(frac * (x1 - x0)))
    dy = int(round(frac * (y1 - y0)))
    return (
        x0 + (dx if left else 0),
        y0 + (dy if top else 0),
        x1 - (dx if right else 0),
        y1 - (dy if bottom else 0),
    )


# Closed sides per partial-surround kind: (left, top, right, bottom).
_SURROUND_INSETS = {
    LayoutKind.SURROUND_FULL: (True, True, True, True),
    LayoutKind.SURROUND_ABOVE: (True, True, True, False),
    LayoutKind.SURROUND_BELOW: (True, False, True, True),
    LayoutKind.SURROUND_LEFT_OPEN_RIGHT: (True, True, False, True),
    LayoutKind.SURROUND_UPPER_LEFT: (True, True, False, False),
    LayoutKind.SURROUND_UPPER_RIGHT: (False, True, True, False),
    LayoutKind.SURROUND_LOWER_LEFT: (True, False, False, True),
}


def layout(tree: IdsTree, canvas: Box, params: LayoutParams | None = None) -> list[LayoutRegion]:
    """One box per leaf, ordered by preorder leaf index.

    Two-way operators split at split_ratio; three-way at jittered thirds;
    surrounds give the outer child the full box and inset the inner child on
    the closed sides; overlaid children share the full box.
    """
    params = params or LayoutParams()
    x0, y0, x1, y1 = canvas
    if x1 <= x0 or y1 <= y0:
        raise DegenerateBox(f"canvas {canvas} is degenerate")
    regions: list[LayoutRegion] = []

    def descend(t: IdsTree, box: Box, path_seed: int) -> None:
        bx0, by0, bx1, by1 = box
        if bx1 <= bx0 or by1 <= by0:
            raise DegenerateBox(f"box {box} collapsed to zero area")
        if t.is_leaf:
            regions.append(LayoutRegion(len(regions), box))
            return
        kind = t.operator.layout_kind
        if kind is LayoutKind.HORIZONTAL:
            lo, cut, hi = _split2(bx0, bx1, params.split_ratio)
            boxes = [(lo, by0, cut, by1), (cut, by0, hi, by1)]
        elif kind is LayoutKind.VERTICAL:
            lo, cut, hi = _split2(by0, by1, params.split_ratio)
            boxes = [(bx0, lo, bx1, cut), (bx0, cut, bx1, hi)]
        elif kind is LayoutKind.HORIZONTAL3:
            rng = Rng(hash64(params.jitter_seed, path_seed, 0x33))
            lo, c1, c2, hi = _split3(bx0, bx1, params.ternary_jitter, rng)
            boxes = [(lo, by0, c1, by1), (c1, by0, c2, by1), (c2, by0, hi, by1)]
        elif kind is LayoutKind.VERTICAL3:
            rng = Rng(hash64(params.jitter_seed, path_seed, 0x34))
            lo, c1, c2, hi = _split3(by0, by1, params.ternary_jitter, rng)
            boxes = [(bx0, lo, bx1, c1), (bx0, c1, bx1, c2), (bx0, c2, bx1, hi)]
        elif kind is LayoutKind.OVERLAID:
            boxes = [box, box]
        else:
            sides = _SURROUND_INSETS[kind]
            boxes = [box, _inset(box, params.inset_fraction, *sides)]
        for i, (child, child_box) in enumerate(zip(t.children, boxes)):
            descend(child, child_box, hash64(path_seed, i))

    descend(tree, canvas, 0)
    return regions


def load_ids_table(path, warn=None) -> dict[str, tuple[str, str]]:
    """Read a tab-separated IDS table: label, IDS string, optional gloss.

    Lines starting with # are comments. Rows whose IDS fails to parse (for
    example unencoded sub-compositions written in parentheses) are skipped;
    `warn`, when given, receives one message per skipped row. The first row
    wins when a label repeats.
    """
    table: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            fields = line.split("\t")
            if len(fields) < 2:
                if warn:
                    warn(f"line {lineno}: expected at least 2 tab-separated fields")
                continue
            label, ids_string = fields[0], fields[1]
            gloss = fields[2] if len(fields) > 2 else ""
            try:
                parse(ids_string)
            except IdsError as exc:
                if warn:
                    warn(f"line {lineno}: skipping {label!r}: {exc}")
                continue
            if label not in table:
                table[label] = (ids_string, gloss)
    return table
