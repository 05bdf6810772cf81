"""Shared fixtures. The session-scoped corpus fixtures are built once and
reused across modules; everything derives from fixed seeds."""

from __future__ import annotations

import numpy as np
import pytest

from glyphdict import demo, retrieval, synthesis

SMALL_CHARS = 40
SMALL_SEED = 1234


@pytest.fixture(scope="session")
def small_specs():
    return demo.demo_charspecs(SMALL_CHARS)


@pytest.fixture(scope="session")
def small_dict(small_specs):
    d, report = synthesis.build_dictionary(small_specs, k=8, global_seed=SMALL_SEED)
    assert not report["failures"]
    return d


@pytest.fixture(scope="session")
def small_index(small_dict):
    return retrieval.build_index(small_dict)


@pytest.fixture(scope="session")
def corpus_glyphs(small_dict):
    """A mixed bag of ~100 deterministic glyphs for property sweeps."""
    return [e.glyph for e in small_dict.entries[: 100]]


@pytest.fixture(scope="session")
def demo_workspace(tmp_path_factory):
    """A small on-disk demo tree + dictionary for CLI and service tests."""
    from glyphdict import cli

    root = tmp_path_factory.mktemp("ws")
    demo_dir = root / "demo"
    dict_dir = root / "dict"
    assert cli.main(
        [
            "make-demo",
            "--out", str(demo_dir),
            "--chars", "30",
            "--queries-per-label", "3",
            "--exemplars-per-label", "2",
            "--seed", "7",
            "--log-level", "WARNING",
        ]
    ) == 0
    assert cli.main(
        [
            "build-dict",
            "--fonts", str(demo_dir / "fonts"),
            "--chars", "30",
            "--out", str(dict_dir),
            "--k", "8",
            "--seed", "42",
            "--log-level", "WARNING",
        ]
    ) == 0
    assert cli.main(["index", "--dict", str(dict_dir), "--log-level", "WARNING"]) == 0
    return {"root": root, "demo": demo_dir, "dict": dict_dir}
