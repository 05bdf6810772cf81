"""Zero-shot benchmark harness: character-level splits, dictionary-vs-direct
comparison, degradation sweeps, and deterministic report emission.

Ranking protocol: each query's label ranking is the top-50 similarity vote
extended by first-appearance order over the deep match list (100 x variants
per label), so one consistent per-query ordering serves every Top-N cutoff
up to 100. The protocol is echoed in every report header.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import glyph as G
from .encoder import BlockGradEncoder
from .degradation import DegradationSpec, Kind, degrade
from .metrics import TOP_N_LEVELS, topn_accuracy
from .retrieval import Index, build_index, query_topk, vote_labels
from .rng import hash64, uniform_field
from .synthesis import Dictionary, DictionaryEntry

DEFAULT_VOTE_K = 50
DEEP_K_PER_VARIANT = 100
BOOTSTRAP_RESAMPLES = 1000


class EmptyCharset(ValueError):
    pass


@dataclass(frozen=True)
class Split:
    train_labels: list[str]
    test_labels: list[str]
    seed: int
    ratio: float


def split_characters(charset: list[str], ratio: float, seed: int) -> Split:
    """Disjoint character-level split: sorted labels, seeded Fisher-Yates
    shuffle, first ceil(ratio*n) to train."""
    if not charset:
        raise EmptyCharset("cannot split an empty charset")
    if not 0.0 < ratio < 1.0:
        raise ValueError("ratio must be in (0, 1)")
    if len(set(charset)) != len(charset):
        raise ValueError("charset labels must be unique")
    labels = sorted(charset, key=ord)
    from .rng import Rng

    Rng(hash64(seed, "split")).shuffle(labels)
    # ceil(ratio*n) with a guard against float fuzz (0.9*1590 must give 1431)
    cut = min(len(labels), max(1, int(np.ceil(ratio * len(labels) - 1e-12))))
    return Split(
        train_labels=sorted(labels[:cut], key=ord),
        test_labels=sorted(labels[cut:], key=ord),
        seed=seed,
        ratio=ratio,
    )


def ranked_labels(
    ix: Index,
    g: G.Glyph,
    enc=None,
    vote_k: int = DEFAULT_VOTE_K,
    deep_k: int | None = None,
    rule: str = "sum",
) -> list[str]:
    """Composite label ordering for curve computation (see module docstring)."""
    enc = enc or BlockGradEncoder()
    if deep_k is None:
        deep_k = ix.count
    matches = query_topk(ix, enc.embed(g), deep_k)
    ranking = [v.label for v in vote_labels(matches[:vote_k], rule)]
    seen = set(ranking)
    for m in matches[vote_k:]:
        if m.label not in seen:
            seen.add(m.label)
            ranking.append(m.label)
    return ranking


@dataclass
class EvalConfig:
    vote_k: int = DEFAULT_VOTE_K
    voting_rule: str = "sum"
    split_seed: int = 0
    split_ratio: float = 0.9
    bootstrap_seed: int = 0
    bootstrap_resamples: int = BOOTSTRAP_RESAMPLES
    levels: tuple = TOP_N_LEVELS


def _bootstrap_ci(hits: np.ndarray, resamples: int, seed: int) -> tuple[float, float]:
    """95% percentile bootstrap over per-query hit indicators."""
    n = len(hits)
    if n == 0:
        return (0.0, 0.0)
    u = uniform_field(hash64(seed, "bootstrap"), resamples * n)
    idx = np.minimum((u * n).astype(np.int64), n - 1).reshape(resamples, n)
    means = hits[idx].mean(axis=1)
    return (float(np.percentile(means, 2.5)), float(np.percentile(means, 97.5)))


def _evaluate_queries(
    ix: Index,
    queries: list[tuple[G.Glyph, str]],
    config: EvalConfig,
    enc,
    condition: str,
    failures: list[dict],
    transform=None,
) -> dict:
    """Rank every query (optionally transformed first) and assemble one
    condition block: Top-N curve + bootstrap CIs."""
    deep_k = min(ix.count, DEEP_K_PER_VARIANT * max(1, ix.count // max(1, len(set(ix.labels)))))
    rankings: list[list[str]] = []
    truths: list[str] = []
    for qi, (g, truth) in enumerate(queries):
        truths.append(truth)
        try:
            gq = transform(g, qi) if transform else g
            gq = G.normalize(G.to_levels(gq))
            rankings.append(ranked_labels(ix, gq, enc, config.vote_k, deep_k, config.voting_rule))
        except (G.EmptyImage, ValueError) as exc:
            rankings.append([])
            failures.append({"condition": condition, "query_index": qi, "error": str(exc)})
    curve = {}
    ci = {}
    for n in config.levels:
        hits = np.array([1.0 if t in r[:n] else 0.0 for r, t in zip(rankings, truths)])
        curve[str(n)] = topn_accuracy(rankings, truths, n)
        ci[str(n)] = _bootstrap_ci(hits, config.bootstrap_resamples, hash64(config.bootstrap_seed, condition, n))
    return {"curve": curve, "ci": ci, "sample_count": len(queries)}


def _direct_index(renders: dict[str, G.Glyph], enc) -> Index:
    """Index over one plain modern render per label (the direct baseline)."""
    labels = sorted(renders, key=ord)
    entries = [
        DictionaryEntry(
            entry_id=hash64("direct", label),
            label=label,
            variant_index=0,
            glyph=renders[label],
            seed=0,
            ids_string=label,
        )
        for label in labels
    ]
    d = Dictionary(
        entries=entries,
        generation=0,
        charset=labels,
        config_fingerprint="direct-baseline",
        k_variants=1,
        global_seed=0,
    )
    return build_index(d, enc)


def run_benchmark(
    dictionary: Dictionary,
    queries: list[tuple[G.Glyph, str]],
    config: EvalConfig | None = None,
    enc=None,
    renders: dict[str, G.Glyph] | None = None,
    index: Index | None = None,
) -> dict:
    """Clean-scan benchmark: dictionary column plus, when plain renders are
    available, the direct-retrieval baseline column."""
    config = config or EvalConfig()
    enc = enc or BlockGradEncoder()
    if not queries:
        raise ValueError("queries must be non-empty")
    fingerprint = dictionary.config_fingerprint  # recorded before queries run
    ix = index if index is not None else build_index(dictionary, enc)
    failures: list[dict] = []
    conditions = {
        "clean/dictionary": _evaluate_queries(ix, queries, config, enc, "clean/dictionary", failures)
    }
    if renders:
        dr = _direct_index(renders, enc)
        conditions["clean/direct"] = _evaluate_queries(dr, queries, config, enc, "clean/direct", failures)
    report = {
        "config": _config_echo(dictionary, config, enc, len(queries)),
        "conditions": conditions,
        "failures": failures,
    }
    assert report["config"]["dictionary_fingerprint"] == fingerprint
    _assert_monotone(report)
    return report


def run_degradation_suite(
    dictionary: Dictionary,
    queries: list[tuple[G.Glyph, str]],
    config: EvalConfig | None = None,
    enc=None,
    suite_seed: int = 0,
    index: Index | None = None,
) -> dict:
    """All 12 degradation conditions plus the clean row, one report."""
    config = config or EvalConfig()
    enc = enc or BlockGradEncoder()
    ix = index if index is not None else build_index(dictionary, enc)
    failures: list[dict] = []
    conditions = {
        "clean/dictionary": _evaluate_queries(ix, queries, config, enc, "clean/dictionary", failures)
    }
    for kind in Kind:
        for severity in (1, 2, 3):
            name = f"{kind.value}-{severity}/dictionary"

            def degrade_query(g: G.Glyph, qi: int, kind=kind, severity=severity) -> G.Glyph:
                spec = DegradationSpec(kind, severity, hash64(suite_seed, kind.value, severity, qi))
                return degrade(g, spec)

            conditions[name] = _evaluate_queries(
                ix, queries, config, enc, name, failures, transform=degrade_query
            )
    report = {
        "config": _config_echo(dictionary, config, enc, len(queries), suite_seed=suite_seed),
        "conditions": conditions,
        "failures": failures,
    }
    _assert_monotone(report)
    return report


def _config_echo(dictionary: Dictionary, config: EvalConfig, enc, query_count: int, **extra) -> dict:
    echo = {
        "vote_k": config.vote_k,
        "deep_k_per_variant": DEEP_K_PER_VARIANT,
        "voting_rule": config.voting_rule,
        "ranking_protocol": "vote-then-extend",
        "encoder_id": enc.encoder_id,
        "dim": enc.dim,
        "k_variants": dictionary.k_variants,
        "dictionary_fingerprint": dictionary.config_fingerprint,
        "dictionary_generation": dictionary.generation,
        "split_seed": config.split_seed,
        "split_ratio": config.split_ratio,
        "bootstrap_seed": config.bootstrap_seed,
        "bootstrap_resamples": config.bootstrap_resamples,
        "query_count": query_count,
        "levels": list(config.levels),
    }
    echo.update(extra)
    return echo


def _assert_monotone(report: dict) -> None:
    for name, block in report["conditions"].items():
        curve = block["curve"]
        values = [curve[str(n)] for n in sorted(int(k) for k in curve)]
        if any(a > b + 1e-12 for a, b in zip(values, values[1:])):
            raise AssertionError(f"non-monotone Top-N curve in condition {name}")


# -- report serialization ------------------------------------------------------


def report_json_bytes(report: dict) -> bytes:
    return json.dumps(report, ensure_ascii=False, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_report(report: dict, path) -> None:
    with open(path, "wb") as fh:
        fh.write(report_json_bytes(report))


def report_tsv(report: dict) -> str:
    lines = ["condition\ttop_n\taccuracy\tci_low\tci_high"]
    for name in sorted(report["conditions"]):
        block = report["conditions"][name]
        for n in sorted(int(k) for k in block["curve"]):
            lo, hi = block["ci"][str(n)]
            lines.append(f"{name}\t{n}\t{block['curve'][str(n)]:.6f}\t{lo:.6f}\t{hi:.6f}")
    return "\n".join(lines) + "\n"


def report_svg(report: dict, width: int = 640, height: int = 420) -> str:
    """Minimal deterministic SVG line chart of every condition's curve."""
    margin = 50
    levels = sorted({int(k) for b in report["conditions"].values() for k in b["curve"]})
    xmax = max(levels)
    palette = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
               "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#98df8a", "#c49c94"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height-margin}" x2="{width-margin}" y2="{height-margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height-margin}" stroke="black"/>',
    ]

    def xy(n: int, acc: float) -> tuple[float, float]:
        x = margin + (width - 2 * margin) * (n / xmax)
        y = height - margin - (height - 2 * margin) * acc
        return x, y

    for gi, name in enumerate(sorted(report["conditions"])):
        block = report["conditions"][name]
        pts = " ".join(
            f"{xy(n, block['curve'][str(n)])[0]:.1f},{xy(n, block['curve'][str(n)])[1]:.1f}"
            for n in levels
        )
        color = palette[gi % len(palette)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        parts.append(
            f'<text x="{width-margin+4}" y="{margin + 14*gi}" font-size="10" fill="{color}">{name}</text>'
        )
    for n in levels:
        x, y = xy(n, 0.0)
        parts.append(f'<text x="{x-6}" y="{height-margin+16}" font-size="10">{n}</text>')
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        _, y = xy(levels[0], frac)
        parts.append(f'<text x="{margin-34}" y="{y+4}" font-size="10">{frac:.2f}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
