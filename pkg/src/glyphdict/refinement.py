"""Iterative dictionary refinement: regenerate unsupported entries, re-embed,
re-rank, never touching test inputs.

Support is judged from train-side exemplars only: an entry is supported when
at least one exemplar of its own label retrieves it within the top-k entry
matches. Labels without exemplars fall back to an unsupervised rule (best
cosine to any exemplar at or above the median of that statistic among
fallback entries). Supported entries are copied byte-identically; the loop
early-stops on validation Top-100 with patience 3 and returns the best
generation observed, which may be the input dictionary itself. The encoder
is never modified.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import glyph as G
from .encoder import BlockGradEncoder
from .evaluation import EvalConfig, ranked_labels
from .metrics import TOP_N_LEVELS, topn_accuracy
from .retrieval import Index, build_index, query_topk
from .rng import hash64
from .synthesis import (
    CharSpec,
    ContainmentUnsatisfiable,
    Dictionary,
    DictionaryEntry,
    EmptyDraft,
    SrParams,
    make_entry,
    schedule_params,
)

SUPPORT_K = 50
PATIENCE = 3
VALIDATION_LEVEL = 100


@dataclass
class SupportMap:
    supported: dict[int, bool]  # entry_id -> flag
    evidence: dict[int, list]  # entry_id -> exemplar indices or [score]

    def coverage_equals(self, d: Dictionary) -> bool:
        return set(self.supported) == {e.entry_id for e in d.entries}


def compute_support(
    ix: Index,
    exemplars: list[tuple[G.Glyph, str]],
    k: int = SUPPORT_K,
    enc=None,
) -> SupportMap:
    enc = enc or BlockGradEncoder()
    supported: dict[int, bool] = {}
    evidence: dict[int, list] = {}
    exemplar_labels = {label for _, label in exemplars}
    embeddings = [enc.embed(g) for g, _ in exemplars]

    retrieved_by: dict[int, list[int]] = {}
    for ei, ((g, label), q) in enumerate(zip(exemplars, embeddings)):
        for m in query_topk(ix, q, k):
            if m.label == label:
                retrieved_by.setdefault(m.entry_id, []).append(ei)

    best_sim: dict[int, float] = {}
    if embeddings:
        qmat = np.stack(embeddings)
        sims = ix.embeddings @ qmat.T  # (count, n_exemplars)
        best = sims.max(axis=1)
        best_sim = {int(eid): float(s) for eid, s in zip(ix.entry_ids, best)}

    fallback_ids = [
        int(eid) for eid, label in zip(ix.entry_ids, ix.labels) if label not in exemplar_labels
    ]
    median = 0.0
    if fallback_ids and best_sim:
        median = float(np.median([best_sim[eid] for eid in fallback_ids]))

    for eid, label in zip(ix.entry_ids, ix.labels):
        eid = int(eid)
        if label in exemplar_labels:
            hits = retrieved_by.get(eid, [])
            supported[eid] = bool(hits)
            evidence[eid] = hits
        elif not embeddings:
            supported[eid] = True  # nothing to judge against
            evidence[eid] = []
        else:
            supported[eid] = best_sim[eid] >= median
            evidence[eid] = [best_sim[eid]]
    return SupportMap(supported=supported, evidence=evidence)


def _jittered_params(base: SrParams, seed: int) -> SrParams:
    """Schedule params jittered +-20 percent, clamped to their valid ranges."""
    from .rng import Rng

    rng = Rng(hash64(seed, "param-jitter"))

    def jitter(value: float) -> float:
        return value * (1.0 + 0.2 * rng.uniform(-1.0, 1.0))

    return SrParams(
        attrition_prob=min(1.0, max(0.0, jitter(base.attrition_prob))),
        merge_radius=max(0, min(4, int(round(jitter(float(base.merge_radius)))))),
        warp_amplitude=min(6.0, max(0.0, jitter(base.warp_amplitude))),
        region_jitter=max(0, min(5, int(round(jitter(float(base.region_jitter)))))),
        containment_min=base.containment_min,
    )


def make_exemplar_scorer(exemplars: list[tuple[G.Glyph, str]], enc=None):
    """Score an entry by its best cosine to exemplars of its own label, or to
    any exemplar when its label has none. Higher means closer to attested
    morphology; exemplars are train-side only, so no test input is read."""
    enc = enc or BlockGradEncoder()
    if not exemplars:
        return None
    mat = np.stack([enc.embed(g) for g, _ in exemplars])
    by_label: dict[str, list[int]] = {}
    for i, (_, label) in enumerate(exemplars):
        by_label.setdefault(label, []).append(i)

    def score(label: str, glyph: G.Glyph) -> float:
        sims = mat @ enc.embed(glyph)
        idx = by_label.get(label)
        return float(sims[idx].max()) if idx else float(sims.max())

    return score


def refine_step(
    d: Dictionary,
    support: SupportMap,
    specs: dict[str, CharSpec],
    global_seed: int,
    iteration: int,
    scorer=None,
) -> tuple[Dictionary, int]:
    """Regenerate unsupported entries; supported ones are carried verbatim.

    With a scorer, a regenerated variant replaces the old one only when it
    scores at least as close to the exemplar manifold: refinement then
    climbs toward attested morphology instead of churning zero-exemplar
    labels at random. Returns (new dictionary, number replaced);
    regeneration failures keep the prior entry so label coverage never
    shrinks.
    """
    if not support.coverage_equals(d):
        raise ValueError("support map does not cover the dictionary")
    new_entries: list[DictionaryEntry] = []
    regenerated = 0
    for entry in d.entries:
        if support.supported[entry.entry_id] or entry.label not in specs:
            new_entries.append(entry)
            continue
        seed = hash64(global_seed, entry.label, entry.variant_index, iteration)
        params = _jittered_params(schedule_params(entry.variant_index), seed)
        try:
            fresh = make_entry(
                specs[entry.label],
                entry.variant_index,
                global_seed,
                params=params,
                generation=d.generation + 1,
                seed=seed,
            )
        except (EmptyDraft, ContainmentUnsatisfiable):
            new_entries.append(entry)
            continue
        if scorer is not None and scorer(entry.label, fresh.glyph) < scorer(entry.label, entry.glyph):
            new_entries.append(entry)
            continue
        # entry identity is positional: keep the original stable id
        new_entries.append(
            DictionaryEntry(
                entry_id=entry.entry_id,
                label=entry.label,
                variant_index=entry.variant_index,
                glyph=fresh.glyph,
                seed=seed,
                ids_string=entry.ids_string,
                generation=d.generation + 1,
                stage_trace=fresh.stage_trace,
            )
        )
        regenerated += 1
    return (
        Dictionary(
            entries=new_entries,
            generation=d.generation + 1,
            charset=list(d.charset),
            config_fingerprint=d.config_fingerprint,
            k_variants=d.k_variants,
            global_seed=d.global_seed,
            canvas=d.canvas,
        ),
        regenerated,
    )


@dataclass
class RefinementTrace:
    iterations: list[dict] = field(default_factory=list)
    stop_reason: str = ""
    best_generation: int = 0

    def as_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "stop_reason": self.stop_reason,
            "best_generation": self.best_generation,
        }


def _validation_curve(ix: Index, validation: list[tuple[G.Glyph, str]], enc, config: EvalConfig) -> dict:
    deep_k = min(ix.count, 100 * max(1, ix.count // max(1, len(set(ix.labels)))))
    rankings = []
    truths = []
    for g, truth in validation:
        truths.append(truth)
        try:
            gn = G.normalize(G.to_levels(g))
            rankings.append(ranked_labels(ix, gn, enc, config.vote_k, deep_k, config.voting_rule))
        except (G.EmptyImage, ValueError):
            rankings.append([])
    return {n: topn_accuracy(rankings, truths, n) for n in TOP_N_LEVELS}


def refine_loop(
    d: Dictionary,
    exemplars: list[tuple[G.Glyph, str]],
    validation: list[tuple[G.Glyph, str]],
    specs: dict[str, CharSpec],
    iterations: int = 20,
    global_seed: int = 0,
    enc=None,
    config: EvalConfig | None = None,
    support_k: int = SUPPORT_K,
    snapshot_dir=None,
) -> tuple[Dictionary, RefinementTrace]:
    """Up to `iterations` rounds of support -> regenerate -> re-index ->
    validate; early-stops after PATIENCE rounds without validation Top-100
    improvement and returns the best-generation dictionary."""
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    exemplar_labels = {label for _, label in exemplars}
    validation_labels = {label for _, label in validation}
    if exemplar_labels & validation_labels:
        raise ValueError("validation labels must be disjoint from support exemplar labels")
    enc = enc or BlockGradEncoder()
    config = config or EvalConfig()

    trace = RefinementTrace()
    current = d
    ix = build_index(current, enc)

    def selection_key(curve: dict) -> tuple:
        # Top-100 drives early stopping; sharper cutoffs break ties so a
        # saturated validation metric does not pin the result to gen 0.
        return tuple(curve[n] for n in (100, 50, 20, 10, 1))

    best_curve = _validation_curve(ix, validation, enc, config)
    best_dict, best_gen = current, current.generation
    trace.iterations.append(
        {
            "generation": current.generation,
            "regenerated": 0,
            "validation_curve": {str(k): v for k, v in best_curve.items()},
        }
    )
    scorer = make_exemplar_scorer(exemplars, enc)
    stall = 0
    for it in range(1, iterations + 1):
        support = compute_support(ix, exemplars, support_k, enc)
        current, regenerated = refine_step(current, support, specs, global_seed, it, scorer=scorer)
        ix = build_index(current, enc)
        curve = _validation_curve(ix, validation, enc, config)
        trace.iterations.append(
            {
                "generation": current.generation,
                "regenerated": regenerated,
                "validation_curve": {str(k): v for k, v in curve.items()},
            }
        )
        if snapshot_dir is not None:
            from .synthesis import save_dictionary

            save_dictionary(current, os.path.join(os.fspath(snapshot_dir), f"gen-{current.generation:04d}"))
        if curve[VALIDATION_LEVEL] > best_curve[VALIDATION_LEVEL]:
            stall = 0
        else:
            stall += 1
        if selection_key(curve) >= selection_key(best_curve):
            best_curve, best_dict, best_gen = curve, current, current.generation
        if stall >= PATIENCE:
            trace.stop_reason = f"early-stop: no validation Top-{VALIDATION_LEVEL} gain for {PATIENCE} iterations"
            break
    else:
        trace.stop_reason = "max iterations reached"
    trace.best_generation = best_gen
    return best_dict, trace


def write_trace(trace: RefinementTrace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(trace.as_dict(), fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
