import numpy as np
import pytest

from glyphdict import demo, retrieval
from glyphdict.refinement import SupportMap, compute_support, refine_loop, refine_step
from glyphdict.rng import hash64
from glyphdict.synthesis import build_dictionary


@pytest.fixture(scope="module")
def refine_setup(small_specs):
    specs = small_specs[:16]
    d, _ = build_dictionary(specs, k=4, global_seed=31)
    ix = retrieval.build_index(d)
    by_label = {s.label: s for s in specs}
    sup_labels = [s.label for s in specs[:10]]
    val_labels = [s.label for s in specs[10:13]]
    exemplars = [
        (demo.make_probe(by_label[l], hash64(2, "ref-ex", l, i)), l)
        for l in sup_labels
        for i in range(2)
    ]
    validation = [
        (demo.make_probe(by_label[l], hash64(2, "ref-val", l, i)), l)
        for l in val_labels
        for i in range(2)
    ]
    return {"specs": by_label, "dict": d, "index": ix, "exemplars": exemplars, "validation": validation}


def test_support_covers_every_entry(refine_setup):
    support = compute_support(refine_setup["index"], refine_setup["exemplars"])
    assert support.coverage_equals(refine_setup["dict"])


def test_entry_equal_to_exemplar_is_supported(refine_setup):
    d = refine_setup["dict"]
    e = d.entries[0]
    support = compute_support(refine_setup["index"], [(e.glyph, e.label)])
    assert support.supported[e.entry_id]
    assert support.evidence[e.entry_id] == [0]


def test_empty_exemplars_single_entry_supported(small_specs):
    d, _ = build_dictionary(small_specs[:1], 1, 5)
    ix = retrieval.build_index(d)
    support = compute_support(ix, [])
    assert support.supported[d.entries[0].entry_id]


def test_unsupervised_fallback_median(refine_setup):
    # labels with no exemplars use the median rule: roughly half supported
    support = compute_support(refine_setup["index"], refine_setup["exemplars"])
    d = refine_setup["dict"]
    exemplar_labels = {l for _, l in refine_setup["exemplars"]}
    fallback = [e for e in d.entries if e.label not in exemplar_labels]
    flags = [support.supported[e.entry_id] for e in fallback]
    assert 0.3 <= np.mean(flags) <= 0.7


def test_refine_step_all_supported_identity(refine_setup):
    d = refine_setup["dict"]
    all_ok = SupportMap(
        supported={e.entry_id: True for e in d.entries},
        evidence={e.entry_id: [] for e in d.entries},
    )
    out, regenerated = refine_step(d, all_ok, refine_setup["specs"], 1, 1)
    assert regenerated == 0
    assert out.generation == d.generation + 1
    for a, b in zip(d.entries, out.entries):
        assert a.glyph.same_bytes(b.glyph)


def test_refine_step_single_unsupported(refine_setup):
    d = refine_setup["dict"]
    flags = {e.entry_id: True for e in d.entries}
    target = d.entries[5]
    flags[target.entry_id] = False
    support = SupportMap(supported=flags, evidence={k: [] for k in flags})
    out, regenerated = refine_step(d, support, refine_setup["specs"], 1, 1)
    assert regenerated == 1
    differing = [
        (a, b) for a, b in zip(d.entries, out.entries) if not a.glyph.same_bytes(b.glyph)
    ]
    assert len(differing) == 1
    assert differing[0][0].entry_id == target.entry_id
    assert differing[0][1].entry_id == target.entry_id  # stable identity


def test_refine_step_preserves_coverage(refine_setup):
    d = refine_setup["dict"]
    support = compute_support(refine_setup["index"], refine_setup["exemplars"])
    out, _ = refine_step(d, support, refine_setup["specs"], 7, 1)
    per_label = {}
    for e in out.entries:
        per_label.setdefault(e.label, set()).add(e.variant_index)
    for label in d.charset:
        assert per_label[label] == set(range(d.k_variants))


def test_refine_step_rejects_partial_support(refine_setup):
    d = refine_setup["dict"]
    partial = SupportMap(supported={d.entries[0].entry_id: True}, evidence={})
    with pytest.raises(ValueError):
        refine_step(d, partial, refine_setup["specs"], 1, 1)


def test_refine_loop_contract(refine_setup):
    d = refine_setup["dict"]
    refined, trace = refine_loop(
        d,
        refine_setup["exemplars"],
        refine_setup["validation"],
        refine_setup["specs"],
        iterations=2,
        global_seed=77,
    )
    assert len(trace.iterations) >= 2
    assert trace.iterations[0]["generation"] == 0
    first, last = trace.iterations[0], trace.iterations[-1]
    assert refined.generation == trace.best_generation
    # retained best: returned validation Top-100 never below iteration 0
    returned = [it for it in trace.iterations if it["generation"] == trace.best_generation][0]
    assert returned["validation_curve"]["100"] >= first["validation_curve"]["100"]
    assert trace.stop_reason


def test_refine_loop_rejects_label_overlap(refine_setup):
    d = refine_setup["dict"]
    with pytest.raises(ValueError):
        refine_loop(
            d,
            refine_setup["exemplars"],
            refine_setup["exemplars"],
            refine_setup["specs"],
            iterations=1,
        )
