"""Command surface for scripted, reproducible runs.

Every subcommand logs its resolved configuration; all randomness flows from
--seed. Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from . import demo as demo_mod
from . import glyph as G
from .degradation import DegradationSpec, Kind, degrade
from .encoder import BlockGradEncoder, save_store
from .evaluation import (
    EvalConfig,
    report_svg,
    report_tsv,
    run_benchmark,
    run_degradation_suite,
    split_characters,
    write_report,
)
from .ids import load_ids_table
from .retrieval import build_index, decipher_glyph, load_index, save_index
from .rng import hash64
from .synthesis import BuildFailed, build_dictionary, load_dictionary, save_dictionary

log = logging.getLogger("glyphdict")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="root seed for all randomness")
    p.add_argument("--log-level", default="INFO")


def _specs_from_args(args) -> list:
    table = load_ids_table(args.ids, warn=log.warning) if args.ids else demo_mod.bundled_table()
    labels = list(table)  # table file order
    if args.chars:
        labels = labels[: args.chars]
    return demo_mod.charspecs_from_font_tree(args.fonts, table, labels)


def cmd_make_demo(args) -> int:
    labels = demo_mod.demo_labels(args.chars)
    out = args.out
    os.makedirs(out, exist_ok=True)
    log.info("rendering %d characters x %d fonts", len(labels), len(demo_mod.DEMO_FONTS))
    demo_mod.write_font_tree(os.path.join(out, "fonts"), labels)
    table = demo_mod.bundled_table()
    with open(os.path.join(out, "ids.tsv"), "w", encoding="utf-8") as fh:
        for label in labels:
            ids_string, gloss = table[label]
            fh.write(f"{label}\t{ids_string}\t{gloss}\n")
    split = split_characters(labels, args.ratio, args.split_seed)
    specs = {s.label: s for s in demo_mod.demo_charspecs(args.chars)}
    log.info("split: %d train / %d test", len(split.train_labels), len(split.test_labels))

    test_specs = [specs[l] for l in split.test_labels]
    queries = demo_mod.make_probe_set(test_specs, args.queries_per_label, args.seed, "query")
    demo_mod.write_probe_tree(os.path.join(out, "queries"), queries)

    train = split.train_labels
    val_cut = max(1, len(train) // 5)
    val_labels, sup_labels = train[:val_cut], train[val_cut:]
    exemplars = demo_mod.make_probe_set([specs[l] for l in sup_labels], args.exemplars_per_label, args.seed, "exemplar")
    demo_mod.write_probe_tree(os.path.join(out, "exemplars"), exemplars)
    validation = demo_mod.make_probe_set([specs[l] for l in val_labels], args.exemplars_per_label, args.seed, "validation")
    demo_mod.write_probe_tree(os.path.join(out, "validation"), validation)

    with open(os.path.join(out, "split.json"), "w", encoding="utf-8") as fh:
        json.dump(
            {
                "seed": split.seed,
                "ratio": split.ratio,
                "train_labels": split.train_labels,
                "test_labels": split.test_labels,
                "validation_labels": val_labels,
                "support_labels": sup_labels,
            },
            fh,
            ensure_ascii=False,
            sort_keys=True,
            separators=(",", ":"),
        )
    log.info("demo data written to %s", out)
    return 0


def cmd_build_dict(args) -> int:
    specs = _specs_from_args(args)
    log.info("building dictionary: %d characters, K=%d, seed=%d", len(specs), args.k, args.seed)
    try:
        dictionary, report = build_dictionary(specs, args.k, args.seed, workers=args.workers)
    except BuildFailed as exc:
        log.error("build failed: %s", exc)
        for failure in exc.failures:
            log.error("  %s: %s", failure["label"], failure["error"])
        return 1
    save_dictionary(dictionary, args.out)
    renders_dir = os.path.join(args.out, "renders")
    os.makedirs(renders_dir, exist_ok=True)
    for spec in specs:
        G.save_png(spec.font_renders[0], os.path.join(renders_dir, f"{ord(spec.label):04x}.png"))
    table = load_ids_table(args.ids, warn=log.warning) if args.ids else demo_mod.bundled_table()
    with open(os.path.join(args.out, "ids.tsv"), "w", encoding="utf-8") as fh:
        for spec in specs:
            ids_string, gloss = table.get(spec.label, (spec.label, ""))
            fh.write(f"{spec.label}\t{ids_string}\t{gloss}\n")
    with open(os.path.join(args.out, "build_report.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    log.info("dictionary: %d entries, fingerprint %s", report["entry_count"], report["fingerprint"][:16])
    return 0


def _load_or_build_index(dict_dir, enc):
    store = os.path.join(dict_dir, "embeddings.bin")
    meta = os.path.join(dict_dir, "index_meta.json")
    if os.path.exists(store) and os.path.exists(meta):
        return load_index(store, meta)
    return build_index(load_dictionary(dict_dir), enc)


def cmd_index(args) -> int:
    enc = BlockGradEncoder()
    dictionary = load_dictionary(args.dict)
    ix = build_index(dictionary, enc)
    out = args.out or args.dict
    save_index(ix, os.path.join(out, "embeddings.bin"), os.path.join(out, "index_meta.json"))
    log.info("indexed %d entries, dim %d, generation %d", ix.count, ix.dim, ix.generation)
    return 0


def cmd_query(args) -> int:
    enc = BlockGradEncoder()
    ix = _load_or_build_index(args.dict, enc)
    g = G.load_glyph(args.image)
    result = decipher_glyph(ix, g, k=args.k, enc=enc, salt=args.seed)
    for vote in result.label_ranking[: args.n]:
        sys.stdout.write(f"{vote.label}\t{vote.score:.6f}\t{vote.best_similarity:.6f}\n")
    return 0


def _load_queries(path):
    return demo_mod.load_probe_tree(path)


def cmd_eval(args) -> int:
    enc = BlockGradEncoder()
    dictionary = load_dictionary(args.dict)
    config = EvalConfig(
        vote_k=args.k,
        split_seed=args.split_seed,
        split_ratio=args.ratio,
        bootstrap_seed=args.seed,
    )
    queries = _load_queries(args.queries)
    if not queries:
        log.error("no queries found under %s", args.queries)
        return 1
    split = split_characters(dictionary.charset, args.ratio, args.split_seed)
    leaked = {t for _, t in queries} & set(split.train_labels)
    if leaked:
        log.warning("queries include %d train-split labels (zero-shot hygiene)", len(leaked))
    renders = {}
    renders_dir = os.path.join(args.dict, "renders")
    if os.path.isdir(renders_dir):
        for name in sorted(os.listdir(renders_dir)):
            if name.endswith(".png"):
                renders[chr(int(name[:-4], 16))] = G.load_glyph_raw(os.path.join(renders_dir, name))
    report = run_benchmark(dictionary, queries, config, enc, renders=renders or None)
    write_report(report, args.out)
    base, _ = os.path.splitext(args.out)
    with open(base + ".tsv", "w", encoding="utf-8") as fh:
        fh.write(report_tsv(report))
    if args.svg:
        with open(base + ".svg", "w", encoding="utf-8") as fh:
            fh.write(report_svg(report))
    for name in sorted(report["conditions"]):
        curve = report["conditions"][name]["curve"]
        log.info("%s: %s", name, " ".join(f"top{n}={curve[str(n)]:.3f}" for n in (1, 10, 20, 50, 100)))
    return 0


def cmd_degrade_eval(args) -> int:
    enc = BlockGradEncoder()
    dictionary = load_dictionary(args.dict)
    queries = _load_queries(args.queries)
    config = EvalConfig(vote_k=args.k, bootstrap_seed=args.seed)
    report = run_degradation_suite(dictionary, queries, config, enc, suite_seed=args.seed)
    write_report(report, args.out)
    base, _ = os.path.splitext(args.out)
    with open(base + ".tsv", "w", encoding="utf-8") as fh:
        fh.write(report_tsv(report))
    if args.svg:
        with open(base + ".svg", "w", encoding="utf-8") as fh:
            fh.write(report_svg(report))
    return 0


def cmd_degrade_suite(args) -> int:
    kinds = [Kind(k) for k in args.kinds.split(",")] if args.kinds else list(Kind)
    severities = [int(s) for s in args.severities.split(",")] if args.severities else [1, 2, 3]
    inputs = demo_mod.load_probe_tree(args.input)
    if not inputs:
        log.error("no images under %s", args.input)
        return 1
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for qi, (g, label) in enumerate(inputs):
        for kind in kinds:
            for severity in severities:
                seed = hash64(args.seed, kind.value, severity, qi)
                out_rel = f"{ord(label):04x}/{qi:04d}_{kind.value}{severity}.png"
                os.makedirs(os.path.join(args.out, f"{ord(label):04x}"), exist_ok=True)
                dg = degrade(g, DegradationSpec(kind, severity, seed))
                G.save_png(dg, os.path.join(args.out, out_rel))
                rows.append(f"{qi}\t{kind.value}\t{severity}\t{seed:016x}\t{out_rel}")
    with open(os.path.join(args.out, "suite.tsv"), "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")
    log.info("wrote %d degraded images under %s", len(rows), args.out)
    return 0


def _assert_no_test_leak(paths: list, sets: list[list]) -> None:
    """When a split.json sits next to the exemplar trees, refuse any probe
    whose label belongs to the test split."""
    for path in paths:
        split_path = os.path.join(os.path.dirname(os.path.abspath(os.fspath(path))), "split.json")
        if not os.path.exists(split_path):
            continue
        with open(split_path, encoding="utf-8") as fh:
            test_labels = set(json.load(fh).get("test_labels", []))
        for probes in sets:
            leaked = sorted({label for _, label in probes} & test_labels)
            if leaked:
                raise ValueError(
                    f"refinement inputs contain {len(leaked)} test-split label(s) "
                    f"(e.g. {leaked[:5]}); test data must never reach the loop"
                )
        return


def cmd_refine(args) -> int:
    from .refinement import refine_loop, write_trace

    enc = BlockGradEncoder()
    dictionary = load_dictionary(args.dict)
    exemplars = demo_mod.load_probe_tree(args.exemplars)
    validation = demo_mod.load_probe_tree(args.validation)
    _assert_no_test_leak([args.exemplars, args.validation], [exemplars, validation])
    table = load_ids_table(args.ids, warn=log.warning) if args.ids else demo_mod.bundled_table()
    specs = {s.label: s for s in demo_mod.charspecs_from_font_tree(args.fonts, table, dictionary.charset)}
    os.makedirs(args.out, exist_ok=True)
    refined, trace = refine_loop(
        dictionary,
        exemplars,
        validation,
        specs,
        iterations=args.iters,
        global_seed=args.seed,
        enc=enc,
        snapshot_dir=args.out if args.snapshots else None,
    )
    save_dictionary(refined, args.out)
    write_trace(trace, os.path.join(args.out, "trace.json"))
    log.info("refined to generation %d (%s)", refined.generation, trace.stop_reason)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    static = args.static if args.static and os.path.isdir(args.static) else None
    app = create_app(args.dict, args.data, static_dir=static)
    host, _, port = args.addr.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")
    return 0


def cmd_export_embeddings(args) -> int:
    enc = BlockGradEncoder()
    ix = _load_or_build_index(args.dict, enc)
    save_store(args.out, ix.embeddings)
    base, _ = os.path.splitext(args.out)
    with open(base + ".tsv", "w", encoding="utf-8") as fh:
        for eid, label in zip(ix.entry_ids, ix.labels):
            fh.write(f"{int(eid):016x}\t{ord(label):04x}\n")
    log.info("exported %d embeddings (dim %d)", ix.count, ix.dim)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphdict", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("make-demo", help="generate the bundled demo corpus trees")
    p.add_argument("--out", required=True)
    p.add_argument("--chars", type=int, default=demo_mod.DEMO_CHARSET_SIZE)
    p.add_argument("--split-seed", type=int, default=1)
    p.add_argument("--ratio", type=float, default=0.9)
    p.add_argument("--queries-per-label", type=int, default=5)
    p.add_argument("--exemplars-per-label", type=int, default=3)
    _add_common(p)
    p.set_defaults(func=cmd_make_demo)

    p = sub.add_parser("build-dict", help="synthesize the variant dictionary")
    p.add_argument("--fonts", required=True, help="font render tree (fonts/<name>/<hex>.png)")
    p.add_argument("--ids", help="IDS table (defaults to the bundled demo table)")
    p.add_argument("--chars", type=int, default=0, help="limit to the first N table characters")
    p.add_argument("--out", required=True)
    p.add_argument("--k", type=int, default=8, help="variants per character")
    p.add_argument("--workers", type=int, default=1)
    _add_common(p)
    p.set_defaults(func=cmd_build_dict)

    p = sub.add_parser("index", help="embed a dictionary into a persisted index")
    p.add_argument("--dict", required=True)
    p.add_argument("--out")
    _add_common(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="decipher one image against a dictionary")
    p.add_argument("--dict", required=True)
    p.add_argument("--image", required=True)
    p.add_argument("--k", type=int, default=50, help="entry matches feeding the vote")
    p.add_argument("--n", type=int, default=10, help="labels to print")
    _add_common(p)
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("eval", help="run the clean benchmark (dictionary vs direct)")
    p.add_argument("--dict", required=True)
    p.add_argument("--queries", required=True, help="query tree or manifest.tsv")
    p.add_argument("--split-seed", type=int, default=1)
    p.add_argument("--ratio", type=float, default=0.9)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("degrade-eval", help="run the 12-condition degradation benchmark")
    p.add_argument("--dict", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--k", type=int, default=50)
    p.add_argument("--out", required=True)
    p.add_argument("--svg", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_degrade_eval)

    p = sub.add_parser("degrade-suite", help="write degraded copies of an image tree")
    p.add_argument("--input", required=True, help="image tree or manifest.tsv")
    p.add_argument("--kinds", help="comma list: blur,noise,erode,mask (default all)")
    p.add_argument("--severities", help="comma list of 1,2,3 (default all)")
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_degrade_suite)

    p = sub.add_parser("refine", help="iteratively refine a dictionary against exemplars")
    p.add_argument("--dict", required=True)
    p.add_argument("--exemplars", required=True)
    p.add_argument("--validation", required=True)
    p.add_argument("--fonts", required=True)
    p.add_argument("--ids")
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--out", required=True)
    p.add_argument("--snapshots", action="store_true", help="keep per-iteration dictionary snapshots")
    _add_common(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("serve", help="run the scholar workbench HTTP service")
    p.add_argument("--addr", default="127.0.0.1:8080")
    p.add_argument("--dict", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--static", default="frontend/dist", help="static UI directory (optional)")
    _add_common(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("export-embeddings", help="write the embedding store + label sidecar")
    p.add_argument("--dict", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_export_embeddings)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level.upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    log.info("config: %s", json.dumps({k: v for k, v in vars(args).items() if k != "func"}, default=str, sort_keys=True))
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
