"""Single executable for the full pipeline.

Subcommands: fetch, build-dict, sweep, classify, features, train, evaluate,
synth. Exit codes: 0 success, 1 usage error, 2 data/runtime error. Every run
logs its resolved configuration; randomized subcommands record their seed in
the output metadata. Flags beat --config file values, which beat defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import compressor, dictionary, evaluation, html_features, ml, report
from .corpus import Corpus, Label, SyntheticSpec, generate_synthetic_corpus, load_corpus, save_corpus
from .errors import PhishpressError
from .fetch import DEFAULT_TIMEOUT, DEFAULT_USER_AGENT, fetch_url
from .ml.features import COMPRESSION_FEATURES, HTML_FEATURES

logger = logging.getLogger("phishpress")

DEFAULT_SEED = 42

_CLASS_NAMES = {"phish": Label.PHISHING, "legit": Label.NONPHISHING}


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here is exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_grid(spec: str) -> list[float]:
    """Grid specs: 'log:LO:HI:N', 'lin:LO:HI:N', or comma-separated values."""
    if spec.startswith(("log:", "lin:")):
        kind, lo, hi, n = spec.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
        if n < 1:
            raise ValueError("grid needs at least one point")
        if n == 1:
            return [lo]
        if kind == "log":
            ratio = (hi / lo) ** (1 / (n - 1))
            return [lo * ratio**i for i in range(n)]
        step = (hi - lo) / (n - 1)
        return [lo + step * i for i in range(n)]
    return [float(v) for v in spec.split(",") if v.strip()]


def _log_config(args: argparse.Namespace) -> None:
    resolved = {k: str(v) for k, v in vars(args).items() if k not in ("func", "config")}
    logger.info("resolved config: %s", json.dumps(resolved, sort_keys=True))


def _load_models(args) -> tuple[compressor.CompressionModel, compressor.CompressionModel]:
    phish_dict = dictionary.load_dictionary(args.dict_phish)
    legit_dict = dictionary.load_dictionary(args.dict_legit)
    level = getattr(args, "level", compressor.DEFAULT_LEVEL)
    return (
        compressor.CompressionModel(Label.PHISHING, phish_dict, level),
        compressor.CompressionModel(Label.NONPHISHING, legit_dict, level),
    )


# --- subcommand implementations -----------------------------------------------

def cmd_fetch(args) -> int:
    urls = [
        line.strip()
        for line in Path(args.urls).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]

    def grab(item):
        i, url = item
        try:
            return fetch_url(url, timeout=args.timeout,
                             user_agent=args.user_agent, doc_id=f"doc-{i:05d}")
        except PhishpressError as exc:
            logger.warning("fetch failed for %s: %s", url, exc)
            return None

    if args.jobs > 1 and len(urls) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            fetched = list(pool.map(grab, enumerate(urls)))
    else:
        fetched = [grab(item) for item in enumerate(urls)]
    docs = [d for d in fetched if d is not None]
    manifest = save_corpus(Corpus(tuple(docs)), args.out)
    print(f"fetched {len(docs)}/{len(urls)} pages -> {manifest}")
    return 0


def cmd_build_dict(args) -> int:
    corpus = load_corpus(args.corpus)
    phish_table, legit_table, vocab = dictionary.build_class_tables(
        corpus, stored_k=args.stored_k
    )
    table = phish_table if _CLASS_NAMES[args.class_name] is Label.PHISHING else legit_table
    model = dictionary.build_dictionary(table, args.threshold, corpus.fingerprint())
    _, dict_path = dictionary.save_dictionary(model, args.out)
    print(
        f"{model.class_label.value} dictionary: {model.word_count} words, "
        f"{len(model.dict_bytes)} bytes (|V|={vocab}) -> {dict_path}"
    )
    return 0


def cmd_sweep(args) -> int:
    train_corpus = load_corpus(args.corpus)
    holdout = load_corpus(args.holdout)
    grid = parse_grid(args.grid)
    sweep = dictionary.sweep_threshold(
        train_corpus, holdout, grid, stored_k=args.stored_k, level=args.level
    )
    out = Path(args.out)
    paths = report.save_sweep_outputs(sweep, out)
    phish_table, legit_table, _ = dictionary.build_class_tables(
        train_corpus, stored_k=args.stored_k
    )
    paths += report.save_likelihood_figures(
        {"phishing": phish_table, "non-phishing": legit_table}, out
    )
    print(
        f"best threshold {sweep.best_threshold:.6g} "
        f"(accuracy {sweep.best_accuracy:.4f}); wrote {len(paths)} files to {out}"
    )
    return 0


def cmd_classify(args) -> int:
    phish_model, legit_model = _load_models(args)
    corpus = load_corpus(args.in_dir)
    results = compressor.classify_batch(corpus, phish_model, legit_model, jobs=args.jobs)
    out = compressor.write_results_jsonl(results, args.out)
    flagged = sum(r.predicted is Label.PHISHING for r in results)
    print(f"classified {len(results)} pages ({flagged} phishing) -> {out}")
    return 0


def cmd_features(args) -> int:
    corpus = load_corpus(args.in_dir)
    if args.fit_thresholds:
        thresholds = html_features.fit_nonmatching_threshold(corpus)
        thr_path = Path(args.out).with_suffix(".thresholds.json")
        html_features.save_threshold(thresholds, thr_path)
        logger.info("fitted non-matching thresholds -> %s", thr_path)
    elif args.thresholds:
        thresholds = html_features.load_threshold(args.thresholds)
    else:
        thresholds = evaluation.DEFAULT_NONMATCHING

    with_ratios = bool(args.dict_phish and args.dict_legit)
    mask = (COMPRESSION_FEATURES if with_ratios else ()) + HTML_FEATURES
    if with_ratios:
        phish_model, legit_model = _load_models(args)

    rows = []
    for doc in corpus:
        row: dict = {"doc_id": doc.id}
        if with_ratios:
            row["phish_ratio"] = compressor.compression_ratio(doc.html, phish_model).ratio
            row["legit_ratio"] = compressor.compression_ratio(doc.html, legit_model).ratio
        stats = html_features.url_similarity_stats(doc.html, doc.url)
        row["bad_form"] = html_features.detect_bad_form(doc.html, doc.url)
        row["bad_action_field"] = html_features.detect_bad_action_field(doc.html, doc.url)
        row["non_matching_urls"] = html_features.detect_non_matching_urls(stats, thresholds)
        if doc.label is not Label.UNKNOWN:
            row["label"] = 1 if doc.label is Label.PHISHING else 0
        rows.append(row)
    has_labels = all("label" in r for r in rows) and bool(rows)
    out = ml.save_feature_rows(rows, args.out, mask, with_label=has_labels)
    print(f"wrote {len(rows)} feature rows -> {out}")
    return 0


def cmd_train(args) -> int:
    mask = [m.strip() for m in args.mask.split(",")] if args.mask else None
    vectors, used_mask = ml.load_feature_vectors(args.features, mask)
    algorithm = ml.Algorithm.from_string(args.algo)
    model, grid_report = ml.train(vectors, algorithm, seed=args.seed)
    model = ml.with_feature_mask(model, used_mask)
    model_path = ml.save_model(model, args.out)
    report_path = Path(args.out).with_suffix(".gridsearch.json")
    report_path.write_text(
        json.dumps(
            {
                "seed": grid_report.seed,
                "best_params": grid_report.best_params,
                "best_cv_accuracy": grid_report.best_accuracy,
                "candidates": [
                    {"params": p, "mean_cv_accuracy": a} for p, a in grid_report.candidates
                ],
            },
            indent=2,
        )
        + "\n",
        encoding="utf-8",
    )
    print(
        f"trained {algorithm.value} on {len(vectors)} vectors "
        f"(cv accuracy {grid_report.best_accuracy:.4f}) -> {model_path}"
    )
    return 0


def cmd_evaluate(args) -> int:
    test = load_corpus(args.test)
    phish_model = legit_model = None
    if args.dict_phish and args.dict_legit:
        phish_model, legit_model = _load_models(args)
    thresholds = (
        html_features.load_threshold(args.thresholds)
        if args.thresholds
        else evaluation.DEFAULT_NONMATCHING
    )
    trained = ml.load_model(args.model) if args.model else None
    config = evaluation.PipelineConfig(
        mode=args.mode,
        phish_model=phish_model,
        legit_model=legit_model,
        nonmatching=thresholds,
        model=trained,
    )
    out = Path(args.out)
    if args.imbalanced:
        rule = evaluation.make_classifier(config)
        pool = list(test.by_label(Label.PHISHING))
        legit_docs = list(test.by_label(Label.NONPHISHING))
        result = evaluation.imbalanced_eval(
            rule, pool, legit_docs, ratio=args.ratio, iterations=args.iters, seed=args.seed
        )
        paths = report.save_metrics_outputs({args.mode: result}, out, stem="imbalanced")
        print(
            f"imbalanced eval ({args.ratio}:1, {args.iters} iters): "
            f"mean TPR {result.mean_tpr}, mean accuracy {result.mean_accuracy}"
        )
    else:
        metrics = evaluation.evaluate_pipeline(config, test)
        paths = report.save_metrics_outputs({args.mode: metrics}, out, stem="metrics")
        print(f"accuracy {metrics.accuracy}, tpr {metrics.tpr}, fpr {metrics.fpr}")
    logger.info("wrote %s", ", ".join(str(p) for p in paths))
    return 0


def cmd_synth(args) -> int:
    spec = SyntheticSpec.from_json(args.spec)
    if args.seed is not None:
        spec = SyntheticSpec(
            phishing=spec.phishing,
            nonphishing=spec.nonphishing,
            docs_per_class=spec.docs_per_class,
            tokens_per_doc=spec.tokens_per_doc,
            seed=args.seed,
        )
    corpus = generate_synthetic_corpus(spec)
    manifest = save_corpus(corpus, args.out)
    meta = {
        "seed": spec.seed,
        "docs_per_class": spec.docs_per_class,
        "tokens_per_doc": spec.tokens_per_doc,
        "spec_file": str(args.spec),
    }
    (Path(args.out) / "synth_meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    print(f"generated {len(corpus)} documents -> {manifest}")
    return 0


# --- parser -----------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="phishpress", description=__doc__)
    parser.add_argument("--config", help="JSON file of per-subcommand defaults")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("fetch", help="fetch pages from a URL list into a corpus")
    p.add_argument("--urls", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.add_argument("--user-agent", default=DEFAULT_USER_AGENT)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("build-dict", help="build one class's preset dictionary")
    p.add_argument("--corpus", required=True)
    p.add_argument("--class", dest="class_name", choices=sorted(_CLASS_NAMES), required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--out", required=True, help="output prefix (PREFIX.json + PREFIX.dict)")
    p.add_argument("--stored-k", type=int, default=dictionary.DEFAULT_STORED_K)
    p.set_defaults(func=cmd_build_dict)

    p = sub.add_parser("sweep", help="sweep likelihood thresholds for accuracy")
    p.add_argument("--corpus", required=True)
    p.add_argument("--holdout", required=True)
    p.add_argument("--grid", default="log:1e-5:5e-3:20")
    p.add_argument("--out", default="sweep-report")
    p.add_argument("--level", type=int, default=compressor.DEFAULT_LEVEL)
    p.add_argument("--stored-k", type=int, default=dictionary.DEFAULT_STORED_K)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("classify", help="classify pages by compression ratio")
    p.add_argument("--dict-phish", required=True)
    p.add_argument("--dict-legit", required=True)
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--level", type=int, default=compressor.DEFAULT_LEVEL)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("features", help="extract HTML heuristic (and ratio) features")
    p.add_argument("--in", dest="in_dir", required=True)
    p.add_argument("--out", required=True, help=".csv or .jsonl feature file")
    p.add_argument("--fit-thresholds", action="store_true")
    p.add_argument("--thresholds", help="JSON from a previous --fit-thresholds run")
    p.add_argument("--dict-phish")
    p.add_argument("--dict-legit")
    p.add_argument("--level", type=int, default=compressor.DEFAULT_LEVEL)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train a classifier on a feature file")
    p.add_argument("--features", required=True)
    p.add_argument("--algo", required=True,
                   choices=[a.value for a in ml.Algorithm])
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.add_argument("--mask", help="comma-separated canonical feature names")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="run a detector over a test corpus")
    p.add_argument("--mode", choices=["compression", "html", "ml"], required=True)
    p.add_argument("--model")
    p.add_argument("--test", required=True)
    p.add_argument("--dict-phish")
    p.add_argument("--dict-legit")
    p.add_argument("--thresholds")
    p.add_argument("--level", type=int, default=compressor.DEFAULT_LEVEL)
    p.add_argument("--imbalanced", action="store_true")
    p.add_argument("--ratio", type=int, default=100)
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", default="eval-report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("synth", help="generate a synthetic two-class corpus")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None, help="overrides the spec seed")
    p.set_defaults(func=cmd_synth)

    return parser


def _apply_config(parser: _Parser, argv: list[str]) -> list[str]:
    """Pull --config out of argv and fold its values in as parser defaults."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        return argv
    config_path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    config = json.loads(Path(config_path).read_text(encoding="utf-8"))
    sub_name = next((a for a in rest if not a.startswith("-")), None)
    section = config.get(sub_name, {}) if sub_name else {}
    for action in parser._subparsers._group_actions:
        if sub_name in getattr(action, "choices", {}):
            subparser = action.choices[sub_name]
            for key, value in section.items():
                opt = "--" + key.lstrip("-")
                for act in subparser._actions:
                    if opt in act.option_strings:
                        act.default = value
                        act.required = False
                        break
    return rest


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _apply_config(parser, argv)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"phishpress: bad --config file: {exc}", file=sys.stderr)
        return 1
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    _log_config(args)
    try:
        return args.func(args)
    except PhishpressError as exc:
        print(f"phishpress: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"phishpress: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
