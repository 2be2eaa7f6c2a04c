"""Command-line interface.

Commands::

    tweetsent train      --config run.ini --train train.tsv --model model.zip [--cv]
    tweetsent predict    --model model.zip --data test.tsv --out pred.tsv
    tweetsent evaluate   --subtask A --gold test.tsv --pred pred.tsv
    tweetsent gridsearch --config run.ini --train train.tsv --report grid.tsv
    tweetsent quantify   --model model.zip --data test.tsv --out prev.tsv

Every command accepts ``--config``, ``--subtask``, ``--seed`` and ``--jobs``.
``--subtask`` and ``--seed`` override the config file.  ``--jobs`` is
recorded in the run configuration; computation is single-process.

Config file keys (INI sections and their options):

``[run]``
    ``subtask`` (A, B, C, D), ``seed``, ``jobs``.
``[features]``
    One boolean per family: ``word_ngrams``, ``char_ngrams``, ``manual_lex``,
    ``scored_lex``, ``surface``, ``pos``, ``clusters``, ``embeddings``;
    ``ngram_range = n_min,n_max`` and ``char_range = m_min,m_max``.
``[resources]``
    ``manual`` (one ``format:path[|path]`` per line), ``scored`` (one path
    per line), ``clusters``, ``embeddings``, ``tags``, ``tagset``, ``negators``.
``[vectorize]``
    ``hash_dim``, ``hash_seed``, ``signed``, ``alpha``, ``weighting``
    (``alpha`` or ``tfidf``), ``normalize``.
``[model]``
    ``kind`` (``stacked`` or ``single``), ``bases`` (one
    ``learner:mode:calibration[:lam]`` per line), ``lam``, ``folds``, ``meta_lams``.
``[grid]``
    ``alpha``, ``lam``, ``hash_dim`` as comma-separated lists.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 solver convergence error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .config import SUBTASKS, ConfigError, load_config
from .corpus import DataError, Schema, format_label, load_dataset, read_predictions, write_predictions
from .evalq import accuracy, classify_and_count, score
from .features import MissingResourceError, extract_texts
from .linear import ConvergenceError, LinearModel
from .pipeline import ContainerError, load_model, load_resources, save_model, train_pipeline
from .ensemble import StackedModel, stratified_folds
from .select import grid_search
from .vectorize import HashSpec, Vectorizer

__all__ = ["main", "EXIT_OK", "EXIT_USAGE", "EXIT_DATA", "EXIT_CONVERGENCE"]

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_CONVERGENCE = 0, 1, 2, 3

log = logging.getLogger("tweetsent")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _run_config(args, required=True):
    if args.config is None:
        if required:
            raise UsageError("--config is required for this command")
        return None
    cfg = load_config(args.config, subtask=args.subtask)
    return cfg.with_overrides(seed=args.seed, jobs=args.jobs)


def _check_subtask(args, pipe):
    if args.subtask is not None and args.subtask.upper() != pipe.cfg.subtask:
        raise UsageError(f"model was trained for subtask {pipe.cfg.subtask}, "
                         f"not {args.subtask.upper()}")


def _objective(model):
    if isinstance(model, StackedModel):
        return model.meta.objective
    base = getattr(model, "base", model)
    return base.objective if isinstance(base, LinearModel) else float("nan")


def _cv_estimate(cfg, train, resources):
    """Held-out score of the whole configured pipeline under ``cfg.folds``-fold CV."""
    fold = stratified_folds(train.labels, cfg.folds, cfg.seed)
    scores = []
    for f in range(cfg.folds):
        tr = train.subset(np.nonzero(fold != f)[0])
        te = train.subset(np.nonzero(fold == f)[0])
        pred = train_pipeline(cfg, tr, resources).predict(te)
        scores.append(score(cfg.info.measure, te.labels, pred, cfg.info.classes, te.topics))
    return float(np.mean(scores)), float(np.std(scores))


def cmd_train(args):
    cfg = _run_config(args)
    train = load_dataset(args.train, cfg.info.schema)
    resources = load_resources(cfg)
    t0 = time.perf_counter()
    pipe = train_pipeline(cfg, train, resources)
    elapsed = time.perf_counter() - t0
    save_model(pipe, args.model, fingerprint=train)
    X = pipe.transform(train.texts[:1], train.ids[:1])
    kind = "stacked" if isinstance(pipe.model, StackedModel) else "single"
    print(f"subtask\t{cfg.subtask}")
    print(f"model\t{kind}")
    print(f"records\t{len(train)}")
    print(f"skipped\t{train.skipped}")
    print(f"classes\t{','.join(format_label(c) for c in pipe.classes)}")
    print(f"hash_dim\t{cfg.hash_dim}")
    print(f"dense_dim\t{X.shape[1] - cfg.hash_dim}")
    print(f"objective\t{_objective(pipe.model):.6g}")
    print(f"seconds\t{elapsed:.2f}")
    if args.cv:
        mean, std = _cv_estimate(cfg, train, resources)
        print(f"cv_{cfg.info.measure}\t{mean:.4f}\t{std:.4f}")
    return EXIT_OK


def _load_pipe(args):
    resources = None
    if args.config is not None:
        resources = load_resources(_run_config(args))
    pipe = load_model(args.model, resources)
    _check_subtask(args, pipe)
    return pipe


def cmd_predict(args):
    pipe = _load_pipe(args)
    data = load_dataset(args.data, pipe.cfg.info.schema)
    write_predictions(data, pipe.predict(data), args.out)
    return EXIT_OK


def cmd_evaluate(args):
    st = (args.subtask or (_run_config(args).subtask if args.config else None))
    if st is None or st.upper() not in SUBTASKS:
        raise UsageError("evaluate needs --subtask (A, B, C or D) or --config")
    info = SUBTASKS[st.upper()]
    gold = load_dataset(args.gold, info.schema)
    by_id = {}
    for rid, _, label in read_predictions(args.pred, info.schema):
        if rid in by_id:
            raise DataError(f"duplicate prediction for id {rid!r}", args.pred, None)
        by_id[rid] = label
    missing = [rid for rid in gold.ids if rid not in by_id]
    if missing:
        raise DataError(f"{len(missing)} gold ids have no prediction, e.g. {missing[0]!r}",
                        args.pred, None)
    pred = [by_id[rid] for rid in gold.ids]
    value = score(info.measure, gold.labels, pred, info.classes, gold.topics)
    print(f"{info.measure}\t{value:.4f}")
    print(f"accuracy\t{accuracy(gold.labels, pred):.4f}")
    return EXIT_OK


def cmd_gridsearch(args):
    cfg = _run_config(args)
    train = load_dataset(args.train, cfg.info.schema)
    resources = load_resources(cfg)
    bundles = extract_texts(train.texts, train.ids, cfg.features, resources)
    vec = Vectorizer(HashSpec(cfg.hash_dim, cfg.hash_seed, cfg.signed), cfg.alpha,
                     cfg.weighting, cfg.normalize)
    report = grid_search(bundles, train.labels, cfg.grid, cfg.bases[0], cfg.info.measure,
                         k=cfg.folds, seed=cfg.seed, topics=train.topics, vectorizer=vec,
                         classes=cfg.info.classes)
    Path(args.report).write_text(report.to_tsv(), encoding="utf-8")
    Path(str(args.report) + ".json").write_text(report.to_json() + "\n", encoding="utf-8")
    chosen = report.chosen
    print(f"chosen\thash_dim={chosen.hash_dim}\talpha={chosen.alpha!r}\tlam={chosen.lam!r}")
    print(f"cv_{cfg.info.measure}\t{report.best()['cv_mean']:.4f}")
    return EXIT_OK


def cmd_quantify(args):
    pipe = _load_pipe(args)
    if pipe.cfg.info.schema is not Schema.BD:
        raise UsageError(f"quantify needs a positive/negative topic model, "
                         f"this one is for subtask {pipe.cfg.subtask}")
    data = load_dataset(args.data, Schema.BD)
    groups = {}
    for i, topic in enumerate(data.topics):
        groups.setdefault(topic, []).append(i)
    lines = []
    for topic in sorted(groups):
        sub = data.subset(groups[topic])
        prev = classify_and_count(pipe.model, pipe.transform(sub.texts, sub.ids),
                                  pipe.cfg.info.classes)
        p = {format_label(c): v for c, v in prev.items()}
        lines.append(f"{topic}\t{p['positive']:.6f}\t{p['negative']:.6f}\n")
    Path(args.out).write_text("".join(lines), encoding="utf-8", newline="")
    return EXIT_OK


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", help="INI run configuration")
    common.add_argument("--subtask", type=str.upper, choices=sorted(SUBTASKS))
    common.add_argument("--seed", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="tweetsent", description="Tweet polarity classification and quantification.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", parents=[common], help="train and write a model container")
    p.add_argument("--train", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--cv", action="store_true", help="also print a k-fold CV estimate")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="write one label per record")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common], help="score a prediction file")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gridsearch", parents=[common], help="cross-validated grid search")
    p.add_argument("--train", required=True)
    p.add_argument("--report", required=True, help="TSV path; JSON goes to <report>.json")
    p.set_defaults(func=cmd_gridsearch)

    p = sub.add_parser("quantify", parents=[common], help="per-topic classify-and-count")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quantify)
    return parser


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"tweetsent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"tweetsent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConvergenceError as exc:
        print(f"tweetsent: convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (DataError, ContainerError, MissingResourceError, OSError, ValueError) as exc:
        print(f"tweetsent: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
