import argparse
import logging
import pathlib
import sys
from typing import Optional, Sequence

import pandas as pd

import libotda
from libotda.core import (
    DataMatrix,
    SolverError,
    ValidationError,
    squared_euclidean_cost,
    uniform_measure,
)
from libotda.eval import (
    ExperimentConfig,
    ExperimentResult,
    fraction_feature_counts,
    generate_shifted_dataset,
    run_da_experiment,
)
from libotda.featsel import SelectionStrategy, balance_source_by_class, rank_features
from libotda.mapping import barycentric_map
from libotda.ot import solve_class_regularized, solve_entropic, solve_exact

from ._artifact import RankingArtifact
from ._io import load_csv, write_data_csv, write_frame_csv, write_json

logger = logging.getLogger(__name__)

STRATEGIES = {"ot": "exact_ot", "1nn": "nearest_neighbor", "random": "random"}
ADAPTATIONS = {"none": "none", "ot3": "barycentric_ot3"}
CLASSIFIERS = {"knn1": "knn1", "svm": "linear_svm"}
ARMS = ("descending", "ascending", "random")
SCORE_COLUMNS = ["repetition", "d_star", "arm", "score", "seconds"]


def _strategy(name: str, seed: int) -> SelectionStrategy:
    kind = STRATEGIES[name]
    return SelectionStrategy(kind, seed=seed if kind == "random" else None)


def _load(path: str, args: argparse.Namespace, label_column) -> DataMatrix:
    return load_csv(
        path,
        has_header=args.header,
        delimiter=args.delimiter,
        label_column=label_column,
    )


def cmd_rank(args: argparse.Namespace) -> None:
    """Rank the features of a source/target pair and write a JSON artifact"""
    source = _load(args.source, args, args.label_column)
    target = _load(args.target, args, args.target_label_column)
    if args.balance_per_class is not None:
        source = balance_source_by_class(source, args.balance_per_class, args.seed)
    strategy = _strategy(args.strategy, args.seed)
    ranking = rank_features(
        source.without_labels(),
        target.without_labels(),
        strategy=strategy,
        lam=args.lam,
        normalization=args.normalization,
    )
    artifact = RankingArtifact.from_ranking(
        ranking,
        source=args.source,
        target=args.target,
        strategy=strategy.kind,
        lam=args.lam,
        seed=args.seed,
        version=libotda.__version__,
    )
    write_json(args.out, artifact.to_dict())
    logger.info("rank: wrote %s", args.out)


def _pipeline_data(args: argparse.Namespace):
    if args.synthetic:
        source, target, planted = generate_shifted_dataset(
            n_s=args.synthetic_n_source,
            n_t=args.synthetic_n_target,
            d=args.synthetic_d,
            k_shifted=args.synthetic_k,
            n_classes=args.synthetic_classes,
            seed=args.seed,
        )
        return source, target, planted.tolist()
    if args.source is None or args.target is None:
        raise ValidationError("pipeline needs --source and --target, or --synthetic")
    if args.label_column is None:
        raise ValidationError("pipeline needs --label-column to read class labels")
    source = _load(args.source, args, args.label_column)
    target = _load(args.target, args, args.label_column)
    return source, target, None


def cmd_pipeline(args: argparse.Namespace) -> None:
    """Run the experiment protocol for each arm; write result.json and scores.csv"""
    source, target, planted = _pipeline_data(args)
    feature_counts = args.feature_counts
    if feature_counts is None:
        feature_counts = fraction_feature_counts(source.n_cols)
    config = ExperimentConfig(
        repetitions=args.repetitions,
        per_class_samples=args.per_class,
        feature_counts=feature_counts,
        strategy=_strategy(args.strategy, args.seed),
        lam=args.lam,
        adaptation=ADAPTATIONS[args.adaptation],
        classifier=CLASSIFIERS[args.classifier],
        metric=args.metric,
        seed=args.seed,
        normalization=args.normalization,
        ot3_lambda=args.ot3_lambda,
        ot3_eta=args.ot3_eta,
    )

    results = {}
    rows = []
    for arm in args.arms:
        result = run_da_experiment(source, target, config.copy(ordering=arm))
        if not args.record_times:
            result = ExperimentResult(
                result.feature_counts, result.per_repetition_scores
            )
        results[arm] = result.to_dict()
        for r in range(result.repetitions):
            for f, d_star in enumerate(result.feature_counts):
                rows.append(
                    [
                        r,
                        d_star,
                        arm,
                        float(result.per_repetition_scores[r, f]),
                        float(result.cell_times[r, f]),
                    ]
                )

    out_dir = pathlib.Path(args.out_dir)
    document = {
        "version": libotda.__version__,
        "source": "synthetic" if args.synthetic else args.source,
        "target": "synthetic" if args.synthetic else args.target,
        "config": config.to_dict(),
        "arms": results,
    }
    if planted is not None:
        document["planted"] = planted
    write_json(out_dir / "result.json", document)
    scores = pd.DataFrame(rows, columns=SCORE_COLUMNS)
    write_frame_csv(out_dir / "scores.csv", scores)
    logger.info("pipeline: wrote %s", out_dir)


def cmd_adapt(args: argparse.Namespace) -> None:
    """Transport the source onto the target and write the adapted source CSV"""
    source = _load(args.source, args, args.label_column)
    target = _load(args.target, args, args.target_label_column).without_labels()
    mu_s = uniform_measure(source.n_rows)
    mu_t = uniform_measure(target.n_rows)
    cost = squared_euclidean_cost(source, target)
    if args.method == "exact":
        gamma = solve_exact(mu_s, mu_t, cost)
    elif args.method == "entropic":
        gamma, _ = solve_entropic(mu_s, mu_t, cost, args.lam)
    else:
        if not source.has_labels():
            raise ValidationError("--method class needs --label-column for the source")
        gamma, _ = solve_class_regularized(
            mu_s, mu_t, cost, source.labels, lam=args.lam, eta=args.eta
        )
    adapted = barycentric_map(gamma, target, labels=source.labels)
    if source.feature_names is not None:
        adapted = DataMatrix(
            adapted.values, labels=adapted.labels, feature_names=source.feature_names
        )
    label_name = "label"
    if isinstance(args.label_column, str) and not args.label_column.isdigit():
        label_name = args.label_column
    write_data_csv(args.out, adapted, label_name=label_name)
    logger.info("adapt: wrote %s", args.out)


def _int_list(text: str) -> list[int]:
    try:
        values = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _add_csv_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--header", action="store_true", help="CSV files have a header line"
    )
    parser.add_argument("--delimiter", default=",", help="CSV field separator")
    parser.add_argument(
        "--label-column",
        default=None,
        help="source (and, for pipeline, target) label column, by name or 0-based "
        "index",
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser of the ``libotda`` command"""
    parser = argparse.ArgumentParser(
        prog="libotda",
        description="Optimal transport feature selection for domain adaptation",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v for progress, -vv for solver details",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {libotda.__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # rank
    rank = subparsers.add_parser(
        "rank",
        help="rank features by cross-domain stability",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    rank.add_argument("--source", required=True, help="source CSV")
    rank.add_argument("--target", required=True, help="target CSV")
    _add_csv_options(rank)
    rank.add_argument(
        "--target-label-column", default=None, help="target label column, dropped"
    )
    rank.add_argument(
        "--strategy",
        choices=list(STRATEGIES),
        default="ot",
        help="target sample selection",
    )
    rank.add_argument(
        "--lambda", dest="lam", type=float, default=1.0, help="feature plan lambda"
    )
    rank.add_argument("--seed", type=int, default=0, help="random seed")
    rank.add_argument(
        "--balance-per-class",
        type=int,
        default=None,
        help="subsample at most this many source rows per class (needs labels)",
    )
    rank.add_argument(
        "--normalization",
        choices=["sample", "feature"],
        default="sample",
        help="z-score of the feature points",
    )
    rank.add_argument("--out", required=True, help="output JSON artifact")
    rank.set_defaults(func=cmd_rank)

    # pipeline
    pipeline = subparsers.add_parser(
        "pipeline",
        help="evaluate feature selection over repeated source subsamples",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    pipeline.add_argument("--source", default=None, help="labeled source CSV")
    pipeline.add_argument("--target", default=None, help="labeled target CSV")
    _add_csv_options(pipeline)
    pipeline.add_argument(
        "--synthetic",
        action="store_true",
        help="use a generated dataset with planted shifted features",
    )
    pipeline.add_argument(
        "--synthetic-n-source", type=int, default=200, help="synthetic source rows"
    )
    pipeline.add_argument(
        "--synthetic-n-target", type=int, default=400, help="synthetic target rows"
    )
    pipeline.add_argument("--synthetic-d", type=int, default=20, help="features")
    pipeline.add_argument(
        "--synthetic-k", type=int, default=5, help="shifted synthetic features"
    )
    pipeline.add_argument(
        "--synthetic-classes", type=int, default=4, help="synthetic classes"
    )
    pipeline.add_argument(
        "--feature-counts",
        type=_int_list,
        default=None,
        help="comma-separated d_star values; None means d/32, d/8, d/2, d",
    )
    pipeline.add_argument(
        "--repetitions", type=int, default=19, help="number of source subsamples"
    )
    pipeline.add_argument(
        "--per-class", type=int, default=20, help="source rows per class"
    )
    pipeline.add_argument(
        "--adaptation",
        choices=list(ADAPTATIONS),
        default="none",
        help="ot3: class-regularized barycentric transport of the source",
    )
    pipeline.add_argument(
        "--classifier", choices=list(CLASSIFIERS), default="knn1", help="classifier"
    )
    pipeline.add_argument(
        "--metric",
        choices=["accuracy", "auc"],
        default="accuracy",
        help="auc needs --classifier svm",
    )
    pipeline.add_argument(
        "--strategy",
        choices=list(STRATEGIES),
        default="ot",
        help="target sample selection",
    )
    pipeline.add_argument(
        "--lambda", dest="lam", type=float, default=1.0, help="feature plan lambda"
    )
    pipeline.add_argument(
        "--ot3-lambda", type=float, default=2.0, help="adaptation plan lambda"
    )
    pipeline.add_argument(
        "--ot3-eta", type=float, default=1.0, help="adaptation class regularization"
    )
    pipeline.add_argument(
        "--normalization",
        choices=["sample", "feature"],
        default="sample",
        help="z-score of the feature points",
    )
    pipeline.add_argument(
        "--arms", nargs="+", choices=list(ARMS), default=list(ARMS), help="orderings"
    )
    pipeline.add_argument("--seed", type=int, default=0, help="random seed")
    pipeline.add_argument(
        "--record-times",
        action="store_true",
        help="record wall-clock seconds per cell; by default timings are written as "
        "zeros so that reruns produce identical files",
    )
    pipeline.add_argument("--out-dir", required=True, help="output directory")
    pipeline.set_defaults(func=cmd_pipeline)

    # adapt
    adapt = subparsers.add_parser(
        "adapt",
        help="transport source samples onto the target domain",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    adapt.add_argument("--source", required=True, help="source CSV")
    adapt.add_argument("--target", required=True, help="target CSV")
    _add_csv_options(adapt)
    adapt.add_argument(
        "--target-label-column", default=None, help="target label column, dropped"
    )
    adapt.add_argument(
        "--method",
        choices=["exact", "entropic", "class"],
        default="exact",
        help="transport plan; class needs source labels",
    )
    adapt.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=2.0,
        help="entropic regularization (entropic and class)",
    )
    adapt.add_argument(
        "--eta", type=float, default=1.0, help="class regularization weight"
    )
    adapt.add_argument("--out", required=True, help="output CSV")
    adapt.set_defaults(func=cmd_adapt)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the ``libotda`` command

    Returns
    -------
    code : int
        0 on success, 1 on a validation error, 2 on a solver failure.
    """
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ValidationError as e:
        print(f"libotda {args.command}: error: {e}", file=sys.stderr)
        return 1
    except SolverError as e:
        print(f"libotda {args.command}: solver failure: {e}", file=sys.stderr)
        return 2
    return 0
