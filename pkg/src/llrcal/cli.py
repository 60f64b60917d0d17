"""Command-line front end.

Subcommands: calibrate-train, fuse-train, apply, evaluate, crossval, demo.
Scores are ingested as natural-log-unit values unless --score-base 10 is
given; emitted LLRs are always base-10.  Exit codes: 0 success, 2 input
error, 3 numerical/separation failure.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .errors import DataError, LlrcalError, SeparationError, TrainingError
from .evaluation import (
    FoldTrainingError,
    LlrSet,
    cllr,
    crossval_calibrate,
    tippett_curve,
)
from .fileio import (
    read_llr_csv,
    read_model_json,
    read_pairs_csv,
    read_score_csv,
    write_llr_csv,
    write_model_json,
    write_score_csv,
)
from .gaussian_map import LabeledScores
from .logreg import ParallelScores, TrainConfig, train_calibration, train_fusion
from .score_engine import bimodal_demo, gmm_lr
from .synthdata import figure_config, sample_scores

DEMO_SAMPLES_PER_CLASS = 200_000
DEFAULT_SEED = 42


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _print_kv(key: str, value) -> None:
    if isinstance(value, float):
        print(f"{key} {_fmt(value)}")
    else:
        print(f"{key} {value}")


def _split_by_label(labels, scores):
    rows_so = [i for i, lab in enumerate(labels) if lab == "ss"]
    rows_do = [i for i, lab in enumerate(labels) if lab == "ds"]
    if not rows_so or not rows_do:
        raise DataError(
            "training needs both 'ss' and 'ds' rows, got "
            f"{len(rows_so)} ss and {len(rows_do)} ds"
        )
    return scores[rows_so], scores[rows_do]


def _training_cllr(weights, so_rows, do_rows) -> float:
    betas = np.asarray(weights.betas)
    outputs = LlrSet(
        so=weights.alpha + so_rows @ betas,
        do=weights.alpha + do_rows @ betas,
    )
    return cllr(outputs)


def _cmd_train(args, single_column: bool) -> int:
    labels, scores = read_score_csv(args.scores, args.score_base)
    if single_column and scores.shape[1] != 1:
        raise DataError(
            f"calibrate-train expects a single score column, got "
            f"{scores.shape[1]}; use fuse-train for parallel scores"
        )
    so_rows, do_rows = _split_by_label(labels, scores)
    config = TrainConfig(ridge_lambda=args.ridge)
    if single_column:
        weights = train_calibration(
            LabeledScores(so=so_rows[:, 0], do=do_rows[:, 0]), config
        )
    else:
        weights = train_fusion(ParallelScores(so=so_rows, do=do_rows), config)
    write_model_json(args.out, weights)
    _print_kv("alpha", weights.alpha)
    for beta in weights.betas:
        _print_kv("beta", beta)
    _print_kv("cllr", _training_cllr(weights, so_rows, do_rows))
    _print_kv("model_json", args.out)
    return 0


def _cmd_calibrate_train(args) -> int:
    return _cmd_train(args, single_column=True)


def _cmd_fuse_train(args) -> int:
    return _cmd_train(args, single_column=False)


def _cmd_apply(args) -> int:
    weights = read_model_json(args.model)
    labels, scores = read_score_csv(args.scores, args.score_base)
    if scores.shape[0] and scores.shape[1] != weights.n_systems:
        raise DataError(
            f"model expects {weights.n_systems} score column(s), "
            f"file has {scores.shape[1]}"
        )
    llrs = weights.alpha + scores.reshape(-1, weights.n_systems) @ np.asarray(
        weights.betas
    )
    write_llr_csv(args.out, labels, llrs)
    return 0


def _cmd_evaluate(args) -> int:
    labels, llrs = read_llr_csv(args.llrs)
    llr_set = LlrSet(
        so=llrs[[lab == "ss" for lab in labels]],
        do=llrs[[lab == "ds" for lab in labels]],
    )
    _print_kv("n_so", llr_set.so.size)
    _print_kv("n_do", llr_set.do.size)
    _print_kv("cllr", cllr(llr_set))
    if args.tippett or args.svg:
        curve = tippett_curve(llr_set)
        if args.tippett:
            with open(args.tippett, "w", encoding="utf-8") as fh:
                fh.write(curve.to_csv())
            _print_kv("tippett_csv", args.tippett)
        if args.svg:
            from .plotting import render_tippett

            render_tippett(curve, args.svg)
            _print_kv("svg", args.svg)
    return 0


def _cmd_crossval(args) -> int:
    db = read_pairs_csv(args.pairs, args.score_base)
    config = TrainConfig(ridge_lambda=args.ridge)

    def audit(fold, train_idx):
        held_group = db.pairs[fold][2]
        excluded = sorted(set(range(len(db))) - set(train_idx) - {fold})
        print(
            f"audit fold={fold} held={fold} "
            f"group={held_group if held_group is not None else '-'} "
            f"excluded_same_group={','.join(map(str, excluded)) if excluded else '-'} "
            f"train_size={len(train_idx)}",
            file=sys.stderr,
        )

    held_out = crossval_calibrate(db, config, on_fold=audit)
    labels = ["ss"] * held_out.so.size + ["ds"] * held_out.do.size
    write_llr_csv(args.out, labels, np.concatenate([held_out.so, held_out.do]))
    _print_kv("n_pairs", len(db))
    _print_kv("cllr", cllr(held_out))
    _print_kv("llr_csv", args.out)
    return 0


def _cmd_demo(args) -> int:
    fid = args.figure.lower()
    if fid == "bimodal":
        suspect, background, x1, x2 = bimodal_demo()
        midpoint = (x1 + x2) / 2.0
        for name, x in (("x1", x1), ("x2", x2), ("midpoint", midpoint)):
            lnlr = gmm_lr(x, suspect, background)
            _print_kv(name, float(x))
            _print_kv(f"lnlr_{name}", lnlr)
            _print_kv(f"lr_{name}", math.exp(lnlr))
        return 0
    cfg = figure_config(fid)
    _print_kv("figure", cfg.figure_id)
    _print_kv("mu_so", cfg.model.mu_so)
    _print_kv("mu_do", cfg.model.mu_do)
    _print_kv("sigma", cfg.model.sigma)
    _print_kv("alpha_analytic", cfg.expected_alpha)
    _print_kv("beta_analytic", cfg.expected_beta)
    n = DEMO_SAMPLES_PER_CLASS
    scores = sample_scores(cfg.model, n, n, seed=args.seed)
    out = args.out if args.out else f"{cfg.figure_id}_scores.csv"
    write_score_csv(
        out,
        ["ss"] * scores.so.size + ["ds"] * scores.do.size,
        np.concatenate([scores.so, scores.do]),
    )
    _print_kv("seed", args.seed)
    _print_kv("n_so", scores.so.size)
    _print_kv("n_do", scores.do.size)
    _print_kv("samples_csv", out)
    recovered = train_calibration(scores)
    _print_kv("alpha_recovered", recovered.alpha)
    _print_kv("beta_recovered", recovered.betas[0])
    return 0


def _add_ridge(p):
    p.add_argument(
        "--ridge",
        type=float,
        default=0.0,
        metavar="LAMBDA",
        help="ridge penalty weight on the slopes (default 0; try 0.001 for separated data)",
    )


def _add_score_base(p):
    p.add_argument(
        "--score-base",
        choices=("e", "10"),
        default="e",
        help="logarithm base of the input scores (default e)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="llrcal",
        description=(
            "Convert comparison scores to calibrated log likelihood ratios, "
            "fuse parallel score sets, and evaluate with Cllr and Tippett curves."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser(
        "calibrate-train",
        help="train univariate calibration weights from a labelled score CSV",
    )
    p.add_argument("scores", help="score CSV with header label,s1")
    _add_ridge(p)
    _add_score_base(p)
    p.add_argument("--out", required=True, metavar="MODEL_JSON", help="output model path")
    p.set_defaults(func=_cmd_calibrate_train)

    p = sub.add_parser(
        "fuse-train",
        help="train fusion weights over n parallel score columns",
    )
    p.add_argument("scores", help="score CSV with header label,s1,...,sn")
    _add_ridge(p)
    _add_score_base(p)
    p.add_argument("--out", required=True, metavar="MODEL_JSON", help="output model path")
    p.set_defaults(func=_cmd_fuse_train)

    p = sub.add_parser(
        "apply",
        help="apply trained weights to a score CSV, writing base-10 LLRs",
    )
    p.add_argument("model", help="model JSON from calibrate-train or fuse-train")
    p.add_argument("scores", help="score CSV with matching column count")
    _add_score_base(p)
    p.add_argument("--out", required=True, metavar="LLR_CSV", help="output LLR path")
    p.set_defaults(func=_cmd_apply)

    p = sub.add_parser(
        "evaluate",
        help="report Cllr and emit Tippett curve data/plot from an LLR CSV",
    )
    p.add_argument("llrs", help="LLR CSV with header label,llr_log10")
    p.add_argument("--tippett", metavar="CSV", help="write the Tippett curve CSV here")
    p.add_argument("--svg", metavar="FIG", help="render the Tippett plot here (SVG recommended)")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser(
        "crossval",
        help="leave-one-pair-out calibration over a paired score CSV",
    )
    p.add_argument("pairs", help="CSV with header so_score,do_score[,group]")
    _add_ridge(p)
    _add_score_base(p)
    p.add_argument("--out", required=True, metavar="LLR_CSV", help="held-out LLR output path")
    p.set_defaults(func=_cmd_crossval)

    p = sub.add_parser(
        "demo",
        help="print a canonical configuration and its logistic recovery",
    )
    p.add_argument("figure", help="fig4, fig5, fig6, fig7, or bimodal")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="sample seed (default 42)")
    p.add_argument("--out", metavar="SCORE_CSV", help="sample CSV path (default <figure>_scores.csv)")
    p.set_defaults(func=_cmd_demo)

    return parser


def _report_error(exc: Exception) -> int:
    print(f"error: {exc}", file=sys.stderr)
    cause = exc.__cause__ if isinstance(exc, FoldTrainingError) else exc
    if isinstance(cause, SeparationError):
        print("hint: retry with --ridge 0.001", file=sys.stderr)
        return 3
    if isinstance(cause, TrainingError):
        return 3
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LlrcalError as exc:
        return _report_error(exc)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
