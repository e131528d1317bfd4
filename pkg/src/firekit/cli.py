"""Command-line front end.

Subcommands: ``score``, ``score-unseen``, ``oscore``, ``eval``, ``rank``,
``stream``, ``gen``, ``bench``.  Scores travel as CSV, reports as JSON
with a top-level ``schema_version``.  Every run is reproducible: commands
that draw randomness require an explicit ``--seed`` and never fall back
to wall-clock seeding, and no report embeds timing or timestamps (wall
times go to stderr).

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .data import CLASS_LABEL, DataError, FirekitError, OUTLIER_BINARY, as_rng_spec
from .enhash import EnhashClassifier, prequential_evaluate
from .fire import DEFAULT_N_BITS, DEFAULT_N_ESTIMATORS, DEFAULT_TABLE_SIZE, FireScorer, iqr_threshold
from .fire1 import DEFAULT_BIN_WIDTH, Fire1Scorer
from .io import _open_out, load_csv, load_model, save_model, write_matrix_csv, write_scores
from .metrics import evaluate_ranking, friedman_ranks
from .outlierness import DEFAULT_PHI, dataset_o_scores, oscore_histogram
from .streams import (
    DriftStreamSpec,
    default_planted_spec,
    gen_planted,
    gen_stream,
)

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    """argparse parser that exits 1 (not 2) on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _log(msg: str):
    print(msg, file=sys.stderr)


def _write_json(path, obj):
    with _open_out(path) as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def build_parser() -> _Parser:
    p = _Parser(prog="firekit", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("score", parents=[], help="score a dataset with fire or fire1")
    sc.add_argument("--algo", required=True, choices=["fire", "fire1"])
    sc.add_argument("--input", required=True, help="CSV with a header row")
    sc.add_argument("--label-col", default=None, help="column to exclude from the features")
    sc.add_argument("--L", type=int, default=DEFAULT_N_ESTIMATORS, help="ensemble size")
    sc.add_argument("--M", type=int, default=None,
                    help=f"features per estimator (fire default {DEFAULT_N_BITS}, "
                         f"fire1 default ceil(sqrt(d)))")
    sc.add_argument("--H", type=int, default=DEFAULT_TABLE_SIZE, help="prime table size (fire)")
    sc.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH, help="bucket width (fire1)")
    sc.add_argument("--seed", type=int, required=True)
    sc.add_argument("--out", required=True, help="scores CSV path, or - for stdout")
    sc.add_argument("--iqr-flag", action="store_true",
                    help="append a rare column from the IQR threshold rule")
    sc.add_argument("--save-model", default=None, help="also write the fitted model as JSON")
    sc.set_defaults(func=_cmd_score)

    su = sub.add_parser("score-unseen", help="score new rows against a saved fire1 model")
    su.add_argument("--model", required=True)
    su.add_argument("--input", required=True)
    su.add_argument("--label-col", default=None)
    su.add_argument("--out", required=True)
    su.set_defaults(func=_cmd_score_unseen)

    oc = sub.add_parser("oscore", help="local/global outlierness scores and histogram")
    oc.add_argument("--input", required=True)
    oc.add_argument("--label-col", required=True)
    oc.add_argument("--phi", type=int, default=DEFAULT_PHI)
    oc.add_argument("--out", required=True)
    oc.set_defaults(func=_cmd_oscore)

    ev = sub.add_parser("eval", help="ranking metrics for a scored dataset")
    ev.add_argument("--scores", required=True, help="CSV with a score column")
    ev.add_argument("--labels", required=True, help="CSV with a 0/1 label column")
    ev.add_argument("--n", type=int, default=None, help="cutoff for precision at n")
    ev.add_argument("--out", required=True)
    ev.set_defaults(func=_cmd_eval)

    rk = sub.add_parser("rank", help="Friedman mean ranks across measure tables")
    rk.add_argument("--tables", required=True, help="directory of method-by-dataset CSVs")
    rk.add_argument("--lower-is-better", action="store_true")
    rk.add_argument("--out", required=True)
    rk.set_defaults(func=_cmd_rank)

    st = sub.add_parser("stream", help="prequential evaluation of the enhash classifier")
    st.add_argument("--input", required=True, help="CSV, rows in arrival order")
    st.add_argument("--label-col", required=True)
    st.add_argument("--L", type=int, default=10)
    st.add_argument("--bin-width", type=float, default=0.1)
    st.add_argument("--lambda", dest="decay_rate", type=float, default=0.015)
    st.add_argument("--seed", type=int, required=True)
    st.add_argument("--window", type=int, default=None,
                    help="emit a trailing windowed-error series of this width")
    st.add_argument("--variant", choices=["lambda0", "noweights"], default=None,
                    help="ablation variants: no forgetting / no distance weighting")
    st.add_argument("--out", required=True)
    st.set_defaults(func=_cmd_stream)

    ge = sub.add_parser("gen", help="generate synthetic datasets and streams")
    ge.add_argument("--kind", required=True, choices=["planted", "abrupt", "incremental", "virtual"])
    ge.add_argument("--n", type=int, default=None, help="stream length (stream kinds)")
    ge.add_argument("--d", type=int, default=2)
    ge.add_argument("--drift-at", default=None,
                    help="comma-separated drift step indices (abrupt; default n//2)")
    ge.add_argument("--class-sep", type=float, default=1.0)
    ge.add_argument("--scale", type=float, default=10.0)
    ge.add_argument("--rate", type=float, default=None,
                    help="rotation per step in radians (incremental; default pi/(2n))")
    ge.add_argument("--shift", type=float, default=3.0, help="total mean shift (virtual)")
    ge.add_argument("--seed", type=int, required=True)
    ge.add_argument("--out", required=True)
    ge.set_defaults(func=_cmd_gen)

    be = sub.add_parser("bench", help="time the scorers over growing sample counts")
    be.add_argument("--algo", required=True, choices=["fire", "fire1"])
    be.add_argument("--sizes", required=True, help="comma-separated, strictly ascending")
    be.add_argument("--L", type=int, default=DEFAULT_N_ESTIMATORS)
    be.add_argument("--M", type=int, default=None)
    be.add_argument("--H", type=int, default=DEFAULT_TABLE_SIZE)
    be.add_argument("--bin-width", type=float, default=DEFAULT_BIN_WIDTH)
    be.add_argument("--d", type=int, default=10)
    be.add_argument("--trials", type=int, default=1, help="median over this many timings")
    be.add_argument("--seed", type=int, required=True)
    be.add_argument("--out", required=True)
    be.set_defaults(func=_cmd_bench)

    return p


# -- subcommand bodies ------------------------------------------------------

def _build_scorer(algo, L, M, H, bin_width, seed, d):
    if algo == "fire":
        return FireScorer(n_estimators=L, n_bits=M if M is not None else DEFAULT_N_BITS,
                          table_size=H, seed=seed)
    subspace = M if M is not None else max(1, math.ceil(math.sqrt(d)))
    return Fire1Scorer(n_estimators=L, subspace_size=subspace, bin_width=bin_width, seed=seed)


def _cmd_score(args) -> int:
    matrix, _ = load_csv(args.input, label_column=args.label_col)
    scorer = _build_scorer(args.algo, args.L, args.M, args.H, args.bin_width,
                           args.seed, matrix.n_cols)
    scorer.fit(matrix)
    scores = scorer.score_samples(matrix)
    flags = None
    if args.iqr_flag:
        threshold, flags = iqr_threshold(scores)
        _log(f"firekit score: IQR threshold {threshold!r}, {int(flags.sum())} rows flagged")
    write_scores(args.out, scores, flags)
    if args.save_model:
        save_model(args.save_model, scorer)
    return 0


def _cmd_score_unseen(args) -> int:
    model = load_model(args.model)
    if not isinstance(model, Fire1Scorer):
        raise DataError("score-unseen needs a fire1 model; sketch models do not "
                        "support smoothed unseen scoring")
    matrix, _ = load_csv(args.input, label_column=args.label_col)
    write_scores(args.out, model.score_unseen(matrix))
    return 0


def _cmd_oscore(args) -> int:
    matrix, labels = load_csv(args.input, label_column=args.label_col,
                              label_kind=OUTLIER_BINARY)
    scores = dataset_o_scores(matrix, labels, phi=args.phi)
    hist = oscore_histogram(matrix, labels, phi=args.phi)
    rows = np.flatnonzero(labels.values)
    _write_json(args.out, {
        "schema_version": SCHEMA_VERSION,
        "phi": args.phi,
        "n_outliers": int(len(scores)),
        "bin_edges": hist.bin_edges.tolist(),
        "counts": hist.counts.tolist(),
        "o_scores": [
            {"row_index": int(i), "o_score": float(s)} for i, s in zip(rows, scores)
        ],
    })
    return 0


def _read_scores_csv(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or "score" not in reader.fieldnames:
            raise DataError(f"{path}: expected a header with a 'score' column")
        try:
            return np.array([float(rec["score"]) for rec in reader])
        except (TypeError, ValueError) as exc:
            raise DataError(f"{path}: bad score cell ({exc})") from None


def _read_labels_csv(path):
    path = Path(path)
    if not path.exists():
        raise DataError(f"no such file: {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = [h.strip() for h in next(reader, [])]
        if not header:
            raise DataError(f"{path}: file is empty, expected a header row")
        col = 0 if len(header) == 1 else (header.index("label") if "label" in header else None)
        if col is None:
            raise DataError(f"{path}: multi-column label files need a 'label' column")
        flags = []
        for lineno, rec in enumerate(reader, start=2):
            if not rec:
                continue
            cell = rec[col].strip()
            if cell not in ("0", "1"):
                raise DataError(f"{path}: line {lineno}: labels must be 0 or 1, got {cell!r}")
            flags.append(cell == "1")
    if not flags:
        raise DataError(f"{path}: no data rows after the header")
    return np.array(flags)


def _cmd_eval(args) -> int:
    scores = _read_scores_csv(args.scores)
    labels = _read_labels_csv(args.labels)
    report = evaluate_ranking(scores, labels, n=args.n)
    report = {"schema_version": SCHEMA_VERSION, **report}
    _write_json(args.out, report)
    return 0


def _cmd_rank(args) -> int:
    table_dir = Path(args.tables)
    if not table_dir.is_dir():
        raise DataError(f"no such directory: {table_dir}")
    files = sorted(table_dir.glob("*.csv"))
    if not files:
        raise DataError(f"{table_dir}: no .csv tables found")
    lines = ["measure,method,mean_rank"]
    for f in files:
        with open(f, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or len(header) < 2:
                raise DataError(f"{f}: expected 'method,<dataset>,...' header")
            methods, rows = [], []
            for rec in reader:
                if not rec:
                    continue
                methods.append(rec[0])
                rows.append([float(c) if c.strip() not in ("", "nan", "NA") else np.nan
                             for c in rec[1:]])
        if not methods:
            raise DataError(f"{f}: no method rows")
        means = friedman_ranks(np.array(rows), higher_is_better=not args.lower_is_better)
        for name, mean in zip(methods, means):
            lines.append(f"{f.stem},{name},{repr(float(mean))}")
    with _open_out(args.out) as fh:
        fh.write("\n".join(lines) + "\n")
    return 0


def _cmd_stream(args) -> int:
    matrix, labels = load_csv(args.input, label_column=args.label_col,
                              label_kind=CLASS_LABEL)
    decay = 0.0 if args.variant == "lambda0" else args.decay_rate
    model = EnhashClassifier(
        n_estimators=args.L,
        bin_width=args.bin_width,
        decay_rate=decay,
        distance_weighting=args.variant != "noweights",
        seed=args.seed,
    )
    report = prequential_evaluate(model, zip(matrix.values, labels.values),
                                  window=args.window)
    _log(f"firekit stream: {report.n_samples} samples in {report.wall_time_s:.3f}s, "
         f"error {report.error:.4f}")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "algo": "enhash",
        "variant": args.variant,
        "params": {
            "L": args.L,
            "bin_width": args.bin_width,
            "lambda": decay,
            "seed": args.seed,
        },
        "n_samples": report.n_samples,
        "n_classes": report.n_classes,
        "error": report.error,
        "kappa_m": report.kappa_m,
        "kappa_t": report.kappa_t,
    }
    if args.window is not None:
        doc["window"] = args.window
        doc["windowed_errors"] = report.windowed_errors
    _write_json(args.out, doc)
    return 0


def _parse_drift_points(raw, n):
    if raw is None:
        return (n // 2,)
    try:
        return tuple(int(tok) for tok in raw.split(",") if tok.strip())
    except ValueError:
        raise DataError(f"bad --drift-at value {raw!r}; expected comma-separated integers") from None


def _cmd_gen(args) -> int:
    if args.kind == "planted":
        if args.n is not None:
            _log("firekit gen: --n is fixed by the planted spec and was ignored")
        matrix, labels, kinds = gen_planted(default_planted_spec(args.seed))
        write_matrix_csv(args.out, matrix.values,
                         extra_columns=[("label", labels.values.astype(int)),
                                        ("outlier_type", kinds)])
        return 0
    if args.n is None:
        raise DataError(f"--n is required for kind {args.kind!r}")
    spec = DriftStreamSpec(
        kind=args.kind,
        n=args.n,
        d=args.d,
        drift_points=_parse_drift_points(args.drift_at, args.n) if args.kind == "abrupt" else (),
        rng=as_rng_spec(args.seed),
        class_sep=args.class_sep,
        scale=args.scale,
        rotate_per_step=(args.rate if args.rate is not None else math.pi / (2 * args.n))
        if args.kind == "incremental" else 0.0,
        shift_total=args.shift if args.kind == "virtual" else 0.0,
    )
    xs, ys = [], []
    for x, y in gen_stream(spec):
        xs.append(x)
        ys.append(y)
    write_matrix_csv(args.out, np.vstack(xs), extra_columns=[("label", ys)])
    return 0


def _cmd_bench(args) -> int:
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError:
        raise DataError(f"bad --sizes value {args.sizes!r}") from None
    if len(sizes) < 2:
        raise DataError("--sizes needs at least two entries")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DataError(f"--sizes must be strictly ascending, got {sizes}")
    if sizes[0] < 1:
        raise DataError("sizes must be >= 1")
    if args.trials < 1:
        raise DataError(f"--trials must be >= 1, got {args.trials}")
    results = []
    prev = None
    for n in sizes:
        rng = np.random.default_rng(np.random.SeedSequence(args.seed, spawn_key=(n,)))
        data = rng.standard_normal((n, args.d))
        timings = []
        for _ in range(args.trials):
            scorer = _build_scorer(args.algo, args.L, args.M, args.H, args.bin_width,
                                   args.seed, args.d)
            t0 = time.perf_counter()
            scorer.fit(data)
            scorer.score_samples(data)
            timings.append(time.perf_counter() - t0)
        seconds = float(np.median(timings))
        ratio = None if prev is None else seconds / prev
        prev = seconds
        _log(f"firekit bench: n={n} {seconds:.4f}s" + (f" ratio {ratio:.2f}" if ratio else ""))
        results.append({"n": n, "seconds": seconds, "ratio": ratio})
    _write_json(args.out, {
        "schema_version": SCHEMA_VERSION,
        "algo": args.algo,
        "trials": args.trials,
        "results": results,
    })
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FirekitError as exc:
        print(f"firekit: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"firekit: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
