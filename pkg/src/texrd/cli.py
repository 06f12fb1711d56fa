"""Command-line entry point: extract, fit, bd, train, predict, analyze."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    StatTable, box_summary, correlation_matrix, ingest_encoder_stats, write_box_csv,
    write_box_svg, write_correlation_csv, write_correlation_svg,
)
from .bd_metrics import bd_both
from .config import PipelineConfig, load_config
from .features.extract import FEATURE_NAMES, extract_gop_features
from .formats import (
    dumps, fits_document, fmt, format_feature_csv, header_lines, read_feature_csv,
    read_fits, read_rd_points,
)
from .rd_models import RdCurve, RdFit, RdModelKind, eval_rd, fit_rd
from .regression.predictor import TrainedPredictor, train_predictor
from .synthetic import DEFAULT_RATES
from .video_io import load_manifest, read_luma_frames, segment_gops

EXIT_OK, EXIT_VALIDATION, EXIT_PARTIAL, EXIT_IO = 0, 1, 2, 3
RCR_RUNS = 5


def _log(msg):
    print(f"texrd: {msg}", file=sys.stderr)


def _write_atomic(path, text: str):
    """Write via a temporary sibling so a failed run leaves no partial file."""
    path = Path(path)
    tmp = path.with_name(path.name + ".partial")
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


def _mean_std(values):
    v = np.asarray([x for x in values if np.isfinite(x)], dtype=np.float64)
    if v.size == 0:
        return float("nan"), float("nan")
    return float(v.mean()), float(v.std(ddof=1)) if v.size > 1 else 0.0


# extract ------------------------------------------------------------------

def _extract_unit(unit):
    entry, gop, fcfg = unit
    frames = read_luma_frames(entry, gop.start, gop.stop)
    return extract_gop_features(frames, fcfg, entry.id, gop.gop_index)


def cmd_extract(args, cfg: PipelineConfig) -> int:
    entries = load_manifest(args.manifest)
    fcfg = cfg.feature_config()
    units = []
    for e in entries:
        n = min(e.frame_count, cfg.max_frames)
        for g in segment_gops(n, cfg.gop_len, e.id):
            units.append((e, g, fcfg))
    units.sort(key=lambda u: (u[0].id, u[1].gop_index))
    if args.jobs > 1 and len(units) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_extract_unit, units, chunksize=1))
    else:
        rows = [_extract_unit(u) for u in units]
    subs = {}
    for fv in rows:
        for name, count in fv.substitutions.items():
            subs[name] = subs.get(name, 0) + count
    n_subs = sum(subs.values())
    detail = " ".join(f"{k}={subs[k]}" for k in FEATURE_NAMES if k in subs)
    extra = [f"substitutions: {n_subs}" + (f" ({detail})" if detail else "")]
    _write_atomic(args.output, format_feature_csv(rows, cfg.to_json(), extra))
    _log(f"extracted {len(rows)} GoPs from {len(entries)} sequences; "
         f"{n_subs} non-finite values replaced by 0")
    return EXIT_OK


# fit ----------------------------------------------------------------------

def _kinds(arg):
    return list(RdModelKind) if arg == "all" else [RdModelKind(arg)]


def cmd_fit(args, cfg: PipelineConfig) -> int:
    curves, bad = read_rd_points(args.points)
    errors = [{"sequence_id": k[0], "gop_index": k[1], "kind": None, "error": msg} for k, msg in bad.items()]
    fits = []
    kinds = _kinds(args.kind)
    for key, curve in curves.items():
        for kind in kinds:
            try:
                fits.append(fit_rd(curve, kind))
            except ValueError as exc:
                errors.append({"sequence_id": key[0], "gop_index": key[1], "kind": kind.value, "error": str(exc)})
    summary = {}
    for kind in kinds:
        mine = [f for f in fits if f.kind is kind]
        r2_mu, r2_sd = _mean_std([f.r_squared for f in mine])
        rm_mu, rm_sd = _mean_std([f.rmse for f in mine])
        summary[kind.value] = {"n": len(mine), "r2_mean": r2_mu, "r2_std": r2_sd,
                               "rmse_mean": rm_mu, "rmse_std": rm_sd}
    doc = fits_document(fits, cfg.to_json(), summary=summary, errors=errors)
    _write_atomic(args.output, dumps(doc))
    for kind, s in summary.items():
        _log(f"{kind}: {s['n']} fits, R2 {s['r2_mean']:.4f} +- {s['r2_std']:.4f}, "
             f"RMSE {s['rmse_mean']:.4f} +- {s['rmse_std']:.4f} dB")
    for e in errors:
        _log(f"fit failed for {e['sequence_id']}/{e['gop_index']} {e['kind'] or ''}: {e['error']}")
    return EXIT_PARTIAL if errors else EXIT_OK


# bd -----------------------------------------------------------------------

def _load_side(path, kind):
    """Either {key: RdCurve} from an RD-points CSV or {key: RdFit} from fit JSON."""
    with open(path) as fh:
        head = fh.read(1).strip()
    if head in ("{", "["):
        out = {}
        for f in read_fits(path, kind):
            key = (f.sequence_id, f.gop_index)
            if key in out:
                raise ValueError(f"{path}: several fits for {key}; choose one with --kind")
            out[key] = f
        return out, {}
    return read_rd_points(path)


def _as_curve(item, key, rates):
    if isinstance(item, RdCurve):
        return item
    q = eval_rd(item, rates)
    return RdCurve.from_arrays(rates, q, key[0], key[1])


def cmd_bd(args, cfg: PipelineConfig) -> int:
    ref, ref_bad = _load_side(args.reference, args.kind)
    test, test_bad = _load_side(args.test, args.kind)
    keys = sorted(ref.keys() & test.keys())
    missing = sorted((ref.keys() | test.keys()) - set(keys))
    default_rates = np.asarray(args.rates or DEFAULT_RATES, dtype=np.float64)
    rows, failures = [], []
    for key in keys:
        a, b = ref[key], test[key]
        rates = a.rates if isinstance(a, RdCurve) else b.rates if isinstance(b, RdCurve) else default_rates
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                r = bd_both(_as_curve(a, key, rates), _as_curve(b, key, rates))
            rows.append((key, r.bd_psnr, r.bd_rate))
        except ValueError as exc:
            failures.append((key, str(exc)))
    for key, msg in list(ref_bad.items()) + list(test_bad.items()):
        failures.append((key, msg))

    buf = io.StringIO()
    notes = [f"unmatched keys: {len(missing)}", f"failed pairs: {len(failures)}"]
    buf.write("".join(f"# {line}\n" for line in header_lines(cfg.to_json(), notes)))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["sequence_id", "gop_index", "bd_psnr_db", "bd_rate_pct"])
    for key, p, r in rows:
        w.writerow([key[0], key[1], fmt(p), fmt(r)])
    mp, sp = _mean_std([r[1] for r in rows])
    mr, sr = _mean_std([r[2] for r in rows])
    w.writerow(["mean", "", fmt(mp), fmt(mr)])
    w.writerow(["std", "", fmt(sp), fmt(sr)])
    _write_atomic(args.output, buf.getvalue())

    # empirical cumulative distribution of both deltas
    cdf = io.StringIO()
    cdf.write("".join(f"# {line}\n" for line in header_lines(cfg.to_json())))
    w = csv.writer(cdf, lineterminator="\n")
    w.writerow(["cum_fraction", "bd_psnr_db", "bd_rate_pct"])
    ps = sorted(r[1] for r in rows)
    rs = sorted(r[2] for r in rows)
    for i, (p, r) in enumerate(zip(ps, rs), start=1):
        w.writerow([fmt(i / len(ps)), fmt(p), fmt(r)])
    _write_atomic(args.cdf or _sibling(args.output, ".cdf.csv"), cdf.getvalue())

    _log(f"{len(rows)} curve pairs: BD-PSNR {mp:.4f} +- {sp:.4f} dB, BD-rate {mr:.3f} +- {sr:.3f} %")
    for key in missing:
        _log(f"key {key[0]}/{key[1]} present on one side only")
    for key, msg in failures:
        _log(f"BD failed for {key[0]}/{key[1]}: {msg}")
    return EXIT_PARTIAL if (missing or failures) else EXIT_OK


def _sibling(path, suffix):
    p = Path(path)
    stem = p.name[: -len(p.suffix)] if p.suffix else p.name
    return p.with_name(stem + suffix)


# train --------------------------------------------------------------------

def cmd_train(args, cfg: PipelineConfig) -> int:
    features = read_feature_csv(args.features)
    fits = read_fits(args.fits, args.kind)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pred = train_predictor(
            features, fits, args.kind, seed=cfg.seed, hyper=cfg.forest, feature_set=cfg.feature_set,
            split_by=cfg.split_by, relation_base=cfg.relation_log_base, rfe_hyper=cfg.rfe_hyper,
            rfe_folds=cfg.rfe_folds, test_fraction=cfg.test_fraction, jobs=args.jobs)
    for w in caught:
        _log(str(w.message))
    doc = pred.to_json()
    doc["config"] = json.loads(cfg.to_json())
    _write_atomic(args.output, dumps(doc))

    rep = pred.training_report
    buf = io.StringIO()
    notes = [f"split: {rep['split_by']} ({rep['n_train']} train / {rep['n_test']} test)",
             f"feature set: {rep['feature_set']}"]
    buf.write("".join(f"# {line}\n" for line in header_lines(cfg.to_json(), notes)))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "param", "source", "features", "pcc", "srocc", "r2", "mae", "nrmse"])
    for r in rep["parameters"]:
        w.writerow([pred.rd_kind.value, r["param"], r["source"], r["features"]]
                   + [fmt(r[m]) if m in r else "" for m in ("pcc", "srocc", "r2", "mae", "nrmse")])
    _write_atomic(args.report or _sibling(args.output, ".report.csv"), buf.getvalue())
    for r in rep["parameters"]:
        if "r2" in r:
            _log(f"{pred.rd_kind.value} {r['param']} ({r['source']}): PCC {r['pcc']:.4f} "
                 f"R2 {r['r2']:.4f} MAE {r['mae']:.4g} NRMSE {r['nrmse']:.4g}")
    return EXIT_OK


# predict ------------------------------------------------------------------

def _file_digest(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def cmd_predict(args, cfg: PipelineConfig) -> int:
    features = read_feature_csv(args.features)
    X = np.array([fv.values for fv in features], dtype=np.float64).reshape(len(features), -1)
    predictors = [(p, TrainedPredictor.load(p)) for p in args.predictor]
    kinds = [pr.rd_kind for _, pr in predictors]
    if len(set(kinds)) != len(kinds):
        raise ValueError("give at most one predictor per model kind")

    fits, timings = [], {}
    for path, pr in predictors:
        params = pr.predict_params(X) if len(features) else np.empty((0, pr.rd_kind.n_params))
        for fv, p in zip(features, params):
            fits.append(RdFit(pr.rd_kind, tuple(p), sequence_id=fv.sequence_id, gop_index=fv.gop_index))
        if args.timing and len(features):
            runs = []
            for _ in range(RCR_RUNS):
                t0 = time.perf_counter()
                pr.predict_params(X)
                runs.append(time.perf_counter() - t0)
            timings[pr.rd_kind.value] = float(np.median(runs))

    sources = [{"kind": pr.rd_kind.value, "sha256": _file_digest(p)} for p, pr in predictors]
    doc = fits_document(fits, cfg.to_json(), predictors=sources)
    _write_atomic(args.output, dumps(doc))

    status = EXIT_OK
    if args.points:
        status = _bd_validation(args, cfg, fits, kinds)
    if args.timing and timings:
        fastest = min(timings.values())
        buf = io.StringIO()
        note = f"wall-clock, median of {RCR_RUNS} runs over {len(features)} rows"
        buf.write("".join(f"# {line}\n" for line in header_lines(cfg.to_json(), [note])))
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["model", "seconds", "rcr"])
        for k, t in timings.items():
            w.writerow([k, fmt(t), fmt(t / fastest)])
        _write_atomic(args.timing, buf.getvalue())
    _log(f"predicted {len(fits)} curves for {len(features)} GoPs")
    return status


def _bd_validation(args, cfg, fits, kinds) -> int:
    """BD of each predicted curve against the curve fitted to measured points."""
    curves, bad = read_rd_points(args.points)
    per_kind = {k.value: [] for k in kinds}
    failures = len(bad)
    for f in fits:
        key = (f.sequence_id, f.gop_index)
        curve = curves.get(key)
        if curve is None:
            failures += 1
            continue
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ref_fit = fit_rd(curve, f.kind)
                ref = RdCurve.from_arrays(curve.rates, eval_rd(ref_fit, curve.rates), *key)
                test = RdCurve.from_arrays(curve.rates, eval_rd(f, curve.rates), *key)
                r = bd_both(ref, test)
            per_kind[f.kind.value].append((r.bd_psnr, r.bd_rate))
        except ValueError:
            failures += 1
    buf = io.StringIO()
    buf.write("".join(f"# {line}\n" for line in header_lines(
        cfg.to_json(), ["reference: curve fitted to the measured points; test: predicted curve",
                        f"failed or unmatched rows: {failures}"])))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["model", "n", "bd_psnr_mean", "bd_psnr_std", "bd_rate_mean", "bd_rate_std",
                "abs_bd_psnr_mean", "abs_bd_rate_mean"])
    for k, vals in per_kind.items():
        p = [v[0] for v in vals]
        r = [v[1] for v in vals]
        mp, sp = _mean_std(p)
        mr, sr = _mean_std(r)
        w.writerow([k, len(vals), fmt(mp), fmt(sp), fmt(mr), fmt(sr),
                    fmt(np.mean(np.abs(p)) if p else np.nan), fmt(np.mean(np.abs(r)) if r else np.nan)])
        _log(f"{k}: BD-PSNR {mp:.4f} +- {sp:.4f} dB, BD-rate {mr:.3f} +- {sr:.3f} % over {len(vals)} curves")
    _write_atomic(args.bd_report or _sibling(args.output, ".bd.csv"), buf.getvalue())
    return EXIT_PARTIAL if failures else EXIT_OK


# analyze ------------------------------------------------------------------

def _feature_table(features, classes) -> StatTable:
    keys = [(fv.sequence_id, fv.gop_index) for fv in features]
    data = np.array([fv.values for fv in features], dtype=np.float64).reshape(len(features), len(FEATURE_NAMES))
    return StatTable(keys, list(FEATURE_NAMES), data, [classes.get(k[0]) for k in keys])


def cmd_analyze(args, cfg: PipelineConfig) -> int:
    features = read_feature_csv(args.features)
    classes = {}
    if args.manifest:
        classes = {e.id: e.texture_class for e in load_manifest(args.manifest)}
    ftab = _feature_table(features, classes)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    head = header_lines(cfg.to_json())
    methods = ["pearson", "spearman"] if args.method == "both" else [args.method]

    if args.encoder_stats:
        etab = ingest_encoder_stats(args.encoder_stats)
        left = ftab.by_sequence() if etab.keys and len(etab.keys[0]) == 1 else ftab
        right = etab
    else:
        left = right = ftab
    status = EXIT_OK
    for m in methods:
        cm = correlation_matrix(left, right, m)
        _write_atomic_fn(out / f"correlation_{m}.csv", write_correlation_csv, cm, head)
        _write_atomic_fn(out / f"correlation_{m}.svg", write_correlation_svg, cm, head)
        _log(f"{m} correlation over {cm.n_joined} joined rows -> {out}/correlation_{m}.csv")

    if any(c is not None for c in ftab.classes):
        try:
            bs = box_summary(ftab)
        except ValueError as exc:
            _log(f"box summary skipped: {exc}")
            status = EXIT_PARTIAL
        else:
            _write_atomic_fn(out / "box_summary.csv", write_box_csv, bs, head)
            _write_atomic_fn(out / "box_summary.svg", write_box_svg, bs, head)
    else:
        _log("no texture classes available (pass --manifest); box summary skipped")
    return status


def _write_atomic_fn(path, writer, obj, head):
    tmp = Path(str(path) + ".partial")
    try:
        writer(tmp, obj, head)
        os.replace(tmp, path)
    except BaseException:
        tmp.unlink(missing_ok=True)
        raise


# argument parsing ---------------------------------------------------------

# flag dest -> PipelineConfig field
_CFG_FLAGS = {
    "seed": "seed", "gop_len": "gop_len", "max_frames": "max_frames", "glcm_levels": "glcm_levels",
    "ncc_window": "ncc_window", "ncc_stride": "ncc_stride", "ncc_search": "ncc_search",
    "nlp_scales": "nlp_scales", "tc_block": "tc_block", "trees": "forest_n_trees",
    "max_depth": "forest_max_depth", "min_leaf": "forest_min_leaf", "mtry": "forest_mtry",
    "rfe_trees": "rfe_trees", "rfe_folds": "rfe_folds", "split_by": "split_by",
    "feature_set": "feature_set", "relation_log_base": "relation_log_base",
    "test_fraction": "test_fraction",
}


def _default_jobs():
    try:
        return max(1, int(os.environ.get("TEXRD_JOBS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="PipelineConfig JSON, or any texrd output to reuse its config")
    common.add_argument("--seed", type=int, help="master seed (default 1)")
    common.add_argument("--jobs", type=int, default=_default_jobs(),
                        help="worker count (default $TEXRD_JOBS or 1)")

    p = argparse.ArgumentParser(prog="texrd", description=__doc__)
    p.add_argument("--version", action="version", version=f"texrd {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", parents=[common], help="per-GoP texture features from raw YUV")
    s.add_argument("manifest")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--gop-len", type=int)
    s.add_argument("--max-frames", type=int)
    s.add_argument("--glcm-levels", type=int)
    s.add_argument("--ncc-window", type=int)
    s.add_argument("--ncc-stride", type=int)
    s.add_argument("--ncc-search", type=int)
    s.add_argument("--nlp-scales", type=int)
    s.add_argument("--tc-block", type=int)
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("fit", parents=[common], help="fit RD models to measured points")
    s.add_argument("points", help="CSV: sequence_id,gop_index,qp,rate_bpp,psnr_db")
    s.add_argument("--kind", default="all", choices=["all"] + [k.value for k in RdModelKind])
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_fit)

    s = sub.add_parser("bd", parents=[common], help="Bjontegaard deltas between two curve sets")
    s.add_argument("reference", help="RD-points CSV or fit JSON")
    s.add_argument("test", help="RD-points CSV or fit JSON")
    s.add_argument("--kind", choices=[k.value for k in RdModelKind], help="model kind to take from fit JSON")
    s.add_argument("--rates", type=float, nargs="+", help="rates (bpp) at which to sample fits")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--cdf", help="cumulative-distribution CSV (default <output>.cdf.csv)")
    s.set_defaults(func=cmd_bd)

    s = sub.add_parser("train", parents=[common], help="train a feature-to-RD predictor")
    s.add_argument("features")
    s.add_argument("fits")
    s.add_argument("--kind", required=True, choices=[k.value for k in RdModelKind])
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--report", help="validation report CSV (default <output>.report.csv)")
    s.add_argument("--trees", type=int)
    s.add_argument("--max-depth", type=int)
    s.add_argument("--min-leaf", type=int)
    s.add_argument("--mtry", type=int)
    s.add_argument("--rfe-trees", type=int)
    s.add_argument("--rfe-folds", type=int)
    s.add_argument("--split-by", choices=["gop", "sequence"])
    s.add_argument("--feature-set", choices=["rfe", "published"],
                   help="rfe: select features by elimination; published: the per-parameter subsets reported for the HomTex fleet")
    s.add_argument("--relation-log-base", choices=["10", "e", "2"])
    s.add_argument("--test-fraction", type=float)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", parents=[common], help="predict RD curves from features")
    s.add_argument("features")
    s.add_argument("--predictor", action="append", required=True, help="predictor JSON (repeatable)")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--points", help="measured RD points for BD validation")
    s.add_argument("--bd-report", help="BD validation CSV (default <output>.bd.csv)")
    s.add_argument("--timing", help="write per-model wall-clock and RCR to this CSV")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("analyze", parents=[common], help="correlation matrices and box summaries")
    s.add_argument("features")
    s.add_argument("--encoder-stats")
    s.add_argument("--manifest", help="manifest providing texture classes")
    s.add_argument("--method", default="pearson", choices=["pearson", "spearman", "both"])
    s.add_argument("-o", "--output", required=True, help="output directory")
    s.set_defaults(func=cmd_analyze)
    return p


def resolve_config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    changes = {}
    for dest, name in _CFG_FLAGS.items():
        v = getattr(args, dest, None)
        if v is not None:
            changes[name] = v
    return cfg.updated(**changes)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ValueError("--jobs must be >= 1")
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except OSError as exc:
        _log(f"I/O error: {exc}")
        return EXIT_IO
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        _log(f"error: {exc}")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
