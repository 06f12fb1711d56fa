"""Readers and writers for the file contracts between subcommands."""

from __future__ import annotations

import csv
import json
import math
import warnings

import numpy as np

from . import __version__
from .features.extract import FEATURE_COLUMNS, FEATURE_NAMES, N_FEATURES, FeatureVector
from .rd_models import RdCurve, RdFit, RdPoint

FEATURE_HEADER = ("sequence_id", "gop_index") + FEATURE_COLUMNS
RD_POINTS_HEADER = ("sequence_id", "gop_index", "qp", "rate_bpp", "psnr_db")


def fmt(x) -> str:
    x = float(x)
    return "%.17g" % x if math.isfinite(x) else ("nan" if math.isnan(x) else ("inf" if x > 0 else "-inf"))


def header_lines(config_json: str, extra=()) -> list[str]:
    return [f"texrd {__version__}", f"config: {config_json}", *extra]


def _comments(lines):
    return "".join(f"# {line}\n" for line in lines)


def format_feature_csv(rows, config_json: str, extra=()) -> str:
    mnemonics = " ".join(f"{c}={n}" for c, n in zip(FEATURE_COLUMNS, FEATURE_NAMES))
    out = [_comments(header_lines(config_json, [f"features: {mnemonics}", *extra])),
           ",".join(FEATURE_HEADER) + "\n"]
    for fv in rows:
        out.append(",".join([fv.sequence_id, str(fv.gop_index)] + [fmt(v) for v in fv.values]) + "\n")
    return "".join(out)


def _data_rows(path):
    with open(path, newline="") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    return list(csv.reader(lines))


def read_feature_csv(path) -> list[FeatureVector]:
    rows = _data_rows(path)
    if not rows:
        raise ValueError(f"{path}: missing header")
    header = tuple(h.strip() for h in rows[0])
    if header != FEATURE_HEADER:
        raise ValueError(f"{path}: feature schema mismatch (expected sequence_id,gop_index,F1..F{N_FEATURES})")
    out = []
    for n, r in enumerate(rows[1:], start=2):
        if not r:
            continue
        if len(r) != len(FEATURE_HEADER):
            raise ValueError(f"{path}: row {n} has {len(r)} fields")
        out.append(FeatureVector(np.array([float(v) for v in r[2:]]), r[0], int(r[1])))
    return out


def read_rd_points(path):
    """Group an RD-points CSV into curves.

    Returns (curves, errors): curves keyed by (sequence_id, gop_index) in key
    order, and per-key messages for curves that failed validation.
    """
    rows = _data_rows(path)
    if not rows:
        raise ValueError(f"{path}: missing header")
    header = tuple(h.strip() for h in rows[0])
    if header != RD_POINTS_HEADER:
        raise ValueError(f"{path}: expected header {','.join(RD_POINTS_HEADER)}")
    groups: dict[tuple, list[RdPoint]] = {}
    for n, r in enumerate(rows[1:], start=2):
        if not r:
            continue
        if len(r) != 5:
            raise ValueError(f"{path}: row {n} has {len(r)} fields")
        key = (r[0], int(r[1]))
        groups.setdefault(key, []).append(RdPoint(int(r[2]), float(r[3]), float(r[4])))
    curves, errors = {}, {}
    for key in sorted(groups):
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                curves[key] = RdCurve(key[0], key[1], groups[key])
        except ValueError as exc:
            errors[key] = str(exc)
    return curves, errors


def write_rd_points(path, curves):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RD_POINTS_HEADER)
        for c in curves:
            for p in c.points:
                w.writerow([c.sequence_id, c.gop_index, p.qp, fmt(p.rate), fmt(p.psnr)])


def fit_record(fit: RdFit) -> dict:
    def num(v):
        return None if v is None else float(v)
    return {"sequence_id": fit.sequence_id, "gop_index": fit.gop_index, "kind": fit.kind.value,
            "params": list(fit.params), "r2": num(fit.r_squared), "rmse": num(fit.rmse)}


def fit_from_record(rec: dict) -> RdFit:
    return RdFit(rec["kind"], tuple(rec["params"]), rec.get("r2"), rec.get("rmse"),
                 str(rec["sequence_id"]), int(rec["gop_index"]))


def dumps(obj) -> str:
    return json.dumps(obj, indent=1) + "\n"


def fits_document(fits, config_json: str, **extra) -> dict:
    doc = {"version": __version__, "config": json.loads(config_json)}
    doc.update(extra)
    doc["fits"] = [fit_record(f) for f in fits]
    return doc


def read_fits(path, kind=None) -> list[RdFit]:
    with open(path) as fh:
        doc = json.load(fh)
    recs = doc["fits"] if isinstance(doc, dict) else doc
    fits = [fit_from_record(r) for r in recs]
    if kind is not None:
        fits = [f for f in fits if f.kind.value == kind]
    return fits
