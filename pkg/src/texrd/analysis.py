"""Correlation matrices and box-plot summaries over feature and encoder tables."""

from __future__ import annotations

import csv
import math
import re
import warnings
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

import numpy as np

from .stats import pearson, spearman

# encoder statistics, "(%)" columns spelled with a _pct suffix
ENCODER_STAT_NAMES = (
    "intra_pct", "stdIntra", "skip_pct", "stdSkip", "merge_pct", "stdMerge", "inter_pct", "stdInter",
    "ref0_pct", "ref1_pct", "ref2_pct", "ref3_pct",
    "avgPart", "stdPart",
    "avgBits", "stdBits",
    "avgDist", "stdDist",
    "bitsModeSignal_pct", "bitsPart_pct", "bitsIntraDir_pct", "bitsMergeIdx_pct",
    "bitsMotionPred_pct", "bitsResidual_pct", "bitsOthers_pct",
    "avgMSEResi", "stdMSEResi", "avgMSERecError", "stdMSERecError",
    "avgCorrResi", "stdCorrResi", "avgCorrCodedResi", "stdCorrCodedResi",
    "DCIntra", "PlanarIntra", "avgIntraDir", "stdIntraDir",
    "avgLengthMV", "stdDistMV",
)
_CANON = {n.lower(): n for n in ENCODER_STAT_NAMES}
KEY_COLUMNS = ("sequence_id", "gop_index", "texture_class")
MISSING = {"", "nan", "na", "n/a", "null", "none", "-"}


def canonical_stat_name(name: str) -> str | None:
    s = re.sub(r"\s*\(%\)\s*$", "_pct", name.strip())
    s = re.sub(r"\s*%\s*$", "_pct", s)
    return _CANON.get(s.lower())


@dataclass
class StatTable:
    keys: list[tuple]
    columns: list[str]
    data: np.ndarray  # rows x columns, NaN = missing
    classes: list[str | None] = field(default_factory=list)

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64).reshape(len(self.keys), len(self.columns))
        if not self.classes:
            self.classes = [None] * len(self.keys)
        if len(self.classes) != len(self.keys):
            raise ValueError("classes must align with rows")

    def __len__(self):
        return len(self.keys)

    def column(self, name) -> np.ndarray:
        return self.data[:, self.columns.index(name)]

    def by_sequence(self) -> "StatTable":
        """Average GoP rows of each sequence (NaN-aware); keys become (sequence_id,)."""
        groups: dict[str, list[int]] = {}
        for i, k in enumerate(self.keys):
            groups.setdefault(k[0], []).append(i)
        seqs = sorted(groups)
        data = np.full((len(seqs), len(self.columns)), np.nan)
        classes = []
        for r, s in enumerate(seqs):
            block = self.data[groups[s]]
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                data[r] = np.nanmean(block, axis=0) if block.size else np.nan
            classes.append(self.classes[groups[s][0]])
        return StatTable([(s,) for s in seqs], list(self.columns), data, classes)


def _cell(text: str) -> float:
    t = text.strip()
    if t.lower() in MISSING:
        return math.nan
    v = float(t)
    return v if math.isfinite(v) else math.nan


def ingest_encoder_stats(path) -> StatTable:
    """Read an encoder-statistics CSV keyed by sequence_id (and optionally gop_index).

    Header names are matched to the known statistics; unknown columns are
    kept with a warning and unparsable or NaN cells become missing.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
    if not rows:
        raise ValueError(f"{path}: no header row")
    header = [h.strip() for h in rows[0]]
    if "sequence_id" not in header:
        raise ValueError(f"{path}: no sequence_id key column")
    si = header.index("sequence_id")
    gi = header.index("gop_index") if "gop_index" in header else None
    ci = header.index("texture_class") if "texture_class" in header else None
    value_idx, columns, unknown = [], [], []
    for j, h in enumerate(header):
        if j in (si, gi, ci):
            continue
        name = canonical_stat_name(h)
        if name is None:
            unknown.append(h)
            name = h
        value_idx.append(j)
        columns.append(name)
    if unknown:
        warnings.warn(f"{path}: unrecognized encoder statistics kept as-is: {', '.join(unknown)}", stacklevel=2)
    keys, data, classes = [], [], []
    for n, r in enumerate(rows[1:], start=2):
        if len(r) != len(header):
            raise ValueError(f"{path}:{n}: expected {len(header)} fields, got {len(r)}")
        key = (r[si].strip(),) if gi is None else (r[si].strip(), int(r[gi]))
        row = []
        for j in value_idx:
            try:
                row.append(_cell(r[j]))
            except ValueError:
                warnings.warn(f"{path}:{n}: unparsable cell {r[j]!r} marked missing", stacklevel=2)
                row.append(math.nan)
        keys.append(key)
        data.append(row)
        classes.append(r[ci].strip() or None if ci is not None else None)
    return StatTable(keys, columns, np.array(data, dtype=np.float64).reshape(len(keys), len(columns)), classes)


@dataclass
class CorrelationMatrix:
    rows: list[str]
    columns: list[str]
    values: np.ndarray  # NaN where undefined
    method: str
    n_joined: int = 0


def correlation_matrix(left: StatTable, right: StatTable, method: str = "pearson",
                       min_pairs: int = 3) -> CorrelationMatrix:
    """Pairwise-complete correlations between every left and right column."""
    if method not in ("pearson", "spearman"):
        raise ValueError(f"unknown method {method!r}")
    fn = pearson if method == "pearson" else spearman
    lidx = {k: i for i, k in enumerate(left.keys)}
    ridx = {k: i for i, k in enumerate(right.keys)}
    common = sorted(lidx.keys() & ridx.keys())
    if not common:
        raise ValueError("tables share no row keys")
    L = left.data[[lidx[k] for k in common]]
    R = right.data[[ridx[k] for k in common]]
    out = np.full((len(left.columns), len(right.columns)), np.nan)
    for i in range(L.shape[1]):
        for j in range(R.shape[1]):
            ok = np.isfinite(L[:, i]) & np.isfinite(R[:, j])
            if ok.sum() >= min_pairs:
                out[i, j] = fn(L[ok, i], R[ok, j])
    return CorrelationMatrix(list(left.columns), list(right.columns), out, method, len(common))


@dataclass(frozen=True)
class Box:
    n: int
    min: float
    q1: float
    median: float
    q3: float
    max: float
    outliers: tuple[float, ...]


@dataclass
class BoxSummary:
    groups: list[str]
    columns: list[str]
    boxes: dict[tuple[str, str], Box]


def box_stats(values) -> Box:
    v = np.sort(np.asarray(values, dtype=np.float64))
    if v.size == 0:
        raise ValueError("empty group")
    q1, med, q3 = np.percentile(v, [25, 50, 75])  # linear (type 7)
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    outliers = tuple(float(x) for x in v if x < lo or x > hi)
    return Box(int(v.size), float(v[0]), float(q1), float(med), float(q3), float(v[-1]), outliers)


def box_summary(table: StatTable, group_by: str = "texture_class", columns=None) -> BoxSummary:
    if group_by != "texture_class":
        raise ValueError("only texture_class grouping is supported")
    if all(c is None for c in table.classes):
        raise ValueError("table has no texture_class values")
    columns = list(columns or table.columns)
    groups = sorted({c for c in table.classes if c is not None})
    boxes = {}
    for g in groups:
        rows = [i for i, c in enumerate(table.classes) if c == g]
        for name in columns:
            col = table.data[rows, table.columns.index(name)]
            col = col[np.isfinite(col)]
            if col.size == 0:
                raise ValueError(f"empty group {g!r} for column {name!r}")
            boxes[(g, name)] = box_stats(col)
    return BoxSummary(groups, columns, boxes)


def _fmt(x: float) -> str:
    return "" if not math.isfinite(x) else "%.17g" % x


def write_correlation_csv(path, cm: CorrelationMatrix, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(f"# method: {cm.method}; missing data: pairwise deletion; joined rows: {cm.n_joined}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([""] + cm.columns)
        for name, row in zip(cm.rows, cm.values):
            w.writerow([name] + [_fmt(v) for v in row])


def write_box_csv(path, bs: BoxSummary, header_lines=()):
    with open(path, "w", newline="") as fh:
        for line in header_lines:
            fh.write(f"# {line}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["group", "column", "n", "min", "q1", "median", "q3", "max", "outliers"])
        for name in bs.columns:
            for g in bs.groups:
                b = bs.boxes[(g, name)]
                w.writerow([g, name, b.n] + [_fmt(v) for v in (b.min, b.q1, b.median, b.q3, b.max)]
                           + [" ".join(_fmt(o) for o in b.outliers)])


def _rgb(c):
    return "#%02x%02x%02x" % tuple(int(round(v)) for v in c)


def diverging_color(v: float) -> str:
    """White at 0, blue towards +1, red towards -1; grey when undefined."""
    if not math.isfinite(v):
        return "#bdbdbd"
    t = min(1.0, abs(v))
    end = (33, 102, 172) if v >= 0 else (178, 24, 43)
    return _rgb([255 + (e - 255) * t for e in end])


def _comment(lines):
    body = "\n".join(escape(line).replace("--", "- -") for line in lines)
    return f"<!--\n{body}\n-->\n" if lines else ""


def write_correlation_svg(path, cm: CorrelationMatrix, header_lines=(), cell: int = 14):
    left, top = 130, 130
    width = left + cell * len(cm.columns) + 10
    height = top + cell * len(cm.rows) + 10
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="9">\n',
           _comment(list(header_lines)),
           f'<rect width="{width}" height="{height}" fill="white"/>\n']
    for j, name in enumerate(cm.columns):
        x = left + j * cell + cell / 2
        out.append(f'<text transform="translate({x:.1f},{top - 4}) rotate(-90)">{escape(name)}</text>\n')
    for i, name in enumerate(cm.rows):
        y = top + i * cell
        out.append(f'<text x="{left - 4}" y="{y + cell - 4}" text-anchor="end">{escape(name)}</text>\n')
        for j, v in enumerate(cm.values[i]):
            label = "NA" if not math.isfinite(v) else f"{v:.3f}"
            out.append(f'<rect x="{left + j * cell}" y="{y}" width="{cell}" height="{cell}" '
                       f'fill="{diverging_color(v)}"><title>{escape(name)} / {escape(cm.columns[j])}: {label}</title></rect>\n')
    out.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("".join(out))


GROUP_COLORS = {"static": "#ff7f0e", "dynamic_continuous": "#1f77b4", "dynamic_discrete": "#2ca02c"}


def write_box_svg(path, bs: BoxSummary, header_lines=(), row_h: int = 12, plot_w: int = 300):
    left = 150
    n_rows = len(bs.columns) * (len(bs.groups) + 1)
    width, height = left + plot_w + 20, n_rows * row_h + 20
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="9">\n',
           _comment(list(header_lines)),
           f'<rect width="{width}" height="{height}" fill="white"/>\n']
    y = 10
    for name in bs.columns:
        boxes = [bs.boxes[(g, name)] for g in bs.groups]
        lo = min(b.min for b in boxes)
        hi = max(b.max for b in boxes)
        span = hi - lo if hi > lo else 1.0
        sx = lambda v: left + (v - lo) / span * plot_w  # noqa: E731
        out.append(f'<text x="{left - 4}" y="{y + row_h - 3}" text-anchor="end" font-weight="bold">{escape(name)}</text>\n')
        y += row_h
        for g, b in zip(bs.groups, boxes):
            color = GROUP_COLORS.get(g, "#7f7f7f")
            mid = y + row_h / 2
            wlo = max(b.min, b.q1 - 1.5 * (b.q3 - b.q1))
            whi = min(b.max, b.q3 + 1.5 * (b.q3 - b.q1))
            out.append(f'<text x="{left - 4}" y="{y + row_h - 3}" text-anchor="end">{escape(g)}</text>\n')
            out.append(f'<line x1="{sx(wlo):.2f}" y1="{mid:.1f}" x2="{sx(whi):.2f}" y2="{mid:.1f}" stroke="{color}"/>\n')
            out.append(f'<rect x="{sx(b.q1):.2f}" y="{y + 2}" width="{max(0.5, sx(b.q3) - sx(b.q1)):.2f}" '
                       f'height="{row_h - 4}" fill="{color}" fill-opacity="0.4" stroke="{color}"/>\n')
            out.append(f'<line x1="{sx(b.median):.2f}" y1="{y + 2}" x2="{sx(b.median):.2f}" y2="{y + row_h - 2}" stroke="black"/>\n')
            for o in b.outliers:
                out.append(f'<circle cx="{sx(o):.2f}" cy="{mid:.1f}" r="1.5" fill="none" stroke="{color}"/>\n')
            y += row_h
    out.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("".join(out))
