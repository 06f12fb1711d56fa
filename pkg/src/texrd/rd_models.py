"""Rate-distortion curve models: fitting, evaluation and parameter relations.

Models are in the log-rate domain, x = log10(rate in bpp):

    Lin    Q = a1 x + b1
    Poly2  Q = a2 x^2 + b2 x + g2
    Poly3  Q = a3 x^3 + b3 x^2 + g3 x + d3
    Exp    Q = a4 exp(b4 x)
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .stats import pearson, spearman


class RdModelKind(str, enum.Enum):
    LIN = "Lin"
    POLY2 = "Poly2"
    POLY3 = "Poly3"
    EXP = "Exp"

    @property
    def param_names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self]

    @property
    def n_params(self) -> int:
        return len(PARAM_NAMES[self])

    @property
    def anchors(self) -> tuple[str, ...]:
        return ANCHORS[self]


PARAM_NAMES = {
    RdModelKind.LIN: ("alpha1", "beta1"),
    RdModelKind.POLY2: ("alpha2", "beta2", "gamma2"),
    RdModelKind.POLY3: ("alpha3", "beta3", "gamma3", "delta3"),
    RdModelKind.EXP: ("alpha4", "beta4"),
}
# parameters regressed from features; the rest follow from the relations
ANCHORS = {
    RdModelKind.LIN: ("alpha1",),
    RdModelKind.POLY2: ("beta2",),
    RdModelKind.POLY3: ("alpha3", "beta3", "gamma3"),
    RdModelKind.EXP: ("alpha4",),
}
# power of log-rate multiplying each parameter (None: multiplicative scale)
_POWERS = {
    RdModelKind.LIN: (1, 0),
    RdModelKind.POLY2: (2, 1, 0),
    RdModelKind.POLY3: (3, 2, 1, 0),
    RdModelKind.EXP: (None, 1),
}


class RdFitError(ValueError):
    """Underdetermined or singular fit."""


@dataclass(frozen=True)
class RdPoint:
    qp: int
    rate: float
    psnr: float


@dataclass
class RdCurve:
    sequence_id: str
    gop_index: int
    points: list[RdPoint]

    def __post_init__(self):
        self.points = sorted(self.points, key=lambda p: p.rate)
        rates = self.rates
        if len(self.points) < 2:
            raise ValueError(f"{self.key}: an RD curve needs at least 2 points")
        if np.any(rates <= 0) or not np.all(np.isfinite(self.psnrs)):
            raise ValueError(f"{self.key}: rates must be > 0 and PSNR finite")
        if np.any(np.diff(rates) <= 0):
            raise ValueError(f"{self.key}: rates must be strictly increasing")
        by_qp = sorted(self.points, key=lambda p: p.qp)
        if any(b.psnr >= a.psnr for a, b in zip(by_qp, by_qp[1:])):
            warnings.warn(f"{self.key}: PSNR is not strictly decreasing in QP", stacklevel=2)

    @property
    def key(self) -> tuple[str, int]:
        return (self.sequence_id, self.gop_index)

    @property
    def rates(self) -> np.ndarray:
        return np.array([p.rate for p in self.points], dtype=np.float64)

    @property
    def psnrs(self) -> np.ndarray:
        return np.array([p.psnr for p in self.points], dtype=np.float64)

    @classmethod
    def from_arrays(cls, rates, psnrs, sequence_id="", gop_index=0, qps=None):
        rates = list(map(float, rates))
        psnrs = list(map(float, psnrs))
        if qps is None:
            # lowest rate gets the highest QP
            order = np.argsort(rates)
            qps = np.empty(len(rates), dtype=int)
            qps[order] = np.arange(len(rates))[::-1]
        pts = [RdPoint(int(q), r, p) for q, r, p in zip(qps, rates, psnrs)]
        return cls(sequence_id, gop_index, pts)


@dataclass
class RdFit:
    kind: RdModelKind
    params: tuple[float, ...]
    r_squared: float | None = None
    rmse: float | None = None
    sequence_id: str = ""
    gop_index: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = RdModelKind(self.kind)
        self.params = tuple(float(p) for p in self.params)
        if len(self.params) != self.kind.n_params:
            raise ValueError(f"{self.kind.value} takes {self.kind.n_params} parameters")

    def named(self) -> dict[str, float]:
        return dict(zip(self.kind.param_names, self.params))

    def __call__(self, rate):
        return eval_rd(self, rate)


def _model(kind: RdModelKind, params, x):
    x = np.asarray(x, dtype=np.float64)
    if kind is RdModelKind.EXP:
        a, b = params
        return a * np.exp(b * x)
    return np.polyval(params, x)


def eval_rd(fit: RdFit, rate):
    """PSNR predicted by ``fit`` at ``rate`` bpp (scalar or array)."""
    r = np.asarray(rate, dtype=np.float64)
    if np.any(r <= 0):
        raise ValueError("rate must be positive")
    out = _model(fit.kind, fit.params, np.log10(r))
    return float(out) if out.ndim == 0 else out


def goodness_of_fit(fit: RdFit, curve: RdCurve) -> tuple[float, float]:
    """(R^2, RMSE) in the PSNR domain.

    With zero total variance R^2 is 1 for an exact fit and -inf otherwise.
    """
    q = curve.psnrs
    if q.size == 0:
        raise ValueError("empty curve")
    res = q - _model(fit.kind, fit.params, np.log10(curve.rates))
    ss_res = float(res @ res)
    dev = q - q.mean()
    ss_tot = float(dev @ dev)
    rmse = math.sqrt(ss_res / q.size)
    if ss_tot == 0.0:
        r2 = 1.0 if ss_res == 0.0 else -math.inf
    else:
        r2 = 1.0 - ss_res / ss_tot
    return r2, rmse


def _ols(A, q):
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise RdFitError("singular normal equations (collinear rates)")
    coef, *_ = np.linalg.lstsq(A, q, rcond=None)
    return coef


def _fit_exp(x, q, max_steps=20, tol=1e-10):
    if np.any(q <= 0):
        raise RdFitError("Exp model needs positive PSNR values")
    c = _ols(np.column_stack([np.ones_like(x), x]), np.log(q))
    a, b = math.exp(c[0]), c[1]

    def sse(a, b):
        r = q - a * np.exp(b * x)
        return float(r @ r)

    cur = sse(a, b)
    for _ in range(max_steps):
        e = np.exp(b * x)
        r = q - a * e
        J = np.column_stack([e, a * x * e])
        step, *_ = np.linalg.lstsq(J, r, rcond=None)
        t = 1.0
        while t > 1e-4:
            na, nb = a + t * step[0], b + t * step[1]
            new = sse(na, nb)
            if new <= cur:
                break
            t *= 0.5
        else:
            break
        improvement = cur - new
        a, b, cur = na, nb, new
        if improvement < tol:
            break
    return np.array([a, b])


def fit_rd(curve: RdCurve, kind) -> RdFit:
    """Least-squares fit of one model to a curve; R^2 and RMSE attached."""
    kind = RdModelKind(kind)
    x = np.log10(curve.rates)
    q = curve.psnrs
    if x.size < kind.n_params:
        raise RdFitError(f"{kind.value} needs >= {kind.n_params} points, curve has {x.size}")
    if kind is RdModelKind.EXP:
        params = _fit_exp(x, q)
    else:
        degree = kind.n_params - 1
        params = _ols(np.vander(x, degree + 1), q)
    fit = RdFit(kind, tuple(params), sequence_id=curve.sequence_id, gop_index=curve.gop_index)
    fit.r_squared, fit.rmse = goodness_of_fit(fit, curve)
    return fit


# Parameter relations, coefficients as printed (highest power first). The
# power law is  c0 * x ** c1 + c2.
RELATIONS = {
    ("Lin", "beta1", "alpha1"): ("poly", (".8571", "-6.796", "-8.117", "40.95")),
    ("Poly2", "alpha2", "beta2"): ("poly", ("1.43e-7", "4.22e-6", "-1.64e-4", "-3.08e-2", "5.21e-2")),
    ("Poly2", "gamma2", "beta2"): ("poly", ("-4.94e-5", "-1.97e-3", "4.56e-2", "-7.38", "22.53")),
    ("Poly3", "alpha3", "beta3"): ("poly", ("-1.14e-9", "-2.01e-7", "-7.63e-6", "-1.57e-4", "-.02", "1.59e-3")),
    ("Poly3", "delta3", "gamma3"): ("poly", ("8.26e-12", "-1.94e-8", "1.03e-5", "2.53e-3", "-6.21", "26.64")),
    ("Exp", "beta4", "alpha4"): ("power", ("-.551", ".064", ".711")),
}
# which relation derives each non-anchor parameter
_DERIVED = {
    RdModelKind.LIN: {"beta1": "alpha1"},
    RdModelKind.POLY2: {"alpha2": "beta2", "gamma2": "beta2"},
    RdModelKind.POLY3: {"delta3": "gamma3"},
    RdModelKind.EXP: {"beta4": "alpha4"},
}


def apply_relation(kind, target: str, source_value: float) -> float:
    """Evaluate one relation in its own (relation-base) parametrization."""
    form, coeffs = RELATIONS[(RdModelKind(kind).value, target, _DERIVED_SOURCE(kind, target))]
    c = [float(s) for s in coeffs]
    if form == "poly":
        return float(np.polyval(c, source_value))
    if source_value <= 0:
        raise ValueError(f"power-law relation undefined for {source_value} <= 0")
    return c[0] * source_value ** c[1] + c[2]


def _DERIVED_SOURCE(kind, target):
    kind = RdModelKind(kind)
    for (k, t, s) in RELATIONS:
        if k == kind.value and t == target:
            return s
    raise KeyError(f"no relation for {kind.value}.{target}")


def parse_log_base(base) -> float:
    if isinstance(base, str):
        if base.lower() == "e":
            return math.e
        base = float(base)
    base = float(base)
    if base <= 0 or base == 1:
        raise ValueError(f"invalid log base {base}")
    return base


def _rescale(kind: RdModelKind, params, factor: float):
    """Multiply each coefficient by factor**power (scale parameters untouched)."""
    out = []
    for p, power in zip(params, _POWERS[kind]):
        out.append(p if power is None else p * factor ** power)
    return out


def to_relation_base(kind, params, log_base=10):
    """Re-express log10-domain parameters in the relation's log base."""
    kind = RdModelKind(kind)
    k = math.log(10.0) / math.log(parse_log_base(log_base))
    return _rescale(kind, params, 1.0 / k)


def from_relation_base(kind, params, log_base=10):
    kind = RdModelKind(kind)
    k = math.log(10.0) / math.log(parse_log_base(log_base))
    return _rescale(kind, params, k)


def relation_estimate(kind, known: dict, log_base=10) -> tuple[float, ...]:
    """Full log10-domain parameter vector from the anchor parameters.

    ``known`` must hold exactly the anchors of ``kind``; ``log_base`` is the
    logarithm the relation coefficients were fitted in.
    """
    kind = RdModelKind(kind)
    if set(known) != set(kind.anchors):
        raise ValueError(f"{kind.value} expects anchors {kind.anchors}, got {sorted(known)}")
    names = kind.param_names
    full = [float(known.get(n, 0.0)) for n in names]
    in_base = to_relation_base(kind, full, log_base)
    for target, source in _DERIVED[kind].items():
        in_base[names.index(target)] = apply_relation(kind, target, in_base[names.index(source)])
    return tuple(from_relation_base(kind, in_base, log_base))


def param_correlations(fits) -> dict[tuple[str, str], tuple[float, float]]:
    """(PCC, SROCC) for every pair of parameters across fits of one kind."""
    fits = list(fits)
    if len(fits) < 3:
        raise ValueError("need at least 3 fits")
    kind = fits[0].kind
    if any(f.kind is not kind for f in fits):
        raise ValueError("fits must share one model kind")
    P = np.array([f.params for f in fits])
    if np.any(P.std(axis=0) == 0):
        raise ValueError("a parameter has zero variance")
    out = {}
    for i, j in combinations(range(kind.n_params), 2):
        out[(kind.param_names[i], kind.param_names[j])] = (
            pearson(P[:, i], P[:, j]), spearman(P[:, i], P[:, j]))
    return out
