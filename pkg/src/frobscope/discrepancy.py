"""
Equidistribution experiments for Frobenius angles.

SU(2) conjugacy classes are written as angles theta in [0, pi]; the torus
coordinate of the A1 root datum is ``t = theta / (2 pi)``.  Boxes for A1
experiments are given in theta and converted.  Joint experiments use the
product datum A1 x A1 with coordinates ``(theta / 2 pi, theta' / 2 pi)``.

Every run computes, per box D, the empirical fraction, the limiting measure
``mu(D)``, and the explicit certificate ``et_rhs`` from
:mod:`frobscope.erdos_turan`; a deviation above the certificate raises
:class:`~frobscope.errors.CertificateViolation`.
"""

from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BadCharacteristic,
    CertificateViolation,
    DegenerateInput,
    NotSmallBox,
)
from .erdos_turan import build_majorants, et_rhs, s_tilde_table
from .exp_sums import SumKind, angle_sweep
from .finite_field import ExtField, make_ext_field
from .io import atomic_write_text, fmt_float
from .kernels import KernelMode, KernelSpec
from .root_system import (
    BoxSpec,
    RootSystemData,
    Smallness,
    build_root_system,
    characters_at,
    is_small_box,
    sato_tate_cdf,
    weyl_dimension,
    wrap_box_indicator,
)

TWO_PI = 2.0 * math.pi
BOUNDARY_TOL = 1e-12
SOUNDNESS_SLACK = 1e-12
EDGE_MARGIN = 1e-3

__all__ = [
    "ThetaBox",
    "ExperimentConfig",
    "BoxRow",
    "ExperimentReport",
    "TraceRow",
    "chebyshev_u",
    "char_sum_over_samples",
    "a1_char_sums",
    "joint_char_sums",
    "empirical_box_fraction",
    "optimal_M",
    "rate_value",
    "weil_trace_check",
    "run_effective_deligne",
    "run_joint",
    "rate_fit",
    "theta_partition",
    "sato_tate_inverse_cdf",
    "synthetic_sato_tate",
    "clustered_samples",
    "kloosterman_angles",
    "joint_angles",
    "random_theta_boxes",
    "report_from_dict",
]


# -- angles and boxes ----------------------------------------------------------

@dataclass(frozen=True)
class ThetaBox:
    """Closed box ``prod [lo_j, hi_j]`` of SU(2) angles, ``0 <= lo < hi <= pi``."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        for a, b in ivs:
            if not (0.0 <= a < b <= math.pi):
                raise ValueError(f"angle interval ({a}, {b}) must satisfy 0 <= lo < hi <= pi")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def single(cls, lo: float, hi: float) -> "ThetaBox":
        return cls(((lo, hi),))

    def to_box(self) -> BoxSpec:
        return BoxSpec(tuple((a / TWO_PI, b / TWO_PI) for a, b in self.intervals))

    def sato_tate_measure(self) -> float:
        return math.prod(sato_tate_cdf(b) - sato_tate_cdf(a) for a, b in self.intervals)


def theta_partition(count: int, margin: float = 0.0) -> list[tuple[float, float]]:
    """``count`` consecutive intervals covering ``[margin, pi - margin]``."""
    edges = np.linspace(margin, math.pi - margin, count + 1)
    return [(float(a), float(b)) for a, b in zip(edges[:-1], edges[1:])]


def sato_tate_inverse_cdf(u) -> np.ndarray:
    """Vectorized inverse of ``(theta - sin theta cos theta) / pi`` by bisection."""
    u = np.asarray(u, dtype=float)
    lo = np.zeros_like(u)
    hi = np.full_like(u, math.pi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        below = (mid - np.sin(mid) * np.cos(mid)) / math.pi < u
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


def synthetic_sato_tate(N: int, seed: int = 0, quasi_random: bool = False) -> np.ndarray:
    """Sato-Tate distributed angles by inverse-CDF sampling."""
    if quasi_random:
        u = (np.arange(N) + 0.5) / N
    else:
        u = np.random.default_rng(seed).random(N)
    return sato_tate_inverse_cdf(u)


def clustered_samples(N: int, clusters: int = 3, spread: float = 1e-3, seed: int = 0) -> np.ndarray:
    """Adversarial angles packed into a few narrow clusters."""
    rng = np.random.default_rng(seed)
    centers = rng.uniform(0.05, math.pi - 0.05, clusters)
    picks = rng.integers(0, clusters, N)
    return np.clip(centers[picks] + rng.uniform(-spread, spread, N), 0.0, math.pi)


def kloosterman_angles(field: ExtField, workers: int = 1) -> np.ndarray:
    """Kloosterman angles over ``field^x`` in the sweep order."""
    return np.asarray(angle_sweep(field, SumKind.KLOOSTERMAN, workers=workers).theta, dtype=float)


def _check_joint_field(field: ExtField):
    if field.m != 1 or field.p <= 7 or field.p % 3 != 1:
        raise BadCharacteristic(f"the joint experiment needs a prime field with p = 1 mod 3 and p > 7, got q = {field.q}")


def joint_angles(field: ExtField, workers: int = 1) -> np.ndarray:
    """``(theta(x), theta'(x))`` for x in ``field^x``, ordered by encoding."""
    _check_joint_field(field)
    kl = angle_sweep(field, SumKind.KLOOSTERMAN, workers=workers)
    ai = angle_sweep(field, SumKind.AIRY, workers=workers)
    kl_theta = np.empty(field.q)
    kl_theta[np.asarray(kl.x_index)] = kl.theta
    ai_theta = np.empty(field.q)
    ai_theta[np.asarray(ai.x_index)] = ai.theta
    return np.column_stack([kl_theta[1:], ai_theta[1:]])


def _as_thetas(samples) -> np.ndarray:
    s = np.asarray(samples, dtype=float)
    return s.reshape(len(s), -1)


# -- character sums ------------------------------------------------------------

def chebyshev_u(k_max: int, theta) -> np.ndarray:
    """``U_k(cos theta)`` for ``k = 0..k_max`` by the three-term recurrence; shape ``(k_max+1, N)``."""
    c = np.cos(np.asarray(theta, dtype=float).ravel())
    out = np.empty((k_max + 1, c.size))
    out[0] = 1.0
    if k_max >= 1:
        out[1] = 2.0 * c
    for k in range(1, k_max):
        out[k + 1] = 2.0 * c * out[k] - out[k - 1]
    return out


def _is_a1(rs: RootSystemData) -> bool:
    return str(rs.cartan_type) == "A1"


def _is_a1_pair(rs: RootSystemData) -> bool:
    return str(rs.cartan_type) == "A1xA1"


def char_sum_over_samples(rs: RootSystemData, lam, samples) -> complex:
    """``sum_i chi_lambda(x_i)``.

    For A1 and A1 x A1 the samples are angles and the characters are
    products of Chebyshev polynomials; otherwise samples are torus points.
    """
    lam = tuple(int(v) for v in np.atleast_1d(lam))
    if _is_a1(rs) or _is_a1_pair(rs):
        th = _as_thetas(samples)
        vals = np.ones(len(th))
        for j, k in enumerate(lam):
            vals = vals * chebyshev_u(k, th[:, j])[k]
        return complex(math.fsum(vals.tolist()))
    vals = characters_at(rs, lam, np.asarray(samples, dtype=float))
    return complex(math.fsum(vals.real.tolist()), math.fsum(vals.imag.tolist()))


def a1_char_sums(theta, k_max: int) -> np.ndarray:
    """``sum_i U_k(cos theta_i)`` for ``k = 0..k_max``."""
    U = chebyshev_u(k_max, theta)
    return np.array([math.fsum(row.tolist()) for row in U])


def joint_char_sums(thetas, k_max: int, k2_max: int | None = None) -> np.ndarray:
    """``sum_i U_k(cos theta_i) U_k'(cos theta'_i)`` as a ``(k_max+1, k2_max+1)`` matrix."""
    th = _as_thetas(thetas)
    U1 = chebyshev_u(k_max, th[:, 0])
    U2 = chebyshev_u(k_max if k2_max is None else k2_max, th[:, 1])
    return U1 @ U2.T


def _char_sum_map(rs: RootSystemData, weights: np.ndarray, samples) -> dict:
    if _is_a1(rs):
        sums = a1_char_sums(_as_thetas(samples)[:, 0], int(weights[:, 0].max()))
        return {(int(k),): complex(sums[k]) for k in weights[:, 0]}
    if _is_a1_pair(rs):
        mat = joint_char_sums(samples, int(weights[:, 0].max()), int(weights[:, 1].max()))
        return {(int(a), int(b)): complex(mat[a, b]) for a, b in weights}
    return {tuple(int(v) for v in w): char_sum_over_samples(rs, w, samples) for w in weights}


# -- counting ------------------------------------------------------------------

def _torus_points(rs: RootSystemData, samples) -> np.ndarray:
    if _is_a1(rs) or _is_a1_pair(rs):
        return _as_thetas(samples) / TWO_PI
    return np.asarray(samples, dtype=float).reshape(-1, rs.rank)


def _inside(rs: RootSystemData, box: BoxSpec, samples) -> np.ndarray:
    t = _torus_points(rs, samples)
    hit = np.zeros(len(t), dtype=bool)
    for T in rs.torus_matrices:
        hit |= wrap_box_indicator(box, t @ T.T, tol=BOUNDARY_TOL)
    return hit


def empirical_box_fraction(samples, box, rs: RootSystemData) -> float:
    """Fraction of samples whose Weyl orbit meets the closed box."""
    box = box.to_box() if isinstance(box, ThetaBox) else box
    if is_small_box(rs, box) is not Smallness.SMALL:
        raise NotSmallBox(f"box {box.intervals} is not small for {rs.cartan_type}")
    n = len(_as_thetas(samples)) if (_is_a1(rs) or _is_a1_pair(rs)) else len(samples)
    if n == 0:
        raise DegenerateInput("empty sample set")
    return int(np.count_nonzero(_inside(rs, box, samples))) / n


# -- truncation and rates ------------------------------------------------------

def optimal_M(q: int, m: int, num_pos_roots: int, rank: int, log_power: int | None = None) -> int:
    """Nearest integer to ``q^{m/(2(P+1))} (log q^m)^{-(n-1)/(P+1)}``, at least 2.

    ``log_power`` overrides ``n - 1``; the joint experiment uses ``n + n' - 2``.
    """
    if q**m < 3:
        raise DegenerateInput("q^m must be at least 3")
    lp = rank - 1 if log_power is None else log_power
    P = num_pos_roots
    val = q ** (m / (2.0 * (P + 1))) * math.log(q**m) ** (-lp / (P + 1))
    return max(2, int(math.floor(val + 0.5)))


def rate_value(q: int, m: int, num_pos_roots: int, log_power: int) -> float:
    """``q^{-m/(2(P+1))} (log q^m)^{lp/(P+1)}``."""
    P = num_pos_roots
    return q ** (-m / (2.0 * (P + 1))) * math.log(q**m) ** (log_power / (P + 1))


def rate_fit(points: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Least-squares slope of ``log deviation`` against ``log q^m`` and its r^2."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise DegenerateInput("rate_fit needs at least three points")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise DegenerateInput("rate_fit needs positive values")
    xs = [x for x, _ in pts]
    if len(set(xs)) != len(xs):
        raise DegenerateInput("rate_fit needs distinct abscissae")
    lx = np.log(xs)
    ly = np.log([y for _, y in pts])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


# -- reports -------------------------------------------------------------------

@dataclass(frozen=True)
class BoxRow:
    box: tuple[tuple[float, float], ...]
    empirical: float
    measure: float
    deviation: float
    certificate: float
    rate_value: float
    count: int


@dataclass(frozen=True)
class CharSumRow:
    weight: tuple[int, ...]
    magnitude: float
    bound: float


@dataclass
class ExperimentReport:
    kind: str
    q: int
    m: int
    N: int
    M: int
    rows: list[BoxRow]
    char_sums: list[CharSumRow] = field(default_factory=list)
    fitted: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    runtime: float | None = None

    @property
    def max_deviation(self) -> float:
        return max(r.deviation for r in self.rows)

    def csv_header(self) -> list[str]:
        if self.rows and len(self.rows[0].box) == 2:
            return ["box_lo", "box_hi", "box2_lo", "box2_hi", "empirical", "measure", "deviation", "certificate", "rate_value"]
        return ["box_lo", "box_hi", "empirical", "measure", "deviation", "certificate", "rate_value"]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.csv_header())
        for r in self.rows:
            bounds = [fmt_float(v) for iv in r.box for v in iv]
            w.writerow(bounds + [fmt_float(v) for v in (r.empirical, r.measure, r.deviation, r.certificate, r.rate_value)])
        text = buf.getvalue()
        if path is not None:
            atomic_write_text(path, text)
        return text

    def to_dict(self, include_runtime: bool = False) -> dict:
        out = {
            "kind": self.kind,
            "q": self.q,
            "m": self.m,
            "N": self.N,
            "M": self.M,
            "config": self.config,
            "max_deviation": self.max_deviation,
            "rows": [asdict(r) for r in self.rows],
            "char_sums": [asdict(c) for c in self.char_sums],
            "fitted": self.fitted,
        }
        if include_runtime:
            out["runtime_seconds"] = self.runtime
        return out

    def plot_data(self) -> str:
        """Two-column ``measure deviation`` data for gnuplot."""
        return "".join(f"{fmt_float(r.measure)} {fmt_float(r.deviation)}\n" for r in self.rows)


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one experiment.

    ``source`` is ``"kloosterman"``, ``"synthetic"`` or ``"clustered"`` for A1
    runs and ``"joint"`` for Kloosterman x Airy.
    """

    p: int = 101
    m: int = 1
    source: str = "kloosterman"
    boxes: tuple[tuple[tuple[float, float], ...], ...] = ()
    M: int | None = None
    kernel: str = KernelMode.PRODUCT_JACKSON.value
    N: int = 10_000
    seed: int = 0
    workers: int = 1
    check: bool = True

    def theta_boxes(self) -> list[ThetaBox]:
        return [ThetaBox(tuple(tuple(iv) for iv in b)) for b in self.boxes]


def _certify(rs, box: BoxSpec, M: int, spec: KernelSpec, samples, N: int, mu: float) -> float:
    pair = build_majorants(box, M, spec)
    table = s_tilde_table(rs, pair)
    sums = _char_sum_map(rs, table.weights, samples)
    return et_rhs(rs, pair, sums, N, table=table, mu=mu)


def _box_rows(rs, boxes: list[ThetaBox], samples, N, M, spec, rate, check) -> list[BoxRow]:
    rows = []
    for tb in boxes:
        box = tb.to_box()
        if is_small_box(rs, box) is not Smallness.SMALL:
            raise NotSmallBox(f"box {tb.intervals} is not small")
        count = int(np.count_nonzero(_inside(rs, box, samples)))
        emp = count / N
        mu = tb.sato_tate_measure()
        dev = abs(emp - mu)
        cert = _certify(rs, box, M, spec, samples, N, mu)
        if check and dev > cert + SOUNDNESS_SLACK:
            raise CertificateViolation(f"deviation {dev} exceeds certificate {cert} for box {tb.intervals}")
        rows.append(BoxRow(tb.intervals, emp, mu, dev, cert, rate, count))
    return rows


def _samples_for(config: ExperimentConfig, field: ExtField | None) -> np.ndarray:
    if config.source == "kloosterman":
        return kloosterman_angles(field, config.workers)
    if config.source == "synthetic":
        return synthetic_sato_tate(config.N, config.seed)
    if config.source == "clustered":
        return clustered_samples(config.N, seed=config.seed)
    raise ValueError(f"unknown sample source {config.source!r}")


def run_effective_deligne(config: ExperimentConfig, samples=None) -> ExperimentReport:
    """Per-box empirical fractions of A1 angles against the Sato-Tate measure."""
    start = time.perf_counter()
    rs = build_root_system("A1")
    field = make_ext_field(config.p, config.m) if config.source == "kloosterman" else None
    theta = np.asarray(_samples_for(config, field) if samples is None else samples, dtype=float).ravel()
    if theta.size == 0:
        raise DegenerateInput("empty sample set")
    N = theta.size
    if field is not None:
        q, m = config.p, config.m
    else:
        q, m = N, 1  # synthetic runs measure the rate against the sample count
    M = config.M or optimal_M(q, m, 1, 1)
    spec = KernelSpec(KernelMode(config.kernel), 1)
    boxes = config.theta_boxes() or [ThetaBox.single(a, b) for a, b in theta_partition(20)]
    rate = rate_value(q, m, 1, 0)
    rows = _box_rows(rs, boxes, theta[:, None], N, M, spec, rate, config.check)
    k_top = max(1, M)
    sums = a1_char_sums(theta, k_top)
    cs = [CharSumRow((k,), abs(float(sums[k])), (k + 1) * math.sqrt(q**m)) for k in range(1, k_top + 1)]
    return ExperimentReport("effective_deligne", q, m, N, M, rows, cs, {}, _config_echo(config), time.perf_counter() - start)


def run_joint(config: ExperimentConfig, samples=None) -> ExperimentReport:
    """Joint Kloosterman x Airy angles against the product Sato-Tate measure."""
    start = time.perf_counter()
    rs = build_root_system("A1xA1")
    field = make_ext_field(config.p, config.m)
    _check_joint_field(field)
    pairs = joint_angles(field, config.workers) if samples is None else _as_thetas(samples)
    N = len(pairs)
    if N == 0:
        raise DegenerateInput("empty sample set")
    q, m = config.p, config.m
    M = config.M or optimal_M(q, m, 2, 2, log_power=0)
    spec = KernelSpec(KernelMode(config.kernel), 2)
    if config.boxes:
        boxes = config.theta_boxes()
    else:
        grid = theta_partition(4)
        boxes = [ThetaBox((a, b)) for a in grid for b in grid]
    rate = rate_value(q, m, 2, 0)
    rows = _box_rows(rs, boxes, pairs, N, M, spec, rate, config.check)
    mat = joint_char_sums(pairs, 5)
    cs = [
        CharSumRow((a, b), abs(float(mat[a, b])), (a + 1) * (b + 1) * math.sqrt(q**m))
        for a in range(6)
        for b in range(6)
        if a or b
    ]
    return ExperimentReport("joint", q, m, N, M, rows, cs, {}, _config_echo(config), time.perf_counter() - start)


def _config_echo(config: ExperimentConfig) -> dict:
    d = asdict(config)
    d["boxes"] = [[list(iv) for iv in b] for b in config.boxes]
    d.pop("workers")
    return d


# -- trace bound ---------------------------------------------------------------

@dataclass(frozen=True)
class TraceRow:
    k: int
    magnitude: float
    bound: float

    @property
    def ratio(self) -> float:
        return self.magnitude / self.bound

    @property
    def violation(self) -> bool:
        return self.magnitude > self.bound


def weil_trace_check(field: ExtField, k_max: int = 30, workers: int = 1, theta=None) -> list[TraceRow]:
    """``|sum_x U_k(cos theta(x))|`` against ``(k+1) q^{m/2}`` for ``1 <= k <= k_max``."""
    if not 1 <= k_max <= 30:
        raise ValueError("k_max must lie in 1..30")
    theta = kloosterman_angles(field, workers) if theta is None else np.asarray(theta, dtype=float)
    sums = a1_char_sums(theta, k_max)
    root_q = math.sqrt(field.q)
    return [TraceRow(k, abs(float(sums[k])), (k + 1) * root_q) for k in range(1, k_max + 1)]


def weyl_bound(rs: RootSystemData, lam, q: int) -> float:
    """``dim(lambda) q^{1/2}``, the trace-sum scale for weight lambda."""
    return weyl_dimension(rs, lam) * math.sqrt(q)


def random_theta_boxes(count: int, seed: int = 0, joint: bool = False) -> tuple:
    """Seeded random angle boxes kept at least ``EDGE_MARGIN`` away from 0 and pi."""
    rng = np.random.default_rng(seed)
    dims = 2 if joint else 1
    out = []
    for _ in range(count):
        ivs = []
        for _ in range(dims):
            a = rng.uniform(EDGE_MARGIN, math.pi - 0.2)
            ivs.append((float(a), float(a + rng.uniform(0.05, min(1.5, math.pi - EDGE_MARGIN - a)))))
        out.append(tuple(ivs))
    return tuple(out)


def report_from_dict(data: dict) -> ExperimentReport:
    """Inverse of :meth:`ExperimentReport.to_dict`."""
    rows = [
        BoxRow(
            tuple(tuple(float(v) for v in iv) for iv in r["box"]),
            float(r["empirical"]),
            float(r["measure"]),
            float(r["deviation"]),
            float(r["certificate"]),
            float(r["rate_value"]),
            int(r["count"]),
        )
        for r in data["rows"]
    ]
    cs = [CharSumRow(tuple(c["weight"]), float(c["magnitude"]), float(c["bound"])) for c in data.get("char_sums", [])]
    return ExperimentReport(
        data["kind"], data["q"], data["m"], data["N"], data["M"], rows, cs, data.get("fitted", {}), data.get("config", {}),
        data.get("runtime_seconds"),
    )
