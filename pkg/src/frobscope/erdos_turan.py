"""
Trigonometric majorants and minorants of boxes, their Weyl symmetrization,
and the resulting explicit Erdos-Turan bound.

For a box Omega in the torus R^n / Z^n and a degree M the construction is::

    B^(k)_pm = K^(k/M) * (chi^_Omega(k) +- H^(k)),    ||k||_sup <= M

where K is a kernel from :mod:`frobscope.kernels` and H is the boundary
corridor term ``H(x) = psi(2 M dist(x, boundary)) / 4``.  In one dimension
H is used exactly.  In two dimensions the separable upper bound::

    H''(x) = (1/4) sum_j sum_{c in {a_j, b_j}} psi(2 M |x_j - c|)   (periodized)

is used.  Its coefficients live on the coordinate axes and only need
one-dimensional transforms of psi.  Since ``H'' >= H`` pointwise and
``K >= 0``, the two-sided sandwich survives the replacement.

Summing ``B_pm`` over the Weyl group gives W-invariant ``S_pm`` with
``S_- <= chi_D <= S_+`` on the conjugacy-class space.  Their character
coefficients are::

    S~(lambda) = sum_{sigma, tau} sgn(sigma tau) B^(sigma(lambda + rho) - tau(rho))
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import MissingCharSum, NotSmallBox, UnsupportedRank
from .kernels import KernelMode, KernelSpec, kernel_hat, panel_nodes, profile
from .root_system import (
    BoxSpec,
    RootSystemData,
    Smallness,
    box_fourier,
    box_measure,
    build_root_system,
    c_lambda,
    distortion_constant,
    is_small_box,
    parse_type,
    Product,
)

__all__ = [
    "TrigPoly",
    "MajorantPair",
    "KernelSpec",
    "kernel_hat",
    "box_fourier",
    "boundary_term_fourier",
    "build_majorants",
    "symmetrize_to_S",
    "s_tilde",
    "s_tilde_table",
    "et_rhs",
    "scn_sum",
    "joint_scn_sum",
    "joint_c",
    "product_system",
]


# -- trigonometric polynomials ---------------------------------------------------

def lattice(degree: int, n: int) -> np.ndarray:
    """All k in ``[-degree, degree]^n`` in C order, shape ``((2D+1)^n, n)``."""
    axes = [np.arange(-degree, degree + 1)] * n
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)


@dataclass(frozen=True)
class TrigPoly:
    """``sum_k c_k e(k . x)`` over ``||k||_sup <= degree``.

    Coefficients are stored densely: ``coeffs[k + degree]`` is ``c_k``.
    """

    coeffs: np.ndarray
    degree: int
    real_valued: bool = False

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if any(s != 2 * self.degree + 1 for s in c.shape):
            raise ValueError("coefficient array does not match the degree")
        object.__setattr__(self, "coeffs", c)

    @property
    def rank(self) -> int:
        return self.coeffs.ndim

    def coeff(self, k) -> complex:
        k = np.atleast_1d(np.asarray(k, dtype=np.int64))
        if np.any(np.abs(k) > self.degree):
            return 0j
        return complex(self.coeffs[tuple(k + self.degree)])

    def gather(self, ks: np.ndarray) -> np.ndarray:
        """Coefficients at many lattice vectors (zero outside the support)."""
        ks = np.asarray(ks, dtype=np.int64)
        inside = np.all(np.abs(ks) <= self.degree, axis=-1)
        out = np.zeros(ks.shape[:-1], dtype=complex)
        idx = tuple(np.moveaxis(ks[inside] + self.degree, -1, 0))
        out[inside] = self.coeffs[idx]
        return out

    def items(self):
        """``(k, c_k)`` for nonzero coefficients, k in lexicographic order."""
        for k in lattice(self.degree, self.rank):
            c = self.coeffs[tuple(k + self.degree)]
            if c != 0:
                yield tuple(int(v) for v in k), complex(c)

    def as_dict(self) -> dict:
        return dict(self.items())

    def conjugate_symmetry_residual(self) -> float:
        flipped = np.conj(self.coeffs[(slice(None, None, -1),) * self.rank])
        return float(np.max(np.abs(self.coeffs - flipped)))

    def __call__(self, x) -> np.ndarray:
        """Evaluate at points ``x`` of shape ``(N, n)`` (or ``(N,)`` when n = 1)."""
        x = np.asarray(x, dtype=float).reshape(-1, self.rank)
        ks = np.arange(-self.degree, self.degree + 1)
        if self.rank == 1:
            val = np.exp(2j * np.pi * np.outer(x[:, 0], ks)) @ self.coeffs
        elif self.rank == 2:
            e1 = np.exp(2j * np.pi * np.outer(x[:, 0], ks))
            e2 = np.exp(2j * np.pi * np.outer(x[:, 1], ks))
            val = np.einsum("nk,nk->n", e1 @ self.coeffs, e2)
        else:
            val = np.zeros(len(x), dtype=complex)
            for k in lattice(self.degree, self.rank):
                c = self.coeffs[tuple(k + self.degree)]
                if c != 0:
                    val += c * np.exp(2j * np.pi * (x @ k))
        return val.real if self.real_valued else val

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "coeffs": [[list(k), c.real, c.imag] for k, c in self.items()],
        }


# -- boundary term -------------------------------------------------------------

def _half_line_transforms(prof, omega):
    """``int_0^inf psi(u) e^{+- i omega u} du`` as ``(cos part, sin part)`` for omega >= 0."""
    return prof.cos_transform(omega), prof.sin_transform(omega)


def _finite_transform(prof, X: float, omega: np.ndarray) -> np.ndarray:
    """``int_0^X psi(u) e^{i omega u} du`` by composite Gauss-Legendre."""
    u, w = panel_nodes(0.0, X, length=0.5)
    vals = prof.psi(u) * w
    return np.exp(1j * np.outer(omega, u)) @ vals


def _exact_1d(a: float, b: float, M: int, spec: KernelSpec, k: np.ndarray) -> np.ndarray:
    prof = profile(spec)
    L = b - a
    kk = np.abs(k).astype(float)
    omega = np.pi * kk / M
    cos_t, sin_t = _half_line_transforms(prof, omega)
    scale = 1.0 / (8.0 * M)  # (1/4) from H, 1/(2M) from u = 2 M s
    out_plus = scale * (cos_t + 1j * sin_t)  # int_0^inf phi e^{+2 pi i |k| s}
    out_minus = scale * (cos_t - 1j * sin_t)
    fin = scale * _finite_transform(prof, M * L, omega)  # int_0^{L/2} phi e^{+2 pi i |k| s}
    fin_plus, fin_minus = fin, np.conj(fin)
    neg = k < 0
    out_plus[neg], out_minus[neg] = out_minus[neg], out_plus[neg].copy()
    fin_plus[neg], fin_minus[neg] = fin_minus[neg], fin_plus[neg].copy()
    ea = np.exp(-2j * np.pi * k * a)
    eb = np.exp(-2j * np.pi * k * b)
    return ea * (out_plus + fin_minus) + eb * (out_minus + fin_plus)


def _separable(box: BoxSpec, M: int, spec: KernelSpec, ks: np.ndarray) -> np.ndarray:
    prof = profile(spec)
    n = ks.shape[1]
    out = np.zeros(len(ks), dtype=complex)
    nnz = np.count_nonzero(ks, axis=1)
    zero = nnz == 0
    out[zero] = n * 2.0 * float(prof.cos_transform(0.0)[0]) / (4.0 * M)
    for j, (a, b) in enumerate(box.intervals):
        sel = (nnz == 1) & (ks[:, j] != 0)
        kj = ks[sel, j].astype(float)
        base = prof.cos_transform(np.pi * np.abs(kj) / M) / (4.0 * M)
        out[sel] = base * (np.exp(-2j * np.pi * kj * a) + np.exp(-2j * np.pi * kj * b))
    return out


def _default_method(n: int) -> str:
    return "exact" if n == 1 else "separable"


def boundary_term_fourier(box: BoxSpec, M: int, spec: KernelSpec | None = None, k=None, method: str | None = None):
    """Fourier coefficients of the boundary corridor term.

    Parameters
    ----------
    box : BoxSpec
    M : int
        Degree parameter; the corridor has width of order 1/M.
    spec : KernelSpec, optional
        Kernel family; defaults to the product Jackson kernel in the box's dimension.
    k : array_like, optional
        Lattice vectors, shape ``(K, n)``; defaults to the full ``[-M, M]^n``.
    method : {"exact", "separable"}
        ``"exact"`` integrates ``psi(2 M dist(x, boundary)) / 4`` (n = 1 only);
        ``"separable"`` uses the axis-wise upper bound H''.
    """
    n = box.rank
    spec = spec or KernelSpec(KernelMode.PRODUCT_JACKSON, n)
    if spec.n != n:
        raise ValueError("kernel dimension does not match the box")
    if n > 2:
        raise UnsupportedRank("boundary terms are implemented for n <= 2")
    method = method or _default_method(n)
    ks = lattice(M, n) if k is None else np.atleast_2d(np.asarray(k, dtype=np.int64)).reshape(-1, n)
    if method == "exact":
        if n != 1:
            raise UnsupportedRank("the exact corridor integral is implemented for n = 1")
        (a, b), = box.intervals
        return _exact_1d(a, b, M, spec, ks[:, 0])
    if method == "separable":
        return _separable(box, M, spec, ks)
    raise ValueError(f"unknown boundary method {method!r}")


# -- majorants -----------------------------------------------------------------

@dataclass(frozen=True)
class MajorantPair:
    b_plus: TrigPoly
    b_minus: TrigPoly
    box: BoxSpec
    M: int
    spec: KernelSpec
    construction_log: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "mode": self.spec.mode.value,
            "M": self.M,
            "box": [list(iv) for iv in self.box.intervals],
            "method": self.construction_log.get("method"),
            "b_plus": self.b_plus.to_dict()["coeffs"],
            "b_minus": self.b_minus.to_dict()["coeffs"],
        }


def build_majorants(box: BoxSpec, M: int, spec: KernelSpec | None = None, method: str | None = None) -> MajorantPair:
    """Trigonometric polynomials of degree <= M per axis with ``B- <= chi_box <= B+``."""
    n = box.rank
    spec = spec or KernelSpec(KernelMode.PRODUCT_JACKSON, n)
    if n > 2:
        raise UnsupportedRank("majorants are implemented for n <= 2")
    method = method or _default_method(n)
    ks = lattice(M, n)
    khat = kernel_hat(spec, ks, M)
    chi = box_fourier(box, ks)
    h = boundary_term_fourier(box, M, spec, ks, method)
    shape = (2 * M + 1,) * n
    bp = TrigPoly((khat * (chi + h)).reshape(shape), M, real_valued=True)
    bm = TrigPoly((khat * (chi - h)).reshape(shape), M, real_valued=True)
    log = {
        "method": method,
        "psi_constant": profile(spec).C,
        "H_hat_0": float(h[len(h) // 2].real),
        "H_hat": h.reshape(shape),
        "quadrature": "closed-form half-line transforms; composite 16-point Gauss-Legendre panels of width 0.5",
    }
    return MajorantPair(bp, bm, box, M, spec, log)


# -- symmetrization --------------------------------------------------------------

def symmetrize_to_S(rs: RootSystemData, pair: MajorantPair, check_small: bool = True):
    """``S_pm = sum_{sigma in W} sigma(B_pm)``, returned as ``(S_plus, S_minus)``.

    In weight coordinates the coefficient of ``S`` at lambda is
    ``sum_sigma B^(A_sigma lambda)``.
    """
    if pair.box.rank != rs.rank:
        raise ValueError("majorant rank does not match the root system")
    if check_small and is_small_box(rs, pair.box) is not Smallness.SMALL:
        raise NotSmallBox(f"box {pair.box.intervals} is not small for {rs.cartan_type}")
    deg = distortion_constant(rs) * pair.M
    lam = lattice(deg, rs.rank)
    images = np.einsum("wij,kj->wki", rs.weight_matrices, lam)
    shape = (2 * deg + 1,) * rs.rank
    out = []
    for b in (pair.b_plus, pair.b_minus):
        coeffs = b.gather(images).sum(axis=0)
        out.append(TrigPoly(coeffs.reshape(shape), deg, real_valued=True))
    return tuple(out)


def _support_bound(rs: RootSystemData, M: int) -> int:
    inv_norm = max(int(np.max(np.abs(np.rint(np.linalg.inv(A))).sum(axis=1))) for A in rs.weight_matrices)
    rho_norm = int(np.max(np.abs(rs.rho_orbit)))
    return inv_norm * (M + rho_norm)


def _s_tilde_many(rs: RootSystemData, poly: TrigPoly, lams: np.ndarray) -> np.ndarray:
    shifted = np.einsum("wij,kj->wki", rs.weight_matrices, lams + rs.rho)  # sigma(lambda + rho)
    rho_orb = rs.rho_orbit  # tau(rho)
    total = np.zeros(len(lams), dtype=complex)
    for t_idx, tr in enumerate(rho_orb):
        vals = poly.gather(shifted - tr[None, None, :])  # (|W|, K)
        total += rs.signs[t_idx] * (rs.signs[:, None] * vals).sum(axis=0)
    return total


def s_tilde(rs: RootSystemData, pair: MajorantPair, lam, which: str = "+") -> complex:
    """``S~(lambda) = sum_{sigma, tau} sgn(sigma tau) B^(sigma(lambda + rho) - tau(rho))``."""
    poly = pair.b_plus if which == "+" else pair.b_minus
    lams = np.atleast_2d(np.asarray(lam, dtype=np.int64))
    return complex(_s_tilde_many(rs, poly, lams)[0])


@dataclass(frozen=True)
class STildeTable:
    weights: np.ndarray  # (K, n) dominant weights, lexicographic, starting with 0
    plus: np.ndarray
    minus: np.ndarray

    def support(self, tol: float = 0.0) -> np.ndarray:
        mask = (np.abs(self.plus) > tol) | (np.abs(self.minus) > tol)
        return self.weights[mask]


def s_tilde_table(rs: RootSystemData, pair: MajorantPair) -> STildeTable:
    """``S~_pm`` at every dominant weight where it can be nonzero."""
    L = _support_bound(rs, pair.M)
    lams = np.array(list(itertools.product(range(L + 1), repeat=rs.rank)), dtype=np.int64)
    plus = _s_tilde_many(rs, pair.b_plus, lams)
    minus = _s_tilde_many(rs, pair.b_minus, lams)
    keep = (plus != 0) | (minus != 0)
    keep[0] = True
    return STildeTable(lams[keep], plus[keep], minus[keep])


def et_rhs(
    rs: RootSystemData,
    pair: MajorantPair,
    char_sums: Mapping,
    N: int,
    M: int | None = None,
    table: STildeTable | None = None,
    mu: float | None = None,
) -> float:
    """Explicit bound on ``|#{x_i in D}/N - mu(D)|``.

    ``max_pm ( |sum_{lambda != 0} S~_pm(lambda) char_sums[lambda]| / N + |S~_pm(0) - mu(D)| )``
    where ``char_sums[lambda] = sum_i chi_lambda(x_i)``.
    """
    if M is not None and M != pair.M:
        raise ValueError("M does not match the majorant pair")
    table = table or s_tilde_table(rs, pair)
    mu = box_measure(rs, pair.box) if mu is None else mu
    sums = np.zeros(len(table.weights), dtype=complex)
    for i, lam in enumerate(table.weights):
        key = tuple(int(v) for v in lam)
        if not any(key):
            continue
        if table.plus[i] == 0 and table.minus[i] == 0:
            continue
        try:
            sums[i] = char_sums[key]
        except KeyError:
            raise MissingCharSum(key) from None
    best = 0.0
    for coeffs in (table.plus, table.minus):
        zero = coeffs[0]
        rest = complex(np.sum(coeffs[1:] * sums[1:]))
        best = max(best, abs(rest) / N + abs(zero.real - mu))
    return best


# -- lattice sums ----------------------------------------------------------------

def _dominant_grid(rs: RootSystemData, M: int) -> np.ndarray:
    axes = [np.arange(M + 1)] * rs.rank
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, rs.rank)


def c_lambda_many(rs: RootSystemData, lams: np.ndarray) -> np.ndarray:
    imgs = np.einsum("wij,kj->wki", rs.weight_matrices, lams)
    return (1.0 / np.prod(np.abs(imgs) + 1.0, axis=-1)).sum(axis=0)


def _norms(lams, norm):
    if norm == "sup":
        return np.max(np.abs(lams), axis=1).astype(float)
    if norm == "l1":
        return np.sum(np.abs(lams), axis=1).astype(float)
    return np.sqrt(np.sum(lams.astype(float) ** 2, axis=1))


def _scn_terms(rs, M, r, norm, include_zero):
    lams = _dominant_grid(rs, int(math.floor(M)))
    nrm = _norms(lams, norm)
    keep = nrm <= M
    if not include_zero:
        keep &= nrm > 0
    lams, nrm = lams[keep], nrm[keep]
    with np.errstate(divide="ignore"):
        powr = np.where(nrm == 0, 1.0 if r == 0 else 0.0, nrm ** float(r))
    return c_lambda_many(rs, lams) * powr


def scn_sum(rs: RootSystemData, M: float, r: float, norm: str = "sup") -> float:
    """``sum_{lambda dominant, 0 < ||lambda|| <= M} c(lambda) ||lambda||^r``."""
    return math.fsum(_scn_terms(rs, M, r, norm, include_zero=False).tolist())


def product_system(rs1: RootSystemData, rs2: RootSystemData) -> RootSystemData:
    return build_root_system(Product(parse_type(rs1.cartan_type), parse_type(rs2.cartan_type)))


def joint_c(rs1: RootSystemData, rs2: RootSystemData, lam1, lam2) -> float:
    """``c(lambda, lambda') = sum_{sigma, sigma'} 1 / (N(sigma lambda) N(sigma' lambda'))``."""
    return c_lambda(rs1, lam1) * c_lambda(rs2, lam2)


def joint_scn_sum(rs1, rs2, M1, M2, r1, r2, norm: str = "sup") -> float:
    """Sum of ``c(lambda, lambda') ||lambda||^r1 ||lambda'||^r2`` over ``(lambda, lambda') != 0``
    with the per-factor caps ``||lambda|| <= M1``, ``||lambda'|| <= M2``."""
    a = math.fsum(_scn_terms(rs1, M1, r1, norm, include_zero=True).tolist())
    b = math.fsum(_scn_terms(rs2, M2, r2, norm, include_zero=True).tolist())
    zero = (rs1.order if r1 == 0 else 0.0) * (rs2.order if r2 == 0 else 0.0)
    return a * b - zero


def loglog_slope(Ms, values) -> float:
    x = np.log(np.asarray(Ms, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])


def log_exponent_fit(Ms, values, power: float) -> float:
    """Exponent b in ``values ~ a M^power (log M)^b``."""
    Ms = np.asarray(Ms, dtype=float)
    y = np.log(np.asarray(values, dtype=float) / Ms**power)
    return float(np.polyfit(np.log(np.log(Ms)), y, 1)[0])
