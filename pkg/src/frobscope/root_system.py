"""
Root systems of rank <= 3, their Weyl groups, Weyl character and dimension
formulas, the Weyl integration density on the torus, boxes and box measures.

Conventions
-----------
Weights are written in fundamental-weight coordinates, so simple coroots
serve as the basis of the integral lattice and dominance means every
coordinate is nonnegative.  A torus point ``t`` has coordinates with respect
to the simple coroots; the character ``e(lambda)`` evaluates to
``exp(2 pi i lambda . t)``.

If a Weyl element acts on weights by the integer matrix ``A``, it acts on
torus coordinates by ``A^{-T}``, which keeps the pairing invariant.
"""

from __future__ import annotations

import enum
import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import mpmath
import numpy as np

from .errors import NonDominant, UnsupportedType

SINGULAR_TOL = 1e-8

_CARTAN = {
    # row i: simple root alpha_i in fundamental weight coordinates, i.e. <alpha_i, alpha_j^vee>
    "A1": [[2]],
    "A2": [[2, -1], [-1, 2]],
    "A3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "B2": [[2, -2], [-1, 2]],
    "G2": [[2, -1], [-3, 2]],
}
_EXPECTED = {"A1": (2, 2), "A2": (6, 6), "A3": (12, 24), "B2": (8, 8), "G2": (12, 12)}


@dataclass(frozen=True)
class Product:
    left: object
    right: object

    def __str__(self):
        return f"{self.left}x{self.right}"


def parse_type(spec) -> str | Product:
    """Accept ``"G2"``, ``"A1xA1"``, ``"Product(A1,A2)"`` or a :class:`Product`."""
    if isinstance(spec, Product):
        return Product(parse_type(spec.left), parse_type(spec.right))
    s = str(spec).strip().replace(" ", "")
    m = re.fullmatch(r"Product\((\w+),(\w+)\)", s)
    if m:
        return Product(parse_type(m.group(1)), parse_type(m.group(2)))
    if "x" in s:
        a, b = s.split("x", 1)
        return Product(parse_type(a), parse_type(b))
    if s not in _CARTAN:
        raise UnsupportedType(f"unsupported Cartan type {spec!r}")
    return s


@dataclass(frozen=True)
class WeylElement:
    matrix: np.ndarray  # action on weights (fundamental weight coordinates)
    sign: int

    @property
    def torus_matrix(self) -> np.ndarray:
        """Action on torus coordinates, ``A^{-T}``."""
        return _int_inverse(self.matrix).T


@dataclass(frozen=True)
class TorusPoint:
    t: tuple[float, ...]

    def __post_init__(self):
        if not all(0.0 <= x < 1.0 for x in self.t):
            raise ValueError("torus coordinates must lie in [0, 1)")


@dataclass(frozen=True)
class BoxSpec:
    """Product of intervals ``(a_j, b_j)`` with ``0 <= a_j < 1`` and ``0 < b_j - a_j < 1``.

    Intervals may extend past 1; they are read modulo 1.
    """

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "intervals", tuple((float(a), float(b)) for a, b in self.intervals))
        for a, b in self.intervals:
            if not (0.0 <= a < 1.0 and a < b < a + 1.0):
                raise ValueError(f"invalid box interval ({a}, {b})")

    @property
    def rank(self) -> int:
        return len(self.intervals)

    @property
    def lo(self) -> np.ndarray:
        return np.array([a for a, _ in self.intervals])

    @property
    def hi(self) -> np.ndarray:
        return np.array([b for _, b in self.intervals])

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def to_dict(self):
        return {"intervals": [list(iv) for iv in self.intervals]}


class NormChoice(str, enum.Enum):
    SUP = "sup"
    L1 = "l1"
    L2 = "l2"


def _int_inverse(a: np.ndarray) -> np.ndarray:
    inv = np.rint(np.linalg.inv(a)).astype(np.int64)
    if not np.array_equal(a @ inv, np.eye(len(a), dtype=np.int64)):
        raise ArithmeticError("matrix is not unimodular")
    return inv


def _block_diag(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]), dtype=a.dtype)
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


class RootSystemData:
    """Roots, coroots, rho and the Weyl group of a supported type.

    Attributes
    ----------
    cartan_type : str or Product
    rank : int
    simple_roots : (n, n) int array, row i is alpha_i
    roots, positive_roots : (|R|, n) and (|R+|, n) int arrays
    coroots : (|R|, n) int array, row r is the functional ``lambda -> <lambda, alpha_r^vee>``
    positive_coroots : the rows of ``coroots`` for positive roots
    rho : (n,) int array of ones
    weyl_elements : list of WeylElement, identity first
    """

    def __init__(self, cartan_type, simple_roots, roots, coroots, weyl_elements):
        self.cartan_type = cartan_type
        self.simple_roots = simple_roots
        self.rank = simple_roots.shape[0]
        self.rho = np.ones(self.rank, dtype=np.int64)
        self.roots = roots
        self.coroots = coroots
        pos = (coroots @ self.rho) > 0
        self.positive_roots = roots[pos]
        self.positive_coroots = coroots[pos]
        self.weyl_elements = weyl_elements

    def __repr__(self):
        return f"RootSystemData({self.cartan_type}, |R|={len(self.roots)}, |W|={self.order})"

    @property
    def order(self) -> int:
        return len(self.weyl_elements)

    @cached_property
    def weight_matrices(self) -> np.ndarray:
        return np.stack([w.matrix for w in self.weyl_elements])

    @cached_property
    def torus_matrices(self) -> np.ndarray:
        return np.stack([w.torus_matrix for w in self.weyl_elements])

    @cached_property
    def signs(self) -> np.ndarray:
        return np.array([w.sign for w in self.weyl_elements], dtype=np.int64)

    @cached_property
    def rho_orbit(self) -> np.ndarray:
        return self.weight_matrices @ self.rho

    def to_dict(self) -> dict:
        return {
            "cartan_type": str(self.cartan_type),
            "rank": self.rank,
            "simple_roots": self.simple_roots.tolist(),
            "roots": self.roots.tolist(),
            "positive_roots": self.positive_roots.tolist(),
            "coroot_functionals": self.coroots.tolist(),
            "rho": self.rho.tolist(),
            "weyl_elements": [{"matrix": w.matrix.tolist(), "sign": w.sign} for w in self.weyl_elements],
        }


def _simple_system(name: str):
    cart = np.array(_CARTAN[name], dtype=np.int64)
    n = len(cart)
    ident = np.eye(n, dtype=np.int64)
    gens = [ident - np.outer(cart[i], ident[i]) for i in range(n)]
    elems = [ident]
    seen = {ident.tobytes()}
    frontier = [ident]
    while frontier:
        nxt = []
        for w in frontier:
            for s in gens:
                v = s @ w
                key = v.tobytes()
                if key not in seen:
                    seen.add(key)
                    elems.append(v)
                    nxt.append(v)
        frontier = nxt
    roots, coroots = [], []
    seen_roots = set()
    for w in elems:
        winv = _int_inverse(w)
        for i in range(n):
            r = w @ cart[i]
            key = tuple(r.tolist())
            if key not in seen_roots:
                seen_roots.add(key)
                roots.append(r)
                coroots.append(winv[i])
    order = sorted(range(len(roots)), key=lambda k: tuple(roots[k].tolist()))
    roots = np.array([roots[k] for k in order], dtype=np.int64)
    coroots = np.array([coroots[k] for k in order], dtype=np.int64)
    weyl = [WeylElement(w, int(round(np.linalg.det(w)))) for w in elems]
    return cart, roots, coroots, weyl


def build_root_system(cartan_type) -> RootSystemData:
    ct = parse_type(cartan_type)
    if isinstance(ct, Product):
        a, b = build_root_system(ct.left), build_root_system(ct.right)
        na, nb = a.rank, b.rank
        simple = _block_diag(a.simple_roots, b.simple_roots)
        pad_a = lambda x: np.hstack([x, np.zeros((len(x), nb), dtype=np.int64)])
        pad_b = lambda x: np.hstack([np.zeros((len(x), na), dtype=np.int64), x])
        roots = np.vstack([pad_a(a.roots), pad_b(b.roots)])
        coroots = np.vstack([pad_a(a.coroots), pad_b(b.coroots)])
        weyl = [
            WeylElement(_block_diag(u.matrix, v.matrix), u.sign * v.sign)
            for u in a.weyl_elements
            for v in b.weyl_elements
        ]
        return RootSystemData(ct, simple, roots, coroots, weyl)
    cart, roots, coroots, weyl = _simple_system(ct)
    n_roots, n_weyl = _EXPECTED[ct]
    if len(roots) != n_roots or len(weyl) != n_weyl:  # pragma: no cover
        raise AssertionError(f"{ct}: got |R|={len(roots)}, |W|={len(weyl)}")
    return RootSystemData(ct, cart, roots, coroots, weyl)


# -- weights -------------------------------------------------------------------

def _vec(lam) -> np.ndarray:
    return np.atleast_1d(np.asarray(lam, dtype=np.int64))


def weyl_orbit(rs: RootSystemData, lam) -> list[tuple[tuple[int, ...], int]]:
    """``[(sigma(lambda), sgn(sigma)) for sigma in W]``, identity first, with repetitions."""
    imgs = rs.weight_matrices @ _vec(lam)
    return [(tuple(v.tolist()), int(s)) for v, s in zip(imgs, rs.signs)]


def n_functional(lam) -> int:
    """``prod_j (|lambda_j| + 1)``."""
    return int(np.prod(np.abs(_vec(lam)) + 1))


def c_lambda(rs: RootSystemData, lam) -> float:
    """``sum_{sigma in W} 1 / N(sigma(lambda))``."""
    imgs = rs.weight_matrices @ _vec(lam)
    return math.fsum(1.0 / n_functional(v) for v in imgs)


def weight_norm(lam, norm: NormChoice | str = NormChoice.SUP) -> float:
    v = _vec(lam)
    norm = NormChoice(norm)
    if norm is NormChoice.SUP:
        return float(np.max(np.abs(v)))
    if norm is NormChoice.L1:
        return float(np.sum(np.abs(v)))
    return float(np.sqrt(np.sum(v * v)))


def dominant_weights_up_to(rs: RootSystemData, M: float, norm: NormChoice | str = NormChoice.SUP):
    """Nonzero dominant weights with ``||lambda|| <= M``, sorted lexicographically."""
    bound = int(math.floor(M))
    out = []
    for lam in itertools.product(range(bound + 1), repeat=rs.rank):
        if any(lam) and weight_norm(lam, norm) <= M:
            out.append(lam)
    return out


def distortion_constant(rs: RootSystemData, uniform: bool = False) -> int:
    """Constant c with ``||sigma(lambda)||_sup <= c ||lambda||_sup`` for all sigma.

    By default this is the exact operator norm ``max_sigma ||A_sigma||_inf``.
    With ``uniform=True`` it returns ``max_sigma sum_i ||sigma(e_i*)||_sup``,
    which is larger and does not depend on lambda.
    """
    mats = rs.weight_matrices
    if uniform:
        return int(np.max(np.abs(mats).max(axis=1).sum(axis=1)))
    return int(np.max(np.abs(mats).sum(axis=2)))


def weyl_dimension(rs: RootSystemData, lam) -> int:
    """``prod_{alpha > 0} (lambda + rho)(H_alpha) / rho(H_alpha)``."""
    v = _vec(lam)
    if np.any(v < 0):
        raise NonDominant(f"{tuple(v.tolist())} is not dominant")
    val = Fraction(1)
    for h in rs.positive_coroots:
        val *= Fraction(int(h @ (v + rs.rho)), int(h @ rs.rho))
    if val.denominator != 1:  # pragma: no cover
        raise ArithmeticError(f"non-integral dimension {val}")
    return int(val)


# -- characters and density ------------------------------------------------------

def alternating_sum(rs: RootSystemData, mu, t) -> np.ndarray:
    """``A_mu(t) = sum_sigma sgn(sigma) e(sigma(mu))`` at one or many torus points."""
    t = np.asarray(t, dtype=float)
    orbit = rs.weight_matrices @ _vec(mu)
    phase = np.exp(2j * np.pi * (t.reshape(-1, rs.rank) @ orbit.T))
    out = phase @ rs.signs.astype(float)
    return out.reshape(t.shape[:-1]) if t.ndim > 1 else out.reshape(()) if t.ndim == 1 else out


def weyl_density(rs: RootSystemData, t) -> np.ndarray:
    """``|A_rho(t)|^2``."""
    return np.abs(alternating_sum(rs, rs.rho, t)) ** 2


def weyl_density_product(rs: RootSystemData, t) -> np.ndarray:
    """``prod_{alpha in R} (1 - e(alpha)) = prod_{alpha > 0} 4 sin^2(pi alpha(t))``."""
    t = np.asarray(t, dtype=float)
    vals = t.reshape(-1, rs.rank) @ rs.positive_roots.T
    out = np.prod(4.0 * np.sin(np.pi * vals) ** 2, axis=1)
    return out.reshape(t.shape[:-1]) if t.ndim > 1 else out.reshape(())


def _mp_ratio(rs, num_orbit, den_orbit, t, dps):
    with mpmath.workdps(dps):
        tt = [mpmath.mpf(float(x)) for x in t]
        two_pi_i = 2j * mpmath.pi

        def alt(orbit):
            acc = mpmath.mpc(0)
            for v, s in zip(orbit, rs.signs):
                acc += int(s) * mpmath.exp(two_pi_i * mpmath.fsum(int(c) * x for c, x in zip(v, tt)))
            return acc

        den = alt(den_orbit)
        if abs(den) < mpmath.mpf(10) ** (-(dps - 15)):
            return None
        return complex(alt(num_orbit) / den)


_GENERIC_DIRECTION = np.array([1.0, math.sqrt(2) - 1, math.sqrt(3) - 1.5, math.pi - 3.0, math.e - 2.5])


def character_at(rs: RootSystemData, lam, t) -> complex:
    """``A_{lambda+rho}(t) / A_rho(t)``, the character of highest weight lambda.

    When ``|A_rho(t)| < 1e-8`` the ratio is evaluated in extended precision;
    at exact singular points the symmetric average over ``t +- delta v`` is
    Richardson-extrapolated in delta.
    """
    v = _vec(lam)
    if np.any(v < 0):
        raise NonDominant(f"{tuple(v.tolist())} is not dominant")
    t = np.asarray(t, dtype=float).reshape(rs.rank)
    num_orbit = rs.weight_matrices @ (v + rs.rho)
    den_orbit = rs.rho_orbit
    dens = float(weyl_density_product(rs, t))
    if dens >= SINGULAR_TOL**2:
        return complex(alternating_sum(rs, v + rs.rho, t) / alternating_sum(rs, rs.rho, t))
    if dens > 0:
        dps = 30 + int(math.ceil(-0.5 * math.log10(dens)))
        val = _mp_ratio(rs, num_orbit, den_orbit, t, dps)
        if val is not None:
            return val
    direction = _GENERIC_DIRECTION[: rs.rank]
    delta = 1e-5

    def sym(d):
        dps = 40 + 6 * len(rs.positive_roots)
        a = _mp_ratio(rs, num_orbit, den_orbit, t + d * direction, dps)
        b = _mp_ratio(rs, num_orbit, den_orbit, t - d * direction, dps)
        return 0.5 * (a + b)

    return (4.0 * sym(delta) - sym(2 * delta)) / 3.0


def characters_at(rs: RootSystemData, lam, t) -> np.ndarray:
    """Vectorized :func:`character_at` over an array of torus points."""
    t = np.asarray(t, dtype=float).reshape(-1, rs.rank)
    v = _vec(lam)
    num = alternating_sum(rs, v + rs.rho, t)
    den = alternating_sum(rs, rs.rho, t)
    out = np.empty(len(t), dtype=complex)
    ok = np.abs(den) >= SINGULAR_TOL
    out[ok] = num[ok] / den[ok]
    for i in np.nonzero(~ok)[0]:
        out[i] = character_at(rs, v, t[i])
    return out


def uniform_grid(rank: int, points_per_axis: int) -> np.ndarray:
    axes = [np.arange(points_per_axis) / points_per_axis] * rank
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, rank)


def character_inner_product(rs: RootSystemData, lam, mu, points_per_axis: int = 64) -> complex:
    """``<chi_lambda, chi_mu>`` under the Weyl integration measure.

    Uses ``chi_lambda conj(chi_mu) |A_rho|^2 = A_{lambda+rho} conj(A_{mu+rho})``
    and the uniform torus grid, which integrates trigonometric polynomials of
    degree below ``points_per_axis`` exactly.
    """
    grid = uniform_grid(rs.rank, points_per_axis)
    a = alternating_sum(rs, _vec(lam) + rs.rho, grid)
    b = alternating_sum(rs, _vec(mu) + rs.rho, grid)
    return complex(np.mean(a * np.conj(b)) / rs.order)


def density_normalization(rs: RootSystemData, points_per_axis: int = 64) -> float:
    """``(1/|W|) int_T |A_rho|^2`` on the uniform grid; should equal 1."""
    grid = uniform_grid(rs.rank, points_per_axis)
    return float(np.mean(weyl_density(rs, grid)) / rs.order)


# -- boxes ---------------------------------------------------------------------

def interval_fourier(a, b, k) -> np.ndarray:
    """``int_a^b exp(-2 pi i k t) dt`` elementwise in integer k."""
    k = np.asarray(k, dtype=float)
    out = np.empty(np.broadcast(k, a, b).shape, dtype=complex)
    a = np.broadcast_to(a, out.shape)
    b = np.broadcast_to(b, out.shape)
    k = np.broadcast_to(k, out.shape)
    zero = k == 0
    out[zero] = (b - a)[zero]
    kk = k[~zero]
    out[~zero] = (np.exp(-2j * np.pi * kk * a[~zero]) - np.exp(-2j * np.pi * kk * b[~zero])) / (2j * np.pi * kk)
    return out


def box_fourier(box: BoxSpec, k) -> np.ndarray:
    """``int_box exp(-2 pi i k . t) dt`` for one or many integer vectors k."""
    k = np.asarray(k, dtype=float).reshape(-1, box.rank)
    out = np.ones(len(k), dtype=complex)
    for j, (a, b) in enumerate(box.intervals):
        out *= interval_fourier(a, b, k[:, j])
    return out


@dataclass(frozen=True)
class DensityExpansion:
    """Fourier expansion ``|A_rho|^2 = sum_mu coeff_mu e(mu)``."""

    frequencies: np.ndarray
    coefficients: np.ndarray


def density_expansion(rs: RootSystemData) -> DensityExpansion:
    orbit = rs.rho_orbit
    acc: dict[tuple[int, ...], int] = {}
    for v, s in zip(orbit, rs.signs):
        for w, r in zip(orbit, rs.signs):
            key = tuple((v - w).tolist())
            acc[key] = acc.get(key, 0) + int(s * r)
    keys = sorted(k for k, c in acc.items() if c)
    return DensityExpansion(np.array(keys, dtype=np.int64), np.array([acc[k] for k in keys], dtype=float))


def box_measure(rs: RootSystemData, box: BoxSpec) -> float:
    """Weyl-integration measure of a small box, ``int_box |A_rho|^2 dt``.

    The density is a trigonometric polynomial, so the integral is a finite
    sum of products of interval integrals and is evaluated exactly.
    """
    if box.rank != rs.rank:
        raise ValueError("box rank does not match the root system")
    exp = density_expansion(rs)
    vals = exp.coefficients * box_fourier(box, -exp.frequencies)
    return float(math.fsum(vals.real.tolist()))


def sato_tate_cdf(theta: float) -> float:
    """``(2/pi) int_0^theta sin^2 = theta/pi - sin(2 theta)/(2 pi)``."""
    return theta / math.pi - math.sin(2 * theta) / (2 * math.pi)


class Smallness(str, enum.Enum):
    SMALL = "Small"
    NOT_SMALL = "NotSmall"
    INCONCLUSIVE = "Inconclusive"


def _frac_box(box: BoxSpec):
    return [Fraction(a) for a, _ in box.intervals], [Fraction(b) for _, b in box.intervals]


def _project(u, lo, hi):
    """Range of ``u . x`` over the closed box [lo, hi]."""
    mn = sum(min(c * a, c * b) for c, a, b in zip(u, lo, hi))
    mx = sum(max(c * a, c * b) for c, a, b in zip(u, lo, hi))
    return mn, mx


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _open_images_meet(B: np.ndarray, lo, hi, shift) -> bool:
    """Whether ``B(box)`` meets ``box + shift`` (both open), by separating axes."""
    n = len(lo)
    Bl = [[int(x) for x in row] for row in B]
    Binv = [[int(x) for x in row] for row in _int_inverse(B)]
    axes = [[int(i == j) for j in range(n)] for i in range(n)]
    axes += [list(row) for row in Binv]  # facet normals of the parallelotope
    if n == 3:
        edges_box = [[int(i == j) for j in range(3)] for i in range(3)]
        edges_par = [[Bl[i][j] for i in range(3)] for j in range(3)]
        axes += [_cross(e, f) for e in edges_box for f in edges_par]
    elif n > 3:  # pragma: no cover
        raise NotImplementedError("separating-axis test implemented for rank <= 3")
    slo = [a + s for a, s in zip(lo, shift)]
    shi = [b + s for b, s in zip(hi, shift)]
    for u in axes:
        if not any(u):
            continue
        w = [sum(Bl[i][j] * u[i] for i in range(n)) for j in range(n)]  # B^T u
        p_lo, p_hi = _project(w, lo, hi)
        q_lo, q_hi = _project(u, slo, shi)
        if p_hi <= q_lo or q_hi <= p_lo:
            return False
    return True


def is_small_box(rs: RootSystemData, box: BoxSpec) -> Smallness:
    """Decide exactly whether the W-translates of the open box are pairwise disjoint.

    For each non-identity sigma (acting on the torus by the integer matrix
    ``B``), every lattice shift k for which ``B(box)`` and ``box + k`` could
    meet is enumerated from coordinate bounds, and each pair of convex
    polytopes is tested with the separating axis theorem in exact rational
    arithmetic.
    """
    if box.rank != rs.rank:
        raise ValueError("box rank does not match the root system")
    lo, hi = _frac_box(box)
    n = rs.rank
    for idx, B in enumerate(rs.torus_matrices):
        if idx == 0:
            continue
        ranges = []
        for i in range(n):
            row = [int(x) for x in B[i]]
            mn, mx = _project(row, lo, hi)
            # (Bx)_i - y_i over the box, open at both ends
            k_lo, k_hi = mn - hi[i], mx - lo[i]
            ranges.append(range(math.floor(k_lo) + 1, math.ceil(k_hi)))
        for shift in itertools.product(*ranges):
            if _open_images_meet(B, lo, hi, shift):
                return Smallness.NOT_SMALL
    return Smallness.SMALL


def wrap_box_indicator(box: BoxSpec, t: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Membership of torus points in the closed box (intervals read modulo 1)."""
    t = np.asarray(t, dtype=float).reshape(-1, box.rank)
    inside = np.ones(len(t), dtype=bool)
    for j, (a, b) in enumerate(box.intervals):
        u = np.mod(t[:, j] - a, 1.0)
        inside &= (u <= (b - a) + tol) | (u >= 1.0 - tol)
    return inside
