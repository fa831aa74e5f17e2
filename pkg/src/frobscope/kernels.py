"""
Nonnegative band-limited kernels on R^n and the boundary profile psi.

Two kernel families are provided.

``ProductJackson``
    The product of one-dimensional kernels
    ``K1(x) = (3/4) (sin(pi x/2) / (pi x/2))^4``, whose Fourier transform is
    the piecewise cubic ``1 - 6 xi^2 + 6 |xi|^3`` on ``|xi| <= 1/2`` and
    ``2 (1 - |xi|)^3`` on ``1/2 <= |xi| <= 1``.  Its spectrum lies in the
    unit cube.
``RadialCGT``
    ``K = F^4 / ||F||_4^4`` with F the inverse transform of the indicator of
    the ball of radius 1/4, so the spectrum lies in the unit ball.  In one
    dimension this coincides with the Jackson kernel.

For either kernel the boundary profile is::

    psi(t) = 4 e^{2 pi} * tail(t/2) / (1 - tail(1)),   tail(s) = int_{|x| >= s} K

The periodic kernel ``K_M`` of degree M has Fourier coefficients
``K^(k/M)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from scipy import special

_GL16 = np.polynomial.legendre.leggauss(16)
_GL30 = np.polynomial.legendre.leggauss(30)
PSI_PREFACTOR = 4.0 * math.exp(2.0 * math.pi)


class KernelMode(str, enum.Enum):
    PRODUCT_JACKSON = "ProductJackson"
    RADIAL_CGT = "RadialCGT"


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family on R^n with the coefficient power fixed at 4."""

    mode: KernelMode = KernelMode.PRODUCT_JACKSON
    n: int = 1
    power: int = 4

    def __post_init__(self):
        object.__setattr__(self, "mode", KernelMode(self.mode))
        if self.power != 4:
            raise ValueError("only the fourth-power kernels are implemented")
        if self.n < 1:
            raise ValueError("dimension must be positive")

    @property
    def effective(self) -> "KernelSpec":
        """RadialCGT in one dimension is the Jackson kernel."""
        if self.mode is KernelMode.RADIAL_CGT and self.n == 1:
            return KernelSpec(KernelMode.PRODUCT_JACKSON, 1)
        return self


def panel_nodes(a: float, b: float, length: float = 0.5, rule=_GL16):
    """Composite Gauss-Legendre nodes and weights on [a, b]."""
    n_panels = max(1, int(math.ceil((b - a) / length)))
    edges = np.linspace(a, b, n_panels + 1)
    x, w = rule
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


# -- the one-dimensional Jackson kernel ----------------------------------------

def jackson(x) -> np.ndarray:
    """``K1(x) = (3/4) sinc^4(x/2)`` with unit integral."""
    y = 0.5 * np.pi * np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.where(y == 0, 1.0, np.sin(y) / np.where(y == 0, 1.0, y))
    return 0.75 * r**4


_PIECES = [
    (-1.0, -0.5, Polynomial([2.0, 6.0, 6.0, 2.0])),  # 2 (1 + x)^3
    (-0.5, 0.0, Polynomial([1.0, 0.0, -6.0, -6.0])),
    (0.0, 0.5, Polynomial([1.0, 0.0, -6.0, 6.0])),
    (0.5, 1.0, Polynomial([2.0, -6.0, 6.0, -2.0])),  # 2 (1 - x)^3
]


def jackson_hat(xi) -> np.ndarray:
    """Fourier transform of :func:`jackson`, supported in [-1, 1]."""
    a = np.abs(np.asarray(xi, dtype=float))
    return np.where(a <= 0.5, 1.0 - 6.0 * a**2 + 6.0 * a**3, np.where(a < 1.0, 2.0 * (1.0 - a) ** 3, 0.0))


def _sin4_tail(Y) -> np.ndarray:
    """``J(Y) = int_Y^inf sin^4(y)/y^4 dy`` for Y >= 0."""
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    out = np.empty_like(Y)
    big = Y >= 0.5
    Yb = Y[big]

    def cos_moment(a):
        # C_n = int_Y^inf cos(a y) y^-n dy, S_n likewise, raised from n = 1 to 4
        si, ci = special.sici(a * Yb)
        C, S = -ci, 0.5 * np.pi - si
        for n in (2, 3, 4):
            C, S = (
                np.cos(a * Yb) * Yb ** (1 - n) / (n - 1) - a / (n - 1) * S,
                np.sin(a * Yb) * Yb ** (1 - n) / (n - 1) + a / (n - 1) * C,
            )
        return C

    out[big] = (1.0 / Yb**3 - 4.0 * cos_moment(2.0) + cos_moment(4.0)) / 8.0
    Ys = Y[~big]
    x, w = _GL30
    ys = 0.5 * Ys[:, None] * (x[None, :] + 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(ys == 0, 1.0, (np.sin(ys) / np.where(ys == 0, 1.0, ys)) ** 4)
    out[~big] = np.pi / 3.0 - 0.5 * Ys * (f @ w)
    return out


def jackson_tail(s) -> np.ndarray:
    """``int_{|x| >= s} K1`` for s >= 0."""
    s = np.asarray(s, dtype=float)
    return ((3.0 / np.pi) * _sin4_tail(0.5 * np.pi * np.abs(s))).reshape(s.shape)


def jackson_hilbert(xi) -> np.ndarray:
    """``G(xi) = p.v. int K1^(eta) / (xi - eta) d eta`` in closed form.

    On each polynomial piece ``P`` of K1^,
    ``int_a^b P(eta)/(xi - eta) = P(xi) log|(xi - a)/(xi - b)| - int_a^b Q``
    with ``Q(eta) = (P(eta) - P(xi)) / (eta - xi)``.  The logarithms at
    interior knots combine with coefficient zero at the knot itself, because
    K1^ is continuous.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.zeros_like(xi)
    for i, x in enumerate(xi):
        total = 0.0
        logs: dict[float, float] = {}
        for a, b, P in _PIECES:
            Px = P(x)
            Q, _ = divmod(P - Polynomial([Px]), Polynomial([-x, 1.0]))
            Qi = Q.integ()
            total -= Qi(b) - Qi(a)
            logs[a] = logs.get(a, 0.0) + Px
            logs[b] = logs.get(b, 0.0) - Px
        for knot, coef in logs.items():
            if knot != x and coef != 0.0:
                total += coef * math.log(abs(x - knot))
        out[i] = total
    return out


# -- boundary profile psi -------------------------------------------------------

class Profile:
    """Boundary profile ``psi`` of a kernel and its half-line transforms.

    Methods
    -------
    psi(u)
        ``psi(u) = C tail(u/2)``.
    cos_transform(omega)
        ``int_0^inf psi(u) cos(omega u) du``.
    sin_transform(omega)
        ``int_0^inf psi(u) sin(omega u) du``.
    """

    def __init__(self, spec: KernelSpec):
        self.spec = spec.effective
        self.C = PSI_PREFACTOR / (1.0 - float(np.ravel(self.tail(1.0))[0]))

    def tail(self, s):
        return jackson_tail(s)

    def psi(self, u):
        return self.C * self.tail(0.5 * np.asarray(u, dtype=float))

    def kernel_hat_radial(self, xi):
        return jackson_hat(xi)

    def mean_abs(self) -> float:
        """``int |x| K(x) dx``."""
        return 6.0 * math.log(2.0) / math.pi**2

    def sin_abs_integral(self, omega):
        """``int_{R^n} K(x) sin(2 omega |x|) dx``."""
        omega = np.asarray(omega, dtype=float)
        return jackson_hilbert(omega / np.pi).reshape(omega.shape) / np.pi

    def cos_transform(self, omega):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.empty_like(omega)
        zero = omega == 0
        out[zero] = 2.0 * self.C * self.mean_abs()
        nz = ~zero
        out[nz] = self.C * self.sin_abs_integral(omega[nz]) / omega[nz]
        return out

    def sin_transform(self, omega):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.zeros_like(omega)
        nz = omega != 0
        out[nz] = self.C * (1.0 - self.kernel_hat_radial(omega[nz] / np.pi)) / omega[nz]
        return out


@lru_cache(maxsize=None)
def profile(spec: KernelSpec) -> Profile:
    spec = spec.effective
    if spec.n == 1:
        return Profile(spec)
    if spec.n == 2 and spec.mode is KernelMode.PRODUCT_JACKSON:
        from ._kernels2d import ProductProfile2D

        return ProductProfile2D(spec)
    if spec.n == 2 and spec.mode is KernelMode.RADIAL_CGT:
        from ._kernels2d import RadialProfile2D

        return RadialProfile2D(spec)
    from .errors import UnsupportedRank

    raise UnsupportedRank(f"boundary profile not implemented for n = {spec.n}")


def kernel_hat(spec: KernelSpec, k, M: int) -> np.ndarray:
    """``K^(k/M)`` for one or many lattice vectors k (last axis of length n)."""
    spec = spec.effective
    xi = np.asarray(k, dtype=float) / M
    if xi.ndim == 0 or spec.n == 1 and xi.shape[-1:] != (1,):
        xi = xi[..., None]
    if spec.mode is KernelMode.PRODUCT_JACKSON:
        return np.prod(jackson_hat(xi), axis=-1)
    r = np.sqrt(np.sum(xi**2, axis=-1))
    return profile(spec).kernel_hat_radial(r)
