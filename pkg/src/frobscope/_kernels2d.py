"""Two-dimensional boundary profiles (product Jackson and radial kernels).

Both are radial integrals evaluated on fixed composite Gauss-Legendre
grids; the circle integrals of the product kernel use a number of panels
proportional to the radius so the oscillation of ``K1(r sin phi)`` is
resolved.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np
from scipy import special

from .kernels import (
    PSI_PREFACTOR,
    KernelSpec,
    jackson,
    jackson_hilbert,
    jackson_tail,
    panel_nodes,
)

R_MAX = 120.0


def _phi_nodes(r: float, upper: float):
    length = min(0.1, 1.0 / (1.0 + r))
    return panel_nodes(0.0, upper, length=length)


class ProductProfile2D:
    """Profile of ``K(x) = K1(x1) K1(x2)`` with the Euclidean tail ``int_{|x| >= s} K``."""

    def __init__(self, spec: KernelSpec):
        self.spec = spec
        self.C = PSI_PREFACTOR / (1.0 - float(np.ravel(self.tail(1.0))[0]))

    def tail(self, rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        out = np.empty_like(rho)
        for i, r in enumerate(rho):
            if r == 0:
                out[i] = 1.0
                continue
            phi, w = _phi_nodes(r, 0.5 * math.pi)
            inner = jackson(r * np.sin(phi)) * jackson_tail(r * np.cos(phi)) * r * np.cos(phi)
            out[i] = float(jackson_tail(r)) + 2.0 * float(inner @ w)
        return out

    def psi(self, u):
        return self.C * self.tail(0.5 * np.asarray(u, dtype=float))

    def circle_density(self, r):
        """``S2(r) = int_{|x| = r} K ds``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r)
        # bucket radii so each bucket shares one angular grid fine enough for its largest radius
        edges = [0.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 96.0, np.inf]
        for lo, hi in zip(edges[:-1], edges[1:]):
            sel = (r >= lo) & (r < hi)
            if not np.any(sel):
                continue
            phi, w = _phi_nodes(float(np.max(r[sel])), 0.25 * math.pi)
            rr = r[sel][:, None]
            vals = jackson(rr * np.cos(phi)[None, :]) * jackson(rr * np.sin(phi)[None, :])
            out[sel] = 8.0 * r[sel] * (vals @ w)
        return out

    @cached_property
    def _radial_grid(self):
        r, w = panel_nodes(0.0, R_MAX, length=0.5)
        excess = self.circle_density(r) - 4.0 * jackson(r)
        return r, w, excess

    def mean_abs(self) -> float:
        r, w, excess = self._radial_grid
        return 2.0 * 6.0 * math.log(2.0) / math.pi**2 + float((r * excess) @ w)

    def sin_abs_integral(self, omega):
        """``int K sin(2 omega |x|) dx = int_0^inf S2(r) sin(2 omega r) dr``.

        Written as ``4 int_0^inf K1 sin(2 omega r) dr`` (closed form) plus the
        integral of the rapidly decaying excess ``S2 - 4 K1``.
        """
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        r, w, excess = self._radial_grid
        corr = np.sin(2.0 * np.outer(omega, r)) @ (excess * w)
        return 2.0 * jackson_hilbert(omega / np.pi) / np.pi + corr

    def cos_transform(self, omega):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.empty_like(omega)
        zero = omega == 0
        out[zero] = 2.0 * self.C * self.mean_abs()
        nz = ~zero
        out[nz] = self.C * self.sin_abs_integral(omega[nz]) / omega[nz]
        return out

    def kernel_hat_radial(self, xi):  # pragma: no cover - product kernel is not radial
        raise TypeError("the product kernel has no radial transform")

    def kernel(self, x):
        x = np.asarray(x, dtype=float)
        return jackson(x[..., 0]) * jackson(x[..., 1])


class RadialProfile2D:
    """``K = F^4 / Z`` with ``F(r) = J1(pi r / 2) / (4 r)``, the transform of the radius-1/4 disc."""

    R_RADIAL = 400.0

    def __init__(self, spec: KernelSpec):
        self.spec = spec
        r, w = panel_nodes(0.0, self.R_RADIAL, length=0.5)
        f4 = self._f(r) ** 4
        self.Z = 2.0 * math.pi * float((f4 * r) @ w)
        self._r, self._w = r, w
        self._k = f4 / self.Z
        self.C = PSI_PREFACTOR / (1.0 - float(np.ravel(self.tail(1.0))[0]))

    @staticmethod
    def _f(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(r == 0, math.pi / 16.0, special.j1(0.5 * math.pi * r) / (4.0 * np.where(r == 0, 1.0, r)))

    def kernel_radial(self, r):
        return self._f(r) ** 4 / self.Z

    def kernel(self, x):
        x = np.asarray(x, dtype=float)
        return self.kernel_radial(np.sqrt(np.sum(x**2, axis=-1)))

    def kernel_hat_radial(self, xi):
        """``K^(xi) = 2 pi int_0^inf K(r) J0(2 pi xi r) r dr`` (Hankel transform), zero for ``xi >= 1``."""
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        shape = xi.shape
        flat = xi.ravel()
        out = np.zeros_like(flat)
        inside = flat < 1.0
        vals, inv = np.unique(flat[inside], return_inverse=True)
        if vals.size:
            kr = self._k * self._r * self._w
            hv = np.empty_like(vals)
            for s in range(0, len(vals), 256):
                blk = vals[s : s + 256]
                hv[s : s + 256] = 2.0 * math.pi * (special.j0(2.0 * math.pi * np.outer(blk, self._r)) @ kr)
            out[inside] = np.clip(hv[inv], 0.0, 1.0)
        return out.reshape(shape)

    def tail(self, rho):
        rho = np.atleast_1d(np.asarray(rho, dtype=float))
        out = np.empty_like(rho)
        for i, s in enumerate(rho):
            r, w = panel_nodes(s, self.R_RADIAL, length=0.5)
            out[i] = 2.0 * math.pi * float((self.kernel_radial(r) * r) @ w)
        return out

    def psi(self, u):
        return self.C * self.tail(0.5 * np.asarray(u, dtype=float))

    def circle_density(self, r):
        r = np.asarray(r, dtype=float)
        return 2.0 * math.pi * r * self.kernel_radial(r)

    def mean_abs(self) -> float:
        return 2.0 * math.pi * float((self._k * self._r**2) @ self._w)

    def sin_abs_integral(self, omega):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        s2 = 2.0 * math.pi * self._r * self._k
        return np.sin(2.0 * np.outer(omega, self._r)) @ (s2 * self._w)

    def cos_transform(self, omega):
        omega = np.atleast_1d(np.asarray(omega, dtype=float))
        out = np.empty_like(omega)
        zero = omega == 0
        out[zero] = 2.0 * self.C * self.mean_abs()
        nz = ~zero
        out[nz] = self.C * self.sin_abs_integral(omega[nz]) / omega[nz]
        return out
