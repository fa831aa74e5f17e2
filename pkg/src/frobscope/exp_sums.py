"""
Kloosterman and Airy sums over F_{q^m} and their Frobenius angles.

Single values are summed directly with correctly rounded accumulation.
Whole sweeps are computed at once by writing both sums as cyclic
convolutions over the exponent group ``j -> g^j`` and using the FFT::

    Kl(g^j) = sum_i psi(g^i) psi(g^(j-i))         (self-convolution)
    Ai(g^j) = 1 + sum_i psi(g^(3i)) psi(g^(i+j))  (correlation)

where psi is the standard additive character.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .errors import BadCharacteristic, NoCubicCharacters, OutOfRange, UnexpectedProduct, ZeroParameter
from .finite_field import ExtField, FieldElement, MultCharacter, PrimeField, csum, gauss_sum, make_ext_field

CLAMP_TOL = 1e-6


class SumKind(str, enum.Enum):
    KLOOSTERMAN = "kloosterman"
    AIRY = "airy"


def weil_scale(field: ExtField) -> float:
    """``2 q^(m/2)``, the Weil bound for both sums."""
    return 2.0 * math.sqrt(field.q)


def _imag_check(total: complex, field: ExtField, what: str) -> float:
    if abs(total.imag) >= 1e-6 * math.sqrt(field.q):
        raise ArithmeticError(f"{what} sum has imaginary part {total.imag:.3g}")
    return total.real


def _all_power_traces(field: ExtField) -> np.ndarray:
    """``Tr(g^j)`` for j = 0..q-2."""
    if field.has_tables:
        return field.exp_traces
    return np.concatenate(list(field.iter_power_traces()))


def kloosterman(field: ExtField, x: FieldElement) -> float:
    """``Kl(x) = sum_{z != 0} psi(z + x/z)`` by direct summation."""
    if x.is_zero():
        raise ZeroParameter("Kloosterman parameter must be nonzero")
    n = field.q - 1
    tr = _all_power_traces(field)
    i = np.arange(n)
    # z = g^i, x/z = g^(j - i)
    terms = field.roots_of_unity[(tr + tr[(field.dlog(x) - i) % n]) % field.p]
    return _imag_check(csum(terms), field, "Kloosterman")


def _check_airy_field(field: ExtField):
    if field.p <= 3:
        raise BadCharacteristic(f"Airy sums need p > 3, got p = {field.p}")


def airy(field: ExtField, x: FieldElement) -> float:
    """``Ai(x) = sum_z psi(z^3 + x z)`` by direct summation."""
    _check_airy_field(field)
    n = field.q - 1
    tr = _all_power_traces(field)
    i = np.arange(n)
    tr_cube = tr[(3 * i) % n]
    tr_lin = 0 if x.is_zero() else tr[(i + field.dlog(x)) % n]
    terms = field.roots_of_unity[(tr_cube + tr_lin) % field.p]
    return _imag_check(1.0 + csum(terms), field, "Airy")


def kloosterman_by_power(field: ExtField) -> np.ndarray:
    """``Kl(g^j)`` for j = 0..q-2 via FFT."""
    a = field.roots_of_unity[_all_power_traces(field)]
    fa = np.fft.fft(a)
    return np.fft.ifft(fa * fa).real


def airy_by_power(field: ExtField) -> tuple[float, np.ndarray]:
    """``(Ai(0), [Ai(g^j) for j = 0..q-2])`` via FFT."""
    _check_airy_field(field)
    n = field.q - 1
    c = field.roots_of_unity[_all_power_traces(field)]
    b = c[(3 * np.arange(n)) % n]
    corr = np.fft.ifft(np.conj(np.fft.fft(np.conj(b))) * np.fft.fft(c))
    ai0 = 1.0 + csum(b).real
    return ai0, 1.0 + corr.real


def airy_alpha(field: PrimeField | ExtField) -> float:
    """Positive real square root of ``prod_{chi^3 = 1, chi != 1} (-g(chi, psi))^(-1)``.

    The product of the two cubic Gauss sums is checked to be real, positive
    and equal to q before the root is taken.
    """
    F = field if isinstance(field, ExtField) else make_ext_field(field.p)
    q = F.q
    if (q - 1) % 3:
        raise NoCubicCharacters(f"3 does not divide q - 1 = {q - 1}")
    prod = complex(1.0)
    for k in (1, 2):
        prod *= -gauss_sum(F, MultCharacter(3, k))
    if abs(prod.imag) > 1e-6 * q or prod.real <= 0 or abs(prod - q) > 1e-6 * q:
        raise UnexpectedProduct(f"cubic Gauss sum product is {prod}")
    return prod.real ** -0.5


def angle_from_sum(raw: float, scale: float) -> float:
    """``arccos(raw / scale)`` with the ratio clamped to [-1, 1]."""
    r = raw / scale
    if abs(r) > 1 + CLAMP_TOL:
        raise OutOfRange(f"|{raw}| exceeds the bound {scale}")
    return math.acos(min(1.0, max(-1.0, r)))


def angles_from_sums(raw: np.ndarray, scale: float) -> np.ndarray:
    r = np.asarray(raw, dtype=float) / scale
    if r.size and np.max(np.abs(r)) > 1 + CLAMP_TOL:
        raise OutOfRange(f"max |sum| / bound = {np.max(np.abs(r))}")
    return np.arccos(np.clip(r, -1.0, 1.0))


@dataclass(frozen=True)
class AngleSample:
    x: FieldElement
    theta: float
    raw_sum: float


@dataclass
class AngleSweep:
    """All angles of one family over one field.

    The data are held as arrays; ``samples`` builds the per-x records lazily.
    ``x_index`` is the integer encoding of the parameter x.
    """

    field: ExtField
    kind: SumKind
    x_index: np.ndarray
    raw_sum: np.ndarray
    theta: np.ndarray = dc_field(repr=False)

    def __len__(self):
        return len(self.x_index)

    @property
    def samples(self) -> list[AngleSample]:
        F = self.field
        return [
            AngleSample(F.decode(int(e)), float(t), float(r))
            for e, t, r in zip(self.x_index, self.theta, self.raw_sum)
        ]

    def to_csv(self, path=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x_index", "raw_sum", "theta"])
        for e, r, t in zip(self.x_index.tolist(), self.raw_sum.tolist(), self.theta.tolist()):
            w.writerow([e, format(r, ".17g"), format(t, ".17g")])
        text = buf.getvalue()
        if path is not None:
            from .io import atomic_write_text

            atomic_write_text(Path(path), text)
        return text


def angle_sweep(field: ExtField, kind, method: str = "fft", workers: int = 1) -> AngleSweep:
    """Angles for every admissible parameter.

    Kloosterman samples come in generator-power order ``x = g^0, g^1, ...``;
    Airy samples in increasing encoding order ``x = 0, 1, ..., q-1``.
    ``method="direct"`` sums every value separately (optionally over a thread
    pool); the default uses two FFTs.
    """
    kind = SumKind(kind)
    n = field.q - 1
    scale = weil_scale(field)
    if kind is SumKind.KLOOSTERMAN:
        x_index = field._power_block(0, n)
        if method == "fft":
            raw = kloosterman_by_power(field)
        else:
            raw = _direct(field, kloosterman, x_index, workers)
    else:
        _check_airy_field(field)
        x_index = np.arange(field.q, dtype=np.int64)
        if method == "fft":
            ai0, by_power = airy_by_power(field)
            raw = np.empty(field.q)
            raw[0] = ai0
            enc = field._power_block(0, n)
            raw[enc] = by_power
        else:
            raw = _direct(field, airy, x_index, workers)
    theta = angles_from_sums(raw, scale)
    return AngleSweep(field, kind, x_index, raw, theta)


def _direct(field, fn, x_index, workers):
    def one(e):
        return fn(field, field.decode(int(e)))

    if workers <= 1:
        return np.array([one(e) for e in x_index])
    with ThreadPoolExecutor(workers) as pool:
        return np.array(list(pool.map(one, x_index)))
