"""
Exact arithmetic in F_p and F_{p^m}, trace maps, characters and Gauss sums.

Elements of F_{p^m} are coordinate vectors with respect to the power basis
1, X, ..., X^{m-1} of F_p[X]/(f).  Internally every element also has an
integer *encoding* ``sum(c_i * p**i)``, which is what the lookup tables are
indexed by.
"""

from __future__ import annotations

import cmath
import math
import os
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from .errors import CapExceeded, NotPrime, TrivialCharacter

DEFAULT_CAP = 2**40
TABLE_CAP = 2**22
_BLOCK = 4096


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def primes_up_to(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[:2] = b"\x00\x00"
    for i in range(2, int(n**0.5) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytes(len(range(i * i, n + 1, i)))
    return [i for i, v in enumerate(sieve) if v]


def csum(z: np.ndarray) -> complex:
    """Correctly rounded sum of a complex array (independent of order)."""
    z = np.asarray(z)
    return complex(math.fsum(z.real.tolist()), math.fsum(z.imag.tolist()))


# -- polynomials over F_p, coefficient lists in ascending degree ------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], f: Sequence[int], p: int) -> list[int]:
    a = _trim([c % p for c in a])
    n = len(f) - 1
    inv_lead = pow(f[-1], -1, p)
    while len(a) - 1 >= n:
        c = (a[-1] * inv_lead) % p
        shift = len(a) - 1 - n
        for i, fc in enumerate(f):
            a[shift + i] = (a[shift + i] - c * fc) % p
        _trim(a)
    return a


def _poly_mulmod(a, b, f, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _poly_mod(out, f, p)


def _poly_powmod(a, e, f, p):
    result = [1]
    base = _poly_mod(list(a), f, p)
    while e:
        if e & 1:
            result = _poly_mulmod(result, base, f, p)
        base = _poly_mulmod(base, base, f, p)
        e >>= 1
    return result


def _poly_sub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _poly_gcd(a, b, p):
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _poly_mod(a, b, p)
    return a


def is_irreducible(f: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    m = len(f) - 1
    if m < 1:
        return False
    if m == 1:
        return True
    x = [0, 1]
    if _poly_sub(_poly_powmod(x, p**m, f, p), x, p):
        return False
    for r in prime_factors(m):
        h = _poly_sub(_poly_powmod(x, p ** (m // r), f, p), x, p)
        if len(_poly_gcd(f, h, p)) != 1:
            return False
    return True


def _least_irreducible(p: int, m: int) -> tuple[int, ...]:
    # lexicographic in (c_0, c_1, ..., c_{m-1}), c_0 most significant;
    # c_0 = 0 means divisible by x, so the scan starts at c_0 = 1
    for idx in range(p ** (m - 1), p**m):
        coeffs = []
        rest = idx
        for _ in range(m):
            coeffs.append(rest % p)
            rest //= p
        coeffs.reverse()
        f = coeffs + [1]
        if is_irreducible(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


# -- field types ---------------------------------------------------------------

@dataclass(frozen=True)
class PrimeField:
    p: int

    def __post_init__(self):
        if not is_prime(self.p) or self.p < 3:
            raise NotPrime(f"{self.p} is not an odd prime")

    @property
    def q(self) -> int:
        return self.p


@dataclass(frozen=True)
class FieldElement:
    coeffs: tuple[int, ...]

    def encode(self, p: int) -> int:
        return sum(c * p**i for i, c in enumerate(self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)


@dataclass(frozen=True)
class MultCharacter:
    """The character ``g^j -> exp(2 pi i j k / d)`` for the field generator g."""

    order: int
    log_exponent: int

    @property
    def is_trivial(self) -> bool:
        return self.log_exponent % self.order == 0


class ExtField:
    """The finite field F_{p^m} with a fixed modulus and generator.

    Construct with :func:`make_ext_field`; instances are treated as immutable.
    """

    def __init__(self, p: int, m: int, modulus: tuple[int, ...], generator: FieldElement):
        self.p = p
        self.m = m
        self.q = p**m
        self.modulus = modulus
        self.generator = generator
        self._pows = np.array([p**i for i in range(m)], dtype=np.int64)

    def __repr__(self):
        return f"ExtField(p={self.p}, m={self.m}, modulus={self.modulus})"

    def __eq__(self, other):
        return (
            isinstance(other, ExtField)
            and (self.p, self.m, self.modulus, self.generator)
            == (other.p, other.m, other.modulus, other.generator)
        )

    def __hash__(self):
        return hash((self.p, self.m, self.modulus, self.generator))

    # element construction / arithmetic
    def element(self, value) -> FieldElement:
        if isinstance(value, FieldElement):
            coeffs = list(value.coeffs)
        elif isinstance(value, (int, np.integer)):
            v = int(value)
            v %= self.q
            coeffs = []
            for _ in range(self.m):
                coeffs.append(v % self.p)
                v //= self.p
        else:
            coeffs = [int(c) % self.p for c in value]
        if len(coeffs) != self.m:
            raise ValueError(f"expected {self.m} coordinates, got {len(coeffs)}")
        return FieldElement(tuple(c % self.p for c in coeffs))

    def decode(self, enc: int) -> FieldElement:
        return self.element(int(enc))

    def encode(self, x: FieldElement) -> int:
        return x.encode(self.p)

    @property
    def zero(self) -> FieldElement:
        return FieldElement((0,) * self.m)

    @property
    def one(self) -> FieldElement:
        return FieldElement((1,) + (0,) * (self.m - 1))

    def _pad(self, a: list[int]) -> FieldElement:
        a = list(a) + [0] * (self.m - len(a))
        return FieldElement(tuple(a))

    def add(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return FieldElement(tuple((x + y) % self.p for x, y in zip(a.coeffs, b.coeffs)))

    def neg(self, a: FieldElement) -> FieldElement:
        return FieldElement(tuple((-x) % self.p for x in a.coeffs))

    def sub(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.add(a, self.neg(b))

    def mul(self, a: FieldElement, b: FieldElement) -> FieldElement:
        if self.m == 1:
            return FieldElement(((a.coeffs[0] * b.coeffs[0]) % self.p,))
        return self._pad(_poly_mulmod(list(a.coeffs), list(b.coeffs), self.modulus, self.p))

    def pow(self, a: FieldElement, e: int) -> FieldElement:
        if e < 0:
            return self.pow(self.inv(a), -e)
        if self.m == 1:
            return FieldElement((pow(a.coeffs[0], e, self.p),))
        return self._pad(_poly_powmod(list(a.coeffs), e, self.modulus, self.p))

    def inv(self, a: FieldElement) -> FieldElement:
        if a.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return self.pow(a, self.q - 2)

    def div(self, a: FieldElement, b: FieldElement) -> FieldElement:
        return self.mul(a, self.inv(b))

    # linear algebra helpers
    def _mul_matrix(self, a: FieldElement) -> np.ndarray:
        """Matrix of ``y -> a*y`` acting on coordinate column vectors."""
        cols = []
        basis = [0] * self.m
        for i in range(self.m):
            e = list(basis)
            e[i] = 1
            cols.append(self.mul(a, FieldElement(tuple(e))).coeffs)
        return np.array(cols, dtype=np.int64).T

    @cached_property
    def trace_vector(self) -> np.ndarray:
        """``Tr(X^i)`` for the power basis, so ``Tr(x) = <coeffs, trace_vector> mod p``."""
        x = self._pad([0, 1]) if self.m > 1 else self.one
        out = []
        power = self.one
        for _ in range(self.m):
            out.append(int(np.trace(self._mul_matrix(power))) % self.p)
            power = self.mul(power, x)
        return np.array(out, dtype=np.int64)

    @cached_property
    def roots_of_unity(self) -> np.ndarray:
        """``exp(2 pi i j / p)`` for j = 0..p-1."""
        return np.exp(2j * np.pi * np.arange(self.p) / self.p)

    def digits(self, enc: np.ndarray) -> np.ndarray:
        enc = np.asarray(enc, dtype=np.int64)
        return (enc[..., None] // self._pows) % self.p

    def traces_of_encodings(self, enc: np.ndarray) -> np.ndarray:
        return (self.digits(enc) @ self.trace_vector) % self.p

    # discrete logarithms and power tables
    def _geometric(self, x0: FieldElement, ratio: FieldElement, count: int) -> np.ndarray:
        """Encodings of ``x0 * ratio**i`` for i = 0..count-1.

        The first block is built by repeated multiplication; later blocks are
        the first block times a power of ``ratio``, applied as a matrix.
        """
        dtype = np.int64 if self.m * self.p**2 < 2**62 else object
        b = min(_BLOCK, count)
        head = []
        x = x0
        for _ in range(b):
            head.append(x.coeffs)
            x = self.mul(x, ratio)
        vecs = np.array(head, dtype=dtype)
        out = np.empty(count, dtype=np.int64)
        pows = self._pows.astype(dtype)
        out[:b] = (vecs @ pows).astype(np.int64)
        if b == count:
            return out
        step = self._mul_matrix(self.pow(ratio, b)).astype(dtype)
        shift = np.eye(self.m, dtype=np.int64).astype(dtype)
        for s in range(b, count, b):
            shift = (step @ shift) % self.p
            take = min(b, count - s)
            out[s : s + take] = (((vecs[:take] @ shift.T) % self.p) @ pows).astype(np.int64)
        return out

    def _power_block(self, start: int, count: int) -> np.ndarray:
        """Encodings of g^start, ..., g^(start+count-1)."""
        n = self.q - 1
        start %= n
        if self.has_tables:
            idx = (start + np.arange(count)) % n
            return self.exp_table[idx]
        return self._geometric(self.pow(self.generator, start), self.generator, count)

    @property
    def has_tables(self) -> bool:
        return self.q <= TABLE_CAP

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.has_tables:
            raise CapExceeded(f"lookup tables limited to q <= {TABLE_CAP}")
        cache = _cache_path(self)
        if cache is not None and cache.exists():
            exp = np.load(cache)
        else:
            exp = self._compute_exp_table()
            if cache is not None:
                tmp = cache.with_suffix(".tmp.npy")
                np.save(tmp, exp)
                os.replace(tmp, cache)
        log = np.full(self.q, -1, dtype=np.int64)
        log[exp] = np.arange(self.q - 1, dtype=np.int64)
        return exp, log

    def _compute_exp_table(self) -> np.ndarray:
        return self._geometric(self.one, self.generator, self.q - 1)

    @property
    def exp_table(self) -> np.ndarray:
        return self._tables[0]

    @property
    def log_table(self) -> np.ndarray:
        return self._tables[1]

    @cached_property
    def exp_traces(self) -> np.ndarray:
        """``Tr(g^j)`` for j = 0..q-2."""
        return self.traces_of_encodings(self.exp_table)

    def dlog(self, x: FieldElement) -> int:
        """Discrete logarithm base the generator (table lookup or baby-step giant-step)."""
        if x.is_zero():
            raise ZeroDivisionError("log of zero")
        if self.has_tables:
            return int(self.log_table[self.encode(x)])
        n = self.q - 1
        s = math.isqrt(n) + 1
        baby = self._geometric(self.one, self.generator, s)
        order = np.argsort(baby, kind="stable")
        baby_sorted = baby[order]
        giant = self.pow(self.generator, -s)
        chunk = 1 << 14
        for i0 in range(0, s + 1, chunk):
            take = min(chunk, s + 1 - i0)
            ys = self._geometric(self.mul(x, self.pow(giant, i0)), giant, take)
            pos = np.searchsorted(baby_sorted, ys)
            pos = np.minimum(pos, s - 1)
            hit = np.nonzero(baby_sorted[pos] == ys)[0]
            if hit.size:
                i = i0 + int(hit[0])
                return (i * s + int(order[pos[hit[0]]])) % n
        raise AssertionError("discrete log not found")  # pragma: no cover

    def iter_power_traces(self, start: int = 0, count: int | None = None) -> Iterator[np.ndarray]:
        """Yield traces of consecutive generator powers in blocks."""
        n = self.q - 1
        count = n if count is None else count
        done = 0
        while done < count:
            take = min(1 << 16, count - done)
            yield self.traces_of_encodings(self._power_block(start + done, take))
            done += take


def _cache_path(field: ExtField) -> Path | None:
    root = os.environ.get("FROBSCOPE_CACHE_DIR")
    if not root:
        return None
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    tag = "_".join(str(c) for c in field.modulus)
    return path / f"exp_p{field.p}_m{field.m}_f{tag}_g{field.encode(field.generator)}.npy"


def make_ext_field(p: int, m: int = 1, cap: int = DEFAULT_CAP) -> ExtField:
    """Build F_{p^m} deterministically.

    The modulus is the lexicographically least monic irreducible polynomial
    of degree m (coefficients compared from the constant term upwards; for
    m = 1 this is ``x``), and the generator is the multiplicative generator
    with the least integer encoding ``sum(c_i p^i)``.
    """
    if not is_prime(p) or p < 3:
        raise NotPrime(f"{p} is not an odd prime")
    if m < 1:
        raise ValueError("extension degree must be >= 1")
    if p**m > cap:
        raise CapExceeded(f"{p}^{m} exceeds cap {cap}")
    modulus = (0, 1) if m == 1 else _least_irreducible(p, m)
    tmp = ExtField(p, m, modulus, FieldElement((1,) + (0,) * (m - 1)))
    n = p**m - 1
    factors = prime_factors(n)
    # for m > 1 the elements of F_p (encodings < p) have order dividing p - 1
    for enc in range(1 if m == 1 else p, p**m):
        g = tmp.element(enc)
        if all(tmp.pow(g, n // r) != tmp.one for r in factors):
            return ExtField(p, m, modulus, g)
    raise AssertionError("no generator found")  # pragma: no cover


def frobenius_trace(field: ExtField, x: FieldElement) -> int:
    """``sum_i x^(p^i)`` computed by repeated Frobenius; reference implementation."""
    acc = field.zero
    y = x
    for _ in range(field.m):
        acc = field.add(acc, y)
        y = field.pow(y, field.p)
    if any(acc.coeffs[1:]):
        raise AssertionError("trace did not land in F_p")
    return acc.coeffs[0]


def trace(field: ExtField, x: FieldElement) -> int:
    """Absolute trace ``Tr_{F_{p^m}/F_p}(x)`` as a residue mod p."""
    return int(np.dot(np.array(x.coeffs, dtype=np.int64), field.trace_vector) % field.p)


def additive_char(field: ExtField, x: FieldElement) -> complex:
    return complex(field.roots_of_unity[trace(field, x)])


def _check_character(field: ExtField, chi: MultCharacter):
    if (field.q - 1) % chi.order:
        raise ValueError(f"character order {chi.order} does not divide {field.q - 1}")


def mult_char_value(field: ExtField, chi: MultCharacter, x: FieldElement) -> complex:
    """``chi(x)``, with ``chi(0) = 0``."""
    _check_character(field, chi)
    if x.is_zero():
        return 0j
    j = field.dlog(x)
    return cmath.exp(2j * math.pi * ((j * chi.log_exponent) % chi.order) / chi.order)


def gauss_sum(field: ExtField, chi: MultCharacter) -> complex:
    """``g(chi, psi) = sum_{x != 0} chi(x) psi(x)`` by direct summation."""
    _check_character(field, chi)
    if chi.is_trivial:
        raise TrivialCharacter("Gauss sum requested for the trivial character")
    d, k = chi.order, chi.log_exponent % chi.order
    zeta = np.exp(2j * np.pi * np.arange(d) / d)
    omega = field.roots_of_unity
    parts = []
    start = 0
    for tr in field.iter_power_traces():
        j = start + np.arange(len(tr), dtype=np.int64)
        parts.append(zeta[(j * k) % d] * omega[tr])
        start += len(tr)
    return csum(np.concatenate(parts))


def all_gauss_sums(field: ExtField) -> np.ndarray:
    """Gauss sums of every character ``(q-1, k)``, k = 0..q-2, via one FFT.

    Entry k is ``sum_j exp(2 pi i jk/(q-1)) psi(g^j)``; entry 0 is the sum of
    the additive character over F_q^*, i.e. -1.
    """
    a = field.roots_of_unity[field.exp_traces]
    return np.fft.ifft(a) * (field.q - 1)
