"""Arithmetic in GF(2^m) for 2 <= m <= 16.

Elements are plain ints in the polynomial basis: bit j is the coefficient
of x^j.  Multiplication goes through exp/log tables built from a
generator of the multiplicative group, so every operation also has a
vectorized numpy form (the ``v*`` methods) used by the table builders.
"""

from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

MIN_DEGREE = 2
MAX_DEGREE = 16


def poly_mulmod(a: int, b: int, modulus: int) -> int:
    """Carry-less product of ``a`` and ``b`` reduced modulo ``modulus``."""
    deg = modulus.bit_length() - 1
    r = 0
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> deg) & 1:
            a ^= modulus
    return r


def poly_mod(a: int, m: int) -> int:
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def is_irreducible(poly: int) -> bool:
    """Trial division by every polynomial of degree <= deg/2."""
    deg = poly.bit_length() - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    if not poly & 1:
        return False
    for d in range(2, 1 << (deg // 2 + 1)):
        if poly_mod(poly, d) == 0:
            return False
    return True


@lru_cache(maxsize=None)
def default_modulus(m: int) -> int:
    """Smallest (as an integer bitmask) irreducible polynomial of degree m."""
    for low in range(1, 1 << m, 2):
        poly = (1 << m) | low
        if is_irreducible(poly):
            return poly
    raise AssertionError(f"no irreducible polynomial of degree {m}")


def modulus_from_env(m: int) -> int:
    """Reduction polynomial for degree m, honouring ``APNLAB_FIELD_POLY_<m>``."""
    raw = os.environ.get(f"APNLAB_FIELD_POLY_{m}")
    if raw is None:
        return default_modulus(m)
    return int(raw, 16)


class FieldMismatchError(ValueError):
    pass


class GF2m:
    """The finite field with 2^m elements.

    Instances are immutable; use :func:`get_field` to share tables.
    """

    def __init__(self, m: int, modulus: int | None = None):
        if not MIN_DEGREE <= m <= MAX_DEGREE:
            raise ValueError(f"m must be in [{MIN_DEGREE}, {MAX_DEGREE}], got {m}")
        if modulus is None:
            modulus = modulus_from_env(m)
        if modulus.bit_length() - 1 != m:
            raise ValueError(f"reduction polynomial {modulus:#x} does not have degree {m}")
        if not is_irreducible(modulus):
            raise ValueError(f"reduction polynomial {modulus:#x} is not irreducible")
        self.m = m
        self.modulus = modulus
        self.order = 1 << m
        self.mask = self.order - 1
        self._build_tables()

    def _build_tables(self) -> None:
        q1 = self.order - 1
        gen = self._find_generator()
        exp = np.zeros(2 * q1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        v = 1
        for i in range(q1):
            exp[i] = v
            log[v] = i
            v = poly_mulmod(v, gen, self.modulus)
        exp[q1:] = exp[:q1]
        self.generator = gen
        self._exp = exp
        self._log = log
        self._exp_list = exp.tolist()
        self._log_list = log.tolist()
        elems = np.arange(self.order, dtype=np.int64)
        tr = np.zeros(self.order, dtype=np.int64)
        for i in range(self.m):
            tr ^= self.vfrob(elems, i)
        assert np.all((tr == 0) | (tr == 1))
        self._trace = tr.astype(np.uint8)
        for a in (exp, log, self._trace):
            a.setflags(write=False)

    def _find_generator(self) -> int:
        q1 = self.order - 1
        primes = [p for p in range(2, q1 + 1) if q1 % p == 0 and all(p % d for d in range(2, int(p**0.5) + 1))]
        for g in range(2, self.order):
            if all(self._slow_pow(g, q1 // p) != 1 for p in primes):
                return g
        raise AssertionError("multiplicative group has no generator")

    def _slow_pow(self, x: int, e: int) -> int:
        r = 1
        while e:
            if e & 1:
                r = poly_mulmod(r, x, self.modulus)
            x = poly_mulmod(x, x, self.modulus)
            e >>= 1
        return r

    def __repr__(self) -> str:
        return f"GF2m(m={self.m}, modulus={self.modulus:#x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF2m) and (self.m, self.modulus) == (other.m, other.modulus)

    def __hash__(self) -> int:
        return hash((self.m, self.modulus))

    def check(self, *xs: int) -> None:
        for x in xs:
            if not 0 <= x < self.order:
                raise FieldMismatchError(f"{x:#x} is not an element of GF(2^{self.m})")

    # scalar arithmetic

    def add(self, x: int, y: int) -> int:
        self.check(x, y)
        return x ^ y

    def mul(self, x: int, y: int) -> int:
        self.check(x, y)
        if x == 0 or y == 0:
            return 0
        return self._exp_list[self._log_list[x] + self._log_list[y]]

    def inv(self, x: int) -> int:
        self.check(x)
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self._exp_list[(self.order - 1 - self._log_list[x]) % (self.order - 1)]

    def div(self, x: int, y: int) -> int:
        return self.mul(x, self.inv(y))

    def pow(self, x: int, e: int) -> int:
        self.check(x)
        if x == 0:
            if e == 0:
                return 1
            if e < 0:
                raise ZeroDivisionError("0 has no inverse")
            return 0
        return self._exp_list[(self._log_list[x] * e) % (self.order - 1)]

    def frob(self, x: int, k: int) -> int:
        """x^(2^k), with k taken mod m (negative k gives the inverse map)."""
        return self.pow(x, 1 << (k % self.m))

    def sqrt(self, x: int) -> int:
        return self.frob(x, self.m - 1)

    def trace(self, x: int) -> int:
        self.check(x)
        return int(self._trace[x])

    def elements(self) -> range:
        return range(self.order)

    def nonzero(self) -> range:
        return range(1, self.order)

    # vectorized arithmetic on int64 arrays

    def vmul(self, x, y) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        r = self._exp[self._log[x] + self._log[y]]
        return np.where((x == 0) | (y == 0), 0, r)

    def vpow(self, x, e: int) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        r = self._exp[(self._log[x] * e) % (self.order - 1)]
        if e == 0:
            return np.ones_like(x)
        return np.where(x == 0, 0, r)

    def vfrob(self, x, k: int) -> np.ndarray:
        return self.vpow(x, 1 << (k % self.m))

    def vinv(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if np.any(x == 0):
            raise ZeroDivisionError("0 has no inverse")
        return self._exp[(self.order - 1 - self._log[x]) % (self.order - 1)]

    def vtrace(self, x) -> np.ndarray:
        return self._trace[np.asarray(x, dtype=np.int64)]

    def trace_dual(self) -> np.ndarray:
        """For each y, the m-bit word whose bit j is Tr(x^j * y).

        Tr(b*y) is then the parity of ``b & trace_dual()[y]``.
        """
        elems = np.arange(self.order, dtype=np.int64)
        out = np.zeros(self.order, dtype=np.int64)
        for j in range(self.m):
            out |= self.vtrace(self.vmul(elems, 1 << j)).astype(np.int64) << j
        return out


@lru_cache(maxsize=None)
def _cached_field(m: int, modulus: int) -> GF2m:
    return GF2m(m, modulus)


def get_field(m: int, modulus: int | None = None) -> GF2m:
    """Shared field instance for degree m (env override applies when modulus is None)."""
    if not MIN_DEGREE <= m <= MAX_DEGREE:
        raise ValueError(f"m must be in [{MIN_DEGREE}, {MAX_DEGREE}], got {m}")
    return _cached_field(m, modulus if modulus is not None else modulus_from_env(m))
