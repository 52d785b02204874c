"""EA/CCZ-invariant analyzers over FunctionTables.

All analyzers treat a table as a map on n = 2m bit words.  Where a
field pairing is needed (Walsh coefficients, ortho-derivative), the inner
product on K^2 is <(b1, b2), (y1, y2)> = Tr(b1 y1) + Tr(b2 y2).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from apnlab.bitlinear import nullspace
from apnlab.functions import FunctionTable
from apnlab.gf2m import GF2m, get_field

# elements processed per vectorized block
_BLOCK = 1 << 22


class NotQuadraticAPNError(ValueError):
    pass


@dataclass(frozen=True)
class DifferentialSpectrum:
    """``counts[d]`` = number of pairs (a, b), a != 0, with exactly d solutions."""

    counts: dict[int, int]

    @property
    def delta(self) -> int:
        return max(self.counts)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def as_tuple(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.counts.items()))


@dataclass(frozen=True)
class WalshReport:
    n: int
    abs_counts: dict[int, int]
    signed_counts: dict[int, int]
    parseval_ok: bool
    convention: str = "b over nonzero, a over all of GF(2^n); pairing Tr(b1 y1)+Tr(b2 y2)"

    @property
    def total(self) -> int:
        return sum(self.abs_counts.values())

    @property
    def max_abs(self) -> int:
        return max(self.abs_counts)

    @property
    def classical(self) -> bool:
        return self.n % 2 == 0 and classify_walsh(self)


@dataclass(frozen=True)
class ImageReport:
    image_size: int
    preimage_counts: dict[int, int]  # preimage count -> number of image points
    zero_preimages: int

    @property
    def three_to_one(self) -> bool:
        return self.zero_preimages == 1 and set(self.preimage_counts) <= {1, 3} and self.preimage_counts.get(1, 0) == 1


# differential uniformity


def _spectrum_rows(vals: np.ndarray, directions: np.ndarray) -> np.ndarray:
    """hist[d] = number of (a, b) pairs, a in ``directions``, with exactly d solutions."""
    N = vals.size
    idx = np.arange(N, dtype=np.int64)
    block = max(1, _BLOCK // N)
    hist = np.zeros(N + 1, dtype=np.int64)
    for s in range(0, directions.size, block):
        a = directions[s : s + block]
        d = vals[idx[None, :] ^ a[:, None]] ^ vals[None, :]
        d += (np.arange(a.size, dtype=np.int64) * N)[:, None]
        cnt = np.bincount(d.ravel(), minlength=a.size * N)
        hist += np.bincount(cnt, minlength=N + 1)
    return hist


def _spectrum_from_hist(hist: np.ndarray, scale: int = 1) -> DifferentialSpectrum:
    return DifferentialSpectrum({int(d): int(c) * scale for d, c in enumerate(hist) if c})


def differential_spectrum(F: FunctionTable, *, scaling: tuple[int, int] | None = None,
                          field: GF2m | None = None) -> DifferentialSpectrum:
    """Exact differential spectrum of F.

    ``scaling=(e1, e2)`` declares F(c v) = (c^e1 F1(v), c^e2 F2(v)) for all
    c in K*.  The identity is checked exhaustively; derivatives in directions
    a and c a then have equal spectra, so only 2^m + 1 projective
    representatives are scanned and the counts are multiplied back.
    """
    vals = F.values
    if scaling is None:
        dirs = np.arange(1, vals.size, dtype=np.int64)
        return _spectrum_from_hist(_spectrum_rows(vals, dirs))
    K = field or get_field(F.m)
    if not check_scaling(F, scaling, K):
        raise ValueError(f"table is not homogeneous of bidegree {scaling}")
    return _spectrum_from_hist(_spectrum_rows(vals, projective_directions(F.m)), K.order - 1)


def differential_uniformity(F: FunctionTable, **kw) -> int:
    return differential_spectrum(F, **kw).delta


def is_apn(F: FunctionTable, *, scaling: tuple[int, int] | None = None,
           field: GF2m | None = None) -> bool:
    """True iff the differential uniformity is exactly 2; stops at the first block exceeding 2."""
    vals = F.values
    N = vals.size
    if scaling is None:
        dirs = np.arange(1, N, dtype=np.int64)
    else:
        K = field or get_field(F.m)
        if not check_scaling(F, scaling, K):
            raise ValueError(f"table is not homogeneous of bidegree {scaling}")
        dirs = projective_directions(F.m)
    idx = np.arange(N, dtype=np.int64)
    block = max(1, _BLOCK // N)
    for s in range(0, dirs.size, block):
        a = dirs[s : s + block]
        d = vals[idx[None, :] ^ a[:, None]] ^ vals[None, :]
        d += (np.arange(a.size, dtype=np.int64) * N)[:, None]
        if np.bincount(d.ravel(), minlength=a.size * N).max() > 2:
            return False
    return True


def projective_directions(m: int) -> np.ndarray:
    """One nonzero (x, y) per K*-scaling class: (1, t) for t in K, and (0, 1)."""
    t = np.arange(1 << m, dtype=np.int64)
    return np.concatenate([1 | (t << m), np.array([1 << m], dtype=np.int64)])


def check_scaling(F: FunctionTable, scaling: tuple[int, int], field: GF2m) -> bool:
    m = F.m
    idx = np.arange(F.size, dtype=np.int64)
    x, y = idx & field.mask, idx >> m
    e1, e2 = scaling
    for c in field.nonzero():
        moved = field.vmul(c, x) | (field.vmul(c, y) << m)
        expect = field.vmul(field.pow(c, e1), F.f1) | (field.vmul(field.pow(c, e2), F.f2) << m)
        if not np.array_equal(F.values[moved], expect):
            return False
    return True


# Walsh spectrum


def fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized Walsh-Hadamard transform along the last axis (length 2^n)."""
    a = np.array(a, dtype=np.int32, copy=True)
    lead = a.shape[:-1]
    N = a.shape[-1]
    h = 1
    while h < N:
        v = a.reshape(*lead, N // (2 * h), 2, h)
        s = v[..., 0, :] + v[..., 1, :]
        d = v[..., 0, :] - v[..., 1, :]
        v[..., 0, :] = s
        v[..., 1, :] = d
        h *= 2
    return a


def pair_trace_dual(field: GF2m) -> np.ndarray:
    """tau on K^2: Tr(b1 y1)+Tr(b2 y2) = parity(b & tau[y])."""
    t = field.trace_dual()
    idx = np.arange(1 << (2 * field.m), dtype=np.int64)
    return t[idx & field.mask] | (t[idx >> field.m] << field.m)


def _parity_table(n: int) -> np.ndarray:
    return (np.bitwise_count(np.arange(1 << n, dtype=np.uint32)) & 1).astype(np.int8)


def walsh_rows(F: FunctionTable, bs: np.ndarray, field: GF2m | None = None,
               reindex: bool = True) -> np.ndarray:
    """W(b, a) for the given b values (rows) and every a (columns, a in table encoding).

    With ``reindex=False`` the columns stay in dot-product order, which
    permutes each row but leaves its multiset unchanged.
    """
    K = field or get_field(F.m)
    tau = pair_trace_dual(K)
    par = _parity_table(F.n)
    G = tau[F.values]
    signs = 1 - 2 * par[np.asarray(bs, dtype=np.int64)[:, None] & G[None, :]].astype(np.int32)
    W = fwht(signs)
    return W[:, tau] if reindex else W


def walsh_value(F: FunctionTable, b: int, a: int, field: GF2m | None = None) -> int:
    """Direct character sum; independent of the FWHT path."""
    K = field or get_field(F.m)
    m = F.m
    total = 0
    for x, v in enumerate(F.values.tolist()):
        e = (K.trace(K.mul(b & K.mask, v & K.mask)) ^ K.trace(K.mul(b >> m, v >> m))
             ^ K.trace(K.mul(a & K.mask, x & K.mask)) ^ K.trace(K.mul(a >> m, x >> m)))
        total += -1 if e else 1
    return total


def walsh_spectrum(F: FunctionTable, field: GF2m | None = None) -> WalshReport:
    K = field or get_field(F.m)
    N = F.size
    block = max(1, _BLOCK // N)
    absc: Counter = Counter()
    sgn: Counter = Counter()
    parseval = True
    for s in range(1, N, block):
        bs = np.arange(s, min(N, s + block), dtype=np.int64)
        W = walsh_rows(F, bs, K, reindex=False)
        sq = (W.astype(np.int64) ** 2).sum(axis=1)
        parseval &= bool(np.all(sq == N * N))
        vals, cnts = np.unique(W, return_counts=True)
        sgn.update(dict(zip(vals.tolist(), cnts.tolist())))
    for v, c in sgn.items():
        absc[abs(v)] += c
    return WalshReport(F.n, dict(sorted(absc.items())), dict(sorted(sgn.items())), parseval)


def classical_counts(n: int) -> dict[int, int]:
    """Gold-like extended Walsh counts; the top count is forced by totality."""
    if n % 2:
        raise ValueError("classical spectrum is defined for even n only")
    N = 1 << n
    zero = (N - 1) * (N >> 2)
    mid = (N - 1) * 2 * N // 3
    top = (N - 1) * N - zero - mid
    return {0: zero, 1 << (n // 2): mid, 1 << ((n + 2) // 2): top}


def literature_top_count(n: int) -> int:
    """The commonly quoted figure (2^n - 1) 2^n / 3 for the 2^((n+2)/2) class."""
    N = 1 << n
    return (N - 1) * N // 3


def classify_walsh(r: WalshReport) -> bool:
    if r.n % 2:
        raise ValueError("classical spectrum is defined for even n only")
    return r.abs_counts == classical_counts(r.n)


# image and degree


def image_report(F: FunctionTable) -> ImageReport:
    cnt = np.bincount(F.values, minlength=F.size)
    hit = cnt[cnt > 0]
    pc = Counter(hit.tolist())
    zero = int(np.count_nonzero(F.values == 0))
    return ImageReport(int(hit.size), dict(sorted(pc.items())), zero)


def anf(values: np.ndarray) -> np.ndarray:
    """Bit-sliced Moebius transform: bit j of result[u] is the ANF coefficient of x^u in output bit j."""
    a = np.array(values, dtype=np.int64, copy=True)
    N = a.size
    h = 1
    while h < N:
        v = a.reshape(N // (2 * h), 2, h)
        v[:, 1, :] ^= v[:, 0, :]
        h *= 2
    return a


def algebraic_degree(F: FunctionTable) -> int:
    coeffs = anf(F.values)
    support = np.flatnonzero(coeffs)
    if support.size == 0:
        return 0
    return int(np.bitwise_count(support.astype(np.uint64)).max())


# ortho-derivative


def ortho_derivative(F: FunctionTable, field: GF2m | None = None) -> FunctionTable:
    """pi(a) = the nonzero b with <b, F(x+a)+F(x)+F(a)+F(0)> = 0 for all x; pi(0) = 0."""
    K = field or get_field(F.m)
    if algebraic_degree(F) > 2:
        raise NotQuadraticAPNError("ortho-derivative needs a quadratic function")
    n, N = F.n, F.size
    vals = F.values
    tau = pair_trace_dual(K)
    a = np.arange(N, dtype=np.int64)
    basis = [1 << i for i in range(n)]
    rows = np.stack([tau[vals[a ^ e] ^ vals[e] ^ vals[a] ^ vals[0]] for e in basis], axis=1)
    pi = np.zeros(N, dtype=np.int64)
    for ai, r in enumerate(rows.tolist()):
        if ai == 0:
            continue
        ns = nullspace(r, n)
        if len(ns) != 1:
            raise NotQuadraticAPNError(
                f"orthogonal space of B_a has dimension {len(ns)} at a={ai:#x}; function is not APN")
        pi[ai] = ns[0]
    return FunctionTable(F.m, pi, label=f"ortho({F.label})")


def ortho_derivative_spectrum(F: FunctionTable, field: GF2m | None = None) -> DifferentialSpectrum:
    return differential_spectrum(ortho_derivative(F, field))
