import numpy as np
import pytest

from apnlab import analysis
from apnlab.bitlinear import BitMatrix
from apnlab.functions import FunctionTable
from apnlab.gf2m import get_field


def naive_spectrum(vals):
    N = len(vals)
    out = {}
    for a in range(1, N):
        cnt = [0] * N
        for x in range(N):
            cnt[vals[x ^ a] ^ vals[x]] += 1
        for c in cnt:
            out[c] = out.get(c, 0) + 1
    return out


def gold_table(m):
    # x^3 on GF(2^(2m)), read as a map on 2m bits
    L = get_field(2 * m)
    return FunctionTable(m, L.vpow(np.arange(L.order), 3))


def random_invertible(n, rng):
    while True:
        M = BitMatrix(n, tuple(int(v) for v in rng.integers(0, 1 << n, n)))
        if M.is_invertible():
            return M


def test_constant_and_linear():
    N = 16
    const = FunctionTable(2, np.full(N, 5))
    spec = analysis.differential_spectrum(const)
    assert spec.counts == {0: (N - 1) ** 2, N: N - 1}
    assert not analysis.is_apn(const)
    assert analysis.algebraic_degree(const) == 0
    ident = FunctionTable(2, np.arange(N))
    assert analysis.differential_spectrum(ident).delta == N
    assert analysis.algebraic_degree(ident) == 1
    assert analysis.image_report(ident).image_size == N


@pytest.mark.parametrize("m", [2, 3])
def test_spectrum_against_naive(m, family):
    F = family(m, 1)
    assert analysis.differential_spectrum(F).counts == naive_spectrum(F.values.tolist())
    rng = np.random.default_rng(m)
    R = FunctionTable(m, rng.integers(0, 1 << (2 * m), 1 << (2 * m)))
    assert analysis.differential_spectrum(R).counts == naive_spectrum(R.values.tolist())


@pytest.mark.parametrize("m", [2, 3, 4])
def test_gold_oracle(m):
    G = gold_table(m)
    N = G.size
    assert analysis.is_apn(G)
    assert analysis.differential_spectrum(G).counts == {0: (N - 1) * N // 2, 2: (N - 1) * N // 2}
    assert analysis.classify_walsh(analysis.walsh_spectrum(G))


@pytest.mark.parametrize("m,k", [(3, 1), (3, 2), (4, 1), (5, 2)])
def test_family_apn_and_scaling_shortcut(m, k, family):
    F = family(m, k)
    K = get_field(m)
    sc = ((1 << k) + 1, (1 << ((2 * k) % m)) + 1)
    full = analysis.differential_spectrum(F)
    assert full.delta == 2 and full.total == (F.size - 1) * F.size
    assert analysis.differential_spectrum(F, scaling=sc, field=K) == full
    assert analysis.is_apn(F) and analysis.is_apn(F, scaling=sc, field=K)
    with pytest.raises(ValueError):
        analysis.differential_spectrum(F, scaling=(sc[0] + 1, sc[1]), field=K)


def test_walsh_direct_sum_oracle(family):
    F = family(3, 1)
    rng = np.random.default_rng(7)
    bs = rng.integers(1, F.size, 6)
    W = analysis.walsh_rows(F, bs)
    for i, b in enumerate(bs.tolist()):
        for a in rng.integers(0, F.size, 8).tolist():
            assert W[i, a] == analysis.walsh_value(F, b, a)


def test_fwht_small():
    assert analysis.fwht(np.array([1, 1, 1, -1])).tolist() == [2, 2, 2, -2]
    x = np.random.default_rng(0).integers(-3, 4, 32)
    assert np.array_equal(analysis.fwht(analysis.fwht(x)), 32 * x)


@pytest.mark.parametrize("m,counts", [
    (3, {0: 1008, 8: 2688, 16: 336}),
    (4, {0: 16320, 16: 43520, 32: 5440}),
])
def test_walsh_counts(m, counts, family):
    for k in (1, m - 1):
        r = analysis.walsh_spectrum(family(m, k))
        assert r.abs_counts == counts
        assert r.parseval_ok
        assert analysis.classify_walsh(r)
    n = 2 * m
    assert analysis.classical_counts(n) == counts
    # the often-quoted top multiplicity is four times too large
    assert analysis.literature_top_count(n) == 4 * counts[max(counts)]


def test_ea_invariance_randomized(family):
    F = family(3, 1)
    rng = np.random.default_rng(2024)
    base_spec = analysis.differential_spectrum(F)
    base_walsh = analysis.walsh_spectrum(F).abs_counts
    x = np.arange(F.size)
    for _ in range(20):
        A, B = random_invertible(F.n, rng), random_invertible(F.n, rng)
        C = BitMatrix(F.n, tuple(int(v) for v in rng.integers(0, F.size, F.n)))
        c0, d0 = (int(v) for v in rng.integers(0, F.size, 2))
        vals = A.apply(F.values[B.apply(x) ^ c0]) ^ C.apply(x) ^ d0
        G = FunctionTable(F.m, vals)
        assert analysis.differential_spectrum(G) == base_spec
        assert analysis.walsh_spectrum(G).abs_counts == base_walsh
        assert analysis.algebraic_degree(G) == 2


@pytest.mark.parametrize("m,size", [(2, 6), (3, 22), (4, 86), (5, 342)])
def test_three_to_one(m, size, family):
    r = analysis.image_report(family(m, 1))
    assert r.image_size == size
    assert r.preimage_counts == {1: 1, 3: size - 1}
    assert r.zero_preimages == 1 and r.three_to_one


def test_degree(family):
    assert analysis.algebraic_degree(family(4, 3)) == 2
    rng = np.random.default_rng(1)
    R = FunctionTable(3, rng.integers(0, 64, 64))
    assert analysis.algebraic_degree(R) >= 4


def test_ortho_derivative_definition(family):
    F = family(3, 1)
    K = get_field(3)
    pi = analysis.ortho_derivative(F, K)
    tau = analysis.pair_trace_dual(K)
    v = F.values
    x = np.arange(F.size)
    for a in range(1, F.size):
        b = int(pi.values[a])
        assert b != 0
        d = tau[v[x ^ a] ^ v[x] ^ v[a] ^ v[0]]
        assert not np.any(np.bitwise_count(b & d) & 1)
    assert pi.values[0] == 0


def test_ortho_spectra_frozen(family):
    m3 = {0: 2205, 2: 1764, 8: 63}
    for k in (1, 2):
        assert analysis.ortho_derivative_spectrum(family(3, k)).counts == m3
    assert analysis.ortho_derivative_spectrum(family(5, 1)).counts == {
        0: 637701, 2: 313131, 4: 80910, 6: 14415, 8: 1395}
    assert analysis.ortho_derivative_spectrum(family(5, 2)).counts == {
        0: 626541, 2: 330336, 4: 79515, 6: 10230, 8: 930}


def test_ortho_rejects_non_apn():
    with pytest.raises(analysis.NotQuadraticAPNError):
        analysis.ortho_derivative(FunctionTable(2, np.zeros(16, dtype=np.int64)))
    rng = np.random.default_rng(3)
    with pytest.raises(analysis.NotQuadraticAPNError):
        analysis.ortho_derivative(FunctionTable(3, rng.integers(0, 64, 64)))
