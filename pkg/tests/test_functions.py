import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apnlab.functions import (
    BiprojectivePoly,
    FamilyParams,
    FunctionTable,
    ParameterError,
    TableFormatError,
    admissible_alphas,
    build_family_new,
    build_family_orig,
    check_exponent,
    f_poly,
    format_table,
    g_poly,
    parse_table,
    read_table,
    smallest_admissible,
    write_table,
)
from apnlab.gf2m import get_field


def brute_admissible(K, k):
    # scalar double loop, independent of the vectorized mask
    return {a for a in K.elements()
            if all(K.mul(K.frob(x, k), x) ^ x ^ a for x in K.elements())}


def test_eval_matches_definition():
    K = get_field(3)
    p = BiprojectivePoly(K, 1, (1, 0, 1, 2))
    x, y = 3, 5
    want = K.mul(K.mul(x, x), x) ^ K.mul(x, K.mul(y, y)) ^ K.mul(2, K.mul(K.mul(y, y), y))
    assert p(x, y) == want
    xs, ys = np.arange(8).repeat(8), np.tile(np.arange(8), 8)
    assert np.array_equal(p.evaluate(xs, ys), [p(int(a), int(b)) for a, b in zip(xs, ys)])


def test_matrix_layout():
    K = get_field(4)
    p = BiprojectivePoly(K, 1, (1, 2, 3, 4))
    assert p.matrix == ((1, 3), (2, 4))
    assert BiprojectivePoly.from_matrix(K, 1, p.matrix) == p


def test_g_coefficients():
    K = get_field(5)
    p = FamilyParams(K, 2, 3)
    g = g_poly(p)
    assert g.k == 4
    assert g.coeffs == (1, 3, 1 ^ K.frob(3, 2), 3)
    assert f_poly(p).coeffs == (1, 0, 1, 3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([(3, 1), (4, 3), (5, 2), (7, 3)]), st.data())
def test_homogeneity(mk, data):
    m, k = mk
    K = get_field(m)
    p = FamilyParams(K, k, smallest_admissible(K, k))
    c, x, y = (data.draw(st.integers(1 if i == 0 else 0, K.mask)) for i in range(3))
    for poly in (f_poly(p), g_poly(p)):
        e = (1 << poly.k) + 1
        assert poly(K.mul(c, x), K.mul(c, y)) == K.mul(K.pow(c, e), poly(x, y))


@pytest.mark.parametrize("m,count", [(3, 3), (4, 5), (5, 11), (6, 21), (7, 43), (8, 85)])
def test_admissible_counts(m, count):
    K = get_field(m)
    for k in range(1, m):
        if np.gcd(k, m) == 1:
            alphas = admissible_alphas(K, k)
            assert len(alphas) == count
            if m <= 6:
                assert alphas == brute_admissible(K, k)


def test_alpha_one_rejected_m3():
    K = get_field(3)
    assert admissible_alphas(K, 1) == {2, 4, 6}
    with pytest.raises(ParameterError, match="root X=0x2"):
        FamilyParams(K, 1, 1).validate()
    with pytest.raises(ParameterError):
        build_family_new(FamilyParams(K, 1, 1))


@pytest.mark.parametrize("m,k", [(4, 2), (6, 3), (5, 0), (5, 5)])
def test_bad_exponent(m, k):
    with pytest.raises(ParameterError):
        check_exponent(get_field(m), k)


@pytest.mark.parametrize("m,k", [(5, 1), (5, 2), (7, 1), (7, 3)])
def test_orig_equals_new_at_alpha_one(m, k):
    K = get_field(m)
    assert 1 in admissible_alphas(K, k)
    assert build_family_orig(K, k) == build_family_new(FamilyParams(K, k, 1))


def test_orig_requires_gcd_3k():
    with pytest.raises(ParameterError):
        build_family_orig(get_field(3), 1)


def test_table_shape_and_lookup(family):
    F = family(3, 1)
    assert F.n == 6 and F.size == 64 and len(F) == 64
    assert not F.values.flags.writeable
    p = FamilyParams(get_field(3), 1, F.alpha)
    assert F.lookup(5, 3) == (f_poly(p)(5, 3), g_poly(p)(5, 3))


def test_table_roundtrip(tmp_path, family):
    F = family(4, 1)
    path = tmp_path / "f.tbl"
    write_table(F, path)
    G = read_table(path)
    assert G == F and G.k == 1 and G.alpha == F.alpha
    assert format_table(G) == path.read_text()
    generic = FunctionTable(2, np.arange(16))
    assert parse_table(format_table(generic)) == generic
    assert format_table(generic).startswith("APNTBL v1 m=2 k=- alpha=-\n")


@pytest.mark.parametrize("mutate,line", [
    (lambda ls: ["APNTBL v2 m=2 k=1 alpha=-"] + ls[1:], 1),
    (lambda ls: ["APNTBL v1 m=2 q=1 alpha=-"] + ls[1:], 1),
    (lambda ls: ls[:-1], 16),
    (lambda ls: ls[:3] + ["1"] + ls[4:], 4),
    (lambda ls: ls[:5] + ["zz 1"] + ls[6:], 6),
    (lambda ls: ls[:7] + ["4 0"] + ls[8:], 8),
])
def test_malformed_tables(mutate, line):
    lines = format_table(FunctionTable(2, np.arange(16))).splitlines()
    with pytest.raises(TableFormatError) as err:
        parse_table("\n".join(mutate(lines)))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_empty_table_file():
    with pytest.raises(TableFormatError):
        parse_table("")
