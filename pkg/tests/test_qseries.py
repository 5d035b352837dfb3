"""Truncated sparse series: ring laws, the two multiplication engines,
inversion, product identities, and the on-disk format."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from etaq.errors import NonUnitConstantTerm
from etaq.qseries import (
    QSeries,
    _mul_packed,
    _mul_sparse,
    euler_product,
    euler_product_direct,
    expand_eta_triple,
    jacobi_cube,
    leading_exponent,
    load_series,
    normalized_coefficients,
    save_series,
)


def coeff_dicts(trunc, max_terms=8, max_coeff=50):
    return st.dictionaries(
        st.integers(0, trunc - 1),
        st.integers(-max_coeff, max_coeff),
        max_size=max_terms,
    )


@st.composite
def triples_at_common_trunc(draw):
    trunc = draw(st.integers(2, 40))
    dicts = [draw(coeff_dicts(trunc)) for _ in range(3)]
    return [QSeries(d, trunc) for d in dicts]


def test_constructor_contract():
    f = QSeries({0: 1, 3: 0, 5: Fraction(4, 2)}, 8)
    assert f[3] == 0 and 3 not in f.coeffs
    assert f[5] == 2 and isinstance(f.coeffs[5], int)
    with pytest.raises(ValueError):
        QSeries({8: 1}, 8)
    with pytest.raises(ValueError):
        QSeries({0: 1}, 0)


def test_getitem_respects_truncation():
    f = QSeries({2: 7}, 5)
    assert f[2] == 7 and f[4] == 0
    with pytest.raises(ValueError):
        f[5]


def test_truncate_only_tightens():
    f = QSeries({0: 1, 4: 2}, 6)
    g = f.truncate(3)
    assert g.trunc == 3 and g[0] == 1 and 4 not in g.coeffs
    with pytest.raises(ValueError):
        f.truncate(7)


@given(triples_at_common_trunc())
def test_ring_laws(fgh):
    f, g, h = fgh
    assert f + g == g + f
    assert (f + g) + h == f + (g + h)
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + QSeries.zero(f.trunc) == f
    assert f * QSeries.one(f.trunc) == f
    assert f - f == QSeries.zero(f.trunc)


@given(triples_at_common_trunc())
def test_scalar_operations(fgh):
    f, _, _ = fgh
    assert f * 3 == f + f + f
    assert f * Fraction(1, 2) + f * Fraction(1, 2) == f
    assert -(-f) == f


@given(st.integers(2, 60), st.data())
def test_engines_agree(trunc, data):
    # the packed engine is only ever handed nonzero integer series
    nonzero = st.dictionaries(
        st.integers(0, trunc - 1),
        st.integers(-99, 99).filter(bool),
        min_size=1,
        max_size=12,
    )
    f = data.draw(nonzero)
    g = data.draw(nonzero)
    assert _mul_sparse(f, g, trunc) == _mul_packed(f, g, trunc)


def test_min_combining_truncation():
    f = QSeries({0: 1}, 10)
    g = QSeries({0: 1}, 4)
    assert (f + g).trunc == 4
    assert (f * g).trunc == 4


@given(st.integers(2, 30), st.data())
def test_inverse_is_two_sided(trunc, data):
    tail = data.draw(coeff_dicts(trunc, max_terms=5, max_coeff=9))
    tail.pop(0, None)
    unit = data.draw(st.sampled_from([1, -1]))
    f = QSeries({0: unit, **tail}, trunc)
    assert f * f.inverse() == QSeries.one(trunc)
    assert f.inverse() * f == QSeries.one(trunc)


def test_inverse_requires_unit_constant():
    with pytest.raises(NonUnitConstantTerm):
        QSeries({1: 1}, 5).inverse()
    with pytest.raises(NonUnitConstantTerm):
        QSeries({0: 2}, 5).inverse()
    inv = QSeries({0: Fraction(2, 3)}, 4).inverse()
    assert inv[0] == Fraction(3, 2)


def test_pow_negative_means_inverse_power():
    f = euler_product(20)
    assert f ** -2 == (f.inverse()) ** 2
    assert f**0 == QSeries.one(20)


def test_shift_and_negative_exponents():
    f = QSeries({0: 1, 2: 3}, 6)
    g = f.shift(-2)
    assert g.min_exponent() == -2 and g.trunc == 4
    cancelled = g * f.shift(2)
    assert cancelled == (f * f).truncate(cancelled.trunc)
    assert (f * g)[0] == 3 + 3  # cross terms at q^0


def test_euler_product_frozen_prefix():
    f = euler_product(16)
    assert dict(f.coeffs) == {0: 1, 1: -1, 2: -1, 5: 1, 7: 1, 12: -1, 15: -1}


@pytest.mark.parametrize("step", [1, 2, 5])
def test_euler_pentagonal_vs_direct(step):
    assert euler_product(2000, step) == euler_product_direct(2000, step)


def test_jacobi_cube_identity_small():
    assert euler_product(500) ** 3 == jacobi_cube(500)


def test_jacobi_cube_support_is_triangular():
    cube = jacobi_cube(300)
    triangulars = {m * (m + 1) // 2 for m in range(30)}
    assert set(cube.coeffs) <= triangulars
    assert cube[0] == 1 and cube[1] == -3 and cube[3] == 5


@pytest.mark.parametrize(
    "a,b,c,r",
    [(4, 5, 3, 27), (4, 5, 5, 35), (4, 5, 11, 59), (1, 3, 1, 2), (2, 1, 1, 1)],
)
def test_leading_exponent(a, b, c, r):
    assert leading_exponent(a, b, c) == a * b * c + a * a - a * a * c - 1
    assert leading_exponent(a, b, c) == r


def test_expand_matches_normalized_grading():
    a, b, c, trunc = 4, 5, 3, 400
    r = leading_exponent(a, b, c)
    plain = expand_eta_triple(a, b, c, trunc)
    graded = normalized_coefficients(a, b, c, (trunc - r + 23) // 24)
    for e, v in plain.coeffs.items():
        assert (e - r) % 24 == 0
        assert graded[(e - r) // 24] == v
    assert plain[r] == 1


def test_expand_with_pole_has_negative_leading_exponent():
    f = expand_eta_triple(4, 1, 2, 40)
    assert f.min_exponent() == leading_exponent(4, 1, 2) == -9


def test_series_file_round_trip(tmp_path):
    f = QSeries({0: 1, 3: Fraction(-2, 3), 17: 4}, 25)
    path = tmp_path / "series.tsv"
    save_series(path, f)
    text = path.read_text()
    assert text.startswith("# T=25\n")
    assert "3\t-2/3" in text
    assert load_series(path) == f


def test_normalized_b_equals_a_counts_cores():
    # at b = a the quotient degenerates to the a-core generating function
    from etaq.partitions import count_cores

    series = normalized_coefficients(4, 4, 3, 30)
    for m in range(30):
        assert series[m] == count_cores(4, m)
