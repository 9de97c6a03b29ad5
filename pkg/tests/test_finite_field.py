from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubicsol.finite_field import (
    BinaryCubicForm,
    EnumerationTooLarge,
    FpElem,
    MonicCubic,
    RootType,
    binary_closed_forms,
    census_binary_cubics,
    census_monic_cubics,
    classify_binary_cubic,
    classify_monic_cubic,
    monic_closed_forms,
    sigma_tau,
)

SMALL_PRIMES = [2, 3, 5, 7, 11, 13]


def test_fp_elem_arithmetic():
    a, b = FpElem(3, 7), FpElem(5, 7)
    assert a + b == 1 and a * b == 1 and a - b == 5
    assert (a / b) * b == a
    assert a**-1 == FpElem(5, 7)
    assert FpElem(10, 7).value == 3
    with pytest.raises(ValueError):
        FpElem(1, 9)
    with pytest.raises(ZeroDivisionError):
        FpElem(0, 5).inverse()


def test_monic_examples():
    assert classify_monic_cubic(MonicCubic(5, 0, 0, 0)).tag is RootType.TRIPLE
    assert classify_monic_cubic(MonicCubic(3, 0, -1, 0)).tag is RootType.THREE_DISTINCT_RATIONAL
    assert classify_monic_cubic(MonicCubic(2, 0, 1, 1)).tag is RootType.IRREDUCIBLE_TRIPLET
    # (X - 1)^2 (X - 2) over F_5 = X^3 - 4X^2 + 5X - 2
    rt = classify_monic_cubic(MonicCubic(5, -4, 5, -2))
    assert rt.tag is RootType.SIMPLE_DOUBLE and rt.roots == ((1, 2), (2, 1))


def test_binary_examples():
    y3 = classify_binary_cubic(BinaryCubicForm(7, 0, 0, 0, 1))
    assert y3.tag is RootType.TRIPLE and y3.roots == (((1, 0), 3),)
    x2y = classify_binary_cubic(BinaryCubicForm(7, 0, 1, 0, 0))
    assert x2y.tag is RootType.SIMPLE_DOUBLE
    assert dict(x2y.roots) == {(0, 1): 2, (1, 0): 1}
    assert classify_binary_cubic(BinaryCubicForm(2, 1, 0, 1, 1)).tag is RootType.IRREDUCIBLE_TRIPLET
    assert classify_binary_cubic(BinaryCubicForm(3, 0, 0, 0, 0)).tag is RootType.ZERO


def test_monic_census_p2():
    assert census_monic_cubics(2) == {
        RootType.THREE_DISTINCT_RATIONAL: 0,
        RootType.ONE_RATIONAL_TWO_CONJUGATE: 2,
        RootType.IRREDUCIBLE_TRIPLET: 2,
        RootType.SIMPLE_DOUBLE: 2,
        RootType.TRIPLE: 2,
    }
    assert census_monic_cubics(3)[RootType.THREE_DISTINCT_RATIONAL] == 1


def test_binary_census_p2():
    c = census_binary_cubics(2)
    assert (c[RootType.THREE_DISTINCT_RATIONAL], c[RootType.ONE_RATIONAL_TWO_CONJUGATE], c[RootType.IRREDUCIBLE_TRIPLET]) == (1, 3, 2)
    assert c[RootType.SIMPLE_DOUBLE] == 6 and c[RootType.TRIPLE] == 3 and c[RootType.ZERO] == 1


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_censuses_match_closed_forms(p):
    monic = census_monic_cubics(p)
    assert monic == monic_closed_forms(p)
    assert sum(monic.values()) == p**3
    binary = census_binary_cubics(p)
    assert binary == binary_closed_forms(p)
    assert sum(binary.values()) == p**4
    assert binary[RootType.TRIPLE] == p * p - 1


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_sigma_tau_equal_census_ratios(p):
    sigma, tau, sigma1, tau1 = sigma_tau(p)
    simple = sum(
        1
        for b in range(p**4)
        if classify_binary_cubic(BinaryCubicForm(p, *[(b // p**k) % p for k in range(4)])).has_simple_root
    )
    assert Fraction(simple, p**4) == sigma
    assert Fraction(binary_closed_forms(p)[RootType.TRIPLE], p**4) == tau
    monic = census_monic_cubics(p)
    simple1 = monic[RootType.THREE_DISTINCT_RATIONAL] + monic[RootType.ONE_RATIONAL_TWO_CONJUGATE] + monic[RootType.SIMPLE_DOUBLE]
    assert Fraction(simple1, p**3) == sigma1
    assert Fraction(monic[RootType.TRIPLE], p**3) == tau1


def test_sigma_tau_values():
    assert sigma_tau(2) == (Fraction(5, 8), Fraction(3, 16), Fraction(1, 2), Fraction(1, 4))
    assert sigma_tau(3)[1] == Fraction(8, 81)
    with pytest.raises(ValueError):
        sigma_tau(1)


def test_enumeration_caps():
    with pytest.raises(EnumerationTooLarge):
        census_monic_cubics(101)
    with pytest.raises(EnumerationTooLarge):
        census_binary_cubics(101)


@given(
    st.sampled_from(SMALL_PRIMES),
    st.lists(st.integers(0, 1000), min_size=4, max_size=4),
    st.lists(st.integers(0, 1000), min_size=4, max_size=4),
)
def test_binary_tag_invariant_under_gl2(p, coeffs, mat):
    a, b, c, d = (m % p for m in mat)
    if (a * d - b * c) % p == 0:
        a, b, c, d = 1, b % p, 0, 1
    b0, b1, b2, b3 = coeffs
    # expand F(aX + bY, cX + dY)
    new = [0, 0, 0, 0]
    for k, coef in enumerate((b0, b1, b2, b3)):
        # term coef * U^(3-k) V^k with U = aX + bY, V = cX + dY
        poly = [1]
        for lin in [(a, b)] * (3 - k) + [(c, d)] * k:
            nxt = [0] * (len(poly) + 1)
            for i, v in enumerate(poly):
                nxt[i] += v * lin[0]
                nxt[i + 1] += v * lin[1]
            poly = nxt
        for i, v in enumerate(poly):
            new[i] += coef * v
    t1 = classify_binary_cubic(BinaryCubicForm(p, *coeffs)).tag
    t2 = classify_binary_cubic(BinaryCubicForm(p, *new)).tag
    assert t1 is t2


@given(st.sampled_from(SMALL_PRIMES), st.integers(0, 12), st.integers(0, 12), st.integers(0, 12))
def test_monic_triple_iff_cube(p, c2, c1, c0):
    g = MonicCubic(p, c2, c1, c0)
    is_cube = any(
        ((-3 * r) % p, (3 * r * r) % p, (-r**3) % p) == (g.c2, g.c1, g.c0) for r in range(p)
    )
    assert (classify_monic_cubic(g).tag is RootType.TRIPLE) == is_cube
