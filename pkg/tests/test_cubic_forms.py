import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cubicsol import density
from cubicsol.census import (
    STAR,
    TRIANGLE,
    TRIPLE,
    census_ternary_cubics,
    reduction_codes,
    reduction_table,
    ternary_closed_forms,
)
from cubicsol.cubic_forms import (
    ProjPointFp,
    ReductionTag,
    TernaryCubicFp,
    canonical_frame_change,
    classify_reduction,
    eval_form,
    find_smooth_point,
    frame_to_line,
    frame_to_point,
    gradient_form,
)
from cubicsol.monomials import IDENTITY, adjugate3, det3, mat_vec, substitute

FERMAT = (1, 0, 0, 0, 0, 0, 1, 0, 0, 1)
TRIANGLE_F2 = (1, 0, 0, 1, 1, 1, 1, 0, 1, 1)
STAR_F2 = (0, 0, 0, 0, 0, 0, 1, 0, 1, 1)
X3 = (1, 0, 0, 0, 0, 0, 0, 0, 0, 0)


def test_eval_and_gradient():
    f = TernaryCubicFp(2, FERMAT)
    assert eval_form(f, (1, 1, 0)) == 0
    assert gradient_form(f, (1, 1, 0)) == (1, 1, 0)
    xyz = TernaryCubicFp(5, (0, 0, 0, 0, 1, 0, 0, 0, 0, 0))
    assert eval_form(xyz, (1, 0, 0)) == 0 and gradient_form(xyz, (1, 0, 0)) == (0, 0, 0)
    assert gradient_form(xyz, (0, 1, 1)) == (1, 0, 0)


def test_find_smooth_point():
    assert find_smooth_point(TernaryCubicFp(2, FERMAT)).coords == (1, 1, 0)
    assert find_smooth_point(TernaryCubicFp(7, FERMAT)).coords == (1, 3, 0)
    assert find_smooth_point(TernaryCubicFp(5, X3)) is None
    assert find_smooth_point(TernaryCubicFp(2, TRIANGLE_F2)) is None
    with pytest.raises(ValueError):
        find_smooth_point(TernaryCubicFp(3, (0,) * 10))


def test_classify_examples():
    t = classify_reduction(TernaryCubicFp(5, X3))
    assert t.tag is ReductionTag.TRIPLE_LINE and t.line == (1, 0, 0)
    s = classify_reduction(TernaryCubicFp(2, STAR_F2))
    assert s.tag is ReductionTag.STAR and s.point.coords == (1, 0, 0)
    assert classify_reduction(TernaryCubicFp(2, TRIANGLE_F2)).tag is ReductionTag.TRIANGLE
    assert classify_reduction(TernaryCubicFp(3, (0,) * 10)).tag is ReductionTag.ZERO_FORM
    smooth = classify_reduction(TernaryCubicFp(2, FERMAT))
    assert smooth.tag is ReductionTag.SMOOTH_POINT and smooth.point.coords == (1, 1, 0)


def test_proj_point_normalization():
    assert ProjPointFp.normalized(0, 3, 6, 7).coords == (0, 1, 2)
    with pytest.raises(ValueError):
        ProjPointFp.normalized(0, 7, 14, 7)


def test_frame_changes():
    m, f = canonical_frame_change(TernaryCubicFp(2, STAR_F2), ("point", (1, 0, 0)))
    assert m == IDENTITY and f.coeffs == STAR_F2
    m, f = canonical_frame_change(TernaryCubicFp(5, (0,) * 9 + (1,)), ("line", (0, 0, 1)))
    assert m == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert f.coeffs == X3
    # a star centred at [0:0:1] moves to [1:0:0]
    star = TernaryCubicFp(2, substitute(STAR_F2, ((0, 0, 1), (0, 1, 0), (1, 0, 0))))
    cls = classify_reduction(star)
    assert cls.tag is ReductionTag.STAR and cls.point.coords == (0, 0, 1)
    m, moved = canonical_frame_change(star, cls)
    assert mat_vec(m, (1, 0, 0)) == (0, 0, 1)
    assert classify_reduction(moved).point.coords == (1, 0, 0)
    with pytest.raises(ValueError):
        canonical_frame_change(star, ("plane", (1, 0, 0)))


@given(st.sampled_from([2, 3, 5, 7]), st.tuples(*[st.integers(0, 6)] * 3))
def test_frame_to_point_and_line(p, v):
    if all(c % p == 0 for c in v):
        v = (0, 0, 1)
    m = frame_to_point(v, p)
    assert det3(m) % p
    assert ProjPointFp.normalized(*mat_vec(m, (1, 0, 0)), p) == ProjPointFp.normalized(*v, p)
    n = frame_to_line(v, p)
    assert abs(det3(n)) == 1
    # L(M e) for e the basis vectors: only e_1 survives, with a unit value
    vals = [sum(l * c for l, c in zip(ProjPointFp.normalized(*v, p).coords, col)) % p for col in zip(*n)]
    assert vals[0] != 0 and vals[1] == 0 and vals[2] == 0


def _all_forms(p):
    return itertools.product(range(p), repeat=10)


@pytest.mark.parametrize("p", [2, 3])
def test_exhaustive_classification_and_frequencies(p):
    table = reduction_table(p)
    counts = np.bincount(table, minlength=5)
    nonzero = p**10 - 1
    b = density.betas(p)
    scale = Fraction(p**10, p**10 - 1)
    assert Fraction(int(counts[STAR]), nonzero) == b.beta1 * scale
    assert Fraction(int(counts[TRIPLE]), nonzero) == b.beta2 * scale
    assert Fraction(int(counts[TRIANGLE]), nonzero) == b.beta3 * scale
    # the scalar classifier never fails and agrees with the vectorized table
    code_of = {
        ReductionTag.SMOOTH_POINT: 0, ReductionTag.STAR: STAR, ReductionTag.TRIANGLE: TRIANGLE,
        ReductionTag.TRIPLE_LINE: TRIPLE, ReductionTag.ZERO_FORM: 4,
    }
    step = 1 if p == 2 else 7
    for idx, coeffs in enumerate(_all_forms(p)):
        if idx % step:
            continue
        c = coeffs[::-1]  # table index is sum(c_k p^k) with c_0 least significant
        assert code_of[classify_reduction(TernaryCubicFp(p, c)).tag] == table[idx]


def _random_invertible(rng, p):
    while True:
        m = tuple(tuple(int(x) for x in row) for row in rng.integers(0, p, (3, 3)))
        if det3(m) % p:
            return m


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_pgl3_invariance(p):
    rng = np.random.default_rng(p)
    tags = {t: 0 for t in ReductionTag}
    forms = [tuple(int(x) for x in rng.integers(0, p, 10)) for _ in range(80)]
    forms += [STAR_F2, TRIANGLE_F2, X3, FERMAT, substitute(X3, ((1, 2, 3), (0, 1, 0), (0, 0, 1)))]
    for c in forms:
        f = TernaryCubicFp(p, c)
        m = _random_invertible(rng, p)
        g = TernaryCubicFp(p, substitute(c, m))
        t1, t2 = classify_reduction(f), classify_reduction(g)
        tags[t1.tag] += 1
        assert t1.tag is t2.tag
        assert t1.point_count == t2.point_count
        adj = adjugate3(m)
        if t1.tag is ReductionTag.STAR:
            # centre of C(Mv) is M^{-1} centre
            assert ProjPointFp.normalized(*mat_vec(adj, t1.point.coords), p) == t2.point
        if t1.tag is ReductionTag.TRIPLE_LINE:
            # L'(v) = L(Mv): coefficient vector L M
            lm = tuple(sum(t1.line[i] * m[i][j] for i in range(3)) for j in range(3))
            assert ProjPointFp.normalized(*lm, p).coords == t2.line


def test_census_p2_rows():
    rows = {r.category: r for r in census_ternary_cubics(2)}
    expected = {
        "L^3": 7, "L1L2^2": 42, "three rational lines": 35, "conjugate star": 14,
        "conjugate triangle": 8, "line+conjugate pair": 49, "line x irreducible conic": 196,
        "smooth": 336, "nodal": 168, "cuspidal": 168,
    }
    assert {k: r.count_up_to_scaling for k, r in rows.items()} == expected
    assert all(r.match for r in rows.values())
    assert sum(expected.values()) == 1023
    assert rows["smooth"].as_dict() == {
        "category": "smooth", "count_up_to_scaling": 336, "closed_form": 336, "match": True,
    }


def test_census_p3():
    rows = census_ternary_cubics(3)
    assert all(r.match for r in rows)
    assert {r.category: r.count_up_to_scaling for r in rows}["conjugate triangle"] == 144
    assert sum(r.count_up_to_scaling for r in rows) == (3**10 - 1) // 2
    assert ternary_closed_forms(3)["conjugate triangle"] == 144


def test_census_workers_do_not_change_counts():
    one = census_ternary_cubics(3, workers=1)
    two = census_ternary_cubics(3, workers=2)
    assert one == two


def test_reduction_codes_on_unnormalized_rows():
    rows = np.array([STAR_F2, TRIANGLE_F2, X3, FERMAT], dtype=np.int64)
    assert list(reduction_codes(rows, 2)) == [STAR, TRIANGLE, TRIPLE, 0]
