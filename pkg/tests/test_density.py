from fractions import Fraction

import pytest

from cubicsol import density
from cubicsol.census import STAR, TRIANGLE, TRIPLE, reduction_table
from cubicsol.density import (
    ProductResult,
    ToleranceUnachievable,
    betas,
    certify_tail_constant,
    euler_product,
    format_decimal,
    local_density_report,
    rho_nr,
    rho_p,
    rho_via_assembly,
)
from cubicsol.monomials import primes_up_to

F = Fraction
SMALL_PRIMES = primes_up_to(97)


def test_rho_examples():
    assert rho_p(2) == F(18302, 18615) == 1 - F(313, 18615)
    assert rho_p(3) == 1 - F(13801, 1862220)
    assert format_decimal(rho_p(2), 7) == "0.9831856"
    assert rho_nr(2) == 1 - F(43008, 133302015)


def test_beta_examples():
    b = betas(2)
    assert (b.beta1, b.beta2, b.beta3, b.beta4, b.beta5) == (F(7, 512), F(7, 1024), F(1, 128), F(1, 8), F(1, 2))
    assert b.beta3_point == F(1, 64)
    for p in SMALL_PRIMES:
        assert betas(p).beta2_line == 0


def test_system_examples():
    assert density.alpha_system(2) == (F(22, 51), F(46, 51))
    assert density.alpha_system(2)[1] == (16 - 2 + F(22, 51)) / 16
    nu1, nu2 = density.nu_system(2)
    assert (nu1, nu2) == (F(58, 85), F(62, 85))
    assert nu1 == F(1, 2) + F(1, 4) * nu2
    assert density.nu_system_nr(2)[1] == F(64, 255)
    assert density.alpha2_alpha5(2)[0] == 1 - F(23089, 130305)
    assert density.alpha2_nr(2) == F(6144, 130305)
    assert 1 - rho_via_assembly(2, "qp") == F(313, 18615)
    assert 1 - rho_via_assembly(2, "nr") == F(43008, 133302015)


@pytest.mark.parametrize("p", SMALL_PRIMES)
def test_identities_small_primes(p):
    r = local_density_report(p)
    assert r.routes_agree and r.routes_agree_nr and r.closed_forms_agree and r.in_unit_interval
    assert r.nu1_nr == r.nu2_nr / p**2
    assert r.alpha1 == F(p**7 - p**5 + p**4 - p, p**8 - 1)
    assert r.alpha4 == (p**4 - p + r.alpha1) / p**4
    # nr quantities are insolubility probabilities and can only be smaller
    assert r.rho_nr >= r.rho


def test_identities_large_primes():
    for p in primes_up_to(10**4)[-30:]:
        assert rho_via_assembly(p, "qp") == rho_p(p)
        assert rho_via_assembly(p, "nr") == rho_nr(p)


def test_insolubility_strictly_decreasing():
    gaps = [1 - rho_p(p) for p in primes_up_to(2000)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    gaps = [1 - rho_nr(p) for p in primes_up_to(2000)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))


def test_tail_bound_half_over_p_cubed():
    assert all(1 - rho_p(p) <= F(1, 2 * p**3) for p in primes_up_to(10**4) if p >= 5)
    assert certify_tail_constant(F(1, 2), 5)


def test_tail_constant_certification():
    assert certify_tail_constant()
    assert certify_tail_constant(F(1, 3))
    assert not certify_tail_constant(F(1, 50))
    assert all(1 - rho_p(p) <= density.TAIL_CONSTANT / p**3 for p in primes_up_to(500))
    assert all(1 - rho_nr(p) <= density.TAIL_CONSTANT / p**3 for p in primes_up_to(500))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_census_consistency(p):
    table = reduction_table(p)
    b = betas(p)
    total = F(1, p**10)
    assert int((table == STAR).sum()) * total == b.beta1
    assert int((table == TRIPLE).sum()) * total == b.beta2
    assert int((table == TRIANGLE).sum()) * total == b.beta3


def test_euler_product_values():
    qp = euler_product("qp", 10**4, F(1, 10**6))
    assert qp.width < F(1, 10**6) and qp.rounds_to("0.97256")
    assert qp.contains(F(qp.lower + qp.upper) / 2) and qp.lower <= qp.upper
    nr = euler_product("nr", 10**4, F(1, 10**6))
    assert nr.rounds_to("0.9996676")
    lo, hi = qp.decimal(9)
    assert F(lo) <= qp.lower and F(hi) >= qp.upper


def test_euler_product_monotone():
    a = euler_product("qp", 200, F(1, 10**4))
    b = euler_product("qp", 1000, F(1, 10**4))
    assert b.upper < a.upper and a.lower <= b.upper
    assert b.lower >= a.lower  # the longer product has a tighter tail


def test_euler_product_errors():
    with pytest.raises(ValueError):
        euler_product("qp", 50)
    with pytest.raises(ValueError):
        euler_product("padic")
    with pytest.raises(ToleranceUnachievable) as info:
        euler_product("qp", 100, F(1, 10**9))
    assert info.value.required_p_max == 14143
    assert euler_product("qp", 14143, F(1, 10**9)).width <= F(1, 10**9)


def test_rounds_to_is_strict():
    r = ProductResult("qp", F(12344, 10**5), F(12346, 10**5), 100, F(2, 5), F(0))
    assert r.rounds_to("0.123") and not r.rounds_to("0.1234")
    assert format_decimal(F(2, 3), 3, "floor") == "0.666"
    assert format_decimal(F(2, 3), 3, "ceil") == "0.667"
