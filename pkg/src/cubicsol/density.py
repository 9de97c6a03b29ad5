"""Exact local densities of soluble ternary cubics and their Euler products.

Every quantity is a :class:`fractions.Fraction`.  The conditional
probabilities are obtained by solving the small linear systems that the
descent produces; the closed forms are kept separately so the two routes can
be compared identically.

Naming: ``alpha*``/``nu*`` are probabilities of solubility over Q_p, while
the primed ``*_nr`` quantities are probabilities of *insolubility* over the
maximal unramified extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from fractions import Fraction
from functools import lru_cache

from .finite_field import sigma_tau
from .monomials import primes_up_to

TAIL_CONSTANT = Fraction(2, 5)
DEFAULT_PMAX = 10**4


class ToleranceUnachievable(ValueError):
    def __init__(self, tolerance, p_max: int, required_p_max: int):
        super().__init__(
            f"tolerance {float(tolerance):g} needs p_max >= {required_p_max} (got {p_max})"
        )
        self.tolerance = tolerance
        self.p_max = p_max
        self.required_p_max = required_p_max


def _check_p(p: int) -> Fraction:
    if p < 2:
        raise ValueError("p must be at least 2")
    return Fraction(p)


def _solve2(a11, a12, b1, a21, a22, b2) -> tuple[Fraction, Fraction]:
    """Solve x = b1 + a11 x + a12 y, y = b2 + a21 x + a22 y."""
    m11, m12, m21, m22 = 1 - a11, -a12, -a21, 1 - a22
    det = m11 * m22 - m12 * m21
    return (b1 * m22 - m12 * b2) / det, (m11 * b2 - m21 * b1) / det


# -- closed forms ------------------------------------------------------------


def f_poly(p: int) -> int:
    return p**9 - p**8 + p**6 - p**4 + p**3 + p**2 - 2 * p + 1


def g_poly(p: int) -> int:
    return 3 * (p**2 + 1) * (p**4 + 1) * (p**6 + p**3 + 1)


def rho_p(p: int) -> Fraction:
    """Probability that a random integral ternary cubic is soluble over Q_p."""
    _check_p(p)
    return 1 - Fraction(f_poly(p), g_poly(p))


def rho_nr(p: int) -> Fraction:
    """Probability of solubility over the maximal unramified extension of Q_p."""
    _check_p(p)
    num = p**11 * (p - 1) * (p**2 - 1) * (p**3 - 1)
    den = (p**8 - 1) * (p**9 - 1) * (p**10 - 1)
    return 1 - Fraction(num, den)


def alpha1_closed(p: int) -> Fraction:
    return Fraction(p**7 - p**5 + p**4 - p, p**8 - 1)


def nu_closed(p: int) -> tuple[Fraction, Fraction]:
    d = 3 * (p**8 - 1)
    return (
        Fraction(2 * p**8 + p**6 - 3 * p**5 + 3 * p**4 - p**2 - 2, d),
        Fraction(3 * p**8 - 3 * p**7 + 3 * p**6 - p**4 - 2, d),
    )


def alpha2_closed(p: int) -> Fraction:
    num = p**14 + 3 * p**11 + p**8 + 2 * p**7 + p**5 + p**4 + 1
    den = 3 * (p**2 + 1) * (p**2 + p + 1) * (p**4 + 1) * (p**6 + p**3 + 1)
    return 1 - Fraction(num, den)


def nu_nr_closed(p: int) -> tuple[Fraction, Fraction]:
    return Fraction(p**4 * (p - 1), p**8 - 1), Fraction(p**6 * (p - 1), p**8 - 1)


def alpha2_nr_closed(p: int) -> Fraction:
    return Fraction(p**11 * (p - 1) * (p**2 - 1), (p**8 - 1) * (p**9 - 1))


# -- reduction-type probabilities -----------------------------------------


@dataclass(frozen=True)
class Betas:
    """Probabilities of reduction types.

    beta1..beta3: star, triple line, triangle for an arbitrary cubic;
    beta4: line condition; beta5: point condition.  The primed values are
    conditional on the line condition, the doubly primed on the point
    condition.
    """

    beta1: Fraction
    beta2: Fraction
    beta3: Fraction
    beta4: Fraction
    beta5: Fraction
    beta1_line: Fraction
    beta2_line: Fraction
    beta3_line: Fraction
    beta1_point: Fraction
    beta2_point: Fraction
    beta3_point: Fraction


def betas(p: int) -> Betas:
    q = _check_p(p)
    # gamma: probability of one fixed star configuration, up to the choice of centre
    gamma = (q**3 - q) / 3 * (q - 1) / q**10
    beta1 = (q * q + q + 1) * gamma
    beta2 = (q**3 - 1) / q**10
    beta3 = (q + 1) * (q - 1) ** 3 / (3 * q**7)
    beta4 = (q**3 - q) / 3 * (q - 1) / q**4
    beta5 = (q - 1) / q
    return Betas(
        beta1=beta1,
        beta2=beta2,
        beta3=beta3,
        beta4=beta4,
        beta5=beta5,
        beta1_line=q * q * gamma / beta4,
        beta2_line=Fraction(0),
        beta3_line=beta3 / beta4,
        # stars whose centre avoids [1:0:0]: all centres but one
        beta1_point=(q * q + q) * gamma / beta5,
        beta2_point=q * q * (q - 1) / q**10 / beta5,
        beta3_point=beta3 / beta5,
    )


# -- the linear systems -----------------------------------------------------


def alpha_system(p: int) -> tuple[Fraction, Fraction]:
    """(alpha1, alpha4): solubility given a star, resp. the line condition."""
    q = _check_p(p)
    b = betas(p)
    # alpha1 = (1/p)((1 - 1/p^2) + (1/p^3) alpha4)
    # alpha4 = 1 - beta1'(1 - alpha1) - beta3'   (beta2' = 0)
    return _solve2(
        Fraction(0), 1 / q**4, (1 - 1 / q**2) / q,
        b.beta1_line, Fraction(0), 1 - b.beta1_line - b.beta3_line,
    )


def nu_system(p: int) -> tuple[Fraction, Fraction]:
    q = _check_p(p)
    _, _, s1, t1 = sigma_tau(p)
    # nu1 = s1 + t1 nu2
    # nu2 = (1 - 1/p) + (1/p^2)((1 - 1/p^2) + (1/p^2)(s1 + t1 nu1))
    return _solve2(
        Fraction(0), t1, s1,
        t1 / q**4, Fraction(0), (1 - 1 / q) + (1 - 1 / q**2) / q**2 + s1 / q**4,
    )


def nu_system_nr(p: int) -> tuple[Fraction, Fraction]:
    """(nu1', nu2'): insolubility over Q_p^nr under the two triangle patterns."""
    q = _check_p(p)
    _, _, _, t1 = sigma_tau(p)
    # only the triple-root branches continue; the Cr exit has mass 1/p - 1/p^2
    return _solve2(
        Fraction(0), t1, Fraction(0),
        t1 / q**4, Fraction(0), (1 - 1 / q) / q,
    )


def alpha2_alpha5(p: int) -> tuple[Fraction, Fraction]:
    """(alpha2, alpha5): solubility given a triple line, resp. the point condition."""
    q = _check_p(p)
    b = betas(p)
    sigma, tau, _, _ = sigma_tau(p)
    alpha1, _ = alpha_system(p)
    nu1, nu2 = nu_system(p)
    base2 = sigma + tau * nu2 + (1 - 1 / q**3) / q**4 + (sigma + tau * nu1) / q**7
    base5 = 1 - b.beta1_point * (1 - alpha1) - b.beta2_point - b.beta3_point
    return _solve2(Fraction(0), 1 / q**11, base2, b.beta2_point, Fraction(0), base5)


def alpha2_nr(p: int) -> Fraction:
    """Insolubility over Q_p^nr given a triple-line reduction."""
    q = _check_p(p)
    b = betas(p)
    _, tau, _, _ = sigma_tau(p)
    nu1n, nu2n = nu_system_nr(p)
    # alpha2' = tau nu2' + (1/p^7)(tau nu1' + (1/p^4) beta2'' alpha2')
    return (tau * nu2n + tau * nu1n / q**7) / (1 - b.beta2_point / q**11)


def rho_via_assembly(p: int, mode: str = "qp") -> Fraction:
    """Solubility probability rebuilt from the reduction types and conditional densities."""
    q = _check_p(p)
    b = betas(p)
    scale = q**10 / (q**10 - 1)
    if mode == "qp":
        alpha1, _ = alpha_system(p)
        alpha2, _ = alpha2_alpha5(p)
        return 1 - scale * (b.beta1 * (1 - alpha1) + b.beta2 * (1 - alpha2) + b.beta3)
    if mode == "nr":
        return 1 - scale * b.beta2 * alpha2_nr(p)
    raise ValueError(f"unknown mode {mode!r}")


@dataclass(frozen=True)
class LocalDensityReport:
    p: int
    beta1: Fraction
    beta2: Fraction
    beta3: Fraction
    beta4: Fraction
    beta5: Fraction
    beta1_line: Fraction
    beta2_line: Fraction
    beta3_line: Fraction
    beta1_point: Fraction
    beta2_point: Fraction
    beta3_point: Fraction
    alpha1: Fraction
    alpha2: Fraction
    alpha4: Fraction
    alpha5: Fraction
    nu1: Fraction
    nu2: Fraction
    nu1_nr: Fraction
    nu2_nr: Fraction
    alpha2_nr: Fraction
    rho: Fraction
    rho_nr: Fraction
    routes_agree: bool
    routes_agree_nr: bool
    closed_forms_agree: bool
    in_unit_interval: bool

    def fractions(self) -> dict[str, Fraction]:
        return {f.name: getattr(self, f.name) for f in fields(self) if isinstance(getattr(self, f.name), Fraction)}


def local_density_report(p: int) -> LocalDensityReport:
    b = betas(p)
    alpha1, alpha4 = alpha_system(p)
    alpha2, alpha5 = alpha2_alpha5(p)
    nu1, nu2 = nu_system(p)
    nu1n, nu2n = nu_system_nr(p)
    a2n = alpha2_nr(p)
    rho, rnr = rho_p(p), rho_nr(p)
    values = dict(vars(b))
    values.update(
        alpha1=alpha1, alpha2=alpha2, alpha4=alpha4, alpha5=alpha5, nu1=nu1, nu2=nu2,
        nu1_nr=nu1n, nu2_nr=nu2n, alpha2_nr=a2n, rho=rho, rho_nr=rnr,
    )
    closed = (
        alpha1 == alpha1_closed(p)
        and (nu1, nu2) == nu_closed(p)
        and alpha2 == alpha2_closed(p)
        and (nu1n, nu2n) == nu_nr_closed(p)
        and a2n == alpha2_nr_closed(p)
    )
    return LocalDensityReport(
        p=p,
        **values,
        routes_agree=rho_via_assembly(p, "qp") == rho,
        routes_agree_nr=rho_via_assembly(p, "nr") == rnr,
        closed_forms_agree=closed,
        in_unit_interval=all(0 <= v <= 1 for v in values.values()),
    )


# -- tail-bound certification ----------------------------------------------


def _poly_from_roots_product(*factors) -> list[int]:
    out = [1]
    for fac in factors:
        res = [0] * (len(out) + len(fac) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(fac):
                res[i + j] += a * b
        out = res
    return out


def _poly_eval(poly: list[int], x) -> int:
    acc = 0
    for c in reversed(poly):
        acc = acc * x + c
    return acc


def _taylor_shift(poly: list[int], s: int) -> list[int]:
    """Coefficients (ascending) of poly(s + t)."""
    out = list(poly)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += s * out[j + 1]
    return out


def _sub(u: list[int], v: list[int]) -> list[int]:
    n = max(len(u), len(v))
    u = u + [0] * (n - len(u))
    v = v + [0] * (n - len(v))
    return [a - b for a, b in zip(u, v)]


def _scale(u: list[int], k: int) -> list[int]:
    return [k * a for a in u]


def _mono(k: int) -> list[int]:
    return [0] * k + [1]


def _tail_polys(c: Fraction):
    """Polynomials P with P(p) > 0  <=>  1 - rho(p) < c/p^3, for both modes (ascending coefficients)."""
    f = [1, -2, 1, 1, 0, -1, 1, 0, -1, 1]
    g = _scale(
        _poly_from_roots_product([1, 0, 1], [1, 0, 0, 0, 1], [1, 0, 0, 1, 0, 0, 1]), 3
    )
    qp = _sub(_scale(g, c.numerator), _scale(_poly_from_roots_product(_mono(3), f), c.denominator))
    num = _poly_from_roots_product(_mono(11), [-1, 1], [-1, 0, 1], [-1, 0, 0, 1])
    den = _poly_from_roots_product([-1] + [0] * 7 + [1], [-1] + [0] * 8 + [1], [-1] + [0] * 9 + [1])
    nr = _sub(_scale(den, c.numerator), _scale(_poly_from_roots_product(_mono(3), num), c.denominator))
    return qp, nr


def _positive_from(poly: list[int], start: int, max_shift: int = 64) -> bool:
    """poly(p) > 0 for every integer p >= start."""
    for s in range(start, start + max_shift):
        shifted = _taylor_shift(poly, s)
        if all(a >= 0 for a in shifted) and shifted[0] > 0:
            return all(_poly_eval(poly, p) > 0 for p in range(start, s))
    return False


@lru_cache(maxsize=None)
def certify_tail_constant(c: Fraction = TAIL_CONSTANT, start: int = 2) -> bool:
    """Exact check that 1 - rho(p) < c/p^3 and 1 - rho^nr(p) < c/p^3 for all p >= start.

    Each inequality is cleared of denominators into a polynomial P; P(s + t)
    having nonnegative coefficients proves P > 0 from s on, and the finitely
    many integers between ``start`` and s are evaluated directly.
    """
    return all(_positive_from(poly, start) for poly in _tail_polys(Fraction(c)))


# -- Euler products -----------------------------------------------------------


@dataclass(frozen=True)
class ProductResult:
    mode: str
    lower: Fraction
    upper: Fraction
    p_max: int
    tail_constant: Fraction
    tail_bound: Fraction

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    def contains(self, x) -> bool:
        x = Fraction(x)
        return self.lower <= x <= self.upper

    def rounds_to(self, printed: str) -> bool:
        """Does every point of the enclosure round to the decimal string ``printed``?"""
        digits = len(printed.split(".")[1]) if "." in printed else 0
        half = Fraction(1, 2 * 10**digits)
        centre = Fraction(printed)
        return centre - half <= self.lower and self.upper < centre + half

    def decimal(self, digits: int = 10) -> tuple[str, str]:
        """Endpoints rounded outward to ``digits`` decimal places."""
        return (
            format_decimal(self.lower, digits, rounding="floor"),
            format_decimal(self.upper, digits, rounding="ceil"),
        )


def format_decimal(x: Fraction, digits: int, rounding: str = "nearest") -> str:
    x = Fraction(x)
    sign = "-" if x < 0 else ""
    x = abs(x)
    scaled = x * 10**digits
    if rounding == "floor":
        n = math.floor(scaled) if not sign else math.ceil(scaled)
    elif rounding == "ceil":
        n = math.ceil(scaled) if not sign else math.floor(scaled)
    else:
        n = math.floor(scaled + Fraction(1, 2))
    whole, frac = divmod(n, 10**digits)
    if digits == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{digits}d}"


def _balanced_product(values: list[Fraction]) -> Fraction:
    # pairwise product keeps the operands balanced, which is much faster than a left fold
    while len(values) > 1:
        nxt = [values[i] * values[i + 1] for i in range(0, len(values) - 1, 2)]
        if len(values) % 2:
            nxt.append(values[-1])
        values = nxt
    return values[0] if values else Fraction(1)


def euler_product(mode: str = "qp", p_max: int = DEFAULT_PMAX, tolerance=Fraction(1, 10**6)) -> ProductResult:
    """Enclosure of the product of the local densities over all primes.

    The truncated product P over p <= p_max is exact.  For every p, 1 - rho(p)
    is below c/p^3 (certified by :func:`certify_tail_constant`), and a product
    of factors 1 - x_p is at least 1 - sum x_p, which together with
    sum_{n > M} 1/n^3 < 1/(2M^2) gives [P (1 - c/(2 p_max^2)), P].
    """
    if p_max < 100:
        raise ValueError("p_max must be at least 100")
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    factor = {"qp": rho_p, "nr": rho_nr}.get(mode)
    if factor is None:
        raise ValueError(f"unknown mode {mode!r}")
    c = TAIL_CONSTANT
    if not certify_tail_constant(c):
        raise AssertionError("tail constant failed certification")
    tail = c / (2 * p_max * p_max)
    # the width is at most tail (upper <= 1), so this check can be made before the product
    if tail > tolerance:
        raise ToleranceUnachievable(tolerance, p_max, math.isqrt(math.ceil(c / (2 * tolerance))) + 1)
    upper = _balanced_product([factor(p) for p in primes_up_to(p_max)])
    return ProductResult(mode, upper * (1 - tail), upper, p_max, c, tail)
