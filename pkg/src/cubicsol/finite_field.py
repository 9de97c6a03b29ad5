"""Monic cubics and binary cubic forms over a prime field F_p.

Residues are plain ints in ``[0, p)``; :class:`FpElem` is provided for callers
who want checked arithmetic on single elements.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .monomials import is_prime

MONIC_CENSUS_MAX_P = 100
BINARY_CENSUS_MAX_P = 100


class EnumerationTooLarge(ValueError):
    pass


def _check_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")


@dataclass(frozen=True)
class FpElem:
    value: int
    p: int

    def __post_init__(self):
        _check_prime(self.p)
        if not 0 <= self.value < self.p:
            object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ValueError("mixed moduli")
            return other.value
        return other % self.p

    def __add__(self, other):
        return FpElem((self.value + self._coerce(other)) % self.p, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpElem((self.value - self._coerce(other)) % self.p, self.p)

    def __rsub__(self, other):
        return FpElem((self._coerce(other) - self.value) % self.p, self.p)

    def __mul__(self, other):
        return FpElem(self.value * self._coerce(other) % self.p, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value % self.p, self.p)

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return FpElem(pow(self.value, k, self.p), self.p)

    def inverse(self) -> FpElem:
        if self.value == 0:
            raise ZeroDivisionError("0 has no inverse in F_p")
        return FpElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * FpElem(self._coerce(other), self.p).inverse()

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


class RootType(enum.Enum):
    THREE_DISTINCT_RATIONAL = "ThreeDistinctRational"
    ONE_RATIONAL_TWO_CONJUGATE = "OneRationalTwoConjugate"
    IRREDUCIBLE_TRIPLET = "IrreducibleTriplet"
    SIMPLE_DOUBLE = "SimpleDouble"
    TRIPLE = "Triple"
    ZERO = "Zero"


@dataclass(frozen=True)
class CubicRootType:
    """Root configuration of a cubic.

    ``roots`` pairs each F_p-root with its multiplicity: residues for monic
    cubics, normalized ``(x, y)`` points of P^1 for binary forms.
    """

    tag: RootType
    roots: tuple = field(default=())

    @property
    def has_simple_root(self) -> bool:
        return any(m == 1 for _, m in self.roots)


@dataclass(frozen=True)
class MonicCubic:
    """X^3 + c2 X^2 + c1 X + c0."""

    p: int
    c2: int
    c1: int
    c0: int

    def __post_init__(self):
        _check_prime(self.p)
        for name in ("c2", "c1", "c0"):
            object.__setattr__(self, name, getattr(self, name) % self.p)

    def __call__(self, t: int) -> int:
        return (((t + self.c2) * t + self.c1) * t + self.c0) % self.p


@dataclass(frozen=True)
class BinaryCubicForm:
    """b0 X^3 + b1 X^2Y + b2 XY^2 + b3 Y^3."""

    p: int
    b0: int
    b1: int
    b2: int
    b3: int

    def __post_init__(self):
        _check_prime(self.p)
        for name in ("b0", "b1", "b2", "b3"):
            object.__setattr__(self, name, getattr(self, name) % self.p)

    @property
    def coeffs(self) -> tuple[int, int, int, int]:
        return (self.b0, self.b1, self.b2, self.b3)

    def __call__(self, x: int, y: int) -> int:
        return (
            self.b0 * x * x * x + self.b1 * x * x * y + self.b2 * x * y * y + self.b3 * y * y * y
        ) % self.p

    def is_zero(self) -> bool:
        return self.coeffs == (0, 0, 0, 0)


def _synthetic_div(poly: list[int], r: int, p: int) -> tuple[list[int], int]:
    """Divide poly (highest degree first) by (t - r); return quotient, remainder."""
    out = []
    acc = 0
    for c in poly:
        acc = (acc * r + c) % p
        out.append(acc)
    return out[:-1], out[-1]


def _roots_with_multiplicity(poly: list[int], p: int) -> list[tuple[int, int]]:
    # trial division only: characteristic 2 and 3 make derivative tests unreliable
    roots = []
    for r in range(p):
        m = 0
        q = poly
        while len(q) > 1:
            quo, rem = _synthetic_div(q, r, p)
            if rem:
                break
            q = quo
            m += 1
        if m:
            roots.append((r, m))
    return roots


def _tag_from_multiplicities(mults: list[int]) -> RootType:
    total = sum(mults)
    if total == 3:
        return {
            (1, 1, 1): RootType.THREE_DISTINCT_RATIONAL,
            (1, 2): RootType.SIMPLE_DOUBLE,
            (3,): RootType.TRIPLE,
        }[tuple(sorted(mults))]
    if total == 1:
        return RootType.ONE_RATIONAL_TWO_CONJUGATE
    if total == 0:
        return RootType.IRREDUCIBLE_TRIPLET
    raise AssertionError(f"impossible root multiplicities {mults}")


def classify_monic_cubic(g: MonicCubic) -> CubicRootType:
    roots = _roots_with_multiplicity([1, g.c2, g.c1, g.c0], g.p)
    return CubicRootType(_tag_from_multiplicities([m for _, m in roots]), tuple(roots))


def normalize_p1(x: int, y: int, p: int) -> tuple[int, int]:
    """Representative of [x:y] with first nonzero coordinate equal to 1."""
    x %= p
    y %= p
    if x:
        return 1, y * pow(x, -1, p) % p
    if y:
        return 0, 1
    raise ValueError("[0:0] is not a point of P^1")


def classify_binary_cubic(form: BinaryCubicForm) -> CubicRootType:
    return _classify_binary(form.coeffs, form.p)


@lru_cache(maxsize=1 << 16)
def _classify_binary(coeffs: tuple[int, int, int, int], p: int) -> CubicRootType:
    if coeffs == (0, 0, 0, 0):
        return CubicRootType(RootType.ZERO, ())
    # Y divides the form as often as leading coefficients vanish: the root [1:0]
    k = 0
    while coeffs[k] == 0:
        k += 1
    roots = []
    if k:
        roots.append(((1, 0), k))
    for r, m in _roots_with_multiplicity(list(coeffs[k:]), p):
        roots.append((normalize_p1(r, 1, p), m))
    roots.sort()
    return CubicRootType(_tag_from_multiplicities([m for _, m in roots]), tuple(roots))


def binary_root_type(coeffs, p: int) -> CubicRootType:
    """Classify b0 U^3 + b1 U^2V + b2 UV^2 + b3 V^3 given as residues."""
    return _classify_binary(tuple(c % p for c in coeffs), p)


def monic_closed_forms(q: int) -> dict[RootType, int]:
    return {
        RootType.THREE_DISTINCT_RATIONAL: q * (q - 1) * (q - 2) // 6,
        RootType.ONE_RATIONAL_TWO_CONJUGATE: q * q * (q - 1) // 2,
        RootType.IRREDUCIBLE_TRIPLET: q * (q * q - 1) // 3,
        RootType.SIMPLE_DOUBLE: q * (q - 1),
        RootType.TRIPLE: q,
    }


def binary_closed_forms(q: int) -> dict[RootType, int]:
    base = q * (q * q - 1) * (q - 1)
    return {
        RootType.THREE_DISTINCT_RATIONAL: base // 6,
        RootType.ONE_RATIONAL_TWO_CONJUGATE: base // 2,
        RootType.IRREDUCIBLE_TRIPLET: base // 3,
        RootType.SIMPLE_DOUBLE: q * (q * q - 1),
        RootType.TRIPLE: q * q - 1,
        RootType.ZERO: 1,
    }


def census_monic_cubics(p: int) -> dict[RootType, int]:
    _check_prime(p)
    if p > MONIC_CENSUS_MAX_P:
        raise EnumerationTooLarge(f"p={p} exceeds the monic census cap {MONIC_CENSUS_MAX_P}")
    counts = Counter({t: 0 for t in monic_closed_forms(p)})
    for c2 in range(p):
        for c1 in range(p):
            for c0 in range(p):
                counts[classify_monic_cubic(MonicCubic(p, c2, c1, c0)).tag] += 1
    return dict(counts)


def census_binary_cubics(p: int) -> dict[RootType, int]:
    _check_prime(p)
    if p > BINARY_CENSUS_MAX_P:
        raise EnumerationTooLarge(f"p={p} exceeds the binary census cap {BINARY_CENSUS_MAX_P}")
    counts = Counter({t: 0 for t in RootType})
    r = range(p)
    for b0 in r:
        for b1 in r:
            for b2 in r:
                for b3 in r:
                    counts[_classify_binary((b0, b1, b2, b3), p).tag] += 1
    return dict(counts)


def sigma_tau(q: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(sigma, tau, sigma_1, tau_1).

    sigma, tau: probabilities that a binary cubic over F_q has a simple root
    in P^1(F_q), resp. a triple root; sigma_1, tau_1: the same for monic cubics.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    q = Fraction(q)
    sigma = (q * q - 1) * (2 * q + 1) / (3 * q**3)
    tau = (q * q - 1) / q**4
    sigma1 = Fraction(2, 3) * (q * q - 1) / (q * q)
    tau1 = 1 / (q * q)
    return sigma, tau, sigma1, tau1
