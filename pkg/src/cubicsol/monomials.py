"""Monomial bookkeeping for ternary cubics and small integer helpers.

Coefficients of a ternary cubic are always stored in the order

    a X^3 + b X^2Y + c X^2Z + d XY^2 + e XYZ + f XZ^2 + g Y^3 + h Y^2Z + i YZ^2 + j Z^3

and ``EXPONENTS[k]`` gives the exponent triple of the k-th monomial.
"""

from __future__ import annotations

from functools import lru_cache
from math import isqrt

EXPONENTS: tuple[tuple[int, int, int], ...] = (
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
    (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
)
NAMES = ("X^3", "X^2Y", "X^2Z", "XY^2", "XYZ", "XZ^2", "Y^3", "Y^2Z", "YZ^2", "Z^3")
INDEX = {e: k for k, e in enumerate(EXPONENTS)}

# c_1 = bY + cZ, c_2 = dY^2 + eYZ + fZ^2, c_3 = gY^3 + hY^2Z + iYZ^2 + jZ^3
C0 = (0,)
C1 = (1, 2)
C2 = (3, 4, 5)
C3 = (6, 7, 8, 9)

Matrix = tuple[tuple[int, int, int], tuple[int, int, int], tuple[int, int, int]]
IDENTITY: Matrix = ((1, 0, 0), (0, 1, 0), (0, 0, 1))


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def primes_up_to(n: int) -> list[int]:
    """Sieve of Eratosthenes."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, isqrt(n) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, n + 1, i)))
    return [i for i, flag in enumerate(sieve) if flag]


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def evaluate(coeffs, x: int, y: int, z: int) -> int:
    a, b, c, d, e, f, g, h, i, j = coeffs
    return (
        x * x * (a * x + b * y + c * z)
        + x * (d * y * y + e * y * z + f * z * z)
        + y * y * (g * y + h * z)
        + z * z * (i * y + j * z)
    )


def gradient(coeffs, x: int, y: int, z: int) -> tuple[int, int, int]:
    """Formal partial derivatives, exact over the integers."""
    a, b, c, d, e, f, g, h, i, j = coeffs
    dx = 3 * a * x * x + 2 * b * x * y + 2 * c * x * z + d * y * y + e * y * z + f * z * z
    dy = b * x * x + 2 * d * x * y + e * x * z + 3 * g * y * y + 2 * h * y * z + i * z * z
    dz = c * x * x + e * x * y + 2 * f * x * z + h * y * y + 2 * i * y * z + 3 * j * z * z
    return dx, dy, dz


def _poly_mul(u: dict, v: dict) -> dict:
    out: dict = {}
    for eu, cu in u.items():
        for ev, cv in v.items():
            key = (eu[0] + ev[0], eu[1] + ev[1], eu[2] + ev[2])
            out[key] = out.get(key, 0) + cu * cv
    return out


@lru_cache(maxsize=4096)
def substitution_matrix(m: Matrix) -> tuple[tuple[int, ...], ...]:
    """10x10 integer matrix T with coeffs(C(M v)) = T @ coeffs(C).

    Row k of T gives the k-th new coefficient as a combination of the old ones.
    """
    linear = []
    for row in m:
        linear.append({(1, 0, 0): row[0], (0, 1, 0): row[1], (0, 0, 1): row[2]})
    cols = []
    for ex, ey, ez in EXPONENTS:
        prod = {(0, 0, 0): 1}
        for _ in range(ex):
            prod = _poly_mul(prod, linear[0])
        for _ in range(ey):
            prod = _poly_mul(prod, linear[1])
        for _ in range(ez):
            prod = _poly_mul(prod, linear[2])
        cols.append(tuple(prod.get(e, 0) for e in EXPONENTS))
    return tuple(tuple(cols[j][k] for j in range(10)) for k in range(10))


def substitute(coeffs, m: Matrix) -> tuple[int, ...]:
    """Coefficients of C(M v) over the integers."""
    t = substitution_matrix(m)
    return tuple(sum(tk[j] * coeffs[j] for j in range(10)) for tk in t)


def mat_mul(m: Matrix, n: Matrix) -> Matrix:
    return tuple(
        tuple(sum(m[i][k] * n[k][j] for k in range(3)) for j in range(3)) for i in range(3)
    )  # type: ignore[return-value]


def mat_vec(m: Matrix, v) -> tuple[int, int, int]:
    return tuple(sum(m[i][k] * v[k] for k in range(3)) for i in range(3))  # type: ignore[return-value]


def det3(m: Matrix) -> int:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


def adjugate3(m: Matrix) -> Matrix:
    """Adjugate, so that m @ adj(m) = det(m) * I."""
    def cof(i, j):
        rows = [r for r in range(3) if r != i]
        cols = [c for c in range(3) if c != j]
        minor = m[rows[0]][cols[0]] * m[rows[1]][cols[1]] - m[rows[0]][cols[1]] * m[rows[1]][cols[0]]
        return minor if (i + j) % 2 == 0 else -minor

    return tuple(tuple(cof(j, i) for j in range(3)) for i in range(3))  # type: ignore[return-value]
