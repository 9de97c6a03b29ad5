"""Brute-force solubility oracle over Z/p^k, independent of the state machine.

Every primitive vector mod p^k is, up to a unit, in exactly one of the
charts (1, y, z), (p x, 1, z), (p x, p y, 1).  If none of them is a zero of
C mod p^k the form has no nontrivial Z_p zero.  A zero w with
k > 2 * v(grad C(w)), the gradient valuation being read off mod p^k, lifts by
Hensel's lemma.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .monomials import is_prime

ORACLE_MAX_MODULUS = 2**14
_CHUNK = 1 << 16


class OracleKind(enum.Enum):
    SOLUBLE_CERTIFIED = "SolubleCertified"
    INSOLUBLE_CERTIFIED = "InsolubleCertified"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class OracleResult:
    kind: OracleKind
    p: int
    k: int
    witness: tuple[int, int, int] | None = None


def _charts(p: int, k: int):
    m = p**k
    full = np.arange(m, dtype=np.int64)
    mult = np.arange(0, m, p, dtype=np.int64)
    one = np.ones(1, dtype=np.int64)
    # each chart is (xs, ys, zs) to be combined as a Cartesian product
    return ((one, full, full), (mult, one, full), (mult, mult, one))


def _product_chunks(xs, ys, zs):
    # slices of the Cartesian product, never materializing the whole grid
    step = max(1, _CHUNK // len(zs))
    for x in xs:
        for start in range(0, len(ys), step):
            yc = ys[start : start + step]
            grid = np.stack(np.meshgrid(np.array([x]), yc, zs, indexing="ij"), axis=0)
            yield grid.reshape(3, -1)


def _vals(coeffs, pts, p: int, k: int):
    """C mod p^k and least gradient valuation (capped at k) at each point."""
    m = p**k
    a, b, c, d, e, f, g, h, i, j = (np.int64(int(cf) % m) for cf in coeffs)
    x, y, z = pts
    xx, yy, zz = x * x % m, y * y % m, z * z % m
    xy, xz, yz = x * y % m, x * z % m, y * z % m
    val = (
        a * (xx * x % m) % m + b * (xx * y % m) % m + c * (xx * z % m) % m
        + d * (x * yy % m) % m + e * (xy * z % m) % m + f * (x * zz % m) % m
        + g * (yy * y % m) % m + h * (yy * z % m) % m + i * (y * zz % m) % m
        + j * (zz * z % m) % m
    ) % m
    dx = (3 * a % m * xx + 2 * b % m * xy + 2 * c % m * xz + d * yy % m + e * yz % m + f * zz % m) % m
    dy = (b * xx + 2 * d % m * xy + e * xz % m + 3 * g % m * yy + 2 * h % m * yz + i * zz % m) % m
    dz = (c * xx + e * xy % m + 2 * f % m * xz + h * yy % m + 2 * i % m * yz + 3 * j % m * zz) % m
    # capped valuation: the largest t <= k with p^t dividing all three partials
    vg = np.zeros(x.shape, dtype=np.int64)
    for t in range(1, k + 1):
        pt = p**t
        ok = (dx % pt == 0) & (dy % pt == 0) & (dz % pt == 0)
        vg += ok
    return val, vg


def brute_oracle(coeffs, p: int, k: int) -> OracleResult:
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    if k < 1 or p**k > ORACLE_MAX_MODULUS:
        raise ValueError(f"p^k = {p}^{k} is outside the enumerable range (1 <= p^k <= {ORACLE_MAX_MODULUS})")
    if len(coeffs) != 10:
        raise ValueError("a ternary cubic has exactly ten coefficients")
    any_zero = False
    for xs, ys, zs in _charts(p, k):
        for pts in _product_chunks(xs, ys, zs):
            val, vg = _vals(coeffs, pts, p, k)
            zero = val == 0
            if not zero.any():
                continue
            any_zero = True
            good = np.flatnonzero(zero & (2 * vg < k))
            if good.size:
                w = tuple(int(c) for c in pts[:, good[0]])
                return OracleResult(OracleKind.SOLUBLE_CERTIFIED, p, k, w)
    if any_zero:
        return OracleResult(OracleKind.UNKNOWN, p, k)
    return OracleResult(OracleKind.INSOLUBLE_CERTIFIED, p, k)
