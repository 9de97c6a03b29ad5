"""Ternary cubic forms over F_p: evaluation, smooth points, reduction types.

Points and lines of P^2(F_p) are normalized so that the first nonzero
coordinate is 1 and are always scanned in colexicographic order, i.e. sorted
by ``(z, y, x)``; "first smooth point" means first in that order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache

from .finite_field import _check_prime
from .monomials import EXPONENTS, IDENTITY, Matrix, adjugate3, det3, substitute


class UnclassifiableReduction(AssertionError):
    """A reduction outside the star/triangle/triple-line trichotomy (a bug)."""


@dataclass(frozen=True)
class ProjPointFp:
    x: int
    y: int
    z: int
    p: int

    @classmethod
    def normalized(cls, x: int, y: int, z: int, p: int) -> ProjPointFp:
        x, y, z = x % p, y % p, z % p
        lead = x or y or z
        if not lead:
            raise ValueError("[0:0:0] is not a projective point")
        inv = pow(lead, -1, p)
        return cls(x * inv % p, y * inv % p, z * inv % p, p)

    @property
    def coords(self) -> tuple[int, int, int]:
        return (self.x, self.y, self.z)

    def __iter__(self):
        return iter(self.coords)

    def __repr__(self):
        return f"[{self.x}:{self.y}:{self.z}]"


@dataclass(frozen=True)
class TernaryCubicFp:
    p: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        _check_prime(self.p)
        if len(self.coeffs) != 10:
            raise ValueError("a ternary cubic has exactly ten coefficients")
        object.__setattr__(self, "coeffs", tuple(int(c) % self.p for c in self.coeffs))

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __call__(self, point) -> int:
        return eval_form(self, point)


@lru_cache(maxsize=None)
def projective_points(p: int) -> tuple[tuple[int, int, int], ...]:
    pts = [(0, 0, 1)]
    pts += [(0, 1, z) for z in range(p)]
    pts += [(1, y, z) for y in range(p) for z in range(p)]
    return tuple(sorted(pts, key=lambda t: (t[2], t[1], t[0])))


# lines share the coordinate format: (l0, l1, l2) is the line l0 X + l1 Y + l2 Z = 0
projective_lines = projective_points


@lru_cache(maxsize=None)
def _point_tables(p: int):
    """Per point: monomial values and the three partial-derivative rows, mod p."""
    tables = []
    for x, y, z in projective_points(p):
        mono = []
        dx, dy, dz = [], [], []
        for ex, ey, ez in EXPONENTS:
            mono.append(pow(x, ex) * pow(y, ey) * pow(z, ez) % p)
            dx.append(ex * pow(x, ex - 1) * pow(y, ey) * pow(z, ez) % p if ex else 0)
            dy.append(ey * pow(x, ex) * pow(y, ey - 1) * pow(z, ez) % p if ey else 0)
            dz.append(ez * pow(x, ex) * pow(y, ey) * pow(z, ez - 1) % p if ez else 0)
        tables.append(((x, y, z), tuple(mono), tuple(dx), tuple(dy), tuple(dz)))
    return tuple(tables)


def _dot(c, row) -> int:
    return (
        c[0] * row[0] + c[1] * row[1] + c[2] * row[2] + c[3] * row[3] + c[4] * row[4]
        + c[5] * row[5] + c[6] * row[6] + c[7] * row[7] + c[8] * row[8] + c[9] * row[9]
    )


def eval_form(form: TernaryCubicFp, point) -> int:
    x, y, z = point
    p = form.p
    return sum(
        c * pow(x, ex, p) * pow(y, ey, p) * pow(z, ez, p) for c, (ex, ey, ez) in zip(form.coeffs, EXPONENTS)
    ) % p


def gradient_form(form: TernaryCubicFp, point) -> tuple[int, int, int]:
    """Formal partials at ``point``; exponents are multiplied in before reducing mod p."""
    x, y, z = point
    p = form.p
    out = [0, 0, 0]
    for c, (ex, ey, ez) in zip(form.coeffs, EXPONENTS):
        if ex:
            out[0] += c * ex * x ** (ex - 1) * y**ey * z**ez
        if ey:
            out[1] += c * ey * x**ex * y ** (ey - 1) * z**ez
        if ez:
            out[2] += c * ez * x**ex * y**ey * z ** (ez - 1)
    return (out[0] % p, out[1] % p, out[2] % p)


def _scan(coeffs: tuple[int, ...], p: int):
    """(first smooth point or None, number of F_p points)."""
    smooth = None
    count = 0
    for pt, mono, dx, dy, dz in _point_tables(p):
        if _dot(coeffs, mono) % p:
            continue
        count += 1
        if smooth is None and (_dot(coeffs, dx) % p or _dot(coeffs, dy) % p or _dot(coeffs, dz) % p):
            smooth = pt
    return smooth, count


def find_smooth_point(form: TernaryCubicFp) -> ProjPointFp | None:
    if form.is_zero():
        raise ValueError("the zero form has no smooth points")
    p = form.p
    for pt, mono, dx, dy, dz in _point_tables(p):
        if _dot(form.coeffs, mono) % p == 0 and (
            _dot(form.coeffs, dx) % p or _dot(form.coeffs, dy) % p or _dot(form.coeffs, dz) % p
        ):
            return ProjPointFp(*pt, p)
    return None


def scale_normalize(coeffs, p: int) -> tuple[int, ...]:
    """Scalar multiple whose first nonzero coefficient is 1."""
    lead = next((c for c in coeffs if c % p), 0)
    if not lead:
        return tuple(0 for _ in coeffs)
    inv = pow(lead, -1, p)
    return tuple(c * inv % p for c in coeffs)


def line_cube(line, p: int) -> tuple[int, ...]:
    l0, l1, l2 = line
    m = ((l0, l1, l2), (0, 0, 0), (0, 0, 0))
    # C = X^3 pulled back along v -> (L(v), 0, 0)
    return tuple(c % p for c in substitute((1, 0, 0, 0, 0, 0, 0, 0, 0, 0), m))


@lru_cache(maxsize=None)
def _cube_table(p: int) -> dict:
    return {scale_normalize(line_cube(line, p), p): line for line in projective_lines(p)}


def triple_line_of(form: TernaryCubicFp) -> tuple[int, int, int] | None:
    """The F_p-line L with form = u L^3, if any."""
    if form.is_zero():
        return None
    return _cube_table(form.p).get(scale_normalize(form.coeffs, form.p))


class ReductionTag(enum.Enum):
    SMOOTH_POINT = "SmoothPoint"
    STAR = "Star"
    TRIANGLE = "Triangle"
    TRIPLE_LINE = "TripleLine"
    ZERO_FORM = "ZeroForm"


@dataclass(frozen=True)
class ReductionClass:
    tag: ReductionTag
    point: ProjPointFp | None = None  # smooth point, or the centre of a star
    line: tuple[int, int, int] | None = None
    point_count: int = 0


def classify_reduction(form: TernaryCubicFp) -> ReductionClass:
    return _classify(form.coeffs, form.p)


@lru_cache(maxsize=1 << 18)
def _classify(coeffs: tuple[int, ...], p: int) -> ReductionClass:
    if not any(coeffs):
        return ReductionClass(ReductionTag.ZERO_FORM, point_count=p * p + p + 1)
    smooth, count = _scan(coeffs, p)
    if smooth is not None:
        return ReductionClass(ReductionTag.SMOOTH_POINT, ProjPointFp(*smooth, p), point_count=count)
    line = _cube_table(p).get(scale_normalize(coeffs, p))
    if line is not None:
        return ReductionClass(ReductionTag.TRIPLE_LINE, line=line, point_count=count)
    if count == 0:
        return ReductionClass(ReductionTag.TRIANGLE, point_count=0)
    if count == 1:
        for pt, mono, *_ in _point_tables(p):
            if _dot(coeffs, mono) % p == 0:
                return ReductionClass(ReductionTag.STAR, ProjPointFp(*pt, p), point_count=1)
    raise UnclassifiableReduction(f"no smooth point but {count} points: {coeffs} mod {p}")


def frame_to_point(point, p: int) -> Matrix:
    """Unimodular M with M e_1 = point, so that C(M v) has its special point at [1:0:0].

    The point replaces the standard basis vector at its first nonzero position,
    and that vector is swapped into the vacated column.
    """
    pt = ProjPointFp.normalized(*point, p).coords
    k = next(i for i in range(3) if pt[i])
    cols = [list(c) for c in IDENTITY]
    cols[0], cols[k] = cols[k], cols[0]
    cols[0] = list(pt)
    return tuple(tuple(cols[j][i] for j in range(3)) for i in range(3))  # type: ignore[return-value]


def frame_to_line(line, p: int) -> Matrix:
    """Unimodular M with L(M v) = X, so that C(M v) has its special line at X = 0."""
    ln = ProjPointFp.normalized(*line, p).coords
    k = next(i for i in range(3) if ln[i])
    rows = [list(r) for r in IDENTITY]
    rows[0], rows[k] = rows[k], rows[0]
    rows[0] = list(ln)
    n = tuple(tuple(r) for r in rows)
    d = det3(n)
    assert d in (1, -1)
    adj = adjugate3(n)
    return tuple(tuple(d * v for v in row) for row in adj)  # type: ignore[return-value]


def canonical_frame_change(form: TernaryCubicFp, target) -> tuple[Matrix, TernaryCubicFp]:
    """Move a star centre to [1:0:0] or a triple line to X = 0.

    ``target`` is a :class:`ReductionClass` (Star or TripleLine), or a tuple
    ``("point", (x, y, z))`` / ``("line", (l0, l1, l2))``.
    """
    p = form.p
    if isinstance(target, ReductionClass):
        if target.tag is ReductionTag.STAR:
            target = ("point", target.point.coords)
        elif target.tag is ReductionTag.TRIPLE_LINE:
            target = ("line", target.line)
        else:
            raise ValueError(f"no canonical frame for {target.tag.value}")
    kind, data = target
    if kind == "point":
        m = frame_to_point(data, p)
    elif kind == "line":
        m = frame_to_line(data, p)
    else:
        raise ValueError(f"unknown frame target {kind!r}")
    return m, TernaryCubicFp(p, substitute(form.coeffs, m))
