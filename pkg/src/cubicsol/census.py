"""Exhaustive classification of plane cubics over F_p, vectorized with numpy.

Forms are enumerated up to scaling (first nonzero coefficient 1) in blocks;
each block is classified with a handful of small matrix products whose
entries stay far below 2**24, so float32 BLAS arithmetic is exact.
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import Pool

import numpy as np

from .cubic_forms import frame_to_line, frame_to_point, line_cube, projective_lines, projective_points
from .finite_field import EnumerationTooLarge, _check_prime
from .monomials import EXPONENTS, adjugate3, det3, substitution_matrix

CENSUS_MAX_P = 5
BLOCK = 1 << 16

CATEGORIES = (
    "smooth",
    "nodal",
    "cuspidal",
    "L^3",
    "L1L2^2",
    "three rational lines",
    "conjugate star",
    "conjugate triangle",
    "line+conjugate pair",
    "line x irreducible conic",
)

CONIC_EXPONENTS = ((2, 0, 0), (1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


@dataclass(frozen=True)
class CensusRow:
    category: str
    count_up_to_scaling: int
    closed_form: int

    @property
    def match(self) -> bool:
        return self.count_up_to_scaling == self.closed_form

    def as_dict(self) -> dict:
        return {
            "category": self.category,
            "count_up_to_scaling": self.count_up_to_scaling,
            "closed_form": self.closed_form,
            "match": self.match,
        }


def pgl3_order(q: int) -> int:
    return q**3 * (q**3 - 1) * (q**2 - 1)


def ternary_closed_forms(q: int) -> dict[str, int]:
    n1 = q * q + q + 1
    n = pgl3_order(q)
    return {
        "smooth": n * q,
        "nodal": n,
        "cuspidal": n // (q - 1),
        "L^3": n1,
        "L1L2^2": q * (q + 1) * n1,
        "three rational lines": q * (q + 1) * (q * q + q - 1) * n1 // 6,
        "conjugate star": q * (q * q - 1) * n1 // 3,
        "conjugate triangle": q**3 * (q * q - 1) * (q - 1) // 3,
        "line+conjugate pair": q * (q - 1) * n1 * n1 // 2,
        "line x irreducible conic": q * q * (q - 1) * n1 * n1,
    }


def _form_matrix(m, src, dst) -> np.ndarray:
    """Integer matrix of v -> (form of exponents src pulled back along M), in dst basis."""
    out = np.zeros((len(dst), len(src)), dtype=np.int64)
    index = {e: k for k, e in enumerate(dst)}
    for j, (ex, ey, ez) in enumerate(src):
        prod = {(0, 0, 0): 1}
        for var, times in ((0, ex), (1, ey), (2, ez)):
            for _ in range(times):
                new: dict = {}
                for e, c in prod.items():
                    for k in range(3):
                        if m[var][k]:
                            e2 = list(e)
                            e2[k] += 1
                            e2 = tuple(e2)
                            new[e2] = new.get(e2, 0) + c * m[var][k]
                prod = new
        for e, c in prod.items():
            out[index[e], j] += c
    return out


@lru_cache(maxsize=None)
def _tables(p: int):
    pts = projective_points(p)
    lines = projective_lines(p)
    npts = len(pts)

    def monomial_values(exps, pt):
        return [int(np.prod([pow(v, e) for v, e in zip(pt, ex)])) % p for ex in exps]

    values = np.array([monomial_values(EXPONENTS, pt) for pt in pts], dtype=np.float32).T
    grads = []
    for var in range(3):
        cols = []
        for pt in pts:
            col = []
            for ex in EXPONENTS:
                e = list(ex)
                if e[var] == 0:
                    col.append(0)
                    continue
                k = e[var]
                e[var] -= 1
                col.append(k * int(np.prod([pow(v, t) for v, t in zip(pt, e)])) % p)
            cols.append(col)
        grads.append(np.array(cols, dtype=np.float32).T)
    conic_values = np.array([monomial_values(CONIC_EXPONENTS, pt) for pt in pts], dtype=np.float32).T

    # restriction of a cubic to each line, as a binary cubic in the line's parameters
    restrict = []
    conic_restrict = []
    quotient = []
    for ln in lines:
        m = frame_to_line(ln, p)  # L(M v) = X
        n = tuple(tuple(r) for r in adjugate3(m))
        d = det3(m)
        n = tuple(tuple(d * v for v in row) for row in n)  # M^{-1}
        # on L the new X vanishes, so C(M(0, s, t)) is the restriction
        t = np.array(substitution_matrix(m), dtype=np.int64)
        keep = [k for k, e in enumerate(EXPONENTS) if e[0] == 0]
        restrict.append(t[keep] % p)
        tc = _form_matrix(m, CONIC_EXPONENTS, CONIC_EXPONENTS)
        ckeep = [k for k, e in enumerate(CONIC_EXPONENTS) if e[0] == 0]
        conic_restrict.append(tc[ckeep] % p)
        # C(M v) = X * Q'(v); Q(w) = Q'(M^{-1} w) satisfies C = L * Q
        drop = np.zeros((6, 10), dtype=np.int64)
        for k, e in enumerate(EXPONENTS):
            if e[0]:
                drop[CONIC_EXPONENTS.index((e[0] - 1, e[1], e[2])), k] = 1
        back = _form_matrix(n, CONIC_EXPONENTS, CONIC_EXPONENTS)
        quotient.append((back @ drop @ t) % p)
    restrict = np.concatenate([r.T for r in restrict], axis=1).astype(np.float32)
    conic_restrict = np.stack(conic_restrict).astype(np.int64)
    quotient = np.stack(quotient).astype(np.int64)

    # tangent cone at each point: degree-2 part of C(M(1, Y, Z)) with M e_1 = point
    cone = []
    for pt in pts:
        t = np.array(substitution_matrix(frame_to_point(pt, p)), dtype=np.int64)
        cone.append(t[3:6] % p)
    cone = np.stack(cone)
    return {
        "npts": npts,
        "nlines": len(lines),
        "values": values,
        "grads": grads,
        "conic_values": conic_values,
        "restrict": restrict,
        "conic_restrict": conic_restrict,
        "quotient": quotient,
        "cone": cone,
    }


def _mod(a: np.ndarray, p: int) -> np.ndarray:
    return np.fmod(a, p).astype(np.int16)


def _geometry(forms: np.ndarray, p: int):
    tb = _tables(p)
    f = forms.astype(np.float32)
    zero = _mod(f @ tb["values"], p) == 0
    sing = zero.copy()
    for g in tb["grads"]:
        sing &= _mod(f @ g, p) == 0
    return zero, sing


def _line_divisors(forms: np.ndarray, p: int) -> np.ndarray:
    tb = _tables(p)
    r = _mod(forms.astype(np.float32) @ tb["restrict"], p)
    return ~r.reshape(len(forms), tb["nlines"], 4).any(axis=2)


def classify_block(forms: np.ndarray, p: int) -> Counter:
    """Category counts for a block of forms (rows of ten residues)."""
    tb = _tables(p)
    zero, sing = _geometry(forms, p)
    npoints = zero.sum(axis=1)
    nsing = sing.sum(axis=1)
    has_smooth = (zero & ~sing).any(axis=1)
    div = _line_divisors(forms, p)
    m = div.sum(axis=1)
    counts: Counter = Counter()
    counts["three rational lines"] += int((m == 3).sum())
    counts["L1L2^2"] += int((m == 2).sum())
    if (m > 3).any():
        raise AssertionError("a cubic with more than three linear factors")

    one = np.nonzero(m == 1)[0]
    if len(one):
        lidx = div[one].argmax(axis=1)
        q = np.einsum("nij,nj->ni", tb["quotient"][lidx], forms[one].astype(np.int64)) % p
        on_line = np.einsum("nij,nj->ni", tb["conic_restrict"][lidx], q) % p
        cube = ~on_line.any(axis=1)
        qpts = (_mod(q.astype(np.float32) @ tb["conic_values"], p) == 0).sum(axis=1)
        counts["L^3"] += int(cube.sum())
        pair = ~cube & (qpts == 1)
        conic = ~cube & (qpts == p + 1)
        counts["line+conjugate pair"] += int(pair.sum())
        counts["line x irreducible conic"] += int(conic.sum())
        if int(cube.sum() + pair.sum() + conic.sum()) != len(one):
            raise AssertionError("unrecognized conic factor")

    none = m == 0
    triangle = none & (npoints == 0)
    star = none & (npoints == 1) & ~has_smooth
    counts["conjugate triangle"] += int(triangle.sum())
    counts["conjugate star"] += int(star.sum())
    irreducible = none & ~triangle & ~star
    if (irreducible & ~has_smooth).any():
        raise AssertionError("absolutely irreducible cubic without smooth points")
    if (irreducible & (nsing > 1)).any():
        raise AssertionError("irreducible cubic with several singular points")
    counts["smooth"] += int((irreducible & (nsing == 0)).sum())
    sing_rows = np.nonzero(irreducible & (nsing == 1))[0]
    if len(sing_rows):
        sidx = sing[sing_rows].argmax(axis=1)
        tc = np.einsum("nij,nj->ni", tb["cone"][sidx], forms[sing_rows].astype(np.int64)) % p
        d, e, f = tc[:, 0], tc[:, 1], tc[:, 2]
        if p == 2:
            cusp = e == 0
        else:
            cusp = (e * e - 4 * d * f) % p == 0
        counts["cuspidal"] += int(cusp.sum())
        counts["nodal"] += int((~cusp).sum())
    return counts


def _digits(start: int, stop: int, width: int, p: int) -> np.ndarray:
    n = np.arange(start, stop, dtype=np.int64)
    out = np.empty((len(n), width), dtype=np.int8)
    for k in range(width - 1, -1, -1):
        out[:, k] = n % p
        n //= p
    return out


def normalized_blocks(p: int, block: int = BLOCK):
    """(lead, start, stop) ranges covering all forms with first nonzero coefficient 1."""
    for lead in range(10):
        total = p ** (9 - lead)
        for start in range(0, total, block):
            yield lead, start, min(start + block, total)


def _materialize(p: int, lead: int, start: int, stop: int) -> np.ndarray:
    tail = _digits(start, stop, 9 - lead, p)
    forms = np.zeros((stop - start, 10), dtype=np.int8)
    forms[:, lead] = 1
    forms[:, lead + 1 :] = tail
    return forms


def _census_task(args) -> Counter:
    p, lead, start, stop = args
    return classify_block(_materialize(p, lead, start, stop), p)


def census_ternary_cubics(p: int, workers: int = 1) -> list[CensusRow]:
    _check_prime(p)
    if p > CENSUS_MAX_P:
        raise EnumerationTooLarge(f"ternary census is limited to p <= {CENSUS_MAX_P}")
    tasks = [(p, *b) for b in normalized_blocks(p)]
    total: Counter = Counter()
    if workers > 1:
        with Pool(workers) as pool:
            for c in pool.imap_unordered(_census_task, tasks):
                total.update(c)
    else:
        for t in tasks:
            total.update(_census_task(t))
    closed = ternary_closed_forms(p)
    return [CensusRow(cat, total.get(cat, 0), closed[cat]) for cat in CATEGORIES]


# reduction codes shared with the samplers
SMOOTH, STAR, TRIANGLE, TRIPLE, ZERO = range(5)


def reduction_codes(forms: np.ndarray, p: int) -> np.ndarray:
    """Reduction type code of each row (not necessarily normalized)."""
    zero, sing = _geometry(forms, p)
    npoints = zero.sum(axis=1)
    has_smooth = (zero & ~sing).any(axis=1)
    out = np.full(len(forms), SMOOTH, dtype=np.int8)
    rest = ~has_smooth
    is_zero = ~forms.any(axis=1)
    out[rest & (npoints == 0)] = TRIANGLE
    out[rest & (npoints == 1)] = STAR
    tri = rest & (npoints == p + 1)
    if tri.any():
        div = _line_divisors(forms[tri], p)
        if not (div.sum(axis=1) == 1).all():
            raise AssertionError("cubic without smooth points that is not a triple line")
    out[tri] = TRIPLE
    out[is_zero] = ZERO
    bad = rest & ~is_zero & ~np.isin(npoints, (0, 1, p + 1))
    if bad.any():
        raise AssertionError("reduction outside the star/triangle/triple-line trichotomy")
    return out


@lru_cache(maxsize=4)
def reduction_table(p: int) -> np.ndarray:
    """Reduction code of every residue form, indexed by sum(c_k * p**k)."""
    if p > CENSUS_MAX_P:
        raise EnumerationTooLarge(f"reduction table is limited to p <= {CENSUS_MAX_P}")
    total = p**10
    out = np.empty(total, dtype=np.int8)
    for start in range(0, total, BLOCK * 4):
        stop = min(start + BLOCK * 4, total)
        # _digits is most-significant first; reverse so column k carries p**k
        forms = _digits(start, stop, 10, p)[:, ::-1].copy()
        out[start:stop] = reduction_codes(forms, p)
    return out


def default_workers() -> int:
    return os.cpu_count() or 1
