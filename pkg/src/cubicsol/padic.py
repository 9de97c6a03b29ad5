"""Local solubility of ternary cubics over Z_p.

The decision procedure walks a fixed set of states (MAIN, the star states
S1/S2, the triple-line states S4/S5 and the refined triple-line states
NU1/NU2).  Every state is entered with a known valuation pattern on the ten
coefficients; each transition is a substitution (a variable scaled by p, or a
unimodular change of frame) followed by division by a power of p.

Coefficients are tracked with individual precisions: coefficient k of the
current form is known modulo ``p**prec[k]``.  A test that needs digits beyond
that raises :class:`PrecisionExhausted`, which :func:`decide` reports as an
undetermined verdict instead of guessing.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .cubic_forms import (
    ReductionTag,
    TernaryCubicFp,
    classify_reduction,
    find_smooth_point,
    frame_to_line,
    frame_to_point,
)
from .finite_field import RootType, binary_root_type
from .monomials import (
    C0,
    C1,
    C2,
    C3,
    EXPONENTS,
    IDENTITY,
    Matrix,
    evaluate,
    gradient,
    is_prime,
    mat_mul,
    mat_vec,
    substitute,
    substitution_matrix,
    valuation,
)

DEFAULT_PRECISION = 24
DEFAULT_WITNESS = 8

A, B, C, D, E, F, G, H, I, J = range(10)
XZ_BINARY = (A, C, F, J)  # X^3, X^2Z, XZ^2, Z^3
YZ_BINARY = C3  # Y^3, Y^2Z, YZ^2, Z^3


class PrecisionExhausted(Exception):
    pass


class NonPrimitiveWithinPrecision(Exception):
    pass


class SolverDefect(AssertionError):
    """The state machine reached a configuration its derivation rules out."""


class Mode(enum.Enum):
    QP = "QpPoints"
    NR = "UnramifiedPoints"


class State(enum.Enum):
    MAIN = "MAIN"
    S1_STAR = "S1_STAR"
    S2_STAR = "S2_STAR"
    S4_LINE = "S4_LINE"
    S5_LINE = "S5_LINE"
    NU1 = "NU1"
    NU2 = "NU2"


class VerdictKind(enum.Enum):
    SOLUBLE = "Soluble"
    INSOLUBLE = "Insoluble"
    UNDETERMINED = "Undetermined"


class Terminal(enum.Enum):
    I3M = "I3m"
    IV = "IV"
    IV_STAR = "IVstar"
    CR = "Cr"
    NO_RESIDUAL_ROOT = "NoResidualRoot"


class Reason(enum.Enum):
    PRECISION_EXHAUSTED = "PrecisionExhausted"
    NON_PRIMITIVE = "NonPrimitiveWithinPrecision"


def _vpow(n: int, p: int) -> int:
    return 10**9 if n == 0 else valuation(n, p)


@dataclass(frozen=True)
class TernaryCubicZp:
    """A cubic over Z_p known to finite per-coefficient precision.

    ``source`` holds the exact integer coefficients the computation started
    from; the current form F satisfies ``source(M v) = p**divisor * F(v)``
    with ``M = matrix``.
    """

    p: int
    coeffs: tuple[int, ...]
    prec: tuple[int, ...]
    matrix: Matrix = IDENTITY
    divisor: int = 0
    source: tuple[int, ...] | None = None
    window: int = 0

    @classmethod
    def from_integers(cls, coeffs, p: int, precision: int = DEFAULT_PRECISION) -> TernaryCubicZp:
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if len(coeffs) != 10:
            raise ValueError("a ternary cubic has exactly ten coefficients")
        if precision < 1:
            raise ValueError("precision must be positive")
        src = tuple(int(c) for c in coeffs)
        mod = p**precision
        return cls(p, tuple(c % mod for c in src), (precision,) * 10, IDENTITY, 0, src, precision)

    # -- knowledge queries -------------------------------------------------

    def at_least(self, k: int, v: int) -> bool:
        """Is v_p(coefficient k) >= v?  Raises if the known digits do not say."""
        c, n = self.coeffs[k], self.prec[k]
        if v <= 0:
            return True
        if c % self.p ** min(v, n):
            return False
        if n >= v:
            return True
        raise PrecisionExhausted

    def all_at_least(self, indices, v: int) -> bool:
        unknown = False
        for k in indices:
            try:
                if not self.at_least(k, v):
                    return False
            except PrecisionExhausted:
                unknown = True
        if unknown:
            raise PrecisionExhausted
        return True

    def residues(self, indices) -> tuple[int, ...]:
        p = self.p
        out = []
        for k in indices:
            if self.prec[k] < 1:
                raise PrecisionExhausted
            out.append(self.coeffs[k] % p)
        return tuple(out)

    def reduction(self) -> TernaryCubicFp:
        return TernaryCubicFp(self.p, self.residues(range(10)))

    # -- transformations ---------------------------------------------------

    def scale(self, powers) -> TernaryCubicZp:
        """Substitute X, Y, Z -> p**powers[0] X, p**powers[1] Y, p**powers[2] Z."""
        p = self.p
        coeffs, prec = [], []
        for k, ex in enumerate(EXPONENTS):
            s = ex[0] * powers[0] + ex[1] * powers[1] + ex[2] * powers[2]
            coeffs.append(self.coeffs[k] * p**s)
            prec.append(self.prec[k] + s)
        diag = ((p ** powers[0], 0, 0), (0, p ** powers[1], 0), (0, 0, p ** powers[2]))
        return TernaryCubicZp(
            p, tuple(coeffs), tuple(prec), mat_mul(self.matrix, diag), self.divisor, self.source, self.window
        )

    def substitute(self, m: Matrix) -> TernaryCubicZp:
        """Pull back along v -> M v (M integral, invertible over Z_p)."""
        p = self.p
        t = substitution_matrix(m)
        coeffs, prec = [], []
        for row in t:
            n = None
            acc = 0
            for j, tj in enumerate(row):
                if tj:
                    acc += tj * self.coeffs[j]
                    nj = self.prec[j] + _vpow(tj, p)
                    n = nj if n is None else min(n, nj)
            n = 0 if n is None else n
            prec.append(n)
            coeffs.append(acc % p**n)
        return TernaryCubicZp(
            p, tuple(coeffs), tuple(prec), mat_mul(self.matrix, m), self.divisor, self.source, self.window
        )

    def divide(self, k: int = 1) -> TernaryCubicZp:
        p = self.p
        for idx in range(10):
            try:
                ok = self.at_least(idx, k)
            except PrecisionExhausted:
                ok = False
            if not ok:
                raise SolverDefect(f"division by p^{k} without knowing coefficient {idx} is divisible")
        pk = p**k
        return TernaryCubicZp(
            p,
            tuple(c // pk for c in self.coeffs),
            tuple(n - k for n in self.prec),
            self.matrix,
            self.divisor + k,
            self.source,
            self.window,
        )

    def exact_coeffs(self) -> tuple[int, ...]:
        """Exact integer coefficients of the current form, recomputed from ``source``."""
        if self.source is None:
            raise ValueError("no exact source form recorded")
        pulled = substitute(self.source, self.matrix)
        pd = self.p**self.divisor
        if any(c % pd for c in pulled):
            raise SolverDefect("accumulated divisor does not divide the transformed source")
        return tuple(c // pd for c in pulled)


def normalize(form: TernaryCubicZp) -> TernaryCubicZp:
    """Divide out the p-content, so that some coefficient is a known unit."""
    p = form.p
    exact = [valuation(c, p) for c in form.coeffs if c]
    if not exact:
        raise NonPrimitiveWithinPrecision
    bounds = [n for c, n in zip(form.coeffs, form.prec) if c == 0]
    t = min(exact + bounds)
    if t < min(exact):
        # a zero coefficient might carry the content; its digits are not known
        raise PrecisionExhausted
    if t == 0:
        return form
    return form.divide(t)


# -- verdicts ---------------------------------------------------------------


@dataclass(frozen=True)
class Witness:
    """A point of the source form certified by Hensel's lemma.

    ``point`` is primitive; ``value_valuation`` is v(C(point)) (None when the
    value is exactly zero) and ``gradient_valuation`` the least valuation of
    the partial derivatives there.
    """

    point: tuple[int, int, int]
    p: int
    value_valuation: int | None
    gradient_valuation: int
    lifted_to: int

    @property
    def precision(self) -> int:
        """Number of p-adic digits of ``point`` guaranteed to agree with a true zero."""
        v = self.lifted_to if self.value_valuation is None else self.value_valuation
        return v - self.gradient_valuation

    def digits(self) -> list[str]:
        """Coordinates modulo p**precision as base-p digit strings, most significant first."""
        n = self.precision
        mod = self.p**n
        sep = "" if self.p <= 10 else "."
        out = []
        for c in self.point:
            c %= mod
            ds = []
            for _ in range(n):
                ds.append(str(c % self.p))
                c //= self.p
            out.append(sep.join(reversed(ds)))
        return out


def hensel_certified(coeffs, point, p: int) -> bool:
    """v(C(w)) > 2 min v(grad C(w)) at a primitive integer point w."""
    if all(c % p == 0 for c in point):
        return False
    gv = [g for g in gradient(coeffs, *point) if g]
    if not gv:
        return False
    vg = min(valuation(g, p) for g in gv)
    val = evaluate(coeffs, *point)
    return val == 0 or valuation(val, p) > 2 * vg


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    terminal: Terminal | None = None
    reason: Reason | None = None
    witness: Witness | None = None
    path: tuple[State, ...] = field(default=())

    @property
    def label(self) -> str:
        if self.kind is VerdictKind.INSOLUBLE:
            return f"Insoluble({self.terminal.value})"
        if self.kind is VerdictKind.UNDETERMINED:
            return f"Undetermined({self.reason.value})"
        return "Soluble"


# -- Hensel lifting ---------------------------------------------------------


def _newton(coeffs, point, axis: int, p: int, target: int) -> list[int]:
    pt = list(point)
    e = 1
    while e < target:
        e = min(2 * e, target)
        mod = p**e
        val = evaluate(coeffs, *pt) % mod
        der = gradient(coeffs, *pt)[axis] % mod
        pt[axis] = (pt[axis] - val * pow(der, -1, mod)) % mod
    return pt


def lift_witness(form: TernaryCubicZp, point, k: int = DEFAULT_WITNESS) -> Witness:
    """Lift a smooth point of the reduction of ``form`` to a certified zero of its source.

    The lift is a Newton iteration on the exact current form along a
    coordinate whose partial derivative is a unit; the result is pushed back
    through the accumulated transformation and made primitive.
    """
    if k > form.window:
        raise ValueError(f"requested witness precision {k} exceeds the working precision {form.window}")
    p = form.p
    cur = form.exact_coeffs()
    pt = [int(c) % p for c in point]
    if evaluate(cur, *pt) % p:
        raise ValueError("point is not on the reduction")
    grad = gradient(cur, *pt)
    axis = next((i for i in range(3) if grad[i] % p), None)
    if axis is None:
        raise ValueError("point is singular on the reduction")
    src = form.source
    s = form.divisor
    target = max(k - s, s + 1, 1)
    for _ in range(64):
        lifted = _newton(cur, pt, axis, p, target)
        w = mat_vec(form.matrix, lifted)
        t = min(valuation(c, p) for c in w if c)
        w = tuple(c // p**t for c in w)
        vg = min(valuation(g, p) for g in gradient(src, *w) if g)
        val = evaluate(src, *w)
        if val == 0:
            return Witness(w, p, None, vg, target)
        vc = valuation(val, p)
        deficit = max(k - vc, 2 * vg + 1 - vc)
        if deficit <= 0:
            return Witness(w, p, vc, vg, target)
        target += deficit
    raise SolverDefect("Hensel lift did not converge")


# -- the state machine ------------------------------------------------------

_GE, _EQ = "ge", "eq"

_ENTRY = {
    State.S1_STAR: ((C0, _GE, 1), (C1, _GE, 1), (C2, _GE, 1), (C3, _EQ, 0)),
    State.S2_STAR: ((C2, _GE, 1), (C3, _EQ, 1)),
    State.S4_LINE: ((C0, _EQ, 0), (C1, _GE, 1), (C2, _GE, 1), (C3, _GE, 1)),
    State.S5_LINE: ((C0, _EQ, 1), (C1, _GE, 1)),
    State.NU1: (
        ((A,), _EQ, 1), ((G,), _EQ, 0), ((B, C, D, E, F, H, I, J), _GE, 1),
    ),
    State.NU2: (
        ((A,), _EQ, 0), ((G,), _EQ, 2), ((B, C, E, F, I, J), _GE, 1), ((D, H), _GE, 2),
    ),
}


def _check_entry(state: State, form: TernaryCubicZp) -> None:
    try:
        for indices, op, v in _ENTRY.get(state, ()):
            if not form.all_at_least(indices, v):
                raise SolverDefect(f"{state.value}: coefficients {indices} below valuation {v}")
            if op == _EQ and form.all_at_least(indices, v + 1):
                raise SolverDefect(f"{state.value}: coefficients {indices} above valuation {v}")
        if state is State.S1_STAR:
            if binary_root_type(form.residues(C3), form.p).tag is not RootType.IRREDUCIBLE_TRIPLET:
                raise SolverDefect("S1: binary cubic c_3 is not irreducible")
    except PrecisionExhausted:
        raise SolverDefect(f"{state.value}: entry pattern not backed by known digits") from None


def _root_affine(root, p: int) -> int | None:
    """r with root = [r:1], or None for the root [1:0]."""
    u, v = root
    if v == 0:
        return None
    return u * pow(v, -1, p) % p


def _to_nu2_from_line(root, p: int) -> Matrix:
    # old X -> new Y; the triple root of c_3(Y, Z) becomes the new X = 0
    r = _root_affine(root, p)
    if r is None:
        return ((0, 1, 0), (0, 0, 1), (1, 0, 0))
    return ((0, 1, 0), (1, 0, r), (0, 0, 1))


def _to_nu1_from_line(root, p: int) -> Matrix:
    # the triple root of c_3(Y, Z) becomes the new Y = 0; X is kept
    r = _root_affine(root, p)
    if r is None:
        return ((1, 0, 0), (0, 0, 1), (0, 1, 0))
    return ((1, 0, 0), (0, 1, r), (0, 0, 1))


def _shift(axis: int, root, p: int) -> Matrix:
    """Translate the variable ``axis`` by r Z, moving the triple root [r:1] to [0:1]."""
    r = _root_affine(root, p)
    if r is None:
        raise SolverDefect("unit leading coefficient cannot have the root [1:0]")
    rows = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    rows[axis][2] = r
    return tuple(tuple(row) for row in rows)  # type: ignore[return-value]


class _Exit(Exception):
    def __init__(self, verdict_args):
        self.verdict_args = verdict_args


class _Solver:
    def __init__(self, mode: Mode, witness: int):
        self.mode = mode
        self.witness = witness
        self.path: list[State] = []

    # exits
    def soluble(self, form: TernaryCubicZp, point=None):
        w = None
        if self.mode is Mode.QP and self.witness > 0:
            if point is None:
                red = TernaryCubicFp(form.p, form.exact_coeffs())
                found = find_smooth_point(red)
                if found is None:
                    raise SolverDefect(f"soluble exit in {self.path[-1].value} without a smooth point")
                point = found.coords
            w = lift_witness(form, point, min(self.witness, form.window))
        raise _Exit((VerdictKind.SOLUBLE, None, w))

    def insoluble(self, terminal: Terminal):
        raise _Exit((VerdictKind.INSOLUBLE, terminal, None))

    @property
    def qp(self) -> bool:
        return self.mode is Mode.QP

    # states
    def main(self, form):
        cls = classify_reduction(form.reduction())
        tag = cls.tag
        if tag is ReductionTag.SMOOTH_POINT:
            self.soluble(form, cls.point.coords)
        if tag is ReductionTag.TRIANGLE:
            if self.qp:
                self.insoluble(Terminal.I3M)
            self.soluble(form)
        if tag is ReductionTag.STAR:
            if not self.qp:
                self.soluble(form)
            return State.S1_STAR, form.substitute(frame_to_point(cls.point.coords, form.p))
        if tag is ReductionTag.TRIPLE_LINE:
            return State.S4_LINE, form.substitute(frame_to_line(cls.line, form.p))
        raise SolverDefect("MAIN entered with a non-primitive form")

    def s1(self, form):
        if not form.at_least(A, 2):
            self.insoluble(Terminal.IV)
        return State.S2_STAR, form.scale((0, 1, 1)).divide(2)

    def s2(self, form):
        if not form.all_at_least(C1, 1):
            self.soluble(form)
        if not form.at_least(A, 1):
            self.insoluble(Terminal.IV_STAR)
        return State.MAIN, form.divide(1)

    def s4(self, form):
        p = form.p
        form = form.scale((1, 0, 0)).divide(1)
        rt = binary_root_type(form.residues(YZ_BINARY), p)
        if rt.tag is RootType.ZERO:
            return State.S5_LINE, form.divide(1)
        if rt.tag is RootType.TRIPLE:
            return State.NU2, form.substitute(_to_nu2_from_line(rt.roots[0][0], p))
        if rt.has_simple_root or not self.qp:
            self.soluble(form)
        self.insoluble(Terminal.NO_RESIDUAL_ROOT)

    def s5(self, form):
        p = form.p
        if not form.all_at_least(C2, 1):
            self.soluble(form)
        rt = binary_root_type(form.residues(YZ_BINARY), p)
        if rt.tag is RootType.ZERO:
            return State.MAIN, form.divide(1)
        if rt.tag is RootType.TRIPLE:
            return State.NU1, form.substitute(_to_nu1_from_line(rt.roots[0][0], p))
        if rt.has_simple_root or not self.qp:
            self.soluble(form)
        self.insoluble(Terminal.NO_RESIDUAL_ROOT)

    def nu1(self, form):
        p = form.p
        form = form.scale((0, 1, 0)).divide(1)
        rt = binary_root_type(form.residues(XZ_BINARY), p)
        if rt.tag is RootType.TRIPLE:
            return State.NU2, form.substitute(_shift(0, rt.roots[0][0], p))
        if rt.tag is RootType.ZERO:
            raise SolverDefect("NU1: X^3 coefficient lost its unit")
        if rt.has_simple_root or not self.qp:
            self.soluble(form)
        self.insoluble(Terminal.NO_RESIDUAL_ROOT)

    def nu2(self, form):
        p = form.p
        form = form.scale((1, 0, 0)).divide(1)
        if not form.at_least(I, 1):
            self.soluble(form)
        if not form.at_least(J, 1):
            self.insoluble(Terminal.CR)
        form = form.divide(1)
        if not form.all_at_least((E, F), 1):
            self.soluble(form)
        rt = binary_root_type(form.residues(YZ_BINARY), p)
        if rt.tag is RootType.TRIPLE:
            return State.NU1, form.substitute(_shift(1, rt.roots[0][0], p))
        if rt.tag is RootType.ZERO:
            raise SolverDefect("NU2: Y^3 coefficient lost its unit")
        if rt.has_simple_root or not self.qp:
            self.soluble(form)
        self.insoluble(Terminal.NO_RESIDUAL_ROOT)

    def run(self, form: TernaryCubicZp, check: bool) -> Verdict:
        handlers = {
            State.MAIN: self.main,
            State.S1_STAR: self.s1,
            State.S2_STAR: self.s2,
            State.S4_LINE: self.s4,
            State.S5_LINE: self.s5,
            State.NU1: self.nu1,
            State.NU2: self.nu2,
        }
        cap = 3 * form.window + 10
        state = State.MAIN
        try:
            for _ in range(cap):
                self.path.append(state)
                if check:
                    _check_entry(state, form)
                state, form = handlers[state](form)
        except _Exit as done:
            kind, terminal, w = done.verdict_args
            return Verdict(kind, terminal, None, w, tuple(self.path))
        except PrecisionExhausted:
            return Verdict(VerdictKind.UNDETERMINED, reason=Reason.PRECISION_EXHAUSTED, path=tuple(self.path))
        raise SolverDefect(f"iteration cap {cap} reached")


def decide(
    cubic,
    p: int | None = None,
    precision: int = DEFAULT_PRECISION,
    mode: Mode = Mode.QP,
    witness: int = DEFAULT_WITNESS,
    check_invariants: bool = True,
) -> Verdict:
    """Decide whether a ternary cubic has a nontrivial zero over Q_p (or Q_p^nr).

    ``cubic`` is either ten integers in the order a..j of
    aX^3 + bX^2Y + cX^2Z + dXY^2 + eXYZ + fXZ^2 + gY^3 + hY^2Z + iYZ^2 + jZ^3,
    or a :class:`TernaryCubicZp`.  The integers are exact; ``precision`` is
    the number of p-adic digits the procedure is allowed to look at.
    ``witness`` is the target precision of the point returned with soluble
    verdicts over Q_p (0 skips the lift).
    """
    if isinstance(cubic, TernaryCubicZp):
        form = cubic
    else:
        if p is None:
            raise ValueError("a prime is required")
        form = TernaryCubicZp.from_integers(cubic, p, precision)
    try:
        form = normalize(form)
    except NonPrimitiveWithinPrecision:
        return Verdict(VerdictKind.UNDETERMINED, reason=Reason.NON_PRIMITIVE)
    except PrecisionExhausted:
        return Verdict(VerdictKind.UNDETERMINED, reason=Reason.PRECISION_EXHAUSTED)
    return _Solver(mode, witness).run(form, check_invariants)
