"""Monte Carlo estimates of the local densities.

Random numbers come from numpy's Philox counter-based generator.  Samples are
produced in fixed-size blocks and block ``b`` of a run with seed ``s`` always
uses ``Philox(key=s, counter=[0, 0, b, 0])``, so a report depends only on
(seed, spec, target) and never on how blocks are spread over workers.

Conditions that depend only on the reduction mod p (star, line and point
conditions) are sampled by rejection on the ten residues, and triple-line
reductions are drawn directly as c * L^3; in both cases the higher digits are independent of the residues under the Haar measure and are
drawn afterwards.  The two valuation patterns used for the nu's are sampled
coefficient by coefficient, which is exact because their defining events are
products of events on single coefficients.
"""

from __future__ import annotations

import enum
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import density
from .census import STAR, TRIANGLE, TRIPLE, reduction_codes
from .finite_field import RootType, binary_root_type
from .monomials import is_prime, substitute
from .padic import Mode, TernaryCubicZp, VerdictKind, decide

BLOCK_SIZE = 4096
MAX_REJECTION_DRAWS = 1 << 26
UNDETERMINED_CAP = 0.01
Z99 = 2.5758293035489004


class RejectionBudgetExceeded(RuntimeError):
    pass


class UndeterminedFractionTooHigh(RuntimeError):
    def __init__(self, undetermined: int, samples: int):
        super().__init__(
            f"{undetermined} of {samples} verdicts undetermined (cap {UNDETERMINED_CAP:.0%}); raise the precision"
        )
        self.undetermined = undetermined
        self.samples = samples


class Condition(enum.Enum):
    UNCONDITIONED = "Unconditioned"
    STAR = "Star"
    TRIPLE_LINE = "TripleLine"
    LINE_CONDITION = "LineCondition"
    POINT_CONDITION = "PointCondition"
    NU1_PATTERN = "Nu1Pattern"
    NU2_PATTERN = "Nu2Pattern"


# (minimum valuation, exact?) per coefficient a..j.  The triple line is Y = 0:
# Y^3 is a unit, X^3 has valuation exactly j, X^2Y and X^2Z at least j, all others at least 1.
NU_PATTERNS = {
    Condition.NU1_PATTERN: ((1, True), (1, False), (1, False), (1, False), (1, False),
                            (1, False), (0, True), (1, False), (1, False), (1, False)),
    Condition.NU2_PATTERN: ((2, True), (2, False), (2, False), (1, False), (1, False),
                            (1, False), (0, True), (1, False), (1, False), (1, False)),
}


@dataclass(frozen=True)
class SamplerSpec:
    p: int
    precision: int = 24
    condition: Condition = Condition.UNCONDITIONED
    sample_count: int = 10**5
    seed: int = 0
    shift: bool = True  # translate the triple root of the nu patterns by a uniform residue

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.precision < 3:
            raise ValueError("precision must be at least 3")
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def block_generator(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, block, 0]))


def _limb_digits(p: int) -> int:
    return max(1, int(62 / math.log2(p)))


def uniform_mod(gen: np.random.Generator, p: int, n: int, shape) -> list:
    """Uniform residues mod p**n as nested lists of Python ints."""
    if n <= 0:
        return np.zeros(shape, dtype=np.int64).tolist()
    step = _limb_digits(p)
    total = None
    done = 0
    while done < n:
        d = min(step, n - done)
        limb = gen.integers(0, p**d, size=shape, dtype=np.int64)
        if total is None:
            total = limb.astype(object) if n > step else limb
        else:
            total = total + limb.astype(object) * p**done
        done += d
    return total.tolist()


@lru_cache(maxsize=None)
def _irreducible_c3_table(p: int) -> np.ndarray:
    out = np.zeros(p**4, dtype=bool)
    for idx in range(p**4):
        digits = [(idx // p**k) % p for k in range(4)]
        out[idx] = binary_root_type(digits, p).tag is RootType.IRREDUCIBLE_TRIPLET
    return out


def residue_mask(residues: np.ndarray, p: int, condition: Condition | str) -> np.ndarray:
    """Which rows of an (n, 10) residue array satisfy ``condition``.

    Besides the sampler conditions, ``"Triangle"`` is accepted for beta3.
    """
    name = condition.value if isinstance(condition, Condition) else condition
    if name == "Unconditioned":
        return np.ones(len(residues), dtype=bool)
    if name == "PointCondition":
        return residues[:, 0] != 0
    if name == "LineCondition":
        weights = np.array([1, p, p * p, p**3], dtype=np.int64)
        return _irreducible_c3_table(p)[residues[:, 6:] @ weights]
    codes = reduction_codes(residues, p)
    code = {"Star": STAR, "TripleLine": TRIPLE, "Triangle": TRIANGLE}.get(name)
    if code is None:
        raise ValueError(f"condition {name} is not a residue condition")
    return codes == code


def _rejected_residues(gen, p: int, condition: Condition, n: int) -> tuple[np.ndarray, int]:
    kept = []
    have = 0
    drawn = 0
    batch = max(4 * n, 1 << 14)
    while have < n:
        if drawn >= MAX_REJECTION_DRAWS:
            raise RejectionBudgetExceeded(
                f"{condition.value} at p={p}: {have} of {n} acceptances after {drawn} draws"
            )
        res = gen.integers(0, p, size=(batch, 10), dtype=np.int64)
        drawn += batch
        ok = res[residue_mask(res, p, condition)]
        kept.append(ok)
        have += len(ok)
    return np.concatenate(kept)[:n], drawn


def _triple_line_residues(gen, p: int, n: int) -> np.ndarray:
    """Residues c * L^3 with L a uniform line and c a uniform unit.

    Distinct pairs (L up to scaling, c) give distinct forms, so this is the
    uniform distribution on triple-line reductions; rejection would need about
    p^7 draws per acceptance.
    """
    idx = gen.integers(0, p * p + p + 1, size=n, dtype=np.int64)
    scale = gen.integers(1, p, size=n, dtype=np.int64)
    # representatives (1, s, t), (0, 1, t), (0, 0, 1) in that order
    first = idx < p * p
    second = ~first & (idx < p * p + p)
    l0 = first.astype(np.int64)
    l1 = np.where(first, idx // p, np.where(second, 1, 0))
    l2 = np.where(first, idx % p, np.where(second, idx - p * p, 1))
    terms = (
        l0**3, 3 * l0**2 * l1, 3 * l0**2 * l2, 3 * l0 * l1**2, 6 * l0 * l1 * l2,
        3 * l0 * l2**2, l1**3, 3 * l1**2 * l2, 3 * l1 * l2**2, l2**3,
    )
    return np.stack([scale * t % p for t in terms], axis=1)


def _pattern_forms(gen, spec: SamplerSpec, n: int) -> list[tuple[int, ...]]:
    p, big_n = spec.p, spec.precision
    pattern = NU_PATTERNS[spec.condition]
    cols = []
    for v, exact in pattern:
        width = big_n - v
        if width < 1:
            raise ValueError("precision too small for the nu patterns")
        if exact:
            unit = gen.integers(1, p, size=n, dtype=np.int64).tolist()
            rest = uniform_mod(gen, p, width - 1, (n,))
            col = [p**v * (u + p * r) for u, r in zip(unit, rest)]
        else:
            col = [p**v * u for u in uniform_mod(gen, p, width, (n,))]
        cols.append(col)
    forms = list(zip(*cols))
    if spec.shift:
        mod = p**big_n
        shifts = gen.integers(0, p, size=n, dtype=np.int64).tolist()
        forms = [
            tuple(c % mod for c in substitute(f, ((1, 0, 0), (0, 1, r), (0, 0, 1)))) if r else f
            for f, r in zip(forms, shifts)
        ]
    return forms


def sample_block(spec: SamplerSpec, block: int) -> list[tuple[int, ...]]:
    """The integer coefficient tuples of block ``block`` of the sample stream."""
    n = min(BLOCK_SIZE, spec.sample_count - block * BLOCK_SIZE)
    if n <= 0:
        return []
    gen = block_generator(spec.seed, block)
    p, big_n = spec.p, spec.precision
    if spec.condition in NU_PATTERNS:
        return _pattern_forms(gen, spec, n)
    if spec.condition is Condition.UNCONDITIONED:
        return [tuple(row) for row in uniform_mod(gen, p, big_n, (n, 10))]
    if spec.condition is Condition.TRIPLE_LINE:
        res = _triple_line_residues(gen, p, n)
    else:
        res, _ = _rejected_residues(gen, p, spec.condition, n)
    high = uniform_mod(gen, p, big_n - 1, (n, 10))
    return [tuple(r + p * h for r, h in zip(rrow, hrow)) for rrow, hrow in zip(res.tolist(), high)]


def sample_cubic(spec: SamplerSpec, index: int = 0) -> TernaryCubicZp:
    """Sample number ``index`` of the stream defined by ``spec``."""
    if not 0 <= index < spec.sample_count:
        raise IndexError("sample index out of range")
    block, offset = divmod(index, BLOCK_SIZE)
    coeffs = sample_block(spec, block)[offset]
    return TernaryCubicZp.from_integers(coeffs, spec.p, spec.precision)


# -- estimation -----------------------------------------------------------------


@dataclass(frozen=True)
class Target:
    name: str
    condition: Condition
    mode: Mode | None  # None: a residue-frequency target, no solver involved
    event: str  # "soluble", "insoluble" or a residue condition name
    exact: callable


def _complement(fn):
    return lambda p: 1 - fn(p)


TARGETS = {
    t.name: t
    for t in (
        Target("rho", Condition.UNCONDITIONED, Mode.QP, "soluble", density.rho_p),
        Target("rho_nr", Condition.UNCONDITIONED, Mode.NR, "soluble", density.rho_nr),
        Target("alpha1", Condition.STAR, Mode.QP, "soluble", lambda p: density.alpha_system(p)[0]),
        Target("alpha2", Condition.TRIPLE_LINE, Mode.QP, "soluble", lambda p: density.alpha2_alpha5(p)[0]),
        Target("alpha4", Condition.LINE_CONDITION, Mode.QP, "soluble", lambda p: density.alpha_system(p)[1]),
        Target("alpha5", Condition.POINT_CONDITION, Mode.QP, "soluble", lambda p: density.alpha2_alpha5(p)[1]),
        Target("nu1", Condition.NU1_PATTERN, Mode.QP, "soluble", lambda p: density.nu_system(p)[0]),
        Target("nu2", Condition.NU2_PATTERN, Mode.QP, "soluble", lambda p: density.nu_system(p)[1]),
        Target("alpha2_nr", Condition.TRIPLE_LINE, Mode.NR, "insoluble", density.alpha2_nr),
        Target("nu1_nr", Condition.NU1_PATTERN, Mode.NR, "insoluble", lambda p: density.nu_system_nr(p)[0]),
        Target("nu2_nr", Condition.NU2_PATTERN, Mode.NR, "insoluble", lambda p: density.nu_system_nr(p)[1]),
        Target("beta1", Condition.UNCONDITIONED, None, "Star", lambda p: density.betas(p).beta1),
        Target("beta2", Condition.UNCONDITIONED, None, "TripleLine", lambda p: density.betas(p).beta2),
        Target("beta3", Condition.UNCONDITIONED, None, "Triangle", lambda p: density.betas(p).beta3),
        Target("beta4", Condition.UNCONDITIONED, None, "LineCondition", lambda p: density.betas(p).beta4),
        Target("beta5", Condition.UNCONDITIONED, None, "PointCondition", lambda p: density.betas(p).beta5),
    )
}


@dataclass(frozen=True)
class EstimateReport:
    target: str
    p: int
    samples: int
    seed: int
    precision: int
    events: int
    determined: int
    undetermined: int
    exact: Fraction

    @property
    def estimate(self) -> float:
        return self.events / self.determined if self.determined else float("nan")

    @property
    def stderr(self) -> float:
        q = self.estimate
        return math.sqrt(q * (1 - q) / self.determined) if self.determined else float("nan")

    @property
    def ci99(self) -> tuple[float, float]:
        half = Z99 * self.stderr
        return self.estimate - half, self.estimate + half

    @property
    def undetermined_fraction(self) -> float:
        return self.undetermined / self.samples

    @property
    def z_score(self) -> float:
        diff = self.estimate - float(self.exact)
        if self.stderr > 0:
            return diff / self.stderr
        # a degenerate sample (all events or none); only an exact match is consistent
        return 0.0 if diff == 0 else math.copysign(math.inf, diff)

    def within(self, k: float = 4.0) -> bool:
        return abs(self.z_score) <= k


def _run_block(args) -> tuple[int, int, int]:
    """(determined, events, undetermined) for one block."""
    spec, target_name, block = args
    target = TARGETS[target_name]
    if target.mode is None:
        n = min(BLOCK_SIZE, spec.sample_count - block * BLOCK_SIZE)
        res = block_generator(spec.seed, block).integers(0, spec.p, size=(n, 10), dtype=np.int64)
        return n, int(residue_mask(res, spec.p, target.event).sum()), 0
    want = VerdictKind.SOLUBLE if target.event == "soluble" else VerdictKind.INSOLUBLE
    det = ev = und = 0
    for coeffs in sample_block(spec, block):
        v = decide(coeffs, spec.p, spec.precision, target.mode, witness=0)
        if v.kind is VerdictKind.UNDETERMINED:
            und += 1
            continue
        det += 1
        ev += v.kind is want
    return det, ev, und


def estimate(spec: SamplerSpec, target: str, workers: int = 1, progress: bool = False) -> EstimateReport:
    """Estimate a density by sampling; the condition in ``spec`` is taken from the target."""
    if target not in TARGETS:
        raise ValueError(f"unknown target {target!r}; choose from {', '.join(TARGETS)}")
    t = TARGETS[target]
    if spec.sample_count < 1000:
        raise ValueError("at least 1000 samples are required")
    if spec.condition is not t.condition:
        spec = SamplerSpec(spec.p, spec.precision, t.condition, spec.sample_count, spec.seed, spec.shift)
    nblocks = -(-spec.sample_count // BLOCK_SIZE)
    tasks = [(spec, target, b) for b in range(nblocks)]
    det = ev = und = 0
    if workers > 1 and nblocks > 1:
        import multiprocessing

        with multiprocessing.Pool(workers) as pool:
            results = pool.imap(_run_block, tasks)
            for i, (d, e, u) in enumerate(results):
                det, ev, und = det + d, ev + e, und + u
                if progress:
                    print(f"\r{target}: block {i + 1}/{nblocks}", end="", file=sys.stderr)
    else:
        for i, task in enumerate(tasks):
            d, e, u = _run_block(task)
            det, ev, und = det + d, ev + e, und + u
            if progress:
                print(f"\r{target}: block {i + 1}/{nblocks}", end="", file=sys.stderr)
    if progress:
        print(file=sys.stderr)
    if und > UNDETERMINED_CAP * spec.sample_count:
        raise UndeterminedFractionTooHigh(und, spec.sample_count)
    return EstimateReport(target, spec.p, spec.sample_count, spec.seed, spec.precision, ev, det, und, t.exact(spec.p))
