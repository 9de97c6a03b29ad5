import random

import pytest

from cubicsol.oracle import OracleKind, brute_oracle
from cubicsol.padic import VerdictKind, decide, hensel_certified

# a star reduction whose solubility only shows up deep in the descent
DEFERRED_STAR = (1, 2, 1, 7, 2, 6, 7, 6, 1, 7)


def test_examples():
    assert brute_oracle((1, 0, 0, 0, 0, 0, 2, 0, 0, 4), 2, 3).kind is OracleKind.INSOLUBLE_CERTIFIED
    r = brute_oracle((1, 0, 0, 0, 0, 0, 1, 0, 0, 1), 7, 3)
    assert r.kind is OracleKind.SOLUBLE_CERTIFIED and hensel_certified((1, 0, 0, 0, 0, 0, 1, 0, 0, 1), r.witness, 7)
    assert brute_oracle((2, 0, 0, 0, 0, 0, 1, 0, 1, 1), 2, 2).kind is OracleKind.INSOLUBLE_CERTIFIED


def test_unknown_instance():
    assert brute_oracle(DEFERRED_STAR, 2, 2).kind is OracleKind.UNKNOWN
    assert brute_oracle(DEFERRED_STAR, 2, 3).kind is OracleKind.UNKNOWN
    assert brute_oracle(DEFERRED_STAR, 2, 6).kind is OracleKind.SOLUBLE_CERTIFIED
    assert decide(DEFERRED_STAR, 2).kind is VerdictKind.SOLUBLE


def test_range_checks():
    with pytest.raises(ValueError):
        brute_oracle((1,) * 10, 2, 15)
    with pytest.raises(ValueError):
        brute_oracle((1,) * 10, 6, 1)
    with pytest.raises(ValueError):
        brute_oracle((1,) * 9, 2, 2)
    assert brute_oracle((1, 0, 0, 0, 0, 0, 1, 0, 0, 1), 2, 1).kind is OracleKind.SOLUBLE_CERTIFIED


@pytest.mark.parametrize("p,k", [(2, 4), (3, 3), (5, 2)])
def test_agreement_light(p, k):
    rng = random.Random(p * 100 + k)
    for _ in range(300):
        c = [rng.randrange(p**6) * p ** rng.choice([0, 0, 1, 2]) for _ in range(10)]
        if all(x % p == 0 for x in c):
            continue
        v, o = decide(c, p, 24, witness=0), brute_oracle(c, p, k)
        assert not (v.kind is VerdictKind.SOLUBLE and o.kind is OracleKind.INSOLUBLE_CERTIFIED)
        assert not (v.kind is VerdictKind.INSOLUBLE and o.kind is OracleKind.SOLUBLE_CERTIFIED)
