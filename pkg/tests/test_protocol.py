import itertools
import math

import pytest
from hypothesis import given, strategies as st

from kmb09sim.protocol import (
    PulseRecord,
    SiftedKeyPair,
    alice_prepare,
    bb84_prepare,
    bb84_round,
    kmb09_decode,
    sift,
)
from kmb09sim.states import BasisId, StateVector, build_bases

E, F = BasisId.E, BasisId.F


def test_alice_prepare_encoding():
    b = build_bases(2)
    assert alice_prepare(0, 1, b) == StateVector([1, 0])
    assert alice_prepare(1, 2, b).equals_up_to_phase(StateVector([1 / math.sqrt(2), -1 / math.sqrt(2)]))
    with pytest.raises(IndexError):
        alice_prepare(1, 3, b)
    with pytest.raises(ValueError):
        alice_prepare(2, 1, b)


@pytest.mark.parametrize(
    "announced, basis, outcome, expected",
    [(1, E, 2, 1), (1, F, 1, None), (2, F, 1, 0), (2, E, 1, 1), (2, E, 2, None), (1, F, 2, 0)],
)
def test_kmb09_decode_table(announced, basis, outcome, expected):
    assert kmb09_decode(announced, basis, outcome, N=2) == expected


def test_kmb09_decode_exhaustive():
    for N in range(2, 9):
        for a, basis, o in itertools.product(range(1, N + 1), (E, F), range(1, N + 1)):
            got = kmb09_decode(a, basis, o, N)
            if o == a:
                assert got is None
            else:
                assert got == (1 if basis is E else 0)


def test_kmb09_decode_range():
    with pytest.raises(IndexError):
        kmb09_decode(0, E, 1)
    with pytest.raises(IndexError):
        kmb09_decode(1, E, 3, N=2)


def _rec(i, conclusive, bob_bit=None, alice_index=1):
    return PulseRecord(
        round=i, alice_bit=0, alice_index=alice_index, bob_basis=F,
        bob_index=2 if conclusive else alice_index, conclusive=conclusive, bob_bit=bob_bit,
    )


def test_record_invariants():
    with pytest.raises(ValueError):
        PulseRecord(1, 0, 1, F, 2, True, None)
    with pytest.raises(ValueError):
        PulseRecord(1, 0, 1, F, 1, True, 0)


def test_sift_examples():
    recs = [_rec(1, True, 0), _rec(2, False), _rec(3, True, 1)]
    keys = sift(recs, [0, 1, 0])
    assert keys == SiftedKeyPair((0, 0), (0, 1))
    assert len(keys) == 2 and keys.errors == 1
    assert len(sift([_rec(1, False), _rec(2, False)], [0, 1])) == 0
    with pytest.raises(ValueError):
        sift(recs, [0, 1])


@given(st.lists(st.tuples(st.booleans(), st.integers(0, 1), st.integers(0, 1)), max_size=50))
def test_sift_keeps_conclusive_rounds(rows):
    recs = [_rec(i, c, b if c else None) for i, (c, b, _) in enumerate(rows, 1)]
    alice = [a for _, _, a in rows]
    keys = sift(recs, alice)
    assert len(keys.alice_key) == len(keys.bob_key) == sum(c for c, _, _ in rows)
    assert list(keys.alice_key) == [a for (c, _, a) in rows if c]


def test_bb84_round():
    for bit in (0, 1):
        assert bb84_round(bit, E, E, bit + 1) == bit
        assert bb84_round(bit, F, F, bit + 1) == bit
        assert bb84_round(bit, E, F, 1) is None
    with pytest.raises(ValueError):
        bb84_round(0, E, E, 1, N=3)
    with pytest.raises(ValueError):
        bb84_prepare(0, E, build_bases(3))
