"""KMB09 encoding/decoding and sifting, plus a BB84 baseline."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .states import BasisId, BasisSet, StateVector


@dataclass(frozen=True)
class PulseRecord:
    """One transmitted pulse as seen after the public discussion.

    For KMB09 ``alice_index`` is the announced index. For BB84 it is the
    index of the transmitted basis state (``bit + 1``) and ``alice_basis`` is
    set.
    """

    round: int
    alice_bit: int
    alice_index: int
    bob_basis: BasisId
    bob_index: int
    conclusive: bool
    bob_bit: Optional[int]
    flipped_by_detection: bool = False
    alice_basis: Optional[BasisId] = None

    def __post_init__(self):
        if self.conclusive != (self.bob_bit is not None):
            raise ValueError("bob_bit must be present exactly when the round is conclusive")
        if self.alice_basis is None and self.conclusive == (self.bob_index == self.alice_index):
            raise ValueError("KMB09 round is conclusive iff Bob's index differs from Alice's")

    @property
    def error(self) -> bool:
        return self.conclusive and self.bob_bit != self.alice_bit


@dataclass(frozen=True)
class SiftedKeyPair:
    alice_key: tuple[int, ...]
    bob_key: tuple[int, ...]

    def __post_init__(self):
        if len(self.alice_key) != len(self.bob_key):
            raise ValueError("sifted keys differ in length")

    def __len__(self):
        return len(self.alice_key)

    @property
    def errors(self) -> int:
        return sum(a != b for a, b in zip(self.alice_key, self.bob_key))


def alice_prepare(bit: int, index: int, bases: BasisSet) -> StateVector:
    """Bit 0 is carried by ``e_index``, bit 1 by ``f_index``."""
    if bit not in (0, 1):
        raise ValueError(f"bit must be 0 or 1, got {bit!r}")
    return bases.e(index) if bit == 0 else bases.f(index)


def kmb09_decode(announced_index: int, bob_basis: BasisId, outcome_index: int,
                 N: Optional[int] = None) -> Optional[int]:
    """Bob's bit for one KMB09 round, or None when the round is discarded.

    A click on the announced index is inconclusive. Any other click rules out
    the state Alice would have sent in the *other* basis, so an e-basis click
    means bit 1 and an f-basis click means bit 0.
    """
    for name, idx in (("announced_index", announced_index), ("outcome_index", outcome_index)):
        if idx < 1 or (N is not None and idx > N):
            raise IndexError(f"{name}={idx} out of range")
    if outcome_index == announced_index:
        return None
    return 1 if bob_basis is BasisId.E else 0


def sift(records: Sequence[PulseRecord], alice_bits: Sequence[int]) -> SiftedKeyPair:
    if len(records) != len(alice_bits):
        raise ValueError(
            f"{len(records)} records but {len(alice_bits)} alice bits"
        )
    alice, bob = [], []
    for rec, a in zip(records, alice_bits):
        if rec.conclusive:
            alice.append(int(a))
            bob.append(int(rec.bob_bit))
    return SiftedKeyPair(tuple(alice), tuple(bob))


def bb84_prepare(bit: int, basis: BasisId, bases: BasisSet) -> StateVector:
    if bases.dimension != 2:
        raise ValueError("BB84 baseline supports N=2 only")
    return bases.e(bit + 1) if basis is BasisId.E else bases.f(bit + 1)


def bb84_round(bit: int, alice_basis: BasisId, bob_basis: BasisId,
               outcome_index: int, N: int = 2) -> Optional[int]:
    """Bob's kept bit (outcome label ``index - 1``) or None on basis mismatch.

    ``bit`` is Alice's bit; it is not consulted for the decision but is
    validated so that callers cannot pass garbage through.
    """
    if N != 2:
        raise ValueError("BB84 baseline supports N=2 only")
    if bit not in (0, 1) or outcome_index not in (1, 2):
        raise ValueError("bit must be 0/1 and outcome 1/2")
    if alice_basis is not bob_basis:
        return None
    return outcome_index - 1
