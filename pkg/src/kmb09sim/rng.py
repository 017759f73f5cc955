"""Counter-based per-round randomness.

Every round owns a fixed block of ``SLOTS`` uniforms taken from a Philox
stream keyed by the run seed. Round ``r`` (1-based) starts at Philox counter
``(r - 1) * BLOCKS_PER_ROUND``, so any range of rounds can be generated
independently and the result never depends on chunking or worker count.
"""
from __future__ import annotations

import numpy as np

SLOTS = 12
BLOCKS_PER_ROUND = SLOTS // 4  # Philox emits 4 x uint64 per counter step

# slot layout
ALICE_BIT = 0
ALICE_INDEX = 1
NOISE_FIRE = 2
NOISE_SLOT = 3
BOB_BASIS = 4
OUTCOME = 5
KAPPA = 6
SIGN = 7
FLIP = 8
ALICE_BASIS = 9

SEED_MASK = (1 << 64) - 1


def _to_unit(raw: np.ndarray) -> np.ndarray:
    # top 53 bits -> [0, 1)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def round_variates(seed: int, first_round: int, count: int) -> np.ndarray:
    """Uniform variates for rounds ``first_round .. first_round + count - 1``.

    Returns an array of shape ``(count, SLOTS)``.
    """
    if first_round < 1 or count < 0:
        raise ValueError("rounds are 1-based and count must be non-negative")
    bg = np.random.Philox(key=int(seed) & SEED_MASK)
    bg.advance((first_round - 1) * BLOCKS_PER_ROUND)
    raw = bg.random_raw(count * SLOTS)
    return _to_unit(raw).reshape(count, SLOTS)


def derive_round_randomness(seed: int, round: int) -> np.ndarray:
    """The ``SLOTS`` uniforms owned by a single round."""
    return round_variates(seed, round, 1)[0]


def derive_seed(master: int, *path: int) -> int:
    """Child seed for sub-run ``path`` of a master seed (used by sweeps)."""
    ss = np.random.SeedSequence([int(master) & SEED_MASK, *path])
    return int(ss.generate_state(1, np.uint64)[0])
