"""Monte Carlo runner and run statistics.

The runner is vectorised over chunks of rounds. ``simulate_round`` is a
scalar reference path built from the per-round protocol operations; the test
suite checks the two agree record for record.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from . import rng
from .channel import (
    RotationNoiseConfig,
    TurbulenceConfig,
    apply_rotation,
    depolarize_replace,
    kappa_from_uniform,
    replacement_slot,
    rotation_fires,
    rotation_matrix,
    sample_phase,
    von_karman_psd,
)
from .homodyne import HomodyneConfig, decide_flip, mixed_power, total_phase
from .protocol import (
    PulseRecord,
    alice_prepare,
    bb84_prepare,
    bb84_round,
    kmb09_decode,
)
from .states import BasisId, BasisSet, born_probabilities, build_bases, sample_outcome

PROTOCOLS = ("kmb09", "bb84")
CHUNK = 1 << 15


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: str = "kmb09"
    dimension: int = 2
    iterations: int = 1000
    seed: int = 1
    rotation: RotationNoiseConfig = field(default_factory=RotationNoiseConfig)
    turbulence: TurbulenceConfig = field(default_factory=TurbulenceConfig)
    homodyne: HomodyneConfig = field(default_factory=HomodyneConfig)
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "protocol", str(self.protocol).lower())
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if int(self.dimension) != self.dimension or self.dimension < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.dimension!r}")
        if self.protocol == "bb84" and self.dimension != 2:
            raise ValueError("BB84 requires dimension 2")
        if int(self.iterations) != self.iterations or self.iterations < 1:
            raise ValueError(f"iterations must be a positive integer, got {self.iterations!r}")
        if not 0 <= self.seed <= rng.SEED_MASK:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")

    @property
    def noise_replaces(self) -> bool:
        """True when channel noise is modelled by basis-state replacement (N > 2).

        A rotation by a multiple of 2*pi is the identity for N=2, and is kept
        a no-op for N > 2 as well.
        """
        return self.dimension > 2 and math.remainder(self.rotation.theta, 2 * math.pi) != 0


@dataclass
class RunStats:
    rounds: int
    sifted: int
    errors: int
    qber: float
    efficiency: float
    qber_series: np.ndarray = field(repr=False)
    efficiency_series: np.ndarray = field(repr=False)

    def summary(self) -> dict:
        return {
            "rounds": self.rounds,
            "sifted": self.sifted,
            "errors": self.errors,
            "qber": self.qber,
            "efficiency": self.efficiency,
        }


@dataclass
class Rounds:
    """Struct-of-arrays view of a run, one entry per round (1-based ``round``).

    ``bob_bit`` is -1 and ``alice_basis`` is -1 where not applicable; basis
    columns hold 0 for E and 1 for F.
    """

    round: np.ndarray
    alice_bit: np.ndarray
    alice_index: np.ndarray
    alice_basis: np.ndarray
    bob_basis: np.ndarray
    bob_index: np.ndarray
    conclusive: np.ndarray
    bob_bit: np.ndarray
    flipped: np.ndarray
    delta_phase: np.ndarray
    power: np.ndarray

    def __len__(self):
        return self.round.size

    @property
    def error(self) -> np.ndarray:
        return self.conclusive & (self.bob_bit != self.alice_bit)

    @classmethod
    def concat(cls, parts: list["Rounds"]) -> "Rounds":
        names = cls.__dataclass_fields__
        return cls(**{n: np.concatenate([getattr(p, n) for p in parts]) for n in names})

    def records(self) -> Iterator[PulseRecord]:
        basis = (BasisId.E, BasisId.F)
        for i in range(len(self)):
            ab = int(self.alice_basis[i])
            yield PulseRecord(
                round=int(self.round[i]),
                alice_bit=int(self.alice_bit[i]),
                alice_index=int(self.alice_index[i]),
                bob_basis=basis[int(self.bob_basis[i])],
                bob_index=int(self.bob_index[i]),
                conclusive=bool(self.conclusive[i]),
                bob_bit=int(self.bob_bit[i]) if self.conclusive[i] else None,
                flipped_by_detection=bool(self.flipped[i]),
                alice_basis=None if ab < 0 else basis[ab],
            )

    def stats(self) -> RunStats:
        n = len(self)
        cum_sifted = np.cumsum(self.conclusive, dtype=np.int64)
        cum_err = np.cumsum(self.error, dtype=np.int64)
        sifted, errors = int(cum_sifted[-1]), int(cum_err[-1])
        eff_series = cum_sifted / np.arange(1, n + 1)
        qber_series = cum_err / np.maximum(cum_sifted, 1)
        return RunStats(
            rounds=n,
            sifted=sifted,
            errors=errors,
            qber=errors / sifted if sifted else 0.0,
            efficiency=sifted / n,
            qber_series=qber_series,
            efficiency_series=eff_series,
        )


def efficiency_analytic(N: int) -> float:
    """Noiseless KMB09 sift fraction (N - 1) / (2N)."""
    if int(N) != N or N < 2:
        raise ValueError(f"need integer N >= 2, got {N!r}")
    return (N - 1) / (2 * N)


def _uniform_index(u, n: int):
    return np.minimum((np.asarray(u) * n).astype(np.int64), n - 1)


def simulate_chunk(cfg: ExperimentConfig, first_round: int, count: int) -> Rounds:
    N = cfg.dimension
    bases = build_bases(N)
    v = rng.round_variates(cfg.seed, first_round, count)
    all_states = bases.all_states
    stacked = np.stack([bases.e_matrix, bases.f_matrix])

    bit = _uniform_index(v[:, rng.ALICE_BIT], 2)
    if cfg.protocol == "kmb09":
        idx0 = _uniform_index(v[:, rng.ALICE_INDEX], N)
        alice_basis = np.full(count, -1, dtype=np.int64)
        states = all_states[bit * N + idx0]
    else:
        alice_basis = _uniform_index(v[:, rng.ALICE_BASIS], 2)
        idx0 = bit
        states = all_states[alice_basis * N + bit]

    fired = rotation_fires(cfg.rotation, v[:, rng.NOISE_FIRE])
    if np.any(fired):
        if N == 2:
            states[fired] = states[fired] @ rotation_matrix(cfg.rotation.theta).T
        elif cfg.noise_replaces:
            slots = replacement_slot(v[fired, rng.NOISE_SLOT], N)
            states[fired] = all_states[slots]

    bob_basis = _uniform_index(v[:, rng.BOB_BASIS], 2)
    amps = np.einsum("nij,nj->ni", stacked[bob_basis].conj(), states)
    probs = np.abs(amps) ** 2
    cum = np.cumsum(probs, axis=1)
    outcome0 = np.minimum(
        np.count_nonzero(cum <= v[:, rng.OUTCOME, None], axis=1), N - 1
    )

    if cfg.protocol == "kmb09":
        conclusive = outcome0 != idx0
        raw_bit = 1 - bob_basis
    else:
        conclusive = alice_basis == bob_basis
        raw_bit = outcome0

    turb = cfg.turbulence
    if turb.enabled:
        kappa = kappa_from_uniform(v[:, rng.KAPPA], turb)
        sign = np.where(v[:, rng.SIGN] < 0.5, 1.0, -1.0)
        tdelta = sign * (turb.gain * von_karman_psd(kappa, turb))
    else:
        tdelta = np.zeros(count)
    delta = total_phase(cfg.homodyne, tdelta)
    flipped = decide_flip(cfg.homodyne, delta, v[:, rng.FLIP]) & conclusive
    bob_bit = np.where(conclusive, raw_bit ^ flipped, -1)

    return Rounds(
        round=np.arange(first_round, first_round + count, dtype=np.int64),
        alice_bit=bit,
        alice_index=idx0 + 1,
        alice_basis=alice_basis,
        bob_basis=bob_basis,
        bob_index=outcome0 + 1,
        conclusive=conclusive,
        bob_bit=bob_bit,
        flipped=flipped,
        delta_phase=delta,
        power=np.asarray(mixed_power(cfg.homodyne, tdelta), dtype=float),
    )


def _chunk_job(args) -> Rounds:
    cfg, first, count = args
    return simulate_chunk(cfg, first, count)


def simulate(cfg: ExperimentConfig, workers: Optional[int] = None) -> Rounds:
    """Run every round of ``cfg``; results are independent of ``workers``."""
    workers = cfg.workers if workers is None else workers
    jobs = [
        (cfg, first, min(CHUNK, cfg.iterations - first + 1))
        for first in range(1, cfg.iterations + 1, CHUNK)
    ]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            parts = list(pool.map(_chunk_job, jobs))
    else:
        parts = [_chunk_job(j) for j in jobs]
    return Rounds.concat(parts)


def run_experiment(cfg: ExperimentConfig) -> RunStats:
    return simulate(cfg).stats()


def simulate_round(cfg: ExperimentConfig, round: int,
                   bases: Optional[BasisSet] = None) -> PulseRecord:
    """Scalar reference implementation of one round."""
    N = cfg.dimension
    bases = bases or build_bases(N)
    v = rng.derive_round_randomness(cfg.seed, round)
    bit = int(_uniform_index(v[rng.ALICE_BIT], 2))
    if cfg.protocol == "kmb09":
        alice_basis = None
        index = int(_uniform_index(v[rng.ALICE_INDEX], N)) + 1
        state = alice_prepare(bit, index, bases)
    else:
        alice_basis = BasisId.F if v[rng.ALICE_BASIS] >= 0.5 else BasisId.E
        index = bit + 1
        state = bb84_prepare(bit, alice_basis, bases)

    if rotation_fires(cfg.rotation, v[rng.NOISE_FIRE]):
        if N == 2:
            state = apply_rotation(state, cfg.rotation.theta)
        elif cfg.noise_replaces:
            state = depolarize_replace(state, bases, v[rng.NOISE_SLOT])

    bob_basis = BasisId.F if v[rng.BOB_BASIS] >= 0.5 else BasisId.E
    p = born_probabilities(state, bases.matrix(bob_basis))
    outcome = sample_outcome(p, v[rng.OUTCOME])
    if cfg.protocol == "kmb09":
        decoded = kmb09_decode(index, bob_basis, outcome, N)
    else:
        decoded = bb84_round(bit, alice_basis, bob_basis, outcome)

    tdelta = 0.0
    if cfg.turbulence.enabled:
        tdelta = sample_phase(cfg.turbulence, v[rng.KAPPA], v[rng.SIGN]).delta
    delta = float(total_phase(cfg.homodyne, tdelta))
    flipped = decoded is not None and decide_flip(cfg.homodyne, delta, v[rng.FLIP])
    if flipped:
        decoded ^= 1
    return PulseRecord(
        round=round,
        alice_bit=bit,
        alice_index=index,
        bob_basis=bob_basis,
        bob_index=outcome,
        conclusive=decoded is not None,
        bob_bit=decoded,
        flipped_by_detection=flipped,
        alice_basis=alice_basis,
    )
