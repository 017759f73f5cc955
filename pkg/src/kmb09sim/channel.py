"""Free-space channel: collective rotation / depolarizing noise and
von Karman random-phase turbulence."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import gamma

from .states import BasisSet, StateVector

# Committed calibration: with rc = 2 cm and unit gain the mean detection flip
# probability at theta=0 is ~0.121 (see scripts/calibrate_turbulence.py).
DEFAULT_RC = 0.02
DEFAULT_GAIN = 1.0


@dataclass(frozen=True)
class RotationNoiseConfig:
    """Rotation by ``theta`` applied independently to each pulse with
    probability ``rho``."""

    theta: float = math.pi / 4
    rho: float = 1.0
    enabled: bool = True

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        if not 0.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [0, 1], got {self.rho!r}")

    @property
    def active(self) -> bool:
        return self.enabled and self.rho > 0.0


@dataclass(frozen=True)
class TurbulenceConfig:
    """Von Karman phase-spectrum parameters (SI units, radians).

    ``wavelength`` and ``distance`` are carried for reporting only. The
    spatial-frequency sampling window defaults to ``[kappa_0, kappa_m]``.
    """

    l0: float = 0.01
    L0: float = 10.0
    alpha: float = 5.0 / 3.0
    rc: float = DEFAULT_RC
    wavelength: float = 1500e-9
    distance: float = 1000.0
    gain: float = DEFAULT_GAIN
    kappa_min: Optional[float] = None
    kappa_max: Optional[float] = None
    enabled: bool = True

    def __post_init__(self):
        if not (0 < self.l0 < self.L0):
            raise ValueError(f"need 0 < l0 < L0, got l0={self.l0!r}, L0={self.L0!r}")
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha!r}")
        if not self.rc > 0:
            raise ValueError(f"rc must be positive, got {self.rc!r}")
        if not (self.gain >= 0 and math.isfinite(self.gain)):
            raise ValueError(f"gain must be finite and >= 0, got {self.gain!r}")
        if self.wavelength <= 0 or self.distance < 0:
            raise ValueError("wavelength must be positive and distance non-negative")
        lo, hi = self.kappa_bounds
        if not (0 < lo <= hi and math.isfinite(hi)):
            raise ValueError(
                f"need 0 < kappa_min <= kappa_max, got {lo!r}, {hi!r}"
            )

    @property
    def kappa_m(self) -> float:
        return 2 * math.pi / self.l0

    @property
    def kappa_0(self) -> float:
        return 2 * math.pi / self.L0

    @property
    def kappa_bounds(self) -> tuple[float, float]:
        lo = self.kappa_0 if self.kappa_min is None else self.kappa_min
        hi = self.kappa_m if self.kappa_max is None else self.kappa_max
        return float(lo), float(hi)


@dataclass(frozen=True)
class ChannelConfig:
    rotation: RotationNoiseConfig = field(default_factory=RotationNoiseConfig)
    turbulence: TurbulenceConfig = field(default_factory=TurbulenceConfig)


@dataclass(frozen=True)
class PhaseSample:
    kappa: float
    magnitude: float
    sign: int

    @property
    def delta(self) -> float:
        return self.sign * self.magnitude


def c_alpha(alpha: float) -> float:
    """Spectral amplitude constant ``a 2^(a-2) G(1+a/2) / (pi G(1-a/2))``."""
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"c_alpha defined for 0 < alpha < 2, got {alpha!r}")
    return (
        alpha * 2.0 ** (alpha - 2.0) * gamma(1.0 + alpha / 2.0)
        / (math.pi * gamma(1.0 - alpha / 2.0))
    )


def von_karman_psd(kappa, cfg: TurbulenceConfig):
    """Von Karman random-phase spectrum at spatial frequency ``kappa`` (rad/m).

    Accepts scalars or arrays.
    """
    k = np.asarray(kappa, dtype=float)
    if np.any(k < 0):
        raise ValueError("kappa must be non-negative")
    a = cfg.alpha
    amp = c_alpha(a) * cfg.rc ** (-a)
    out = amp * np.exp(-(k**2) / cfg.kappa_m**2) / (k**2 + cfg.kappa_0**2) ** (1 + a / 2)
    return float(out) if out.ndim == 0 else out


def kappa_from_uniform(u, cfg: TurbulenceConfig):
    """Log-uniform map of ``u`` in [0, 1) onto ``[kappa_min, kappa_max]``."""
    lo, hi = cfg.kappa_bounds
    return lo * (hi / lo) ** np.asarray(u, dtype=float)


def sample_phase(cfg: TurbulenceConfig, u_kappa: float, u_sign: float) -> PhaseSample:
    if not cfg.enabled:
        raise ValueError("turbulence disabled; caller must skip phase sampling")
    kappa = float(kappa_from_uniform(u_kappa, cfg))
    mag = cfg.gain * von_karman_psd(kappa, cfg)
    return PhaseSample(kappa=kappa, magnitude=float(mag), sign=1 if u_sign < 0.5 else -1)


def rotation_matrix(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def apply_rotation(s: StateVector, theta: float) -> StateVector:
    if s.dimension != 2:
        raise ValueError(
            f"rotation defined for N=2 only (got N={s.dimension}); use depolarize_replace"
        )
    return StateVector(rotation_matrix(theta) @ s.amplitudes)


def replacement_slot(u, N: int):
    """0-based slot in e_1..e_N, f_1..f_N chosen by ``u`` in [0, 1)."""
    return np.minimum((np.asarray(u) * (2 * N)).astype(np.int64), 2 * N - 1)


def depolarize_replace(s: StateVector, bases: BasisSet, u: float) -> StateVector:
    """Replace ``s`` by a basis state drawn uniformly from e and f (2N choices)."""
    if s.dimension != bases.dimension:
        raise ValueError("state and bases differ in dimension")
    slot = int(replacement_slot(u, bases.dimension))
    return StateVector(bases.all_states[slot])


def rotation_fires(cfg: RotationNoiseConfig, u) -> np.ndarray | bool:
    """Noise hits the pulse when enabled and ``u < rho``."""
    hit = np.asarray(u) < cfg.rho
    if not cfg.enabled:
        hit = np.zeros_like(hit)
    return bool(hit) if hit.ndim == 0 else hit
