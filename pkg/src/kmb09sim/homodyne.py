"""Homodyne receiver: beat power and the phase-mismatch bit-flip model."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

BEAT_MODES = ("paper_literal", "standard")
DECISION_MODES = ("probabilistic", "threshold")


@dataclass(frozen=True)
class HomodyneConfig:
    """Receiver settings.

    Powers are abstract non-negative values (the defaults 3 and 8 are the
    signal and local-oscillator levels of the reference setup). ``beat_mode``
    selects the cross term: ``paper_literal`` uses ``2*sqrt(P_S + P_LO)``,
    ``standard`` uses ``2*sqrt(P_S * P_LO)``.
    """

    p_signal: float = 3.0
    p_lo: float = 8.0
    omega_if: float = 0.0
    phi_s: float = 0.0
    phi_lo: float = 0.0
    beat_mode: str = "paper_literal"
    decision_mode: str = "probabilistic"
    threshold: float = 0.0

    def __post_init__(self):
        if self.p_signal < 0 or self.p_lo < 0:
            raise ValueError("powers must be non-negative")
        if self.omega_if != 0:
            raise ValueError("homodyne operation requires omega_if = 0")
        if self.beat_mode not in BEAT_MODES:
            raise ValueError(f"beat_mode must be one of {BEAT_MODES}, got {self.beat_mode!r}")
        if self.decision_mode not in DECISION_MODES:
            raise ValueError(
                f"decision_mode must be one of {DECISION_MODES}, got {self.decision_mode!r}"
            )
        for name in ("phi_s", "phi_lo", "threshold"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def static_mismatch(self) -> float:
        return self.phi_s - self.phi_lo


@dataclass(frozen=True)
class DetectionOutcome:
    power: float
    delta_phase: float
    flipped: bool


def total_phase(cfg: HomodyneConfig, turbulence_delta):
    """Phase mismatch entering the beat term: omega_IF + phi_S +/- Phi(kappa) - phi_LO."""
    return cfg.omega_if + cfg.phi_s + np.asarray(turbulence_delta, dtype=float) - cfg.phi_lo


def mixed_power(cfg: HomodyneConfig, turbulence_delta=0.0):
    ps, plo = cfg.p_signal, cfg.p_lo
    if ps < 0 or plo < 0:
        raise ValueError("powers must be non-negative")
    cross = math.sqrt(ps + plo) if cfg.beat_mode == "paper_literal" else math.sqrt(ps * plo)
    out = ps + plo + 2.0 * cross * np.cos(total_phase(cfg, turbulence_delta))
    return float(out) if np.ndim(out) == 0 else out


def flip_probability(delta_phase):
    """(1 - cos delta) / 2: zero at perfect phase match, one at inversion."""
    p = (1.0 - np.cos(delta_phase)) / 2.0
    return float(p) if np.ndim(p) == 0 else p


def decide_flip(cfg: HomodyneConfig, delta_phase, u):
    if cfg.decision_mode == "probabilistic":
        out = np.asarray(u) < flip_probability(delta_phase)
    else:
        out = np.cos(delta_phase) < cfg.threshold
    return bool(out) if np.ndim(out) == 0 else out


def detect(cfg: HomodyneConfig, turbulence_delta: float, u: float) -> DetectionOutcome:
    delta = float(total_phase(cfg, turbulence_delta))
    return DetectionOutcome(
        power=mixed_power(cfg, turbulence_delta),
        delta_phase=delta,
        flipped=decide_flip(cfg, delta, u),
    )
