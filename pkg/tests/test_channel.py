import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from kmb09sim.channel import (
    RotationNoiseConfig,
    TurbulenceConfig,
    apply_rotation,
    c_alpha,
    depolarize_replace,
    rotation_fires,
    sample_phase,
    von_karman_psd,
)
from kmb09sim.states import StateVector, build_bases

FIG3 = TurbulenceConfig(l0=0.01, L0=10.0, alpha=5 / 3, rc=0.02)


def mp_c_alpha(alpha):
    with mpmath.workdps(40):
        a = mpmath.mpf(alpha)
        return a * 2 ** (a - 2) * mpmath.gamma(1 + a / 2) / (mpmath.pi * mpmath.gamma(1 - a / 2))


@pytest.mark.parametrize("alpha", [0.5, 1.0, 5 / 3, 1.9])
def test_c_alpha_matches_arbitrary_precision(alpha):
    ref = float(mp_c_alpha(alpha))
    assert abs(c_alpha(alpha) - ref) / ref < 1e-9


def test_c_alpha_examples():
    # 40-digit mpmath evaluation, frozen
    assert c_alpha(5 / 3) == pytest.approx(0.07115713468453660, rel=1e-12)
    assert c_alpha(5 / 3) == pytest.approx(0.0712, abs=1e-3)
    assert c_alpha(1.0) == pytest.approx(math.gamma(1.5) / (2 * math.pi * math.sqrt(math.pi)), rel=1e-12)
    assert c_alpha(1e-9) < 1e-9


@pytest.mark.parametrize("alpha", [0.0, 2.0, -1.0, 2.5])
def test_c_alpha_domain(alpha):
    with pytest.raises(ValueError):
        c_alpha(alpha)


def test_psd_at_zero_and_at_kappa_m():
    amp = c_alpha(FIG3.alpha) * FIG3.rc ** (-FIG3.alpha)
    assert von_karman_psd(0.0, FIG3) == pytest.approx(amp / FIG3.kappa_0 ** (2 + FIG3.alpha), rel=1e-12)
    km = FIG3.kappa_m
    bare = amp / (km**2 + FIG3.kappa_0**2) ** (1 + FIG3.alpha / 2)
    assert von_karman_psd(km, FIG3) == pytest.approx(bare * math.exp(-1), rel=1e-12)


def test_psd_regression_constants():
    # 40-digit mpmath evaluation at rc = 0.02 m
    assert von_karman_psd(1.0, FIG3) == pytest.approx(26.23641575623128533, rel=1e-10)
    assert von_karman_psd(10.0, FIG3) == pytest.approx(0.01032574371983584321, rel=1e-10)
    ratio = von_karman_psd(1.0, FIG3) / von_karman_psd(10.0, FIG3)
    assert ratio == pytest.approx(2540.874194449635932, rel=1e-10)


def test_psd_strictly_decreasing():
    k = np.linspace(0, 10 * FIG3.kappa_m, 1000)
    psd = von_karman_psd(k, FIG3)
    assert np.all(psd > 0)
    assert np.all(np.diff(psd) < 0)


def test_psd_rejects_negative_kappa():
    with pytest.raises(ValueError):
        von_karman_psd(-1.0, FIG3)


@pytest.mark.parametrize(
    "kwargs",
    [dict(l0=10.0, L0=1.0), dict(alpha=2.0), dict(alpha=0.0), dict(rc=0.0),
     dict(kappa_min=5.0, kappa_max=1.0), dict(gain=-1.0)],
)
def test_turbulence_config_validation(kwargs):
    with pytest.raises(ValueError):
        TurbulenceConfig(**kwargs)


def test_turbulence_derived_scales():
    assert FIG3.kappa_0 == pytest.approx(0.6283, abs=1e-4)
    assert FIG3.kappa_m == pytest.approx(628.32, abs=1e-2)


def test_sample_phase_examples():
    assert sample_phase(FIG3, 0.3, 0.2).sign == 1
    assert sample_phase(FIG3, 0.3, 0.7).sign == -1
    s = sample_phase(FIG3, 0.0, 0.2)
    assert s.kappa == pytest.approx(FIG3.kappa_0, rel=1e-12)
    s = sample_phase(FIG3, 1 - 1e-16, 0.2)
    assert s.kappa == pytest.approx(FIG3.kappa_m, rel=1e-9)
    zero = TurbulenceConfig(gain=0.0)
    assert sample_phase(zero, 0.4, 0.9).delta == 0.0
    with pytest.raises(ValueError):
        sample_phase(TurbulenceConfig(enabled=False), 0.1, 0.1)


@given(st.floats(0, 1, exclude_max=True), st.floats(0, 1, exclude_max=True))
def test_sample_phase_invariants(u_k, u_s):
    s = sample_phase(FIG3, u_k, u_s)
    lo, hi = FIG3.kappa_bounds
    assert lo * (1 - 1e-12) <= s.kappa <= hi * (1 + 1e-12)
    assert s.magnitude >= 0
    assert s.delta == s.sign * s.magnitude
    assert s == sample_phase(FIG3, u_k, u_s)


def test_kappa_is_log_uniform():
    u = np.random.default_rng(3).random(100_000)
    logs = np.log([sample_phase(FIG3, x, 0.1).kappa for x in u[:20000]])
    lo, hi = np.log(FIG3.kappa_bounds)
    hist, _ = np.histogram(logs, bins=10, range=(lo, hi))
    n, p = 20000, 0.1
    assert np.all(np.abs(hist - n * p) <= 4 * math.sqrt(n * p * (1 - p)))


def test_rotation_examples():
    b = build_bases(2)
    assert apply_rotation(b.e(1), 0.0) == b.e(1)
    assert apply_rotation(b.e(1), math.pi / 4) == StateVector([math.sqrt(0.5), math.sqrt(0.5)])
    assert apply_rotation(b.e(1), math.pi / 4).equals_up_to_phase(b.f(1))
    # [[0, -1], [1, 0]] @ (1, -1)/sqrt2 = (1, 1)/sqrt2
    assert apply_rotation(b.f(2), math.pi / 2) == b.f(1)
    assert not apply_rotation(b.f(2), math.pi / 2).equals_up_to_phase(b.e(1))
    with pytest.raises(ValueError):
        apply_rotation(build_bases(3).e(1), 0.1)


angles = st.floats(-10, 10, allow_nan=False)


@given(angles, angles, st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_rotation_composes_and_preserves_norm(a, b, x, y, z, w):
    v = np.array([x + 1j * z, y + 1j * w])
    if np.linalg.norm(v) < 1e-3:
        v = np.array([1.0, 0.0])
    s = StateVector(v / np.linalg.norm(v))
    two = apply_rotation(apply_rotation(s, b), a)
    one = apply_rotation(s, a + b)
    assert np.allclose(two.amplitudes, one.amplitudes, atol=1e-9)
    assert abs(np.sum(np.abs(one.amplitudes) ** 2) - 1) < 1e-9


def test_depolarize_replace_indexing():
    b = build_bases(4)
    # slot 3 of 8 (1-based) covers u in [2/8, 3/8)
    assert depolarize_replace(b.f(2), b, 2.5 / 8) == b.e(3)
    assert depolarize_replace(b.e(1), b, 7.5 / 8) == b.f(4)


def test_depolarize_replace_frequencies():
    b = build_bases(4)
    u = np.random.default_rng(11).random(100_000)
    rows = b.all_states
    counts = np.zeros(8)
    for x in u:
        s = depolarize_replace(b.e(1), b, x)
        counts[int(np.argmax(np.abs(rows.conj() @ s.amplitudes)))] += 1
    n, p = u.size, 1 / 8
    assert np.all(np.abs(counts - n * p) <= 4 * math.sqrt(n * p * (1 - p)))


@pytest.mark.parametrize("rho", [0.0, 0.3, 1.0])
def test_rotation_fire_frequency(rho):
    cfg = RotationNoiseConfig(theta=0.3, rho=rho)
    n = 100_000
    fired = rotation_fires(cfg, np.random.default_rng(5).random(n))
    sigma = math.sqrt(n * rho * (1 - rho))
    assert abs(fired.sum() - n * rho) <= 4 * sigma
    assert not np.any(rotation_fires(RotationNoiseConfig(rho=rho, enabled=False), np.zeros(10)))


def test_rotation_config_validation():
    with pytest.raises(ValueError):
        RotationNoiseConfig(rho=1.5)
    with pytest.raises(ValueError):
        RotationNoiseConfig(theta=math.inf)
