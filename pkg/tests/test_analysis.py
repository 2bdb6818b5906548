import numpy as np
import pytest

from spinbath import (BathState, ChainSpec, LaserConfig, classify_regime,
                      chain_modes, detect_revival, extract_decay_rate,
                      omega_z_in_khz, required_trap_frequency, revival_time,
                      sweep_rate_vs_alpha)
from spinbath.analysis import (BE9_300NM_ER_KHZ, COHERENT, OVERDAMPED,
                               _reference_alpha_cached)
from spinbath.coupling import (TRAVELLING, couplings, fit_alpha,
                               smoothed_spectral_density)
from spinbath.niba import PolarizationTrace, evolve


def make_trace(t, p):
    return PolarizationTrace(t=np.asarray(t, float), p=np.asarray(p, float))


def test_classify_underdamped_parameters():
    rep = classify_regime(2e-3, 250.0, 10.0)
    assert rep.tau_m == pytest.approx(1.0 / np.pi, rel=1e-12)
    assert rep.product == pytest.approx(10.0 / np.pi, rel=1e-12)
    assert rep.label == COHERENT


def test_classify_overdamped_parameters():
    rep = classify_regime(4e-3, 250.0, 3.0)
    assert rep.tau_m == pytest.approx(1.0 / (2 * np.pi), rel=1e-12)
    assert rep.product == pytest.approx(3.0 / (2 * np.pi), rel=1e-12)
    assert rep.label == OVERDAMPED
    assert rep.gamma_predicted == pytest.approx(9.0 / (2 * np.pi), rel=1e-12)


def test_classify_boundary_tie_break():
    # product = Delta / (2 pi alpha T); pick values 1e-9 either side of 1
    T, delta = 1.0, 1.0
    alpha0 = delta / (2 * np.pi)
    assert classify_regime(alpha0 * (1 + 1e-9), T, delta).label == OVERDAMPED
    assert classify_regime(alpha0 * (1 - 1e-9), T, delta).label == COHERENT
    exact = classify_regime(alpha0, T, delta)
    assert exact.label == OVERDAMPED or abs(exact.product - 1) > 0


def test_classify_needs_temperature():
    with pytest.raises(ValueError):
        classify_regime(0.5, 0.0, 10.0)


def test_decay_pure_exponential():
    t = np.arange(0, 20.0, 0.01)
    fit = extract_decay_rate(make_trace(t, np.exp(-0.5 * t)), tau_rev=40.0)
    assert fit.method == "direct"
    assert fit.gamma == pytest.approx(0.5, abs=1e-6)


def test_decay_damped_cosine_envelope():
    t = np.arange(0, 20.0, 0.002)
    fit = extract_decay_rate(make_trace(t, np.exp(-0.25 * t) * np.cos(3 * t)),
                             tau_rev=40.0)
    assert fit.method == "envelope"
    assert fit.gamma == pytest.approx(0.25, rel=0.02)
    assert fit.window[1] <= 20.0


def test_decay_grid_refinement_invariance():
    coarse = np.arange(0, 20.0, 0.01)
    fine = np.arange(0, 20.0, 0.005)
    g1 = extract_decay_rate(make_trace(coarse, np.exp(-0.5 * coarse)), 40.0).gamma
    g2 = extract_decay_rate(make_trace(fine, np.exp(-0.5 * fine)), 40.0).gamma
    assert abs(g1 - g2) <= 1e-6


def test_decay_flat_trace_flagged():
    t = np.arange(0, 10.0, 0.01)
    fit = extract_decay_rate(make_trace(t, np.ones_like(t)), tau_rev=10.0)
    assert fit.method == "none"
    assert fit.gamma == 0.0


def test_decay_trace_too_short():
    t = np.arange(0, 1.0, 0.01)
    with pytest.raises(ValueError, match="too short"):
        extract_decay_rate(make_trace(t, np.exp(-t)), tau_rev=40.0)


def test_revival_flat_trace_not_detected():
    t = np.arange(0, 15.0, 0.01)
    rep = detect_revival(make_trace(t, np.full_like(t, 0.01)), tau_rev=10.0)
    assert not rep.detected


def test_revival_synthetic_pulse_detected():
    t = np.arange(0, 15.0, 0.01)
    tau_rev = 10.0
    p = 0.01 * np.ones_like(t) + 0.3 * np.exp(-((t - tau_rev) / 0.2) ** 2)
    rep = detect_revival(make_trace(t, p), tau_rev=tau_rev)
    assert rep.detected
    assert rep.t_peak == pytest.approx(tau_rev, abs=0.05)
    assert rep.amplitude > 2 * rep.baseline
    assert 0.7 * tau_rev <= rep.t_peak <= 1.3 * tau_rev


def test_revival_trace_too_short():
    t = np.arange(0, 5.0, 0.01)
    with pytest.raises(ValueError, match="too short"):
        detect_revival(make_trace(t, np.ones_like(t)), tau_rev=10.0)


def test_sweep_single_point_matches_direct(spectrum50):
    rows = sweep_rate_vs_alpha(ChainSpec(50), delta=10.0,
                               alpha_grid=[2e-3], t_list=[250.0])
    assert len(rows) == 1
    laser = LaserConfig(kind=TRAVELLING, delta=10.0)
    trace = evolve(spectrum50, laser, BathState(250.0), alpha_target=2e-3)
    fit = extract_decay_rate(trace, revival_time(spectrum50).tau_roundtrip)
    assert rows[0].gamma == pytest.approx(fit.gamma, rel=1e-12)
    assert rows[0].regime == COHERENT


def test_sweep_sorted_and_thread_invariant():
    kwargs = dict(delta=10.0, alpha_grid=[0.5, 0.1], t_list=[0.0])
    seq = sweep_rate_vs_alpha(ChainSpec(20), threads=1, **kwargs)
    par = sweep_rate_vs_alpha(ChainSpec(20), threads=4, **kwargs)
    assert [(r.temperature, r.alpha) for r in seq] == [(0.0, 0.1), (0.0, 0.5)]
    assert seq == par


def test_sweep_rejects_empty_grid():
    with pytest.raises(ValueError):
        sweep_rate_vs_alpha(ChainSpec(10), 10.0, [], [0.0])


def test_required_trap_frequency_identity():
    ratios = {a: required_trap_frequency(50, a) for a in (0.25, 0.5, 1.0, 2.0)}
    products = [r * a for a, r in ratios.items()]
    assert max(products) - min(products) <= 1e-9 * products[0]
    # doubling alpha halves the required trap frequency
    assert ratios[0.5] == pytest.approx(2 * ratios[1.0], rel=1e-12)


def test_required_trap_frequency_decreases_with_n():
    c = {n: required_trap_frequency(n, 1.0) for n in (20, 50, 100)}
    assert c[20] > c[50] > c[100]


def test_required_trap_frequency_round_trip():
    # eta^2 = E_R / omega_z: realize the returned ratio and re-fit alpha
    alpha_target = 1.0
    ratio = required_trap_frequency(50, alpha_target)
    eta = 1.0 / np.sqrt(ratio)
    ms = chain_modes(ChainSpec(50))
    sd = smoothed_spectral_density(
        ms, couplings(ms, LaserConfig(kind=TRAVELLING, eta=eta)))
    assert fit_alpha(sd).alpha == pytest.approx(alpha_target, rel=0.05)


def test_required_trap_frequency_invalid():
    with pytest.raises(ValueError):
        required_trap_frequency(50, 0.0)


def test_recoil_anchor_khz():
    assert omega_z_in_khz(1.0) == 245.0
    assert omega_z_in_khz(2.5) == 2.5 * BE9_300NM_ER_KHZ
    assert omega_z_in_khz(1.0, er_khz=100.0) == 100.0


def test_reference_alpha_cache_matches_fit(spectrum50):
    direct = fit_alpha(smoothed_spectral_density(
        spectrum50, couplings(spectrum50,
                              LaserConfig(kind=TRAVELLING, eta=1.0)))).alpha
    assert _reference_alpha_cached(50, "cubic") == pytest.approx(direct,
                                                                 rel=1e-14)
