"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line (run with -s to see them inline).

The N = 50 dynamics runs use the travelling-wave drive with eta
calibrated to the target dissipation strength; revival and decay
windows are referred to the bath round-trip time pi/dwbar (the
contributing, parity-even modes are spaced 2 dwbar, so the polarization
revives at half the naive 2 pi/dwbar)."""

import time

import numpy as np
import pytest

from spinbath import (BathState, ChainSpec, LaserConfig, chain_modes,
                      calibrate_eta, classify_regime, detect_revival,
                      extract_decay_rate, fit_alpha, kernel, omega_z_in_khz,
                      required_trap_frequency, revival_time, solve_equilibrium,
                      solve_volterra, smoothed_spectral_density)
from spinbath.chain import axial_hessian, dispersion_estimate, stiffness_beta
from spinbath.coupling import STANDING, TRAVELLING, couplings
from spinbath.csvio import read_csv
from spinbath.niba import evolve

from test_niba import fock_expectation, laplace_reference
from test_cli import run_cli, write_cfg
from spinbath.cli import main


def criterion(name: str, ok: bool, detail: str = ""):
    print(f"\nACCEPTANCE {name}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def ms50():
    return chain_modes(ChainSpec(50))


@pytest.fixture(scope="module")
def tau_roundtrip(ms50):
    return revival_time(ms50).tau_roundtrip


def _evolve_at(ms, alpha, temperature, delta):
    laser = LaserConfig(kind=TRAVELLING, delta=delta)
    return evolve(ms, laser, BathState(temperature), alpha_target=alpha)


def test_chain_exactness():
    t0 = time.perf_counter()
    ok, notes = True, []

    a = 0.25 ** (1 / 3)
    b = 1.25 ** (1 / 3)
    u2 = solve_equilibrium(ChainSpec(2)).u
    u3 = solve_equilibrium(ChainSpec(3)).u
    ok &= np.max(np.abs(u2 - [-a, a])) <= 1e-10
    ok &= np.max(np.abs(u3 - [-b, 0, b])) <= 1e-10

    for n in (2, 10, 50):
        ms = chain_modes(ChainSpec(n))
        ok &= abs(ms.omega[0] - 1.0) <= 1e-9
        ok &= abs(ms.omega[1] - np.sqrt(3.0)) <= 1e-9
        M = ms.mode_matrix
        ok &= np.max(np.abs(M.T @ M - np.eye(n))) <= 1e-10
        A = axial_hessian(solve_equilibrium(ChainSpec(n)))
        a_dd = A[ms.addressed_index, ms.addressed_index]
        ok &= abs(np.sum(ms.m_at_ion ** 2) - 1.0) <= 1e-9
        ok &= abs(np.sum(ms.m_at_ion ** 2 * ms.omega ** 2) - a_dd) <= 1e-9
        notes.append(f"N={n} ok")
    elapsed = time.perf_counter() - t0
    ok &= elapsed < 1.0
    criterion("chain-exactness", bool(ok),
              f"{'; '.join(notes)}; runtime {elapsed:.2f}s")


def test_dispersion_estimate(ms50):
    beta = stiffness_beta(ms50.d0)
    ns = np.arange(1, 50 // 4 + 1)
    est = dispersion_estimate(ns, 50, beta)
    rel = np.abs(est - ms50.omega[:len(ns)]) / ms50.omega[:len(ns)]
    criterion("dispersion-estimate", bool(rel.max() <= 0.15),
              f"max rel err {rel.max():.3f} over n <= N/4")


def test_spectral_density(ms50):
    tw = couplings(ms50, LaserConfig(kind=TRAVELLING, eta=1.0))
    sd_tw = smoothed_spectral_density(ms50, tw)
    fit_tw = fit_alpha(sd_tw)
    sw = couplings(ms50, LaserConfig(kind=STANDING, f_dipole=1.0))
    sd_sw = smoothed_spectral_density(ms50, sw)
    fit_sw = fit_alpha(sd_sw)

    eta = calibrate_eta(ms50, 2e-3)
    refit = fit_alpha(smoothed_spectral_density(
        ms50, couplings(ms50, LaserConfig(kind=TRAVELLING, eta=eta))))

    cons = []
    for cs, sd in ((tw, sd_tw), (sw, sd_sw)):
        binned = np.pi * np.sum(cs.lam[:-1] ** 2)
        cons.append(abs(sd.total_weight() - binned) / binned)

    ok = (0.7 <= fit_tw.exponent <= 1.3
          and -1.4 <= fit_sw.exponent <= -0.6
          and abs(refit.alpha - 2e-3) <= 0.05 * 2e-3
          and max(cons) <= 1e-9)
    criterion("spectral-density", bool(ok),
              f"s_tw={fit_tw.exponent:.3f} s_sw={fit_sw.exponent:.3f} "
              f"alpha round trip={refit.alpha:.3e} "
              f"weight err={max(cons):.1e}")


def test_kernel_oracle():
    # single mode, ground state
    eta = 0.3
    err1 = 0.0
    for tau in (0.3, 0.9, 1.7, 2.6):
        q1 = eta ** 2 * (1 - np.cos(tau))
        q2 = eta ** 2 * np.sin(tau)
        closed = np.exp(-q1) * np.exp(-1j * q2)
        oracle = fock_expectation([1.0], [eta], 0.0, tau, n_levels=40)
        err1 = max(err1, abs(oracle - closed))

    # two chain modes, thermal state at T = 2
    ms2 = chain_modes(ChainSpec(2))
    laser = LaserConfig(kind=TRAVELLING, eta=0.25, delta=4.0)
    from spinbath.niba import polaron_weights, bath_exponents
    eta_n = polaron_weights(ms2, laser)
    err2 = 0.0
    for tau in (0.4, 1.3):
        q1, q2 = bath_exponents(ms2, laser, BathState(2.0), tau)
        closed = np.exp(-q1) * np.exp(-1j * q2)
        oracle = fock_expectation(ms2.omega, eta_n, 2.0, tau, n_levels=36)
        err2 = max(err2, abs(oracle - closed))

    table = kernel(ms2, laser, BathState(2.0), np.arange(10) * 0.1)
    ok = err1 <= 1e-8 and err2 <= 1e-6 and table.k[0] == -16.0
    criterion("kernel-oracle", bool(ok),
              f"N=1 err {err1:.1e}; N=2 err {err2:.1e}; "
              f"K(0)={table.k[0]}")


def test_volterra_solver():
    h = 1e-3 * 2 * np.pi / 1.0
    tr = solve_volterra(lambda tau: -np.ones_like(tau), 2 * np.pi, h)
    err_cos = np.max(np.abs(tr.p - np.cos(tr.t)))

    tr = solve_volterra(lambda tau: -np.exp(-0.5 * tau), 20.0, 0.01)
    err_exp = np.max(np.abs(tr.p - laplace_reference(tr.t)))
    tr2 = solve_volterra(lambda tau: -np.exp(-0.5 * tau), 20.0, 0.02)
    err_exp_coarse = np.max(np.abs(tr2.p - laplace_reference(tr2.t)))
    gain = err_exp_coarse / err_exp

    ok = err_cos <= 1e-6 and err_exp <= 1e-4 and gain >= 3.5
    criterion("volterra-solver", bool(ok),
              f"cos err {err_cos:.1e}; exp err {err_exp:.1e}; "
              f"halving gain {gain:.1f}x")


def test_high_temperature_transition(ms50, tau_roundtrip):
    # underdamped: Delta = 10, alpha = 2e-3, T = 250
    thick = _evolve_at(ms50, 2e-3, 250.0, 10.0)
    half = thick.t <= 0.5 * tau_roundtrip
    crossings = int(np.sum(np.diff(np.sign(thick.p[half])) != 0))
    rev = detect_revival(thick, tau_roundtrip)

    # overdamped: Delta = 3, alpha = 4e-3, T = 250
    thin = _evolve_at(ms50, 4e-3, 250.0, 3.0)
    gamma_ref = classify_regime(4e-3, 250.0, 3.0).gamma_predicted   # 1.432
    fit = extract_decay_rate(thin, tau_roundtrip)
    i02 = int(np.argmax(thin.p < 0.2))
    monotone = bool(np.all(np.diff(thin.p[:i02]) < 0))

    ok = (crossings >= 3 and rev.detected
          and 0.7 * tau_roundtrip <= rev.t_peak <= 1.3 * tau_roundtrip
          and 0.5 <= fit.gamma / gamma_ref <= 2.0
          and monotone)
    criterion("high-T-transition", bool(ok),
              f"crossings={crossings}; revival at {rev.t_peak:.2f} "
              f"(amp {rev.amplitude:.3f} vs base {rev.baseline:.3f}); "
              f"thin gamma {fit.gamma:.3f} vs {gamma_ref:.3f}; "
              f"monotone={monotone}")


def test_zero_temperature_localization(ms50, tau_roundtrip):
    grid = (0.1, 0.5, 1.0, 1.5)
    gammas, mins = [], []
    for alpha in grid:
        trace = _evolve_at(ms50, alpha, 0.0, 10.0)
        gammas.append(extract_decay_rate(trace, tau_roundtrip).gamma)
        mins.append(float(trace.p[trace.t <= tau_roundtrip].min()))
    gam_dec = bool(np.all(np.diff(gammas) < 0))
    min_inc = bool(np.all(np.diff(mins) > 0))

    ratios = {}
    for T in (0.0, 25.0):
        g = [extract_decay_rate(_evolve_at(ms50, a, T, 10.0),
                                tau_roundtrip).gamma for a in (0.2, 1.2)]
        ratios[T] = g[1] / g[0]
    smeared = ratios[25.0] > ratios[0.0]

    ok = gam_dec and min_inc and smeared
    criterion("zero-T-localization", bool(ok),
              f"gamma={['%.4f' % g for g in gammas]} decreasing={gam_dec}; "
              f"minP={['%.3f' % m for m in mins]} increasing={min_inc}; "
              f"ratio T=0 {ratios[0.0]:.2e} vs T=25 {ratios[25.0]:.2e}")


def test_trap_frequency_planning():
    products_ok = True
    for n in (20, 50, 100):
        prods = [required_trap_frequency(n, a) * a for a in (0.25, 0.7, 1.3)]
        products_ok &= (max(prods) - min(prods)) <= 1e-9 * prods[0]
    c = [required_trap_frequency(n, 1.0) for n in (20, 50, 100)]
    decreasing = c[0] > c[1] > c[2]
    anchor = omega_z_in_khz(1.0) == 245.0 and omega_z_in_khz(2.0) == 490.0
    ok = products_ok and decreasing and anchor
    criterion("trap-planning", bool(ok),
              f"C(N)={['%.4e' % x for x in c]}; anchor 245 kHz exact")


def test_determinism(tmp_path):
    cfg = """
        chain.n_ions = 20
        laser.delta = 10
        analysis.alpha_grid = 0.1,0.5
        analysis.t_list = 0
    """
    _, out1 = run_cli(tmp_path, cfg, "sweep", out="d1")
    cfg_path = write_cfg(tmp_path, cfg, name="again.cfg")
    out2 = tmp_path / "d2"
    main(["--config", cfg_path, "--out", str(out2), "--threads", "4", "sweep"])
    same_sweep = (out1 / "sweep.csv").read_bytes() == \
        (out2 / "sweep.csv").read_bytes()

    ecfg = """
        chain.n_ions = 20
        laser.delta = 5
        laser.eta = 0.2
        bath.temperature = 100
        solver.t_max = 4.0
    """
    _, e1 = run_cli(tmp_path, ecfg, "evolve", out="e1")
    _, e2 = run_cli(tmp_path, ecfg, "evolve", out="e2")
    same_evolve = all(
        (e1 / n).read_bytes() == (e2 / n).read_bytes()
        for n in ("p_of_t.csv", "kernel.csv"))
    ok = same_sweep and same_evolve
    criterion("determinism", bool(ok),
              f"sweep bytes identical={same_sweep}, "
              f"evolve bytes identical={same_evolve}")
