"""Regime classification, decay-rate extraction, revival detection and
the parameter sweeps (rate vs alpha, required trap frequency)."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import chain, coupling, niba

# Recoil-energy anchor: 9Be+ addressed at 2 pi / k = 300 nm.
BE9_300NM_ER_KHZ = 245.0

COHERENT = "coherent"
OVERDAMPED = "overdamped"


@dataclass(frozen=True)
class RegimeReport:
    """High-temperature regime: coherent iff tau_m * Delta > 1."""

    tau_m: float
    product: float
    label: str
    gamma_predicted: float


@dataclass(frozen=True)
class DecayFit:
    """Initial decay rate of a polarization trace.

    method is 'envelope' (exponential fit through |P| at the oscillation
    extrema), 'direct' (log-linear fit of the monotone head) or 'none'
    (trace never left the flat band; gamma = 0).
    """

    gamma: float
    window: tuple[float, float]
    residual: float
    method: str


@dataclass(frozen=True)
class RevivalReport:
    """Re-excitation of |P| near the bath round-trip time."""

    detected: bool
    t_peak: float
    amplitude: float
    baseline: float


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    temperature: float
    gamma: float
    regime: str
    method: str
    residual: float


def classify_regime(alpha: float, temperature: float, delta: float) -> RegimeReport:
    """Memory time tau_m = 1/(2 pi alpha T) against the tunneling rate.

    tau_m Delta > 1: underdamped oscillations at Delta decaying over
    tau_m; otherwise overdamped relaxation at Gamma = Delta^2 tau_m.
    The boundary point is labelled overdamped.
    """
    if temperature <= 0:
        raise ValueError("high-temperature classification needs T > 0 "
                         "(at T = 0 the regimes are set by alpha)")
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    tau_m = 1.0 / (2.0 * np.pi * alpha * temperature)
    product = tau_m * delta
    return RegimeReport(
        tau_m=tau_m, product=product,
        label=COHERENT if product > 1.0 else OVERDAMPED,
        gamma_predicted=delta ** 2 * tau_m)


def _extrema_indices(p: np.ndarray) -> np.ndarray:
    sign = np.sign(np.diff(p))
    return np.flatnonzero(np.diff(sign) != 0) + 1


def extract_decay_rate(trace: niba.PolarizationTrace, tau_rev: float,
                       amplitude_floor: float = 0.02,
                       p_stop: float = 0.2,
                       flat_band: float = 1e-4) -> DecayFit:
    """Initial decay rate over [0, tau_rev / 2].

    tau_rev is the bath round-trip (revival) time; the fit window stops
    at half of it so recurrences never contaminate the rate.  Traces
    oscillating through zero get an exponential fit through |P| at the
    extrema above amplitude_floor; monotone traces get a log-linear fit
    down to p_stop (or the window end for slow, localized decay).  A
    trace that never leaves [1 - flat_band, 1] is reported as having no
    measurable decay (gamma = 0, method 'none').
    """
    t_hi = 0.5 * tau_rev
    if trace.t[-1] < t_hi - trace.step - 1e-12:
        raise ValueError(f"trace too short: extends to {trace.t[-1]:.3g}, "
                         f"need {t_hi:.3g}")
    sel = trace.t <= t_hi
    t, p = trace.t[sel], trace.p[sel]

    if p.min() >= 1.0 - flat_band:
        return DecayFit(gamma=0.0, window=(0.0, float(t[-1])), residual=0.0,
                        method="none")

    idx = _extrema_indices(p)
    sig = idx[np.abs(p[idx]) >= amplitude_floor]
    if len(sig) >= 3 and p[sig].min() < 0:
        te = t[sig]
        ye = np.log(np.abs(p[sig]))
        slope, intercept = np.polyfit(te, ye, 1)
        resid = float(np.sqrt(np.mean((ye - (slope * te + intercept)) ** 2)))
        return DecayFit(gamma=float(-slope), window=(float(te[0]), float(te[-1])),
                        residual=resid, method="envelope")

    below = np.flatnonzero(p < p_stop)
    iend = below[0] if len(below) else len(p) - 1
    head = slice(0, iend + 1)
    pos = p[head] > 0
    th, yh = t[head][pos], np.log(p[head][pos])
    slope, intercept = np.polyfit(th, yh, 1)
    resid = float(np.sqrt(np.mean((yh - (slope * th + intercept)) ** 2)))
    return DecayFit(gamma=float(-slope), window=(0.0, float(th[-1])),
                    residual=resid, method="direct")


def detect_revival(trace: niba.PolarizationTrace, tau_rev: float,
                   window: tuple[float, float] = (0.7, 1.3),
                   baseline_window: tuple[float, float] = (0.4, 0.6),
                   min_ratio: float = 2.0) -> RevivalReport:
    """Look for a re-excitation of |P| around the round-trip time.

    Detected iff the peak of |P| inside window * tau_rev exceeds
    min_ratio times the quiet-period baseline (max |P| over
    baseline_window * tau_rev).
    """
    if trace.t[-1] < window[1] * tau_rev - trace.step - 1e-12:
        raise ValueError(f"trace too short for revival search: need "
                         f"t_max >= {window[1] * tau_rev:.3g}")
    t, p = trace.t, np.abs(trace.p)
    in_win = (t >= window[0] * tau_rev) & (t <= window[1] * tau_rev)
    in_base = (t >= baseline_window[0] * tau_rev) & (t <= baseline_window[1] * tau_rev)
    i_peak = np.flatnonzero(in_win)[np.argmax(p[in_win])]
    amplitude = float(p[i_peak])
    baseline = float(p[in_base].max()) if in_base.any() else 0.0
    return RevivalReport(
        detected=bool(amplitude > min_ratio * baseline),
        t_peak=float(t[i_peak]), amplitude=amplitude, baseline=baseline)


@lru_cache(maxsize=32)
def _reference_alpha_cached(n_ions: int, d0_convention: str) -> float:
    spectrum = chain.chain_modes(chain.ChainSpec(n_ions=n_ions,
                                                 d0_convention=d0_convention))
    return coupling.reference_alpha(spectrum)


def required_trap_frequency(n_ions: int, alpha_target: float,
                            d0_convention: str = "cubic") -> float:
    """Trap frequency needed for a target alpha, in units of E_R = k^2/2m.

    alpha = C(N) eta^2 with eta^2 = E_R / omega_z, so
    omega_z / E_R = C(N) / alpha_target, with C(N) the fitted alpha of
    the N-ion chain at eta = 1.
    """
    if alpha_target <= 0:
        raise ValueError("alpha_target must be > 0")
    return _reference_alpha_cached(n_ions, d0_convention) / alpha_target


def omega_z_in_khz(omega_z_over_er: float,
                   er_khz: float = BE9_300NM_ER_KHZ) -> float:
    """Convert omega_z / E_R to kHz via a recoil-energy anchor."""
    return omega_z_over_er * er_khz


def _sweep_point(spectrum: chain.ModeSpectrum, delta: float, alpha: float,
                 temperature: float, tau_roundtrip: float,
                 t_max: float | None, h: float | None) -> SweepRow:
    laser = coupling.LaserConfig(kind=coupling.TRAVELLING, eta=1.0, delta=delta)
    bath = niba.BathState(temperature=temperature)
    trace = niba.evolve(spectrum, laser, bath, alpha_target=alpha,
                        t_max=t_max, h=h)
    fit = extract_decay_rate(trace, tau_roundtrip)
    regime = (classify_regime(alpha, temperature, delta).label
              if temperature > 0 else "")
    return SweepRow(alpha=alpha, temperature=temperature, gamma=fit.gamma,
                    regime=regime, method=fit.method, residual=fit.residual)


def sweep_rate_vs_alpha(spec: chain.ChainSpec, delta: float,
                        alpha_grid, t_list, threads: int = 1,
                        t_max: float | None = None,
                        h: float | None = None) -> list[SweepRow]:
    """Decay rate for every (T, alpha) pair; rows sorted by (T, alpha).

    Each point is an independent evolve + fit, so the grid fans out over
    a thread pool; the sorted merge keeps the output order (and bytes)
    independent of scheduling.
    """
    alpha_grid = list(alpha_grid)
    t_list = list(t_list)
    if not alpha_grid or not t_list:
        raise ValueError("alpha_grid and t_list must be non-empty")
    spectrum = chain.chain_modes(spec)
    tau_roundtrip = chain.revival_time(spectrum).tau_roundtrip
    jobs = [(T, a) for T in t_list for a in alpha_grid]

    def run(job):
        T, a = job
        return _sweep_point(spectrum, delta, a, T, tau_roundtrip, t_max, h)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    rows.sort(key=lambda r: (r.temperature, r.alpha))
    return rows
