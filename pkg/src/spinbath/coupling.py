"""Spin-phonon couplings and the smoothed spectral density.

A travelling wave addressing one ion couples mode n with

    lambda_n = k zbar_n M_n omega_n = eta M_n sqrt(omega_n omega_z)

(eta = k / sqrt(2 m omega_z), zbar_n = 1 / sqrt(2 m omega_n)), which
yields an Ohmic density J ~ omega.  A standing wave tuned to its linear
point gives

    lambda_n = F zbar_n M_n = f M_n omega_z sqrt(omega_z / omega_n)

(f = F z0 / omega_z), a sub-Ohmic J ~ 1/omega.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .chain import ModeSpectrum, sound_parameter

TRAVELLING = "travelling_wave"
STANDING = "standing_wave_linear"
LASER_KINDS = (TRAVELLING, STANDING)

DEGENERATE_GAP = 1e-12   # gaps below this (units of omega_z) get merged


@dataclass(frozen=True)
class LaserConfig:
    """Laser drive: kind, amplitude, tunneling and bias (units of omega_z).

    eta is the Lamb-Dicke parameter of the travelling wave; f_dipole the
    dimensionless dipole-force amplitude of the standing wave.  The bias
    epsilon = omega_0 - omega_L is stored for bookkeeping only; the
    kernel below is the unbiased one.
    """

    kind: str = TRAVELLING
    eta: float | None = None
    f_dipole: float | None = None
    delta: float = 0.0
    epsilon: float = 0.0

    def __post_init__(self):
        if self.kind not in LASER_KINDS:
            raise ValueError(f"laser kind must be one of {LASER_KINDS}, "
                             f"got {self.kind!r}")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        amp = self.eta if self.kind == TRAVELLING else self.f_dipole
        if amp is not None and amp <= 0:
            raise ValueError("laser amplitude must be > 0")

    def amplitude(self) -> float:
        amp = self.eta if self.kind == TRAVELLING else self.f_dipole
        if amp is None:
            name = "eta" if self.kind == TRAVELLING else "f_dipole"
            raise ValueError(f"laser.{name} not set")
        return amp


@dataclass(frozen=True)
class CouplingSet:
    """Per-mode couplings lambda_n (units of omega_z)."""

    lam: np.ndarray
    kind: str


@dataclass(frozen=True)
class SpectralDensity:
    """Piecewise-constant J(omega) on the intervals between mode pairs.

    Bin n spans (omega_n, omega_n+1) with height pi lambda_n^2 / width;
    the topmost mode has no interval and carries no bin.  Near-degenerate
    gaps are merged with their upper neighbour, weights summed.
    """

    bin_lo: np.ndarray
    bin_hi: np.ndarray
    heights: np.ndarray
    fitted_alpha: float | None = None
    fitted_exponent: float | None = None
    fit_window: tuple[float, float] | None = None

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.bin_lo + self.bin_hi)

    @property
    def widths(self) -> np.ndarray:
        return self.bin_hi - self.bin_lo

    def total_weight(self) -> float:
        return float(np.sum(self.heights * self.widths))


@dataclass(frozen=True)
class AlphaFit:
    """Result of fitting the binned J to the Ohmic form 2 pi alpha omega."""

    alpha: float
    exponent: float
    window: tuple[float, float]


def couplings(spectrum: ModeSpectrum, laser: LaserConfig) -> CouplingSet:
    """Couplings lambda_n for the given drive (scaled units, omega_z = 1)."""
    amp = laser.amplitude()
    if laser.kind == TRAVELLING:
        lam = amp * spectrum.m_at_ion * np.sqrt(spectrum.omega)
    else:
        lam = amp * spectrum.m_at_ion / np.sqrt(spectrum.omega)
    return CouplingSet(lam=lam, kind=laser.kind)


def smoothed_spectral_density(spectrum: ModeSpectrum,
                              coupling_set: CouplingSet) -> SpectralDensity:
    """Spread each delta-function weight pi lambda_n^2 over (omega_n, omega_n+1)."""
    omega = spectrum.omega
    if len(omega) < 2:
        raise ValueError("no intervals: need at least two modes to bin J")
    weights = np.pi * coupling_set.lam ** 2
    lo, hi, wt = [], [], []
    pending = 0.0
    start = omega[0]
    for n in range(len(omega) - 1):
        pending += weights[n]
        gap = omega[n + 1] - omega[n]
        if gap < DEGENERATE_GAP:
            continue
        lo.append(start)
        hi.append(omega[n + 1])
        wt.append(pending)
        pending = 0.0
        start = omega[n + 1]
    if pending > 0.0:
        if not wt:
            raise ValueError("no intervals: all mode gaps degenerate")
        wt[-1] += pending
    lo = np.array(lo)
    hi = np.array(hi)
    wt = np.array(wt)
    return SpectralDensity(bin_lo=lo, bin_hi=hi, heights=wt / (hi - lo))


def default_fit_window(sd: SpectralDensity) -> tuple[float, float]:
    """Lowest quarter of the band, starting at the band bottom (omega_z)."""
    lo = float(sd.bin_lo[0])
    hi = float(sd.bin_hi[-1])
    return (lo, lo + 0.25 * (hi - lo))


def fit_alpha(sd: SpectralDensity,
              window: tuple[float, float] | None = None) -> AlphaFit:
    """Fit the binned J over a low-frequency window.

    alpha comes from least squares of the bin heights against
    2 pi alpha omega through the origin, evaluated at bin midpoints.
    The exponent s is the log-log slope, weighted by the spectral weight
    carried by each bin so that parity-suppressed (near-empty) bins do
    not dominate the diagnostic.
    """
    if window is None:
        window = default_fit_window(sd)
    mids = sd.midpoints
    sel = (mids >= window[0]) & (mids <= window[1])
    if np.count_nonzero(sel) < 3:
        raise ValueError(f"fit window {window} selects fewer than 3 bins")
    m = mids[sel]
    h = sd.heights[sel]
    alpha = float(np.sum(h * m) / (2.0 * np.pi * np.sum(m * m)))

    w = h * sd.widths[sel]
    ok = (w > 0) & (h > 0)
    if np.count_nonzero(ok) < 2:
        raise ValueError("not enough non-empty bins for the exponent fit")
    x = np.log(m[ok])
    y = np.log(h[ok])
    wn = w[ok] / w[ok].sum()
    xb = float(np.sum(wn * x))
    yb = float(np.sum(wn * y))
    s = float(np.sum(wn * (x - xb) * (y - yb)) / np.sum(wn * (x - xb) ** 2))
    return AlphaFit(alpha=alpha, exponent=s, window=(float(window[0]),
                                                     float(window[1])))


def with_fit(sd: SpectralDensity, fit: AlphaFit) -> SpectralDensity:
    return replace(sd, fitted_alpha=fit.alpha, fitted_exponent=fit.exponent,
                   fit_window=fit.window)


def mode_amplitude_rms(spectrum: ModeSpectrum, n_modes: int = 10) -> float:
    """RMS amplitude of the lowest modes at the addressed ion, per-site
    normalized (multiplied by sqrt(N) so a plane-wave-like mode is O(1))."""
    k = min(n_modes, spectrum.n_ions)
    return float(np.sqrt(spectrum.n_ions * np.mean(spectrum.m_at_ion[:k] ** 2)))


def analytic_spectral_density(kind: str, v: float, mbar: float, amplitude: float):
    """Continuum closed forms for J(omega) (scaled units).

    travelling wave:  J = (1/v) mbar^2 eta^2 omega   (= 2 pi alpha omega)
    standing wave:    J = (1/v) mbar^2 f^2 / omega

    Returns a callable omega -> J.  mbar is the per-site-normalized mode
    amplitude at the addressed ion (see mode_amplitude_rms).
    """
    if kind not in LASER_KINDS:
        raise ValueError(f"unknown laser kind {kind!r}")
    if v <= 0:
        raise ValueError("v must be > 0")
    c = mbar ** 2 * amplitude ** 2 / v

    def j(omega):
        w = np.asarray(omega, dtype=float)
        if kind == STANDING and np.any(w == 0):
            raise ValueError("sub-Ohmic J diverges at omega = 0")
        out = c * w if kind == TRAVELLING else c / w
        return float(out) if out.ndim == 0 else out

    return j


def alpha_from_parameters(v: float, mbar: float, eta: float) -> float:
    """Dissipation strength alpha = mbar^2 eta^2 / (2 pi v)."""
    return mbar ** 2 * eta ** 2 / (2.0 * np.pi * v)


def reference_alpha(spectrum: ModeSpectrum,
                    window: tuple[float, float] | None = None) -> float:
    """Fitted alpha of the travelling-wave J at eta = 1.

    Since lambda_n is linear in eta, J scales as eta^2 and one reference
    fit determines the calibration for every target.
    """
    ref = couplings(spectrum, LaserConfig(kind=TRAVELLING, eta=1.0))
    sd = smoothed_spectral_density(spectrum, ref)
    return fit_alpha(sd, window).alpha


def calibrate_eta(spectrum: ModeSpectrum, alpha_target: float,
                  window: tuple[float, float] | None = None) -> float:
    """Lamb-Dicke parameter that makes the fitted alpha equal the target."""
    if alpha_target <= 0:
        raise ValueError("alpha_target must be > 0")
    return float(np.sqrt(alpha_target / reference_alpha(spectrum, window)))


def analytic_parameters(spectrum: ModeSpectrum) -> tuple[float, float]:
    """(v, mbar) pair for the continuum curves, from the chain itself."""
    return sound_parameter(spectrum.d0), mode_amplitude_rms(spectrum)
