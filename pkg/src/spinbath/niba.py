"""Noninteracting-blip kernel for the discrete phonon bath and the
Volterra integro-differential evolution of the spin polarization.

The travelling-wave (polaron) coupling gives the memory kernel

    K(tau) = -Delta^2 Re < e^{i k z(tau)} e^{-i k z(0)} >
           = -Delta^2 exp(-Q1(tau)) cos(Q2(tau)),

with the thermal average over the free bath evaluated in closed form:

    Q1(tau) = sum_n eta_n^2 coth(omega_n / 2T) (1 - cos omega_n tau)
    Q2(tau) = sum_n eta_n^2 sin(omega_n tau),      eta_n = k zbar_n M_n.

P(t) then obeys  dP/dt = int_0^t K(t - t') P(t') dt'  with P(0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .chain import ModeSpectrum
from .coupling import TRAVELLING, LaserConfig

STARTUP_REFINE = 32          # fine-grid factor for the first three steps
GREGORY_EDGE = np.array([3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0])


class SolverBlowupError(RuntimeError):
    """The time march left |P| <= 2; carries the blow-up time."""

    def __init__(self, time: float):
        super().__init__(f"Volterra march unstable: |P| > 2 at t = {time:.6g}")
        self.time = time


@dataclass(frozen=True)
class BathState:
    """Thermal bath at temperature T (units of omega_z, k_B = 1).

    T = 0 is treated exactly (coth -> 1), not as a large-beta limit.
    """

    temperature: float = 0.0

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    def coth_half(self, omega: np.ndarray) -> np.ndarray:
        if self.temperature == 0.0:
            return np.ones_like(omega)
        return 1.0 / np.tanh(omega / (2.0 * self.temperature))


@dataclass(frozen=True)
class KernelTable:
    """K(tau) sampled on a uniform grid, with its Q1/Q2 decomposition.

    recurrence_time is the first rephasing of the bath seen by the
    kernel envelope exp(-Q1): the first return to within 10% of 1 after
    a drop below 0.5 or, failing that, the envelope maximum after the
    first deep (< e^-2) drop.  None when the envelope never decays.
    """

    tau: np.ndarray
    k: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    delta: float
    recurrence_time: float | None

    @property
    def step(self) -> float:
        return float(self.tau[1] - self.tau[0]) if len(self.tau) > 1 else 0.0


@dataclass(frozen=True)
class PolarizationTrace:
    """P(t) = <sigma_z>(t) on a uniform grid, with full input echo."""

    t: np.ndarray
    p: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def step(self) -> float:
        return float(self.t[1] - self.t[0]) if len(self.t) > 1 else 0.0


def polaron_weights(spectrum: ModeSpectrum, laser: LaserConfig) -> np.ndarray:
    """eta_n = k zbar_n M_n = eta M_n / sqrt(omega_n) (scaled units)."""
    if laser.kind != TRAVELLING:
        raise ValueError("the kernel is defined for the travelling-wave "
                         "(polaron) coupling only")
    return laser.amplitude() * spectrum.m_at_ion / np.sqrt(spectrum.omega)


def exponents_from_modes(omega: np.ndarray, eta_n: np.ndarray,
                         temperature: float, tau) -> tuple[np.ndarray, np.ndarray]:
    """Q1, Q2 for arbitrary mode data; tau may be a scalar or an array."""
    tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
    coth = BathState(temperature).coth_half(omega)
    w2 = eta_n ** 2
    phase = omega[None, :] * tau_arr[:, None]
    q1 = (w2 * coth * (1.0 - np.cos(phase))).sum(axis=1)
    q2 = (w2 * np.sin(phase)).sum(axis=1)
    if np.isscalar(tau) or np.asarray(tau).ndim == 0:
        return float(q1[0]), float(q2[0])
    return q1, q2


def bath_exponents(spectrum: ModeSpectrum, laser: LaserConfig,
                   bath: BathState, tau):
    """Q1(tau), Q2(tau) for the chain bath (travelling wave)."""
    eta_n = polaron_weights(spectrum, laser)
    return exponents_from_modes(spectrum.omega, eta_n, bath.temperature, tau)


def _find_recurrence(tau: np.ndarray, envelope: np.ndarray) -> float | None:
    below = np.flatnonzero(envelope < 0.5)
    if len(below) == 0:
        return None
    i0 = below[0]
    back = np.flatnonzero(envelope[i0:] >= 0.9)
    if len(back):
        return float(tau[i0 + back[0]])
    deep = np.flatnonzero(envelope < np.exp(-2.0))
    if len(deep) == 0:
        return None
    i1 = deep[0]
    peak = i1 + int(np.argmax(envelope[i1:]))
    if envelope[peak] < 0.25:
        return None
    return float(tau[peak])


def kernel(spectrum: ModeSpectrum, laser: LaserConfig, bath: BathState,
           tau_grid: np.ndarray) -> KernelTable:
    """Tabulate K(tau) = -Delta^2 exp(-Q1) cos(Q2) on a uniform grid."""
    tau_grid = np.asarray(tau_grid, dtype=float)
    if len(tau_grid) > 1:
        steps = np.diff(tau_grid)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
            raise ValueError("tau grid must be uniform")
        if steps[0] <= 0:
            raise ValueError("tau grid step must be > 0")
    q1, q2 = bath_exponents(spectrum, laser, bath, tau_grid)
    env = np.exp(-q1)
    k = -laser.delta ** 2 * env * np.cos(q2)
    return KernelTable(tau=tau_grid, k=k, q1=q1, q2=q2, delta=laser.delta,
                       recurrence_time=_find_recurrence(tau_grid, env))


def _quad_weights(n_intervals: int) -> np.ndarray:
    """Weights (unit step) for int_0^{n h} with n+1 uniform samples.

    Newton-Cotes rules up to five intervals, then the fourth-order
    Gregory end-corrected trapezoid.
    """
    n = n_intervals
    if n == 1:
        return np.array([0.5, 0.5])
    if n == 2:
        return np.array([1.0, 4.0, 1.0]) / 3.0
    if n == 3:
        return np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
    if n == 4:
        return np.array([14.0, 64.0, 24.0, 64.0, 14.0]) / 45.0
    if n == 5:
        w = np.zeros(6)
        w[:3] += np.array([1.0, 4.0, 1.0]) / 3.0
        w[2:] += np.array([3.0, 9.0, 9.0, 3.0]) / 8.0
        return w
    w = np.ones(n + 1)
    w[:3] = GREGORY_EDGE
    w[-3:] = GREGORY_EDGE[::-1]
    return w


def _march_pece2(K: np.ndarray, h: float, p0: float = 1.0,
                 f0: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Second-order trapezoid PECE march over the full K grid."""
    M = len(K) - 1
    P = np.empty(M + 1)
    f = np.empty(M + 1)
    P[0], f[0] = p0, f0

    def memory(i, tip):
        s = 0.5 * (K[i] * P[0] + K[0] * tip)
        if i > 1:
            s += np.dot(K[i - 1:0:-1], P[1:i])
        return h * s

    for i in range(M):
        pred = P[i] + h * (1.5 * f[i] - 0.5 * f[i - 1]) if i else P[0]
        f_pred = memory(i + 1, pred)
        P[i + 1] = P[i] + 0.5 * h * (f[i] + f_pred)
        f[i + 1] = memory(i + 1, P[i + 1])
        if abs(P[i + 1]) > 2.0:
            raise SolverBlowupError((i + 1) * h)
    return P, f


def solve_volterra(kernel_input, t_max: float, h: float,
                   metadata: dict | None = None) -> PolarizationTrace:
    """Integrate dP/dt = int_0^t K(t-t') P(t') dt', P(0) = 1.

    kernel_input is either a callable tau -> K(tau) (vectorized) or a
    KernelTable whose grid step is h (or an integer subdivision of it)
    and which covers [0, t_max].

    Fourth-order scheme: Gregory end-corrected trapezoid for the memory
    integral, Adams-Bashforth-4 predictor with an Adams-Moulton-4
    corrector for the time step.  The first three points come from a
    refined second-order start (callable kernels) or an in-place
    second-order start (tabulated kernels).  Raises SolverBlowupError
    with the blow-up time if |P| exceeds 2.
    """
    if h <= 0:
        raise ValueError("h must be > 0")
    if t_max < h:
        raise ValueError("t_max must be at least one step")
    M = int(round(t_max / h))
    t = np.arange(M + 1) * h

    if callable(kernel_input):
        K = np.asarray(kernel_input(t), dtype=float)
        fine_start = True
    else:
        table: KernelTable = kernel_input
        if len(table.tau) < 2:
            raise ValueError("kernel table too short")
        sub = h / table.step
        sub_i = int(round(sub))
        if sub_i < 1 or abs(sub - sub_i) > 1e-9:
            raise ValueError(
                f"solver step h={h} is not an integer multiple of the "
                f"kernel grid step {table.step}")
        if table.tau[-1] < t_max - 1e-9 * h:
            raise ValueError("kernel table does not cover t_max")
        K = table.k[::sub_i][:M + 1]
        if len(K) < M + 1:
            raise ValueError("kernel table does not cover t_max")
        fine_start = False

    P = np.empty(M + 1)
    f = np.empty(M + 1)
    P[0], f[0] = 1.0, 0.0

    n_start = min(3, M)
    if fine_start and M >= 1:
        hs = h / STARTUP_REFINE
        ts = np.arange(n_start * STARTUP_REFINE + 1) * hs
        Ks = np.asarray(kernel_input(ts), dtype=float)
        Ps, fs = _march_pece2(Ks, hs)
        for j in range(1, n_start + 1):
            P[j] = Ps[j * STARTUP_REFINE]
            f[j] = fs[j * STARTUP_REFINE]
    elif M >= 1:
        Ps, fs = _march_pece2(K[:n_start + 1], h)
        P[1:n_start + 1] = Ps[1:]
        f[1:n_start + 1] = fs[1:]

    def memory(i, tip):
        w = _quad_weights(i)
        return h * (np.dot(w[:-1], K[i:0:-1] * P[:i]) + w[-1] * K[0] * tip)

    for i in range(n_start, M):
        pred = P[i] + h / 24.0 * (55.0 * f[i] - 59.0 * f[i - 1]
                                  + 37.0 * f[i - 2] - 9.0 * f[i - 3])
        f_pred = memory(i + 1, pred)
        P[i + 1] = P[i] + h / 24.0 * (9.0 * f_pred + 19.0 * f[i]
                                      - 5.0 * f[i - 1] + f[i - 2])
        f[i + 1] = memory(i + 1, P[i + 1])
        if abs(P[i + 1]) > 2.0:
            raise SolverBlowupError((i + 1) * h)

    return PolarizationTrace(t=t, p=P, metadata=dict(metadata or {}))


def default_step(spectrum: ModeSpectrum, laser: LaserConfig,
                 bath: BathState) -> float:
    """Step resolving the tunneling period, the kernel memory time and
    the kernel's intrinsic phase rate, whichever is fastest.

    The phase Q2 initially grows at sum_n eta_n^2 omega_n and the bath
    oscillates up to omega_N; a step tied only to Delta and tau_m
    under-resolves the kernel once the coupling is strong.
    """
    eta_n = polaron_weights(spectrum, laser)
    coth = bath.coth_half(spectrum.omega)
    rate = float(np.sum(eta_n ** 2 * spectrum.omega * coth))
    scales = [2.0 * np.pi / max(spectrum.omega[-1], rate)]
    if laser.delta > 0:
        scales.append(2.0 * np.pi / laser.delta)
    return min(scales) / 40.0


def evolve(spectrum: ModeSpectrum, laser: LaserConfig, bath: BathState,
           alpha_target: float | None = None, t_max: float | None = None,
           h: float | None = None) -> PolarizationTrace:
    """End-to-end P(t) for a chain spectrum and laser drive.

    With alpha_target set, eta is first calibrated so the fitted
    dissipation strength matches the target.  Defaults: h resolves the
    fastest of the tunneling period, the memory time tau_m = 1/(2 pi
    alpha T) and the kernel phase rate (all /40); t_max = 1.5 tau_rev.
    """
    from . import coupling as _coupling
    from .chain import revival_time as _revival_time

    alpha_eff = alpha_target
    if alpha_target is not None:
        eta = _coupling.calibrate_eta(spectrum, alpha_target)
        laser = LaserConfig(kind=laser.kind, eta=eta, f_dipole=laser.f_dipole,
                            delta=laser.delta, epsilon=laser.epsilon)
    elif laser.eta is not None:
        try:
            alpha_eff = laser.eta ** 2 * _coupling.reference_alpha(spectrum)
        except ValueError:
            alpha_eff = None

    times = _revival_time(spectrum)
    if t_max is None:
        t_max = 1.5 * times.tau_rev
    if h is None:
        h = default_step(spectrum, laser, bath)
        if alpha_eff and bath.temperature > 0:
            tau_m = 1.0 / (2.0 * np.pi * alpha_eff * bath.temperature)
            h = min(h, tau_m / 40.0)

    if laser.delta == 0.0:
        t = np.arange(int(round(t_max / h)) + 1) * h
        trace = PolarizationTrace(t=t, p=np.ones_like(t))
    else:
        eta_n = polaron_weights(spectrum, laser)

        def kfun(tau):
            q1, q2 = exponents_from_modes(spectrum.omega, eta_n,
                                          bath.temperature, tau)
            return -laser.delta ** 2 * np.exp(-q1) * np.cos(q2)

        trace = solve_volterra(kfun, t_max, h)

    meta = {
        "n_ions": spectrum.n_ions,
        "addressed_index": spectrum.addressed_index,
        "d0_convention": spectrum.d0_convention,
        "laser_kind": laser.kind,
        "eta": laser.eta,
        "delta": laser.delta,
        "epsilon": laser.epsilon,
        "temperature": bath.temperature,
        "alpha_target": alpha_target,
        "h": h,
        "t_max": t_max,
        "tau_rev": times.tau_rev,
        "tau_roundtrip": times.tau_roundtrip,
    }
    return PolarizationTrace(t=trace.t, p=trace.p, metadata=meta)
