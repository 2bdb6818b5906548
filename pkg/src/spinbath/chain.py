"""Axial normal modes of a linear Coulomb chain in a harmonic trap.

Scaled units throughout: hbar = k_B = m = 1, the axial trap frequency
omega_z = 1 sets the energy scale, and lengths are measured in
l = (e^2 / (m omega_z^2))^(1/3).  In these units the potential energy of
the chain is

    V = sum_i u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|

and all mode frequencies come out in units of omega_z.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

D0_CONVENTIONS = ("cubic", "central", "mean")


class ConvergenceError(RuntimeError):
    """Newton iteration failed; carries the last force residual."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class ChainSpec:
    """Chain geometry: ion number and which ion the laser addresses.

    The default addressed ion is the central one (for even chains the
    ion just left of the midpoint), zero-based index ceil(N/2) - 1.
    """

    n_ions: int
    addressed_index: int | None = None
    d0_convention: str = "cubic"

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError(f"n_ions must be >= 1, got {self.n_ions}")
        if self.addressed_index is None:
            object.__setattr__(self, "addressed_index",
                               int(np.ceil(self.n_ions / 2)) - 1)
        if not 0 <= self.addressed_index < self.n_ions:
            raise ValueError(
                f"addressed_index {self.addressed_index} out of range for "
                f"N={self.n_ions}")
        if self.d0_convention not in D0_CONVENTIONS:
            raise ValueError(
                f"d0_convention must be one of {D0_CONVENTIONS}, "
                f"got {self.d0_convention!r}")


@dataclass(frozen=True)
class EquilibriumPositions:
    """Equilibrium ion positions (units of l), strictly increasing."""

    u: np.ndarray
    residual: float


@dataclass(frozen=True)
class ModeSpectrum:
    """Eigenmodes of the axial Hessian.

    omega        : mode frequencies in units of omega_z, ascending
    mode_matrix  : orthonormal matrix, column n = mode n
    m_at_ion     : mode amplitudes at the addressed ion
    mean_spacing : (omega_N - omega_1)/(N - 1)
    d0           : inter-ion spacing under the chosen convention
    """

    omega: np.ndarray
    mode_matrix: np.ndarray
    m_at_ion: np.ndarray
    mean_spacing: float
    d0: float
    n_ions: int
    addressed_index: int
    d0_convention: str


@dataclass(frozen=True)
class RevivalTimes:
    """Time scales of the finite bath.

    tau_rev       : 2 pi / mean_spacing, the naive all-mode revival time
    tau_roundtrip : pi / mean_spacing.  A centrally addressed ion couples
                    only to every other (reflection-even) mode, so the
                    contributing modes are spaced twice as widely and the
                    bath rephases after half of tau_rev.  This is the time
                    at which the polarization actually revives.
    tau_rev_estimate : closed-form 2 N / v from the dispersion stiffness
    delta_omega_bar  : the exact mean level spacing used above
    """

    tau_rev: float
    tau_roundtrip: float
    tau_rev_estimate: float
    delta_omega_bar: float


def solve_equilibrium(spec: ChainSpec, tol: float = 1e-13,
                      max_iter: int = 200) -> EquilibriumPositions:
    """Solve the force-balance equations by damped Newton iteration.

    Starts from an equally spaced seed with spacing 2 N^0.56 / N and
    halves the Newton step whenever it would disorder the chain.
    Converges to residual <= 1e-13 (accepts a plateau below 1e-12,
    which large chains hit at double precision).
    """
    N = spec.n_ions
    if N == 1:
        return EquilibriumPositions(u=np.zeros(1), residual=0.0)

    u = (np.arange(N) - (N - 1) / 2.0) * (2.0 * N ** 0.56 / N)
    prev = np.inf
    res = np.inf
    for _ in range(max_iter):
        diff = u[:, None] - u[None, :]
        np.fill_diagonal(diff, np.inf)
        inv2 = 1.0 / diff ** 2
        force = u - np.tril(inv2, -1).sum(axis=1) + np.triu(inv2, 1).sum(axis=1)
        res = float(np.max(np.abs(force)))
        if res <= tol or (res <= 1e-12 and res >= prev):
            return EquilibriumPositions(u=u, residual=res)
        prev = res
        inv3 = 1.0 / np.abs(diff) ** 3
        jac = -2.0 * inv3
        np.fill_diagonal(jac, 1.0 + 2.0 * inv3.sum(axis=1))
        step = np.linalg.solve(jac, force)
        lam = 1.0
        while True:
            u_new = u - lam * step
            if np.all(np.diff(u_new) > 0):
                break
            lam *= 0.5
        u = u_new
    raise ConvergenceError(
        f"equilibrium solve did not converge after {max_iter} iterations "
        f"(residual {res:.3e})", residual=res)


def axial_hessian(pos: EquilibriumPositions) -> np.ndarray:
    """Dimensionless axial Hessian (units of m omega_z^2).

    A_nn = 1 + 2 sum_{p != n} |u_n - u_p|^-3,  A_nm = -2 |u_n - u_m|^-3.
    """
    u = pos.u
    if len(u) == 1:
        return np.ones((1, 1))
    diff = u[:, None] - u[None, :]
    np.fill_diagonal(diff, np.inf)
    inv3 = 1.0 / np.abs(diff) ** 3
    A = -2.0 * inv3
    np.fill_diagonal(A, 1.0 + 2.0 * inv3.sum(axis=1))
    return A


def chain_spacing(pos: EquilibriumPositions, convention: str = "cubic") -> float:
    """Inter-ion spacing d0 (units of l) under the given convention.

    central : gap straddling (or adjacent to) the chain midpoint
    mean    : arithmetic mean of all nearest-neighbour gaps
    cubic   : length-weighted cubic mean, (sum g^4 / sum g)^(1/3).
              The axial spring constants scale as 1/g^3, so this is the
              chain-averaged local compliance; it is the spacing for
              which a uniform chain best reproduces the low-lying exact
              spectrum.
    """
    u = pos.u
    N = len(u)
    if N < 2:
        raise ValueError("d0 undefined for a single ion")
    gaps = np.diff(u)
    if convention == "central":
        mid = N // 2
        return float(u[mid] - u[mid - 1]) if N % 2 == 0 else float(u[mid + 1] - u[mid])
    if convention == "mean":
        return float(gaps.mean())
    if convention == "cubic":
        return float(((gaps ** 4).sum() / gaps.sum()) ** (1.0 / 3.0))
    raise ValueError(f"unknown d0 convention {convention!r}")


def stiffness_beta(d0: float) -> float:
    """Dimensionless stiffness beta = 2 / d0^3 (scaled units)."""
    return 2.0 / d0 ** 3


def sound_parameter(d0: float) -> float:
    """v = sqrt(3 beta / 2) entering the linear dispersion."""
    return float(np.sqrt(1.5 * stiffness_beta(d0)))


def normal_modes(spec: ChainSpec, pos: EquilibriumPositions,
                 hessian: np.ndarray | None = None) -> ModeSpectrum:
    """Diagonalize the axial Hessian and fix the eigenvector signs.

    omega_n = sqrt(mu_n) in units of omega_z, ascending.  Each column is
    flipped so that its entry at the addressed ion is >= 0; when that
    entry is negligible (parity-odd modes of an odd chain) the first
    significant entry decides.
    """
    if hessian is None:
        hessian = axial_hessian(pos)
    mu, M = np.linalg.eigh(hessian)
    if np.any(mu <= 0):
        raise ConvergenceError(
            "Hessian not positive definite (bad equilibrium?)",
            residual=pos.residual)
    M = M.copy()
    d = spec.addressed_index
    for n in range(spec.n_ions):
        col = M[:, n]
        scale = np.max(np.abs(col))
        ref = col[d]
        if abs(ref) <= 1e-12 * scale:
            nz = int(np.argmax(np.abs(col) > 1e-12 * scale))
            ref = col[nz]
        if ref < 0:
            M[:, n] = -col
    omega = np.sqrt(mu)
    spacing = float((omega[-1] - omega[0]) / (spec.n_ions - 1)) \
        if spec.n_ions > 1 else 0.0
    d0 = chain_spacing(pos, spec.d0_convention) if spec.n_ions > 1 else 0.0
    return ModeSpectrum(
        omega=omega, mode_matrix=M, m_at_ion=M[d, :].copy(),
        mean_spacing=spacing, d0=d0, n_ions=spec.n_ions,
        addressed_index=d, d0_convention=spec.d0_convention)


def chain_modes(spec: ChainSpec) -> ModeSpectrum:
    """Equilibrium + Hessian + eigensolve in one call."""
    pos = solve_equilibrium(spec)
    return normal_modes(spec, pos)


def dispersion_estimate(n, n_ions: int, beta: float):
    """Closed-form low-energy dispersion of a uniform chain.

    omega_n = v (pi n / N) sqrt(1 - (2/3) log(pi n / N)),  v = sqrt(3 beta/2).

    Valid while the radicand is positive; raises otherwise.  Accepts a
    scalar or array mode index.
    """
    n = np.asarray(n, dtype=float)
    x = np.pi * n / n_ions
    radicand = 1.0 - (2.0 / 3.0) * np.log(x)
    if np.any(radicand < 0):
        raise ValueError("dispersion estimate undefined: "
                         "1 - (2/3) log(pi n / N) < 0")
    v = np.sqrt(1.5 * beta)
    out = v * x * np.sqrt(radicand)
    return float(out) if out.ndim == 0 else out


def revival_time(spectrum: ModeSpectrum) -> RevivalTimes:
    """Bath rephasing times from the exact spectrum (see RevivalTimes)."""
    if spectrum.n_ions < 2:
        raise ValueError("revival time undefined for a single mode")
    dw = spectrum.mean_spacing
    v = sound_parameter(spectrum.d0)
    return RevivalTimes(
        tau_rev=2.0 * np.pi / dw,
        tau_roundtrip=np.pi / dw,
        tau_rev_estimate=2.0 * spectrum.n_ions / v,
        delta_omega_bar=dw)
