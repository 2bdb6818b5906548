"""Command-line front end.

Subcommands compute and write delimited artifacts (plus a manifest) for
one run configuration:

    modes   -> modes.csv
    jspec   -> jspec.csv, jspec_fit.txt
    evolve  -> p_of_t.csv, kernel.csv, evolve_report.txt
    sweep   -> sweep.csv
    plan    -> plan.csv
    figure N -> the CSV inputs of report figure N (and the rendered
                image when the figure scripts are available)

All quantities are in units of omega_z; see config.py for the key=value
configuration format.
"""

from __future__ import annotations

import argparse
import dataclasses
import subprocess
import sys
from pathlib import Path

import numpy as np

from . import analysis, chain, coupling, csvio, niba
from .config import ConfigError, RunConfig, echo_lines, load_config, validate


def _chain_spec(cfg: RunConfig) -> chain.ChainSpec:
    return chain.ChainSpec(n_ions=cfg.n_ions,
                           addressed_index=cfg.addressed_index,
                           d0_convention=cfg.d0_convention)


def _laser(cfg: RunConfig, spectrum: chain.ModeSpectrum | None = None,
           require_amplitude: bool = False) -> coupling.LaserConfig:
    eta = cfg.eta
    if (cfg.alpha_target is not None and eta is None
            and cfg.laser_kind == coupling.TRAVELLING and spectrum is not None):
        window = _fit_window(cfg)
        eta = coupling.calibrate_eta(spectrum, cfg.alpha_target, window)
    laser = coupling.LaserConfig(kind=cfg.laser_kind, eta=eta,
                                 f_dipole=cfg.f_dipole, delta=cfg.delta,
                                 epsilon=cfg.epsilon)
    if require_amplitude:
        laser.amplitude()   # raises with the missing key in the message
    return laser


def _fit_window(cfg: RunConfig):
    if cfg.fit_window_lo is not None and cfg.fit_window_hi is not None:
        return (cfg.fit_window_lo, cfg.fit_window_hi)
    return None


def _write_manifest(outdir: Path, command: str, echo: list[str],
                    artifacts: list[Path]) -> None:
    pairs = {f"artifact.{i}": p.name for i, p in enumerate(sorted(artifacts))}
    csvio.write_keyvalues(outdir / "manifest.txt", command, echo, pairs)


def cmd_modes(cfg: RunConfig, outdir: Path, args) -> list[Path]:
    spectrum = chain.chain_modes(_chain_spec(cfg))
    echo = echo_lines(cfg)
    rows = [(n + 1, spectrum.omega[n], spectrum.m_at_ion[n])
            for n in range(spectrum.n_ions)]
    path = csvio.write_csv(outdir / "modes.csv", "modes", echo,
                           ["n", "omega_n", "m_at_ion"], rows)
    return [path]


def _jspec_files(cfg: RunConfig, spectrum, laser, echo, outdir: Path,
                 stem: str = "jspec") -> list[Path]:
    cs = coupling.couplings(spectrum, laser)
    sd = coupling.smoothed_spectral_density(spectrum, cs)
    fit = coupling.fit_alpha(sd, _fit_window(cfg))
    rows = list(zip(sd.bin_lo, sd.bin_hi, sd.heights))
    csv_path = csvio.write_csv(outdir / f"{stem}.csv", "jspec", echo,
                               ["omega_lo", "omega_hi", "J"], rows)
    v, mbar = coupling.analytic_parameters(spectrum)
    amp = laser.amplitude()
    coeff = mbar ** 2 * amp ** 2 / v
    report = {
        "kind": laser.kind,
        "alpha": fit.alpha,
        "s": fit.exponent,
        "window_lo": fit.window[0],
        "window_hi": fit.window[1],
        "amplitude": amp,
        "v": v,
        "mbar": mbar,
        # J_analytic(omega) = analytic_coefficient * omega^s_nominal
        "analytic_coefficient": coeff,
        "s_nominal": 1 if laser.kind == coupling.TRAVELLING else -1,
    }
    txt_path = csvio.write_keyvalues(outdir / f"{stem}_fit.txt", "jspec",
                                     echo, report)
    return [csv_path, txt_path]


def cmd_jspec(cfg: RunConfig, outdir: Path, args) -> list[Path]:
    spectrum = chain.chain_modes(_chain_spec(cfg))
    laser = _laser(cfg, spectrum, require_amplitude=True)
    return _jspec_files(cfg, spectrum, laser, echo_lines(cfg), outdir)


def _evolve_files(cfg: RunConfig, spectrum, echo, outdir: Path,
                  p_name: str = "p_of_t", k_name: str = "kernel",
                  report_name: str = "evolve_report") -> list[Path]:
    laser = _laser(cfg, spectrum, require_amplitude=True)
    bath = niba.BathState(temperature=cfg.temperature)
    trace = niba.evolve(spectrum, laser, bath, alpha_target=None,
                        t_max=cfg.t_max, h=cfg.h)
    table = niba.kernel(spectrum, laser, bath, trace.t)
    times = chain.revival_time(spectrum) if spectrum.n_ions > 1 else None

    p_path = csvio.write_csv(outdir / f"{p_name}.csv", "evolve", echo,
                             ["t", "P"], zip(trace.t, trace.p))
    k_path = csvio.write_csv(outdir / f"{k_name}.csv", "evolve", echo,
                             ["tau", "K", "Q1", "Q2"],
                             zip(table.tau, table.k, table.q1, table.q2))

    report: dict = {
        "eta": laser.amplitude(),
        "delta": laser.delta,
        "temperature": bath.temperature,
        "h": trace.step,
        "t_max": trace.t[-1],
    }
    if spectrum.n_ions > 1:
        fit = None
        if laser.kind == coupling.TRAVELLING:
            try:
                fit = coupling.fit_alpha(
                    coupling.smoothed_spectral_density(
                        spectrum, coupling.couplings(spectrum, laser)),
                    _fit_window(cfg))
            except ValueError:
                pass    # chain too small for the default window
        report["tau_rev"] = times.tau_rev
        report["tau_roundtrip"] = times.tau_roundtrip
        if table.recurrence_time is not None:
            report["kernel_recurrence_time"] = table.recurrence_time
        if fit is not None:
            report["alpha_fit"] = fit.alpha
            if bath.temperature > 0 and fit.alpha > 0 and laser.delta > 0:
                regime = analysis.classify_regime(fit.alpha, bath.temperature,
                                                  laser.delta)
                report["tau_m"] = regime.tau_m
                report["regime"] = regime.label
                report["gamma_predicted"] = regime.gamma_predicted
        horizon = times.tau_roundtrip
        report["revival_horizon"] = horizon
        if trace.t[-1] >= 0.5 * horizon:
            decay = analysis.extract_decay_rate(trace, horizon)
            report.update(gamma=decay.gamma, decay_method=decay.method,
                          decay_window_lo=decay.window[0],
                          decay_window_hi=decay.window[1],
                          decay_residual=decay.residual)
        if trace.t[-1] >= cfg.revival_window_hi * horizon:
            rev = analysis.detect_revival(
                trace, horizon,
                window=(cfg.revival_window_lo, cfg.revival_window_hi),
                min_ratio=cfg.revival_min_ratio)
            report.update(revival_detected=rev.detected,
                          revival_t_peak=rev.t_peak,
                          revival_amplitude=rev.amplitude,
                          revival_baseline=rev.baseline)
    r_path = csvio.write_keyvalues(outdir / f"{report_name}.txt", "evolve",
                                   echo, report)
    return [p_path, k_path, r_path]


def cmd_evolve(cfg: RunConfig, outdir: Path, args) -> list[Path]:
    spectrum = chain.chain_modes(_chain_spec(cfg))
    return _evolve_files(cfg, spectrum, echo_lines(cfg), outdir)


def cmd_sweep(cfg: RunConfig, outdir: Path, args) -> list[Path]:
    if cfg.delta <= 0:
        raise ConfigError("sweep requires laser.delta > 0")
    rows = analysis.sweep_rate_vs_alpha(
        _chain_spec(cfg), cfg.delta, cfg.alpha_grid, cfg.t_list,
        threads=args.threads, t_max=cfg.t_max, h=cfg.h)
    path = csvio.write_csv(
        outdir / "sweep.csv", "sweep", echo_lines(cfg),
        ["alpha", "T", "gamma", "regime", "method", "residual"],
        [(r.alpha, r.temperature, r.gamma, r.regime, r.method, r.residual)
         for r in rows])
    return [path]


def cmd_plan(cfg: RunConfig, outdir: Path, args) -> list[Path]:
    columns = ["alpha", "omega_z_over_ER", "N"]
    if cfg.er_khz is not None:
        columns.append("omega_z_khz")
    rows = []
    for n_ions in cfg.plan_n_list:
        for alpha in cfg.plan_alpha_grid:
            ratio = analysis.required_trap_frequency(n_ions, alpha,
                                                     cfg.d0_convention)
            row = [alpha, ratio, n_ions]
            if cfg.er_khz is not None:
                row.append(analysis.omega_z_in_khz(ratio, cfg.er_khz))
            rows.append(tuple(row))
    path = csvio.write_csv(outdir / "plan.csv", "plan", echo_lines(cfg),
                           columns, rows)
    return [path]


def _figure_inputs(cfg: RunConfig, figure_id: int, outdir: Path,
                   args) -> list[Path]:
    artifacts: list[Path] = []
    if figure_id == 2:
        spectrum = chain.chain_modes(_chain_spec(cfg))
        artifacts += cmd_modes(cfg, outdir, args)
        beta = chain.stiffness_beta(spectrum.d0)
        ns = np.arange(1, spectrum.n_ions + 1)
        est = chain.dispersion_estimate(ns, spectrum.n_ions, beta)
        artifacts.append(csvio.write_csv(
            outdir / "dispersion.csv", "figure2", echo_lines(cfg),
            ["n", "omega_exact", "omega_estimate"],
            zip(ns, spectrum.omega, est)))
        for kind, stem in ((coupling.TRAVELLING, "jspec_tw"),
                           (coupling.STANDING, "jspec_sw")):
            sub = dataclasses.replace(
                cfg, laser_kind=kind,
                eta=cfg.eta if cfg.eta is not None else 1.0,
                f_dipole=cfg.f_dipole if cfg.f_dipole is not None else 1.0,
                alpha_target=None)
            laser = _laser(sub, spectrum, require_amplitude=True)
            artifacts += _jspec_files(sub, spectrum, laser, echo_lines(sub),
                                      outdir, stem=stem)
    elif figure_id == 3:
        spectrum = chain.chain_modes(_chain_spec(cfg))
        pairs = (("underdamped", 10.0, 2e-3), ("overdamped", 3.0, 4e-3))
        for tag, delta, alpha in pairs:
            sub = dataclasses.replace(cfg, delta=delta, alpha_target=alpha,
                                      eta=None, temperature=250.0)
            validate(sub)
            artifacts += _evolve_files(sub, spectrum, echo_lines(sub), outdir,
                                       p_name=f"p_{tag}",
                                       k_name=f"kernel_{tag}",
                                       report_name=f"report_{tag}")
    elif figure_id == 4:
        spectrum = chain.chain_modes(_chain_spec(cfg))
        delta = cfg.delta if cfg.delta > 0 else 10.0
        for alpha in cfg.alpha_grid:
            sub = dataclasses.replace(cfg, delta=delta, alpha_target=alpha,
                                      eta=None, temperature=0.0)
            validate(sub)
            artifacts += _evolve_files(sub, spectrum, echo_lines(sub), outdir,
                                       p_name=f"p_alpha_{alpha:g}",
                                       k_name=f"kernel_alpha_{alpha:g}",
                                       report_name=f"report_alpha_{alpha:g}")
    elif figure_id == 5:
        sub = cfg if cfg.delta > 0 else dataclasses.replace(cfg, delta=10.0)
        artifacts += cmd_sweep(sub, outdir, args)
        artifacts += cmd_plan(sub, outdir, args)
    else:
        raise ConfigError(f"unknown figure id {figure_id} (expected 2-5)")
    return artifacts


def _find_figure_script(figure_id: int, figures_dir: str | None) -> Path | None:
    if figures_dir:
        candidates = [Path(figures_dir)]
    else:
        candidates = [Path.cwd() / "figures",
                      Path(__file__).resolve().parents[2] / "figures"]
    for base in candidates:
        script = base / f"fig{figure_id}.py"
        if script.is_file():
            return script
    return None


def cmd_figure(cfg: RunConfig, outdir: Path, args) -> list[Path]:
    figure_id = args.figure_id
    artifacts = _figure_inputs(cfg, figure_id, outdir, args)
    script = _find_figure_script(figure_id, args.figures_dir)
    if script is None:
        print(f"note: figure renderer fig{figure_id}.py not found; "
              f"CSV inputs written to {outdir}")
        return artifacts
    image = outdir / f"fig{figure_id}.png"
    result = subprocess.run(
        [sys.executable, str(script), "--in", str(outdir), "--out", str(image)],
        capture_output=True, text=True)
    if result.returncode != 0:
        raise RuntimeError(f"figure renderer failed:\n{result.stderr}")
    artifacts.append(image)
    return artifacts


COMMANDS = {
    "modes": cmd_modes,
    "jspec": cmd_jspec,
    "evolve": cmd_evolve,
    "sweep": cmd_sweep,
    "plan": cmd_plan,
    "figure": cmd_figure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinbath",
        description="Spin-boson dynamics of a laser-addressed ion in a "
                    "1D Coulomb chain (all energies in units of omega_z)")
    parser.add_argument("--config", metavar="PATH",
                        help="key=value run configuration file")
    parser.add_argument("--out", metavar="DIR", default="out",
                        help="output directory (default: ./out)")
    parser.add_argument("--threads", type=int, default=1, metavar="K",
                        help="worker threads for sweeps (default: 1)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("modes", "jspec", "evolve", "sweep", "plan"):
        sub.add_parser(name)
    fig = sub.add_parser("figure")
    fig.add_argument("figure_id", type=int, choices=(2, 3, 4, 5))
    fig.add_argument("--figures-dir", metavar="DIR",
                     help="directory holding the fig*.py render scripts")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if not hasattr(args, "figures_dir"):
        args.figures_dir = None
    try:
        if args.config:
            cfg = load_config(args.config)
        else:
            cfg = RunConfig()
            validate(cfg)
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        artifacts = COMMANDS[args.command](cfg, outdir, args)
        _write_manifest(outdir, args.command, echo_lines(cfg), artifacts)
    except (ConfigError, ValueError, chain.ConvergenceError,
            niba.SolverBlowupError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for path in artifacts:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
