"""Command-line entry point: eigen, evolve, wigner, sweep, fit.

All outputs are deterministic text files (CSV plus a JSON run manifest).
Exit codes: 0 success, 2 configuration error, 3 numerical failure,
4 invariant violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analysis
from .basis import (HI_PRESET, build_basis, derive_lambda, orthonormality_residual,
                    position_matrix)
from .coherent import CoherentSpec, coherent_coefficients, eta_for_mean_level, mean_level
from .config import PRESETS, RunConfig, default_config, parse_config
from .errors import (ConfigError, InvariantViolationError, MorsedecoError,
                     NumericalError, PeakNotFoundError)
from .opensystem import (BathSpec, build_lowering_operator, build_modified_operators,
                         default_timestep, evolve, write_density_csv, read_density_csv)
from .wigner import read_wigner_csv, wigner_transform, write_wigner_csv

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_INVARIANT = 4


def _load_config(args) -> RunConfig:
    if getattr(args, "config", None):
        cfg = parse_config(args.config)
    elif getattr(args, "preset", None):
        if args.preset not in PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}")
        cfg = default_config()
        cfg.molecule = PRESETS[args.preset]
    else:
        raise ConfigError("provide --config <path> or --preset <name>")
    if getattr(args, "out", None):
        cfg.out_dir = Path(args.out)
    if getattr(args, "threads", None):
        cfg.threads = args.threads
    return cfg


def _prepare(cfg: RunConfig):
    """Basis, position matrix, initial state and derived scales for a run."""
    basis = build_basis(cfg.molecule)
    X = position_matrix(basis)
    s0 = 2.0 * derive_lambda(cfg.molecule) - 1.0
    if cfg.nbar is not None:
        eta = eta_for_mean_level(cfg.nbar, s0, basis.n_max)
        spec = CoherentSpec(s=s0, eta=eta)
    elif cfg.eta is not None:
        spec = CoherentSpec(s=s0, eta=cfg.eta)
    else:
        spec = CoherentSpec(s=s0, alpha=cfg.alpha)
    state = coherent_coefficients(spec, basis.n_max)
    w01 = float(basis.energies[1] - basis.energies[0])
    t_rev = analysis.revival_time(basis)
    return basis, X, state, w01, t_rev


def _write_manifest(out_dir: Path, payload: dict) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def cmd_eigen(args) -> int:
    cfg = _load_config(args)
    basis, X, state, w01, t_rev = _prepare(cfg)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "energies.csv", "w") as fh:
        fh.write("n,energy_au,s_n\n")
        for n in range(basis.n_states):
            fh.write(f"{n},{basis.energies[n]:.12e},{basis.s_values[n]:.12e}\n")
    np.savetxt(out / "xmatrix.csv", X, delimiter=",", fmt="%.12e")
    _write_manifest(out, {
        "lambda": derive_lambda(cfg.molecule),
        "bound_states": basis.n_states,
        "T_rev_au": t_rev,
        "omega01_au": w01,
        "orthonormality_residual": orthonormality_residual(basis),
    })
    print(f"wrote {basis.n_states} bound levels to {out / 'energies.csv'}; "
          f"T_rev = {t_rev:.6g} a.u.")
    return 0


def _invariant_checks(snapshots) -> dict:
    return {
        "max_trace_residual": max(s.trace_residual for s in snapshots),
        "max_hermiticity_residual": max(s.hermiticity_residual for s in snapshots),
        "min_eigenvalue": min(s.min_eigenvalue for s in snapshots),
    }


def cmd_evolve(args) -> int:
    cfg = _load_config(args)
    basis, X, state, w01, t_rev = _prepare(cfg)
    delta = cfg.delta.in_au(w01)
    temperature = cfg.temperature.in_au(w01)
    bath = BathSpec(delta=delta, temperature=temperature)
    rho0 = np.outer(state.coeffs, state.coeffs.conj())
    times = [f * t_rev for f in cfg.snapshots]
    O = build_lowering_operator(X)
    ops = build_modified_operators(O, basis.energies, bath)
    dt = default_timestep(basis.energies)
    snaps = evolve(rho0, basis.energies, ops, times, dt=dt)
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)
    checks = _invariant_checks(snaps)
    for frac, snap in zip(sorted(cfg.snapshots), snaps):
        tag = f"{frac:.6g}".replace(".", "p")
        meta = {"time": snap.time, "delta": delta, "T": temperature, "dt": dt,
                "trace_residual": snap.trace_residual}
        write_density_csv(out / f"rho_t{tag}.csv", snap.rho, meta)
        W = wigner_transform(snap.rho, basis, cfg.grid,
                             meta={"time": snap.time, "delta": delta,
                                   "T": temperature})
        write_wigner_csv(out / f"wigner_t{tag}.csv", W)
    _write_manifest(out, {
        "delta_au": delta, "temperature_au": temperature, "dt_au": dt,
        "T_rev_au": t_rev, "snapshot_fractions": list(cfg.snapshots),
        "leakage": state.leakage, "mean_level": mean_level(state)[0],
        "invariants": checks,
    })
    if checks["min_eigenvalue"] < -1e-6:
        raise InvariantViolationError(
            f"density matrix eigenvalue {checks['min_eigenvalue']:.3e} below -1e-6")
    print(f"wrote {len(snaps)} snapshot(s) to {out}")
    return 0


def cmd_wigner(args) -> int:
    cfg = _load_config(args) if (args.config or args.preset) else None
    if cfg is None:
        cfg = default_config()
    basis = build_basis(cfg.molecule)
    rho, meta = read_density_csv(args.rho_csv)
    W = wigner_transform(rho, basis, cfg.grid, meta=meta)
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    dest = out / (Path(args.rho_csv).stem.replace("rho", "wigner") + ".csv")
    write_wigner_csv(dest, W)
    print(f"wrote {dest}")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    basis, X, state, w01, t_rev = _prepare(cfg)
    rho0 = np.outer(state.coeffs, state.coeffs.conj())
    t_snap = min(cfg.snapshots) * t_rev
    out = cfg.out_dir
    out.mkdir(parents=True, exist_ok=True)

    # probe centers come from the decoherence-free compass state
    W0 = wigner_transform(
        _unitary_rho(basis, rho0, t_snap), basis, cfg.grid,
        meta={"time": t_snap, "delta": 0.0, "T": 0.0})
    nbar_probe = int(round(cfg.nbar)) if cfg.nbar is not None else 4
    probes = analysis.default_probes(W0, basis, nbar=nbar_probe)

    if args.axis == "delta":
        deltas = np.linspace(0.0, 2.2e3, 12)
        temperature = cfg.temperature.in_au(w01)
        res = analysis.sweep_delta(basis, X, rho0, deltas, temperature, t_snap,
                                   grid=cfg.grid, probes=probes,
                                   threads=cfg.threads)
        path = out / "sweep_delta.csv"
        with open(path, "w") as fh:
            fh.write("delta,left,right,central\n")
            for d, l, r, c in zip(res.axis, res.left, res.right, res.central):
                fh.write(f"{d:.9g},{l:.9e},{r:.9e},{c:.9e}\n")
        extra = {"temperature_au": temperature}
    elif args.axis == "temperature":
        t_c_guess = 0.6688
        temps = np.geomspace(0.1 * t_c_guess, 20 * t_c_guess, 12)
        temps = np.sort(np.append(temps, 10.0))
        delta = cfg.delta.in_au(w01)
        res = analysis.sweep_temperature(basis, X, rho0, temps, delta, t_snap,
                                         grid=cfg.grid, probes=probes,
                                         threads=cfg.threads)
        path = out / "sweep_temperature.csv"
        with open(path, "w") as fh:
            fh.write("T,central\n")
            for T, c in zip(res.axis, res.central):
                fh.write(f"{T:.9g},{c:.9e}\n")
        extra = {"delta_au": delta}
    else:
        raise ConfigError(f"unknown sweep axis {args.axis!r}")

    _write_manifest(out, {
        "axis": args.axis, "t_snap_au": t_snap,
        "probes": {"left": [probes[0].x0, probes[0].p0],
                   "right": [probes[1].x0, probes[1].p0],
                   "central": [probes[2].x0, probes[2].p0]},
        **extra,
    })
    print(f"wrote {path}")
    return 0


def _unitary_rho(basis, rho0, t):
    phase = np.exp(-1j * basis.energies * t)
    return phase[:, None] * rho0 * phase.conj()[None, :]


def cmd_fit(args) -> int:
    rows = np.genfromtxt(args.sweep_csv, delimiter=",", names=True)
    if rows.size < 3:
        raise ConfigError(f"{args.sweep_csv}: insufficient data for a fit")
    out = Path(args.out or Path(args.sweep_csv).parent)
    out.mkdir(parents=True, exist_ok=True)
    if args.model == "exp":
        fit = analysis.fit_exponential(rows["delta"], rows["central"])
    elif args.model == "bose":
        fit = analysis.fit_bose(rows["T"], rows["central"])
    else:
        raise ConfigError(f"unknown fit model {args.model!r}")
    payload = {"model": fit.model, "params": fit.params,
               "rms_residual": fit.rms_residual, "accepted": fit.accepted,
               "n_iterations": fit.n_iterations, "source": str(args.sweep_csv)}
    with open(out / f"fit_{args.model}.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(payload["params"], sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="morsedeco",
        description="Morse wave-packet decoherence: spectra, evolution, Wigner "
                    "distributions, sweeps and decay fits (atomic units)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--preset", help="named molecule preset (e.g. HI)")
        p.add_argument("--config", help="INI config file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--threads", type=int, default=None)

    p = sub.add_parser("eigen", help="bound spectrum, x-matrix, revival time")
    common(p)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("evolve", help="one trajectory with Wigner snapshots")
    common(p)
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("wigner", help="transform an existing rho CSV")
    p.add_argument("rho_csv")
    common(p)
    p.set_defaults(func=cmd_wigner)

    p = sub.add_parser("sweep", help="peak amplitudes vs delta or temperature")
    common(p)
    p.add_argument("--axis", choices=("delta", "temperature"), required=True)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("fit", help="decay-law fit of a sweep CSV")
    p.add_argument("sweep_csv")
    p.add_argument("--model", choices=("exp", "bose"), required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (NumericalError, PeakNotFoundError, MorsedecoError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
