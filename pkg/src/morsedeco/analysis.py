"""Revival times, coupling/temperature sweeps, and decay-law fits.

The tracked observables are the left/right coherent-state peaks at p = 0 and
the central negative interference extremum of the compass state at one eighth
of the revival time. Their amplitudes decay with coupling strength delta as
A e^{-c delta} (delta in units of 10^3 a.u.) and with temperature as the
Bose law a exp{-b / [e^{Tc/T} - 1]}.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import BoundBasis
from .errors import FitDivergedError, InvalidParamsError, PeakNotFoundError
from .opensystem import BathSpec, build_modified_operators, evolve, unitary_evolve
from .wigner import GridSpec, PeakProbe, WignerGrid, find_peak, wigner_transform

__all__ = ["SweepResult", "DecayFit", "revival_time", "default_probes",
           "sweep_delta", "sweep_temperature", "fit_exponential", "fit_bose",
           "CENTRAL_PROBE_CENTER"]

#: Location of the central negative sub-Planck extremum for the HI compass state.
CENTRAL_PROBE_CENTER = (0.077, -6.064)


def revival_time(basis: BoundBasis, nbar: int | None = None) -> float:
    """T_rev = 4 pi / |E_{n+1} - 2 E_n + E_{n-1}| at the reference level nbar.

    The Morse spectrum is exactly quadratic in n, so the result is independent
    of nbar (= 4 pi mu r0^2 / beta^2). The default reference level is 4,
    clamped to the available spectrum for shallow potentials.
    """
    if nbar is None:
        nbar = max(1, min(4, basis.n_max - 1))
    if not 1 <= nbar <= basis.n_max - 1:
        raise InvalidParamsError(f"nbar {nbar} outside 1..{basis.n_max - 1}")
    E = basis.energies
    sec = abs(E[nbar + 1] - 2 * E[nbar] + E[nbar - 1])
    return 4.0 * np.pi / sec


def classical_turning_points(basis: BoundBasis, level: int) -> tuple[float, float]:
    """Inner/outer roots of V(x) = E_level for the Morse potential."""
    p = basis.params
    root = np.sqrt(1.0 + basis.energies[level] / p.D)
    x_in = -np.log(1.0 + root) / p.beta
    x_out = -np.log(1.0 - root) / p.beta
    return float(x_in), float(x_out)


def default_probes(W0: WignerGrid, basis: BoundBasis, nbar: int = 4,
                   central_center: tuple[float, float] = CENTRAL_PROBE_CENTER,
                   ) -> tuple[PeakProbe, PeakProbe, PeakProbe]:
    """Locate the probe centers on a decoherence-free reference grid.

    The left/right coherent-state lobes sit at the classical turning points of
    the mean-level orbit; the central probe locks onto the sub-Planck negative
    extremum near the given center. Each probe is first located inside a
    generous lock-on window, then returned with the standard tracking window
    centered on the extremum it found.
    """
    x_in, x_out = classical_turning_points(basis, nbar)
    # the clone anchored at a turning point may crest at finite momentum, so
    # the lock-on window spans the full p-axis of the reference grid
    p_span = float(W0.p_axis[-1] - W0.p_axis[0])
    p_mid = float(0.5 * (W0.p_axis[0] + W0.p_axis[-1]))
    left0 = PeakProbe(x0=x_in, p0=p_mid, sign=+1, width_x=0.14, width_p=p_span)
    right0 = PeakProbe(x0=x_out, p0=p_mid, sign=+1, width_x=0.14, width_p=p_span)
    central0 = PeakProbe(x0=central_center[0], p0=central_center[1], sign=-1,
                         width_x=0.2, width_p=6.0)
    out = []
    for probe in (left0, right0, central0):
        hit = find_peak(W0, probe)
        out.append(PeakProbe(x0=hit.x, p0=hit.p, sign=probe.sign))
    return tuple(out)


@dataclass
class SweepResult:
    axis: np.ndarray                  # delta (a.u.) or T (units of hbar w01 / kB)
    axis_name: str                    # "delta" | "temperature"
    left: np.ndarray                  # signed amplitudes; NaN where peak lost
    right: np.ndarray
    central: np.ndarray
    snapshots: list = field(default_factory=list)   # optional WignerGrid refs
    meta: dict = field(default_factory=dict)


def _amplitudes_at(W: WignerGrid, probes) -> tuple[float, float, float]:
    out = []
    for probe in probes:
        try:
            out.append(find_peak(W, probe).amplitude)
        except PeakNotFoundError:
            out.append(np.nan)
    return tuple(out)


def _evolve_and_transform(basis: BoundBasis, x_matrix: np.ndarray,
                          rho0: np.ndarray, bath: BathSpec, t_snap: float,
                          grid: GridSpec, dt: float | None = None,
                          meta: dict | None = None) -> WignerGrid:
    from .opensystem import build_lowering_operator

    if bath.delta == 0.0:
        # closed system: exact phase rotation of the density matrix
        n_steps = round(t_snap / (dt or 1.0)) if dt else None
        E = basis.energies
        phase = np.exp(-1j * E * t_snap)
        rho = phase[:, None] * rho0 * phase.conj()[None, :]
    else:
        O = build_lowering_operator(x_matrix)
        ops = build_modified_operators(O, basis.energies, bath)
        snap = evolve(rho0, basis.energies, ops, [t_snap], dt=dt)[0]
        rho = snap.rho
    return wigner_transform(rho, basis, grid, meta=meta)


def sweep_delta(basis: BoundBasis, x_matrix: np.ndarray, rho0: np.ndarray,
                deltas, temperature: float, t_snap: float,
                grid: GridSpec | None = None, probes=None,
                dt: float | None = None, threads: int = 1,
                keep_snapshots: bool = False) -> SweepResult:
    """Peak amplitudes versus coupling strength at fixed temperature (a.u.)."""
    deltas = np.asarray(sorted(deltas), dtype=float)
    grid = grid or GridSpec()

    def run(delta: float) -> WignerGrid:
        bath = BathSpec(delta=delta, temperature=temperature)
        return _evolve_and_transform(basis, x_matrix, rho0, bath, t_snap, grid,
                                     dt=dt, meta={"time": t_snap, "delta": delta,
                                                  "T": temperature})

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            grids = list(pool.map(run, deltas))
    else:
        grids = [run(d) for d in deltas]

    if probes is None:
        probes = default_probes(grids[int(np.argmin(deltas))], basis)
    amps = np.array([_amplitudes_at(W, probes) for W in grids])
    return SweepResult(axis=deltas, axis_name="delta",
                       left=amps[:, 0], right=amps[:, 1], central=amps[:, 2],
                       snapshots=grids if keep_snapshots else [],
                       meta={"temperature": temperature, "t_snap": t_snap})


def sweep_temperature(basis: BoundBasis, x_matrix: np.ndarray, rho0: np.ndarray,
                      temperatures_hw01, delta: float, t_snap: float,
                      grid: GridSpec | None = None, probes=None,
                      dt: float | None = None, threads: int = 1,
                      keep_snapshots: bool = False) -> SweepResult:
    """Peak amplitudes versus temperature (in hbar w01 / kB) at fixed delta."""
    temps = np.asarray(sorted(temperatures_hw01), dtype=float)
    grid = grid or GridSpec()
    w01 = float(basis.energies[1] - basis.energies[0])

    def run(T_hw01: float) -> WignerGrid:
        bath = BathSpec(delta=delta, temperature=T_hw01 * w01)
        return _evolve_and_transform(basis, x_matrix, rho0, bath, t_snap, grid,
                                     dt=dt, meta={"time": t_snap, "delta": delta,
                                                  "T": T_hw01 * w01})

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            grids = list(pool.map(run, temps))
    else:
        grids = [run(T) for T in temps]

    if probes is None:
        raise InvalidParamsError("temperature sweep requires reference probes "
                                 "(from the delta = 0 compass state)")
    amps = np.array([_amplitudes_at(W, probes) for W in grids])
    return SweepResult(axis=temps, axis_name="temperature",
                       left=amps[:, 0], right=amps[:, 1], central=amps[:, 2],
                       snapshots=grids if keep_snapshots else [],
                       meta={"delta": delta, "t_snap": t_snap})


@dataclass
class DecayFit:
    model: str                 # "exponential" | "bose"
    params: dict
    rms_residual: float
    accepted: bool
    n_iterations: int


def _gauss_newton(f, jac, p0: np.ndarray, y: np.ndarray,
                  max_iter: int = 100, rtol: float = 1e-8) -> tuple[np.ndarray, int]:
    """Gauss-Newton refinement with Levenberg damping fallback."""
    p = np.asarray(p0, dtype=float)
    ssr = float(np.sum((y - f(p)) ** 2))
    lam = 0.0
    for it in range(1, max_iter + 1):
        r = y - f(p)
        J = jac(p)
        JtJ = J.T @ J
        g = J.T @ r
        for _ in range(40):
            try:
                step = np.linalg.solve(JtJ + lam * np.diag(np.diag(JtJ))
                                       + 1e-14 * np.eye(len(p)), g)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                trial = p + step
                ssr_trial = float(np.sum((y - f(trial)) ** 2))
                if np.isfinite(ssr_trial) and ssr_trial <= ssr * (1 + 1e-14):
                    p_new, ssr, lam = trial, ssr_trial, lam / 10 if lam else 0.0
                    break
            lam = 10 * lam if lam else 1e-3
        else:
            raise FitDivergedError("Levenberg damping failed to find a descent step")
        rel = np.max(np.abs(p_new - p) / np.maximum(np.abs(p_new), 1e-300))
        p = p_new
        if rel < rtol:
            return p, it
    raise FitDivergedError(f"no convergence in {max_iter} iterations")


def fit_exponential(delta_au, amplitudes) -> DecayFit:
    """Fit |amplitude| = A exp(-c * delta) with delta in units of 10^3 a.u."""
    d = np.asarray(delta_au, dtype=float) / 1e3
    y = np.abs(np.asarray(amplitudes, dtype=float))
    keep = np.isfinite(y) & (y > 0)
    d, y = d[keep], y[keep]
    if len(y) < 5:
        raise InvalidParamsError("exponential fit needs >= 5 positive data points")
    slope, intercept = np.polyfit(d, np.log(y), 1)
    p0 = np.array([np.exp(intercept), -slope])

    def f(p):
        return p[0] * np.exp(-p[1] * d)

    def jac(p):
        e = np.exp(-p[1] * d)
        return np.column_stack([e, -p[0] * d * e])

    p, it = _gauss_newton(f, jac, p0, y)
    rms = float(np.sqrt(np.mean((y - f(p)) ** 2)))
    span = float(y.max() - y.min())
    return DecayFit(model="exponential", params={"A": p[0], "c": p[1]},
                    rms_residual=rms, accepted=span > 0 and rms < 0.05 * span,
                    n_iterations=it)


def _bose_model(p, T):
    a, b, Tc = p
    with np.errstate(over="ignore"):
        occ = 1.0 / np.expm1(np.minimum(Tc / np.maximum(T, 1e-300), 700.0))
    return a * np.exp(-b * occ)


def fit_bose(temperatures, amplitudes) -> DecayFit:
    """Fit |amplitude| = a exp{-b / [e^{Tc/T} - 1]} (T and Tc in hbar w01/kB)."""
    T = np.asarray(temperatures, dtype=float)
    y = np.abs(np.asarray(amplitudes, dtype=float))
    keep = np.isfinite(y) & (y > 0) & (T > 0)
    T, y = T[keep], y[keep]
    if len(y) < 6:
        raise InvalidParamsError("Bose fit needs >= 6 positive data points")
    if np.ptp(y) == 0:
        raise InvalidParamsError("degenerate data: amplitude series is constant")
    order = np.argsort(T)
    T, y = T[order], y[order]
    # initial Tc at the point of maximum curvature of y(T)
    if len(y) >= 3:
        curv = np.abs(np.gradient(np.gradient(y, T), T))
        Tc0 = float(T[np.argmax(curv)])
    else:
        Tc0 = float(np.median(T))
    a0 = float(y[0])
    occ_hi = 1.0 / np.expm1(Tc0 / T[-1])
    b0 = max(-np.log(max(y[-1] / a0, 1e-12)) / max(occ_hi, 1e-12), 1e-6)
    p0 = np.array([a0, b0, Tc0])

    def f(p):
        return _bose_model(p, T)

    def jac(p):
        a, b, Tc = p
        occ = 1.0 / np.expm1(np.minimum(Tc / T, 700.0))
        e = np.exp(-b * occ)
        # d occ / d Tc = -e^{Tc/T} / (T (e^{Tc/T}-1)^2) = -(occ + occ^2)/T
        docc = -(occ + occ ** 2) / T
        return np.column_stack([e, -a * occ * e, -a * b * docc * e])

    p, it = _gauss_newton(f, jac, p0, y)
    rms = float(np.sqrt(np.mean((y - f(p)) ** 2)))
    span = float(y.max() - y.min())
    return DecayFit(model="bose", params={"a": p[0], "b": p[1], "T_c": p[2]},
                    rms_residual=rms, accepted=span > 0 and rms < 0.05 * span,
                    n_iterations=it)
