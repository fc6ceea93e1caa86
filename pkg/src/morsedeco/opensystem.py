"""Master equation with modified jump operators in the bound eigenbasis.

The reduced density matrix evolves under

    d rho/dt = -i [H, rho]
             + (O2 rho Od + O rho O2d - Od O2 rho - rho O2d O)
             + (O1d rho O + Od rho O1 - O O1d rho - rho O1 Od)

with Od = O^dagger etc. O is the strictly upper-triangular (lowering) part of
the position matrix; O1 and O2 carry the super-Ohmic spectral weight
delta * w^3 / 2 times n(w) and n(w)+1 at each transition frequency.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import StepInstabilityError

__all__ = ["BathSpec", "JumpOperators", "Snapshot", "build_lowering_operator",
           "build_modified_operators", "master_rhs", "build_liouvillian",
           "default_timestep", "evolve", "unitary_evolve",
           "write_density_csv", "read_density_csv"]

TRACE_TOL = 1e-6


@dataclass(frozen=True)
class BathSpec:
    """Super-Ohmic environment: 2 pi sigma^2(w) g(w) = delta * w^3, kB = 1."""

    delta: float          # coupling strength (a.u.)
    temperature: float    # T in hartree (kB = 1)

    def __post_init__(self):
        if self.delta < 0 or self.temperature < 0:
            raise ValueError("delta and temperature must be non-negative")

    def n_thermal(self, omega) -> np.ndarray:
        """Mean thermal occupation 1/(e^{w/T} - 1); zero at T = 0."""
        omega = np.asarray(omega, dtype=float)
        if self.temperature == 0:
            return np.zeros_like(omega)
        return 1.0 / np.expm1(omega / self.temperature)


@dataclass(frozen=True)
class JumpOperators:
    O: np.ndarray    # bare lowering operator (strictly upper triangular)
    O1: np.ndarray   # absorption-modified
    O2: np.ndarray   # emission-modified


def build_lowering_operator(x_matrix: np.ndarray) -> np.ndarray:
    """Strictly upper-triangular part of the position matrix (lowers quanta)."""
    return np.triu(np.asarray(x_matrix, dtype=float), k=1)


def build_modified_operators(O: np.ndarray, energies: np.ndarray,
                             bath: BathSpec) -> JumpOperators:
    """Scale each O^{mn} (m < n) by delta*w^3/2 times n(w) resp. n(w)+1.

    w = E_n - E_m > 0 is the physical transition frequency; the spectral
    functions are defined for positive bath frequencies, and the RWA pairs the
    lowering operator with bath absorption.
    """
    energies = np.asarray(energies, dtype=float)
    if np.any(np.diff(energies) <= 0):
        raise ValueError("energies must be strictly increasing")
    omega = energies[None, :] - energies[:, None]   # omega[m, n] = E_n - E_m
    upper = np.triu(np.ones_like(omega, dtype=bool), k=1)
    spectral = np.zeros_like(omega)
    spectral[upper] = 0.5 * bath.delta * omega[upper] ** 3
    nbar = np.zeros_like(omega)
    nbar[upper] = bath.n_thermal(omega[upper])
    O = np.asarray(O)
    return JumpOperators(O=O, O1=O * spectral * nbar, O2=O * spectral * (nbar + 1.0))


def master_rhs(rho: np.ndarray, energies: np.ndarray, ops: JumpOperators) -> np.ndarray:
    """Right-hand side of the master equation, term by term as written."""
    rho = np.asarray(rho)
    n = rho.shape[0]
    if rho.shape != (n, n) or len(energies) != n or ops.O.shape != (n, n):
        raise ValueError("dimension mismatch between rho, energies and operators")
    E = np.asarray(energies, dtype=float)
    Od = ops.O.conj().T
    O1d = ops.O1.conj().T
    O2d = ops.O2.conj().T
    drho = -1j * (E[:, None] - E[None, :]) * rho
    drho += ops.O2 @ rho @ Od + ops.O @ rho @ O2d - Od @ ops.O2 @ rho - rho @ O2d @ ops.O
    drho += O1d @ rho @ ops.O + Od @ rho @ ops.O1 - ops.O @ O1d @ rho - rho @ ops.O1 @ Od
    return drho


def build_liouvillian(energies: np.ndarray, ops: JumpOperators) -> np.ndarray:
    """Dense superoperator L with vec(d rho) = L vec(rho), row-major vec."""
    E = np.asarray(energies, dtype=float)
    n = len(E)
    I = np.eye(n)
    H = np.diag(E).astype(complex)
    O, O1, O2 = ops.O.astype(complex), ops.O1.astype(complex), ops.O2.astype(complex)
    Od, O1d, O2d = O.conj().T, O1.conj().T, O2.conj().T

    def left(A):
        return np.kron(A, I)

    def right(B):
        return np.kron(I, B.T)

    L = -1j * (left(H) - right(H))
    L += np.kron(O2, Od.T) + np.kron(O, O2d.T) - left(Od @ O2) - right(O2d @ O)
    L += np.kron(O1d, O.T) + np.kron(Od, O1.T) - left(O @ O1d) - right(O1 @ Od)
    return L


def default_timestep(energies: np.ndarray) -> float:
    """dt = min(0.05 / w_max, T_rev / 2e5); the fastest phase sets stiffness."""
    E = np.asarray(energies, dtype=float)
    w_max = float(E[-1] - E[0])
    dt = 0.05 / w_max
    if len(E) >= 3:
        sec = abs(E[2] - 2 * E[1] + E[0])
        if sec > 0:
            dt = min(dt, 4.0 * np.pi / sec / 2e5)
    return dt


@dataclass
class Snapshot:
    time: float
    rho: np.ndarray
    trace_residual: float = 0.0
    hermiticity_residual: float = 0.0
    min_eigenvalue: float = 0.0
    meta: dict = field(default_factory=dict)


def _rk4_step_matrix(L: np.ndarray, dt: float) -> np.ndarray:
    """One fixed-step RK4 update as a matrix: sum_{j<=4} (dt L)^j / j!."""
    A = dt * L
    P = np.eye(L.shape[0], dtype=complex)
    term = np.eye(L.shape[0], dtype=complex)
    for j in range(1, 5):
        term = term @ A / j
        P += term
    return P


def evolve(rho0: np.ndarray, energies: np.ndarray, ops: JumpOperators,
           snapshot_times, dt: float | None = None,
           trace_tol: float = TRACE_TOL) -> list[Snapshot]:
    """Fixed-step RK4 trajectory, sampled at the requested times.

    Snapshots are emitted at the nearest step-grid time (recorded exactly).
    For the linear autonomous system the RK4 update is the fixed matrix
    polynomial sum (dt L)^j / j!, applied via cached binary powers so that
    long trajectories cost O(log nsteps) dense multiplies.

    Trace and Hermiticity are asserted at each snapshot, never corrected.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    n = rho0.shape[0]
    if dt is None:
        dt = default_timestep(energies)
    times = sorted(float(t) for t in snapshot_times)
    if times and times[0] < 0:
        raise ValueError("snapshot times must be non-negative")

    L = build_liouvillian(energies, ops)
    P = _rk4_step_matrix(L, dt)
    powers = {0: P}   # powers[k] = P^(2^k)

    def advance(v: np.ndarray, nsteps: int) -> np.ndarray:
        k = 0
        while nsteps:
            if k not in powers:
                powers[k] = powers[k - 1] @ powers[k - 1]
            if nsteps & 1:
                v = powers[k] @ v
            nsteps >>= 1
            k += 1
        return v

    v = rho0.reshape(-1).copy()
    step_now = 0
    out: list[Snapshot] = []
    for t in times:
        target = int(round(t / dt))
        v = advance(v, target - step_now)
        step_now = target
        rho = v.reshape(n, n)
        tr = np.trace(rho)
        trace_resid = abs(tr - 1.0)
        if trace_resid > trace_tol:
            raise StepInstabilityError(
                f"trace drift {trace_resid:.3e} at t = {target * dt:.6g} exceeds "
                f"{trace_tol:.1e}; reduce dt")
        herm_resid = float(np.max(np.abs(rho - rho.conj().T)))
        min_eig = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
        out.append(Snapshot(time=target * dt, rho=rho,
                            trace_residual=float(trace_resid),
                            hermiticity_residual=herm_resid,
                            min_eigenvalue=min_eig,
                            meta={"dt": dt, "steps": target}))
    return out


def unitary_evolve(coeffs: np.ndarray, energies: np.ndarray, t: float) -> np.ndarray:
    """Closed-system fast path: c_n(t) = c_n(0) e^{-i E_n t}."""
    return np.asarray(coeffs, dtype=complex) * np.exp(-1j * np.asarray(energies) * t)


def write_density_csv(path, rho: np.ndarray, meta: dict) -> None:
    """Paired real/imag matrix blocks with one metadata header line."""
    keys = ("time", "delta", "T", "dt", "trace_residual")
    header = " ".join(f"{k}={meta.get(k, 0):.9g}" for k in keys)
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        fh.write("# real\n")
        for row in rho.real:
            fh.write(",".join(f"{v:.9e}" for v in row) + "\n")
        fh.write("# imag\n")
        for row in rho.imag:
            fh.write(",".join(f"{v:.9e}" for v in row) + "\n")


def read_density_csv(path) -> tuple[np.ndarray, dict]:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    meta = {}
    for item in lines[0].lstrip("# ").split():
        k, val = item.split("=")
        meta[k] = float(val)
    idx_real = lines.index("# real")
    idx_imag = lines.index("# imag")
    real = np.array([[float(v) for v in ln.split(",")] for ln in lines[idx_real + 1:idx_imag]])
    imag = np.array([[float(v) for v in ln.split(",")] for ln in lines[idx_imag + 1:]])
    return real + 1j * imag, meta
