"""Morse oscillator bound-state basis.

Everything is in Hartree atomic units (hbar = 1). The vibrational
coordinate is the dimensionless displacement x = r/r0 - 1, and wave
functions are normalized as  integral |psi(x)|^2 r0 dx = 1  (i.e. unit
norm with respect to the physical measure dr).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import lgamma

import numpy as np
from scipy.special import roots_legendre

from .errors import InvalidParamsError, NoBoundStatesError, QuadratureAccuracyError

__all__ = [
    "MorseParams",
    "BoundBasis",
    "HI_PRESET",
    "derive_lambda",
    "bound_state_count",
    "energy",
    "morse_potential",
    "build_basis",
    "eigenfunction_eval",
    "position_matrix",
]


@dataclass(frozen=True)
class MorseParams:
    """Molecular constants of the Morse potential D(e^{-2 b x} - 2 e^{-b x})."""

    D: float      # dissociation energy (hartree)
    beta: float   # range parameter (dimensionless)
    r0: float     # equilibrium internuclear distance (bohr)
    mu: float     # reduced mass (electron masses)

    def __post_init__(self):
        for name in ("D", "beta", "r0", "mu"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0:
                raise InvalidParamsError(f"Morse parameter {name} must be positive, got {v}")

    @property
    def lam(self) -> float:
        return derive_lambda(self)

    @property
    def mr2(self) -> float:
        """Effective mass for the dimensionless coordinate: mu * r0^2."""
        return self.mu * self.r0 ** 2


#: Hydrogen iodide constants (a.u.); supports 30 bound states.
HI_PRESET = MorseParams(D=0.1125, beta=2.0793, r0=3.0416, mu=1819.99)


def derive_lambda(params: MorseParams) -> float:
    """Potential-depth parameter lambda = sqrt(2 mu D r0^2) / beta."""
    return np.sqrt(2.0 * params.mu * params.D * params.r0 ** 2) / params.beta


def bound_state_count(params: MorseParams) -> int:
    """Number of bound levels, i.e. integers n >= 0 with 2*lam - 1 - 2n > 0."""
    lam = derive_lambda(params)
    if lam <= 0.5:
        raise NoBoundStatesError(f"lambda = {lam:.4g} <= 1/2: no bound states")
    return int(np.floor(lam - 0.5)) + 1


def energy(params: MorseParams, n: int) -> float:
    """Bound-state energy E_n = -(beta^2 / (8 mu r0^2)) (2 lam - 1 - 2n)^2."""
    n_max = bound_state_count(params) - 1
    if not 0 <= n <= n_max:
        raise IndexError(f"level index {n} outside bound range 0..{n_max}")
    lam = derive_lambda(params)
    s = 2.0 * lam - 1.0 - 2.0 * n
    return -(params.beta ** 2 / (8.0 * params.mr2)) * s ** 2


def morse_potential(params: MorseParams, x) -> np.ndarray:
    """V(x) = D (e^{-2 beta x} - 2 e^{-beta x}) at dimensionless x."""
    e = np.exp(-params.beta * np.asarray(x, dtype=float))
    return params.D * (e * e - 2.0 * e)


def _laguerre_upward(n: int, s: float, xi: np.ndarray) -> np.ndarray:
    """Associated Laguerre L_n^s(xi) by the three-term upward recurrence."""
    L_prev = np.ones_like(xi)
    if n == 0:
        return L_prev
    L = 1.0 + s - xi
    for k in range(1, n):
        L, L_prev = ((2 * k + 1 + s - xi) * L - (k + s) * L_prev) / (k + 1), L
    return L


@dataclass(frozen=True)
class BoundBasis:
    """Bound eigenbasis of a Morse potential with a validated quadrature rule."""

    params: MorseParams
    n_max: int
    energies: np.ndarray          # (n_max+1,) hartree, strictly increasing
    s_values: np.ndarray          # (n_max+1,) s_n = 2 lam - 1 - 2n
    log_norms: np.ndarray         # (n_max+1,) log of the normalization constant
    quad_x: np.ndarray            # quadrature nodes in x
    quad_w: np.ndarray            # quadrature weights (measure r0 dx included)
    psi_quad: np.ndarray = field(repr=False, default=None)  # (n_states, n_nodes)

    @property
    def n_states(self) -> int:
        return self.n_max + 1

    def eigenfunctions(self, x) -> np.ndarray:
        """Matrix psi[n, i] of all bound eigenfunctions at points x (flattened)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        lam = self.params.lam
        beta = self.params.beta
        log_xi = np.log(2.0 * lam) - beta * x
        xi = np.exp(log_xi)
        psi = np.empty((self.n_states, x.size))
        for n in range(self.n_states):
            s = self.s_values[n]
            L = _laguerre_upward(n, s, xi)
            # prefactor in log space: xi^{s/2} e^{-xi/2} overflows for s ~ 60
            log_pref = self.log_norms[n] + 0.5 * s * log_xi - 0.5 * xi
            with np.errstate(under="ignore"):
                psi[n] = np.sign(L) * np.exp(log_pref + np.log(np.abs(L), where=L != 0,
                                                               out=np.full_like(L, -np.inf)))
        return psi


def eigenfunction_eval(basis: BoundBasis, n: int, x) -> np.ndarray:
    """psi_n(x) = N_n e^{-xi/2} xi^{s_n/2} L_n^{s_n}(xi), xi = 2 lam e^{-beta x}."""
    if not 0 <= n <= basis.n_max:
        raise IndexError(f"level index {n} outside bound range 0..{basis.n_max}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    vals = basis.eigenfunctions(x_arr)[n]
    return vals if np.ndim(x) else float(vals[0])


def _tail_cutoff(params: MorseParams, n_top: int, tol: float = 1e-12) -> float:
    """Upper quadrature limit: tail mass of the highest kept state < tol beyond it.

    The slowest asymptotic decay is |psi_n|^2 ~ const * e^{-s_n beta x}; the
    weakest binding (smallest s) belongs to n_top.
    """
    lam = params.lam
    s = 2.0 * lam - 1.0 - 2.0 * n_top
    # |psi|^2 tail ~ N^2 (2 lam)^s e^{-s beta x} L_n^s(0)^2, integrated analytically
    log_N2 = (np.log(params.beta) + np.log(s) + lgamma(n_top + 1)
              - lgamma(2 * lam - n_top) - np.log(params.r0))
    log_L0 = lgamma(n_top + s + 1) - lgamma(n_top + 1) - lgamma(s + 1)
    log_amp = log_N2 + s * np.log(2 * lam) + 2 * log_L0 + np.log(params.r0 / (s * params.beta))
    x_hi = (log_amp - np.log(tol)) / (s * params.beta)
    return max(3.0, float(x_hi))


def build_basis(params: MorseParams, n_nodes: int = 6000, x_lo: float = -0.9,
                x_hi: float | None = None, orthonormality_tol: float = 1e-8) -> BoundBasis:
    """Construct the bound basis with a Gauss-Legendre rule on [x_lo, x_hi].

    Raises QuadratureAccuracyError if the rule fails the orthonormality check.
    """
    lam = derive_lambda(params)
    n_states = bound_state_count(params)
    n_max = n_states - 1
    ns = np.arange(n_states)
    s_values = 2.0 * lam - 1.0 - 2.0 * ns
    energies = -(params.beta ** 2 / (8.0 * params.mr2)) * s_values ** 2
    log_norms = 0.5 * (np.log(params.beta) + np.log(s_values)
                       + np.array([lgamma(n + 1) - lgamma(2 * lam - n) for n in ns])
                       - np.log(params.r0))
    if x_hi is None:
        x_hi = _tail_cutoff(params, n_max)
    nodes, weights = roots_legendre(n_nodes)
    quad_x = 0.5 * (x_hi - x_lo) * nodes + 0.5 * (x_hi + x_lo)
    quad_w = 0.5 * (x_hi - x_lo) * weights * params.r0

    basis = BoundBasis(params=params, n_max=n_max, energies=energies,
                       s_values=s_values, log_norms=log_norms,
                       quad_x=quad_x, quad_w=quad_w)
    psi = basis.eigenfunctions(quad_x)
    object.__setattr__(basis, "psi_quad", psi)

    overlap = (psi * quad_w) @ psi.T
    resid = np.max(np.abs(overlap - np.eye(n_states)))
    if resid > orthonormality_tol:
        raise QuadratureAccuracyError(
            f"orthonormality residual {resid:.3e} exceeds {orthonormality_tol:.1e}; "
            f"increase n_nodes (currently {n_nodes})")
    return basis


def orthonormality_residual(basis: BoundBasis) -> float:
    overlap = (basis.psi_quad * basis.quad_w) @ basis.psi_quad.T
    return float(np.max(np.abs(overlap - np.eye(basis.n_states))))


def position_matrix(basis: BoundBasis) -> np.ndarray:
    """Matrix x_mn = <psi_m| x |psi_n> over the bound subspace (dimensionless)."""
    resid = orthonormality_residual(basis)
    if resid > 1e-8:
        raise QuadratureAccuracyError(
            f"orthonormality residual {resid:.3e} exceeds 1e-8; quadrature unreliable")
    X = (basis.psi_quad * (basis.quad_w * basis.quad_x)) @ basis.psi_quad.T
    return 0.5 * (X + X.T)
