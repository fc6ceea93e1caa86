"""SU(1,1) coherent state of the Morse oscillator as the initial wave packet.

The state |eta, s> expands over number states with coefficients

    c_k = (1 - |eta|^2)^{(1+s)/2} [Gamma(k+s+1) / (k! Gamma(1+s))]^{1/2} eta^k,

with |eta| = tanh|alpha| and arg(eta) = arg(alpha). We build the state on the
ground-state index s = 2*lam - 1 and identify coefficient k with the physical
bound level k, truncating at n_max and renormalizing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExcessiveTruncationError, InvalidParamsError

__all__ = ["CoherentSpec", "StateVector", "coherent_coefficients", "mean_level",
           "eta_for_mean_level"]

LEAKAGE_TOL = 1e-6


@dataclass(frozen=True)
class CoherentSpec:
    """Displacement amplitude alpha (or eta directly) plus the SU(1,1) index s."""

    s: float
    alpha: complex | None = None
    eta: complex | None = None

    def __post_init__(self):
        if (self.alpha is None) == (self.eta is None):
            raise InvalidParamsError("specify exactly one of alpha, eta")
        if self.eta is not None and abs(self.eta) >= 1:
            raise InvalidParamsError(f"|eta| = {abs(self.eta):.4g} must be < 1")

    @property
    def eta_value(self) -> complex:
        if self.eta is not None:
            return complex(self.eta)
        a = complex(self.alpha)
        if a == 0:
            return 0j
        return np.tanh(abs(a)) * a / abs(a)


@dataclass(frozen=True)
class StateVector:
    """Normalized complex amplitudes over bound levels 0..n_max."""

    coeffs: np.ndarray
    leakage: float = 0.0   # weight lost to k > n_max before renormalization

    @property
    def n_max(self) -> int:
        return len(self.coeffs) - 1


def coherent_coefficients(spec: CoherentSpec, n_max: int,
                          leakage_tol: float = LEAKAGE_TOL) -> StateVector:
    """Truncated, renormalized coherent-state coefficients.

    Uses the ratio recurrence c_{k+1} = c_k * eta * sqrt((k+s+1)/(k+1)); direct
    Gamma evaluation overflows at s ~ 60.
    """
    eta = spec.eta_value
    s = spec.s
    c = np.zeros(n_max + 1, dtype=complex)
    c[0] = (1.0 - abs(eta) ** 2) ** ((1.0 + s) / 2.0)
    for k in range(n_max):
        c[k + 1] = c[k] * eta * np.sqrt((k + s + 1.0) / (k + 1.0))
    norm2 = float(np.sum(np.abs(c) ** 2))
    if norm2 == 0.0:
        # (1 - |eta|^2)^{(1+s)/2} underflowed: every retained amplitude is zero
        raise ExcessiveTruncationError(
            f"coefficients underflow for |eta| = {abs(eta):.12g}; all weight "
            f"lies beyond level {n_max}")
    leakage = 1.0 - norm2
    if leakage > leakage_tol:
        raise ExcessiveTruncationError(
            f"truncation leakage {leakage:.3e} exceeds {leakage_tol:.1e}; "
            "state not well below the dissociation limit")
    return StateVector(coeffs=c / np.sqrt(norm2), leakage=leakage)


def mean_level(state: StateVector) -> tuple[float, int]:
    """Mean level sum_k k |c_k|^2 and the argmax level of |c_k|^2."""
    pops = np.abs(state.coeffs) ** 2
    ks = np.arange(len(pops))
    return float(np.sum(ks * pops)), int(np.argmax(pops))


def eta_for_mean_level(nbar: float, s: float, n_max: int, tol: float = 1e-12) -> float:
    """Solve for real eta in (0, 1) whose truncated state has mean level nbar."""
    if not 0 < nbar <= n_max:
        raise InvalidParamsError(f"target mean level {nbar} outside (0, {n_max}]")

    def mean_of(eta: float) -> float:
        spec = CoherentSpec(s=s, eta=eta)
        try:
            state = coherent_coefficients(spec, n_max, leakage_tol=np.inf)
        except ExcessiveTruncationError:
            # all representable weight beyond the truncation: treat as maximal
            return float(n_max)
        return mean_level(state)[0]

    lo, hi = 0.0, 1.0 - 1e-12
    if mean_of(hi) < nbar:
        raise InvalidParamsError(f"mean level {nbar} unreachable within {n_max + 1} levels")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mean_of(mid) < nbar:
            lo = mid
        else:
            hi = mid
        if hi - lo < tol:
            break
    return 0.5 * (lo + hi)
