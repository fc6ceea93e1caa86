"""Independent sine-DVR (Colbert-Miller) grid diagonalization oracle.

Used two ways: small fast instances run live inside the test suite, and one
large instance (N = 6000, domain [-0.9, 120]) generated the frozen values in
tests/oracles.py. Run this file as a script to regenerate them.
"""

import numpy as np
from scipy.linalg import eigh


def sine_dvr_kinetic(N, a, b, mass):
    """Kinetic matrix on the interior grid of [a, b] with Dirichlet walls."""
    L = b - a
    dx = L / (N + 1)
    i = np.arange(1, N + 1)
    T = np.empty((N, N))
    pref = np.pi ** 2 / (4 * mass * L ** 2)
    T[np.diag_indices(N)] = pref * ((2 * (N + 1) ** 2 + 1) / 3
                                    - 1 / np.sin(np.pi * i / (N + 1)) ** 2)
    ii, jj = np.meshgrid(i, i, indexing="ij")
    off = ii != jj
    with np.errstate(divide="ignore"):
        T_off = pref * (-1.0) ** (ii - jj) * (
            1 / np.sin(np.pi * (ii - jj) / (2 * (N + 1))) ** 2
            - 1 / np.sin(np.pi * (ii + jj) / (2 * (N + 1))) ** 2)
    T[off] = T_off[off]
    x = a + i * dx
    return T, x, dx


def morse_levels_dvr(D, beta, r0, mu, a=-0.9, b=120.0, N=4000, k=30):
    """Lowest k eigenpairs of the Morse Hamiltonian in the x = r/r0 - 1 coordinate."""
    mass = mu * r0 ** 2
    T, x, dx = sine_dvr_kinetic(N, a, b, mass)
    V = D * (np.exp(-2 * beta * x) - 2 * np.exp(-beta * x))
    vals, vecs = eigh(T + np.diag(V), subset_by_index=[0, k - 1])
    return vals, vecs, x, dx


if __name__ == "__main__":
    D, beta, r0, mu = 0.1125, 2.0793, 3.0416, 1819.99
    E, V, xg, dx = morse_levels_dvr(D, beta, r0, mu, N=6000, k=30)
    psi0 = V[:, 0] / np.sqrt(dx * r0)
    if psi0[np.argmax(np.abs(psi0))] < 0:
        psi0 = -psi0
    print("DVR_ENERGIES = [")
    for e in E:
        print(f"    {float(e)!r},")
    print("]")
    idx = [int(np.argmin(np.abs(xg - t))) for t in np.linspace(-0.35, 0.55, 10)]
    print("DVR_PSI0_SAMPLES = [")
    for i in idx:
        print(f"    ({float(xg[i])!r}, {float(psi0[i])!r}),")
    print("]")
    X = V.T @ (xg[:, None] * V)
    print("DVR_X0N_ABS = [")
    for n in range(1, 10):
        print(f"    {float(abs(X[0, n]))!r},")
    print("]")
    print(f"DVR_OMEGA01 = {float(E[1] - E[0])!r}")
