"""Exact-diagonalisation check of the effective spin-spin coupling.

Two axial oscillators with spin-dependent linear forces and a Coulomb
x1 x2 coupling are diagonalised in a truncated Fock space (units hbar = 1,
omega_z = 1 by default):

    H = sum_i [w a_i^+ a_i + (ws_i/2) sz_i + (g/4) w eps (a_i + a_i^+) sz_i]
        + xi (a_1 + a_1^+)(a_2 + a_2^+)

Both sz_i commute with H, so each joint spin sector is diagonalised on its
own; the sector ground energies give J through the usual NMR combination.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict
import math

import numpy as np
from scipy import linalg

from .errors import ConvergenceError, DomainError

SZ = np.diag([-1.0, 1.0])  # (down, up)


@dataclass(frozen=True)
class EffectiveModelResult:
    J_measured: float
    J_predicted: float
    relative_error: float
    n_max: int
    converged: bool

    def to_dict(self) -> dict:
        return asdict(self)


def two_site_hamiltonian(xi, epsilon, g, spin_splittings, n_max, omega_z=1.0):
    """Full Hamiltonian on (spin1 x spin2) x (mode1 x mode2), Fock cutoff 2 * n_max."""
    d = 2 * n_max
    a = np.diag(np.sqrt(np.arange(1, d)), 1)
    x = a + a.T
    num = np.diag(np.arange(d, dtype=float))
    eye_d, eye_2 = np.eye(d), np.eye(2)
    x1, x2 = np.kron(x, eye_d), np.kron(eye_d, x)
    motion = omega_z * (np.kron(num, eye_d) + np.kron(eye_d, num)) + xi * (x1 @ x2)
    sz1, sz2 = np.kron(SZ, eye_2), np.kron(eye_2, SZ)
    lam = g / 4 * omega_z * epsilon
    w1, w2 = spin_splittings
    return (np.kron(np.eye(4), motion)
            + np.kron(w1 / 2 * sz1 + w2 / 2 * sz2, np.eye(d * d))
            + lam * (np.kron(sz1, x1) + np.kron(sz2, x2)))


def sector_ground_energies(H: np.ndarray) -> dict:
    """Lowest eigenvalue in each (s1, s2) sector, keyed by (+1 up / -1 down)."""
    block = H.shape[0] // 4
    out = {}
    for idx, (s1, s2) in enumerate([(-1, -1), (-1, 1), (1, -1), (1, 1)]):
        sl = slice(idx * block, (idx + 1) * block)
        out[(s1, s2)] = float(linalg.eigh(H[sl, sl], eigvals_only=True,
                                          subset_by_index=[0, 0])[0])
    return out


def _measure(xi, epsilon, g, spin_splittings, n_max, omega_z):
    E = sector_ground_energies(two_site_hamiltonian(xi, epsilon, g, spin_splittings,
                                                    n_max, omega_z))
    return (E[(1, 1)] + E[(-1, -1)] - E[(1, -1)] - E[(-1, 1)]) / (2 * math.pi)


def validate_effective_model(xi: float, epsilon: float, g: float = 2.0,
                             spin_splittings=(10.0, 10.5), n_max: int = 10,
                             omega_z: float = 1.0) -> EffectiveModelResult:
    """Compare the exactly diagonalised J with g^2 xi eps^2 / (2 pi).

    Raises ConvergenceError (carrying the result) if raising the cutoff by
    two changes the measured J by more than 1%.
    """
    if n_max < 6:
        raise DomainError("n_max must be at least 6")
    if not (0 <= xi <= 0.05 * omega_z):
        raise DomainError("need 0 <= xi <= 0.05 omega_z")
    if not (0 <= epsilon <= 0.2):
        raise DomainError("need 0 <= epsilon <= 0.2")
    J_pred = g * g * xi * epsilon**2 / (2 * math.pi)
    J = _measure(xi, epsilon, g, spin_splittings, n_max, omega_z)
    J_next = _measure(xi, epsilon, g, spin_splittings, n_max + 2, omega_z)
    # absolute floor ~ eigensolver round-off on O(n_max) energies
    floor = 1e-12 * omega_z * n_max
    converged = abs(J_next - J) <= 0.01 * abs(J) + floor
    rel = abs(J - J_pred) / abs(J_pred) if J_pred else abs(J - J_pred)
    result = EffectiveModelResult(J, J_pred, rel, n_max, converged)
    if not converged:
        raise ConvergenceError(
            f"J changed from {J:.6g} to {J_next:.6g} between n_max={n_max} and {n_max + 2}",
            result)
    return result
