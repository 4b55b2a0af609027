"""Effective NMR-like molecule of an electron array.

After the spin-motion decoupling transformation the spin part of the array
Hamiltonian reads

    H/hbar = sum_i (omega_s0_i / 2) sz_i + sum_{i>j} (pi J_ij / 2) sz_i sz_j

with J_ij = g^2 xi_ij eps^2 / (2 pi) in hertz.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
import math

import numpy as np

from .constants import CODATA2018, PhysicalConstants
from .errors import DomainError, ExpansionValidityError
from .field import MagneticConfig, ground_state_amplitude, gradient_coupling

#: Largest delta_z / d for which the dipole expansion of the Coulomb term is accepted.
MAX_AMPLITUDE_RATIO = 0.1
#: Largest b |x0| / (2 B0) accepted by the closed-form spin frequencies.
MAX_TILT = 0.5


@dataclass(frozen=True)
class ArrayLayout:
    positions: tuple  # x_{i,0} in metres

    def __post_init__(self):
        pos = tuple(float(x) for x in self.positions)
        object.__setattr__(self, "positions", pos)
        if not pos:
            raise DomainError("an array needs at least one site")
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise DomainError("site positions must be strictly increasing")

    @classmethod
    def equally_spaced(cls, count: int, spacing: float, origin: float = 0.0) -> "ArrayLayout":
        if count < 1 or not spacing > 0:
            raise DomainError("need count >= 1 and positive spacing")
        return cls(tuple(origin + i * spacing for i in range(count)))

    @property
    def n(self) -> int:
        return len(self.positions)

    def distance(self, i: int, j: int) -> float:
        return abs(self.positions[i] - self.positions[j])

    @property
    def min_gap(self) -> float:
        if self.n < 2:
            return math.inf
        return float(np.min(np.diff(self.positions)))


@dataclass(frozen=True, eq=False)
class MoleculeSpec:
    """Spin frequencies (rad/s), J (Hz) and xi (rad/s) of an N-site register."""

    spin_freqs: np.ndarray
    J: np.ndarray
    xi: np.ndarray
    layout: ArrayLayout | None = field(default=None)

    def __post_init__(self):
        J = np.array(self.J, dtype=float, copy=True)
        n = len(self.spin_freqs)
        if J.shape != (n, n):
            raise DomainError("J must be an N x N matrix")
        if not np.array_equal(J, J.T) or np.any(np.diag(J) != 0) or np.any(J < 0):
            raise DomainError("J must be symmetric, non-negative, with zero diagonal")
        for name, arr in (("spin_freqs", np.array(self.spin_freqs, dtype=float)),
                          ("J", J), ("xi", np.array(self.xi, dtype=float))):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_couplings(cls, J, spin_freqs=None) -> "MoleculeSpec":
        """Molecule defined directly by its J matrix (Hz), for simulation and tests."""
        J = np.asarray(J, dtype=float)
        n = J.shape[0]
        freqs = np.zeros(n) if spin_freqs is None else spin_freqs
        return cls(spin_freqs=freqs, J=J, xi=np.zeros((n, n)))

    @property
    def n(self) -> int:
        return len(self.spin_freqs)

    @cached_property
    def zz_energies(self) -> np.ndarray:
        """sum_{i>j} J_ij s_i s_j for every basis index (s = +1 up, -1 down)."""
        n = self.n
        k = np.arange(2**n)
        s = 2.0 * ((k[:, None] >> np.arange(n)) & 1) - 1.0
        e = 0.5 * np.einsum("ki,ij,kj->k", s, self.J, s)
        e.setflags(write=False)
        return e


def coupling_xi(d: float, delta_z: float, k: PhysicalConstants = CODATA2018) -> float:
    """Axial-axial Coulomb coupling rate xi (rad/s) between traps ``d`` apart."""
    if not d > 0:
        raise DomainError("separation must be positive")
    ratio = delta_z / d
    if ratio >= MAX_AMPLITUDE_RATIO:
        raise ExpansionValidityError(
            f"axial amplitude / separation = {ratio:.3g} >= {MAX_AMPLITUDE_RATIO}: the "
            "oscillation amplitude must be much smaller than the average separation")
    return k.coulomb_energy_m / (k.hbar * d) * ratio**2


def j_coupling(xi: float, epsilon: float, g: float) -> float:
    """NMR-convention coupling constant J = g^2 xi eps^2 / (2 pi), in Hz."""
    if xi < 0 or epsilon < 0 or g < 0:
        raise DomainError("xi, epsilon and g must be non-negative")
    return g * g * xi * epsilon**2 / (2 * math.pi)


def spin_frequencies(layout: ArrayLayout, cfg: MagneticConfig,
                     k: PhysicalConstants = CODATA2018) -> np.ndarray:
    """Per-site spin precession frequencies (rad/s), to second order in b x0 / B0."""
    x = np.asarray(layout.positions)
    tilt = cfg.b * np.abs(x) / (2 * cfg.B0)
    bad = np.flatnonzero(tilt >= MAX_TILT)
    if bad.size:
        i = int(bad[0])
        raise DomainError(f"site {i}: b|x0|/(2 B0) = {tilt[i]:.3g} exceeds {MAX_TILT}")
    omega_s = k.g_factor * k.charge_to_mass * cfg.B0 / 2
    return omega_s * (1 + cfg.b**2 * x**2 / (8 * cfg.B0**2))


def equilibrium_shift(d: float, omega_c0: float, k: PhysicalConstants = CODATA2018) -> float:
    """Order of the Coulomb-induced radial shift of a trap centre (m); diagnostic only."""
    if not d > 0:
        raise DomainError("separation must be positive")
    return k.coulomb_energy_m / (d * d * k.electron_mass * omega_c0**2)


def build_molecule(layout: ArrayLayout, cfg: MagneticConfig, omega_z: float,
                   k: PhysicalConstants = CODATA2018) -> MoleculeSpec:
    """Assemble the effective spin Hamiltonian parameters for an array."""
    n = layout.n
    delta_z = ground_state_amplitude(omega_z, k)
    eps = gradient_coupling(cfg.b, omega_z, k)
    freqs = spin_frequencies(layout, cfg, k)
    xi = np.zeros((n, n))
    J = np.zeros((n, n))
    for i in range(n):
        for j in range(i):
            try:
                xi[i, j] = xi[j, i] = coupling_xi(layout.distance(i, j), delta_z, k)
            except DomainError as exc:
                raise type(exc)(f"pair ({j}, {i}): {exc}") from exc
            J[i, j] = J[j, i] = j_coupling(xi[i, j], eps, k.g_factor)
    return MoleculeSpec(spin_freqs=freqs, J=J, xi=xi, layout=layout)
