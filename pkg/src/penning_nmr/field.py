"""Magnetic field and derived single-site frequencies under a linear gradient.

The added field is B1 = b (z k - x/2 i - y/2 j). A trap centred at x0 sees
|B| = Bc = sqrt(B0^2 + b^2 x0^2 / 4) at its centre; in the frame rotated
onto that direction the axial field is Bc + b z.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

from .constants import CODATA2018, PhysicalConstants
from .errors import DomainError, UnstableTrapError


@dataclass(frozen=True)
class MagneticConfig:
    B0: float  # T
    b: float  # T/m

    def __post_init__(self):
        if not self.B0 > 0:
            raise DomainError("B0 must be positive")
        if not self.b >= 0:
            raise DomainError("gradient b must be non-negative")


@dataclass(frozen=True)
class SiteFrequencies:
    x0: float
    Bc: float
    omega_c0: float
    omega_m0: float
    omega_s0: float
    omega_z: float
    epsilon: float
    delta_z: float
    dz_omega_s: float

    def as_row(self) -> dict:
        return {
            "x0_m": self.x0, "Bc_T": self.Bc, "omega_c0_rad_s": self.omega_c0,
            "omega_m0_rad_s": self.omega_m0, "omega_s0_rad_s": self.omega_s0,
            "omega_z_rad_s": self.omega_z, "epsilon": self.epsilon,
            "delta_z_m": self.delta_z, "dz_omega_s_rad_s_per_m": self.dz_omega_s,
        }


def field_at_center(cfg: MagneticConfig, x0: float) -> float:
    """Field magnitude (T) at the centre of a trap offset by ``x0`` from the gradient axis."""
    return math.hypot(cfg.B0, 0.5 * cfg.b * x0)


def ground_state_amplitude(omega_z: float, k: PhysicalConstants = CODATA2018) -> float:
    """Axial ground-state amplitude sqrt(hbar / (2 m_e omega_z)) in metres."""
    if not omega_z > 0:
        raise DomainError("omega_z must be positive")
    return math.sqrt(k.hbar / (2 * k.electron_mass * omega_z))


def gradient_coupling(b: float, omega_z: float, k: PhysicalConstants = CODATA2018) -> float:
    """Dimensionless spin-motion coupling |e| b / (m_e omega_z) * delta_z."""
    return k.charge_to_mass * b / omega_z * ground_state_amplitude(omega_z, k)


def site_frequencies(cfg: MagneticConfig, x0: float, omega_z: float,
                     k: PhysicalConstants = CODATA2018) -> SiteFrequencies:
    """Characteristic frequencies of one trap site."""
    if not omega_z > 0:
        raise DomainError("omega_z must be positive")
    Bc = field_at_center(cfg, x0)
    omega_c0 = k.charge_to_mass * Bc
    if omega_c0**2 - 2 * omega_z**2 <= 0:
        raise UnstableTrapError(
            f"omega_c0 = {omega_c0:.4g} rad/s cannot confine omega_z = {omega_z:.4g} rad/s")
    delta_z = ground_state_amplitude(omega_z, k)
    return SiteFrequencies(
        x0=x0,
        Bc=Bc,
        omega_c0=omega_c0,
        omega_m0=omega_z**2 / (2 * omega_c0),
        omega_s0=k.g_factor * omega_c0 / 2,
        omega_z=omega_z,
        epsilon=gradient_coupling(cfg.b, omega_z, k),
        delta_z=delta_z,
        dz_omega_s=k.g_factor * k.charge_to_mass * cfg.b / 2,
    )


def z_dependent_frequencies(cfg: MagneticConfig, x0: float, omega_z: float, z: float,
                            k: PhysicalConstants = CODATA2018):
    """(omega_c, omega_c_tilde, omega_m, omega_c_prime) at axial displacement ``z``."""
    omega_c = k.charge_to_mass * (field_at_center(cfg, x0) + cfg.b * z)
    disc = omega_c**2 - 2 * omega_z**2
    if omega_c <= 0 or disc <= 0:
        raise UnstableTrapError(f"stability lost at z = {z:.4g} m")
    omega_ct = math.sqrt(disc)
    # (omega_c - omega_ct) / 2 rewritten to avoid cancellation when omega_z << omega_c
    omega_m = omega_z**2 / (omega_c + omega_ct)
    return omega_c, omega_ct, omega_m, (omega_c + omega_ct) / 2
