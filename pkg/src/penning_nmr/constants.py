"""Physical constants (CODATA 2018)."""

from dataclasses import dataclass
import math


@dataclass(frozen=True)
class PhysicalConstants:
    electron_charge_magnitude: float = 1.602176634e-19  # C
    electron_mass: float = 9.1093837015e-31  # kg
    hbar: float = 1.054571817e-34  # J s
    vacuum_permittivity: float = 8.8541878128e-12  # F/m
    g_factor: float = 2.00231930436

    def __post_init__(self):
        for name in ("electron_charge_magnitude", "electron_mass", "hbar",
                     "vacuum_permittivity", "g_factor"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if not 2.0 <= self.g_factor <= 2.01:
            raise ValueError("g_factor must lie in [2.0, 2.01]")

    @property
    def charge_to_mass(self) -> float:
        return self.electron_charge_magnitude / self.electron_mass

    @property
    def coulomb_energy_m(self) -> float:
        """e^2 / (4 pi eps0), in J m."""
        return self.electron_charge_magnitude**2 / (4 * math.pi * self.vacuum_permittivity)


CODATA2018 = PhysicalConstants()
