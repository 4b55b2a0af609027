"""Regime-of-validity checks for a configured electron array.

Every approximation behind the effective spin Hamiltonian is an inequality
``left << right``. Each check reports both sides, their ratio and whether
the ratio is below its threshold. Failures are reported, never raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field, asdict
import math

import numpy as np

from .constants import CODATA2018, PhysicalConstants
from .field import MagneticConfig, site_frequencies
from .molecule import ArrayLayout, MoleculeSpec

DEFAULT_THRESHOLD = 0.1
#: Two equal Lorentzian dips merge once their separation drops below FWHM / sqrt(3).
SPARROW_LORENTZ = math.sqrt(3.0)


@dataclass(frozen=True)
class Detection:
    spin_shift_hz: float = 10.0
    dip_width_hz: float = 10.0
    peak_width_hz: float = 1000.0


@dataclass(frozen=True)
class ValidityCheck:
    name: str
    left: float
    right: float | None
    ratio: float
    threshold: float
    passed: bool
    description: str


@dataclass
class ValidityReport:
    checks: list = field(default_factory=list)

    def add(self, name, left, right, threshold, description):
        if right is None:
            ratio = 0.0
        elif right == 0:
            ratio = 0.0 if left == 0 else math.inf
        else:
            ratio = left / right
        self.checks.append(ValidityCheck(name, float(left), None if right is None else float(right),
                                         float(ratio), float(threshold), bool(ratio < threshold),
                                         description))

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __getitem__(self, name) -> ValidityCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        def clean(v):
            return v if v is None or isinstance(v, (str, bool)) or math.isfinite(v) else None
        return {"passed": self.passed,
                "checks": [{k: clean(v) for k, v in asdict(c).items()} for c in self.checks]}


def validity_report(cfg: MagneticConfig, layout: ArrayLayout, omega_z: float,
                    molecule: MoleculeSpec, chi: float, detection: Detection = Detection(),
                    threshold: float = DEFAULT_THRESHOLD,
                    k: PhysicalConstants = CODATA2018) -> ValidityReport:
    """Evaluate all approximation inequalities. ``chi`` is the Rabi frequency in rad/s."""
    rep = ValidityReport()
    x = np.abs(np.asarray(layout.positions))
    sites = [site_frequencies(cfg, xi, omega_z, k) for xi in layout.positions]
    eps = sites[0].epsilon
    g = k.g_factor

    rep.add("gradient_tilt", cfg.b * x.max() / 2, cfg.B0, threshold,
            "b|x0|/2 << B0 (rotated-frame field expansion)")
    rep.add("axial_vs_cyclotron", omega_z, min(s.omega_c0 for s in sites), threshold,
            "omega_z << omega_c0")
    xi_max = float(molecule.xi.max()) if molecule.n > 1 else 0.0
    rep.add("coulomb_vs_axial", xi_max, omega_z, threshold,
            "xi_ij << omega_z (weak axial-axial coupling)")
    rep.add("higher_order_coupling", eps**2 * xi_max**3 / omega_z**2,
            g * g / 4 * eps**2 * xi_max if xi_max else None, threshold,
            "neglected coupling correction eps^2 xi^3/omega_z^2 << leading g^2 eps^2 xi/4")
    J_max = float(molecule.J.max()) if molecule.n > 1 else 0.0
    rep.add("coupling_vs_rabi", J_max, chi / (2 * math.pi), threshold,
            "J_ij << chi (couplings negligible during pulses)")
    drive = 2 * chi / (g * k.charge_to_mass)
    gap = layout.min_gap
    rep.add("drive_vs_gradient", drive, cfg.b * gap if math.isfinite(gap) else None, threshold,
            "B_d << b d_ij (selective addressing)")
    if molecule.n > 1:
        w = np.sort(np.asarray(molecule.spin_freqs))
        detuning = float(np.min(np.diff(w)))
    else:
        detuning = None
    rep.add("rabi_vs_detuning", chi, detuning, threshold,
            "chi << min |omega_s0,i - omega_s0,j| (no spectral crowding)")
    rep.add("detection_shift_in_peak", detection.spin_shift_hz, detection.peak_width_hz,
            threshold, "spin-dependent dip shift well inside the tank-circuit peak")
    rep.add("detection_dip_in_peak", detection.dip_width_hz, detection.peak_width_hz,
            threshold, "dip linewidth narrow compared to the tank-circuit peak")
    rep.add("detection_dip_resolved", detection.dip_width_hz, detection.spin_shift_hz,
            SPARROW_LORENTZ, "dip shift resolvable: linewidth / shift below the Sparrow limit")
    return rep
