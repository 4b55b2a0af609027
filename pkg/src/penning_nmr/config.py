"""Device configuration: JSON schema, defaults and assembly of the physics objects.

Every section is optional; omitted values fall back to the canonical
ten-electron device (B0 = 3.58 T, b = 50 T/m, 1 mm pitch, omega_z/2pi = 10 MHz,
chi/2pi = 10 kHz). Unknown keys are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
import json
import math
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .constants import CODATA2018, PhysicalConstants
from .errors import ConfigError, DomainError
from .field import MagneticConfig, SiteFrequencies, site_frequencies
from .molecule import ArrayLayout, MoleculeSpec, build_molecule
from .trap import AxialWell, ElectrodeStack, default_search, find_well
from .validity import Detection, ValidityReport, validity_report

MM = 1e-3
TWO_PI = 2 * math.pi


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class MagneticSection(_Section):
    B0_tesla: float = Field(3.58, gt=0)
    gradient_tesla_per_m: float = Field(50.0, ge=0)


class ArraySection(_Section):
    site_positions_mm: Optional[list[float]] = None
    spacing_mm: Optional[float] = Field(None, gt=0)
    count: Optional[int] = Field(None, ge=1)
    origin_mm: Optional[float] = None

    @model_validator(mode="after")
    def _one_layout(self):
        explicit = self.site_positions_mm is not None
        spaced = self.spacing_mm is not None or self.count is not None or self.origin_mm is not None
        if explicit and spaced:
            raise ValueError("give either site_positions_mm or spacing_mm + count, not both")
        if not explicit and (self.spacing_mm is None) != (self.count is None):
            raise ValueError("spacing_mm and count must be given together")
        return self

    def layout(self) -> ArrayLayout:
        if self.site_positions_mm is not None:
            return ArrayLayout(tuple(x * MM for x in self.site_positions_mm))
        if self.spacing_mm is None:
            # canonical: 10 sites, 1 mm pitch, straddling the gradient axis off-centre
            return ArrayLayout.equally_spaced(10, 1 * MM, -4.25 * MM)
        origin = 0.0 if self.origin_mm is None else self.origin_mm
        return ArrayLayout.equally_spaced(self.count, self.spacing_mm * MM, origin * MM)


class StackSection(_Section):
    radii_mm: list[float]
    voltages_v: list[float]

    def stack(self) -> ElectrodeStack:
        return ElectrodeStack(tuple(r * MM for r in self.radii_mm), tuple(self.voltages_v))


class AxialSection(_Section):
    omega_z_mhz: Optional[float] = Field(None, gt=0)
    stack: Optional[StackSection] = None
    search_mm: Optional[tuple[float, float]] = None

    @model_validator(mode="after")
    def _one_source(self):
        if self.omega_z_mhz is not None and self.stack is not None:
            raise ValueError("give either omega_z_mhz or stack, not both")
        if self.search_mm is not None and self.stack is None:
            raise ValueError("search_mm only applies to an electrode stack")
        return self

    def search(self):
        return None if self.search_mm is None else tuple(x * MM for x in self.search_mm)


class PulsesSection(_Section):
    chi_hz: float = Field(1e4, gt=0)


class DetectionSection(_Section):
    spin_shift_hz: float = Field(10.0, gt=0)
    dip_width_hz: float = Field(10.0, gt=0)
    peak_width_hz: float = Field(1000.0, gt=0)


class ThresholdsSection(_Section):
    validity_ratio: float = Field(0.1, gt=0)
    coupling_cutoff_hz: Optional[float] = Field(None, gt=0)


class OptimizeSection(_Section):
    tunable: list[int] = Field(min_length=1)
    bounds_v: tuple[float, float]
    weights: tuple[float, float] = (1.0, 1.0)


class ValidationSection(_Section):
    xi: float
    epsilon: float
    g: float = 2.0
    n_max: int = 10
    spin_splittings: tuple[float, float] = (10.0, 10.5)


class DeviceConfig(_Section):
    magnetic: MagneticSection = MagneticSection()
    array: ArraySection = ArraySection()
    axial: AxialSection = AxialSection()
    pulses: PulsesSection = PulsesSection()
    detection: DetectionSection = DetectionSection()
    thresholds: ThresholdsSection = ThresholdsSection()
    optimize: Optional[OptimizeSection] = None
    validation: Optional[ValidationSection] = None


def load_config(path=None) -> DeviceConfig:
    """Read a JSON config; ``None`` gives the packaged canonical device."""
    try:
        if path is None:
            text = resources.files("penning_nmr").joinpath("data/canonical.json").read_text()
        else:
            text = Path(path).read_text()
        return DeviceConfig.model_validate(json.loads(text))
    except (OSError, json.JSONDecodeError, ValidationError) as exc:
        raise ConfigError(f"cannot load config {path or '<canonical>'}: {exc}") from exc


@dataclass(frozen=True)
class Device:
    magnetic: MagneticConfig
    layout: ArrayLayout
    omega_z: float
    chi: float
    detection: Detection
    threshold: float
    cutoff: float | None
    well: AxialWell | None = None
    k: PhysicalConstants = CODATA2018

    @classmethod
    def from_config(cls, cfg: DeviceConfig, k: PhysicalConstants = CODATA2018) -> "Device":
        try:
            magnetic = MagneticConfig(cfg.magnetic.B0_tesla, cfg.magnetic.gradient_tesla_per_m)
            layout = cfg.array.layout()
            well = None
            if cfg.axial.stack is not None:
                stack = cfg.axial.stack.stack()
                well = find_well(stack, cfg.axial.search() or default_search(stack), k=k)
                omega_z = well.omega_z
            else:
                omega_z = TWO_PI * 1e6 * (cfg.axial.omega_z_mhz or 10.0)
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        d = cfg.detection
        return cls(magnetic=magnetic, layout=layout, omega_z=omega_z,
                   chi=TWO_PI * cfg.pulses.chi_hz,
                   detection=Detection(d.spin_shift_hz, d.dip_width_hz, d.peak_width_hz),
                   threshold=cfg.thresholds.validity_ratio,
                   cutoff=cfg.thresholds.coupling_cutoff_hz, well=well, k=k)

    def sites(self) -> list[SiteFrequencies]:
        return [site_frequencies(self.magnetic, x, self.omega_z, self.k)
                for x in self.layout.positions]

    def molecule(self) -> MoleculeSpec:
        return build_molecule(self.layout, self.magnetic, self.omega_z, self.k)

    def validity(self, molecule: MoleculeSpec | None = None) -> ValidityReport:
        mol = molecule or self.molecule()
        return validity_report(self.magnetic, self.layout, self.omega_z, mol, self.chi,
                               self.detection, self.threshold, self.k)
