"""On-axis electrostatics of a planar stack of concentric ring electrodes.

The potential on the symmetry axis of adjacent rings (a central disc of
radius R_1 followed by annuli R_{i-1} < rho < R_i) at height z is

    phi(z) = sum_i V_i * (f(z, R_{i-1}) - f(z, R_i)),    f(z, R) = z / sqrt(z^2 + R^2)

with R_0 = 0, so the disc term starts at f(z, 0) = 1.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
import logging
import math

import numpy as np
from scipy import optimize

from .constants import CODATA2018, PhysicalConstants
from .errors import DomainError, InfeasibleError, NoTrapError

logger = logging.getLogger(__name__)

ELECTRON = -1


@dataclass(frozen=True)
class ElectrodeStack:
    """Outer radii (m) and voltages (V) of concentric planar electrodes."""

    radii: tuple
    voltages: tuple

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        voltages = tuple(float(v) for v in self.voltages)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "voltages", voltages)
        if len(radii) != len(voltages):
            raise DomainError("radii and voltages must have the same length")
        if len(radii) < 2:
            raise DomainError("an electrode stack needs at least 2 electrodes")
        if radii[0] <= 0 or any(b <= a for a, b in zip(radii, radii[1:])):
            raise DomainError("radii must be positive and strictly increasing")
        if not all(math.isfinite(v) for v in voltages):
            raise DomainError("voltages must be finite")

    @property
    def inner_radii(self) -> np.ndarray:
        return np.concatenate(([0.0], self.radii[:-1]))

    def with_voltages(self, voltages) -> "ElectrodeStack":
        return replace(self, voltages=tuple(voltages))


@dataclass(frozen=True)
class AxialWell:
    """Confining stationary point of the particle's potential energy.

    ``c2``, ``c3``, ``c4`` are Taylor coefficients of phi about ``z0``
    (phi^(n)(z0) / n!), ``omega_z`` the small-oscillation axial frequency.
    ``ambiguous`` is set when more than one confining minimum was found.
    """

    z0: float
    c2: float
    c3: float
    c4: float
    omega_z: float
    ambiguous: bool = False

    @property
    def curvature(self) -> float:
        """phi''(z0) in V/m^2."""
        return 2.0 * self.c2


def _check_z(z):
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0)):
        raise DomainError("the on-axis potential is defined for z > 0 only")
    return z


def _disc_derivatives(z, R, order):
    """d^n/dz^n of z / sqrt(z^2 + R^2) for n = 0..order."""
    R2 = R * R
    s2 = z * z + R2
    s = np.sqrt(s2)
    out = [z / s]
    if order >= 1:
        out.append(R2 / (s2 * s))
    if order >= 2:
        out.append(-3.0 * R2 * z / (s2 * s2 * s))
    if order >= 3:
        out.append(3.0 * R2 * (4.0 * z * z - R2) / (s2**3 * s))
    if order >= 4:
        out.append(15.0 * R2 * z * (3.0 * R2 - 4.0 * z * z) / (s2**4 * s))
    return out


def potential_derivatives(stack: ElectrodeStack, z, order: int = 4) -> list:
    """Return [phi, phi', ..., phi^(order)] at ``z`` from closed-form derivatives."""
    if not 0 <= order <= 4:
        raise ValueError("order must be between 0 and 4")
    z = _check_z(z)
    total = [np.zeros_like(z) for _ in range(order + 1)]
    for v, r_in, r_out in zip(stack.voltages, stack.inner_radii, stack.radii):
        if v == 0.0:
            continue
        inner = _disc_derivatives(z, r_in, order)
        outer = _disc_derivatives(z, r_out, order)
        for n in range(order + 1):
            total[n] = total[n] + v * (inner[n] - outer[n])
    if total[0].ndim == 0:
        return [float(t) for t in total]
    return total


def axial_potential(stack: ElectrodeStack, z):
    """Electrostatic potential (V) on the trap axis at height ``z`` > 0 (m)."""
    return potential_derivatives(stack, z, order=0)[0]


def _polish(stack, z, lo, hi, tol):
    # Newton steps on phi' using the analytic phi''; stay inside the bracket
    for _ in range(4):
        _, d1, d2 = potential_derivatives(stack, z, order=2)
        if d2 == 0.0:
            break
        step = d1 / d2
        z_new = z - step
        if not lo <= z_new <= hi:
            break
        z = z_new
        if abs(step) < tol:
            break
    return z


def stationary_points(stack: ElectrodeStack, z_search, n_grid: int = 4000) -> list:
    """All zeros of phi' inside ``z_search`` (bracket scan + Brent + Newton)."""
    lo, hi = (float(x) for x in z_search)
    if not 0 < lo < hi:
        raise DomainError("search interval must be positive and ordered")
    tol = 1e-12 * stack.radii[0]
    grid = np.geomspace(lo, hi, n_grid)
    d1 = potential_derivatives(stack, grid, order=1)[1]
    scale = np.max(np.abs(d1))
    if scale == 0.0:
        return []
    sign = np.sign(d1)
    roots = []
    for k in range(len(grid) - 1):
        if sign[k] == 0.0:
            roots.append(float(grid[k]))
        elif sign[k] * sign[k + 1] < 0:
            a, b = float(grid[k]), float(grid[k + 1])
            z = optimize.brentq(lambda x: potential_derivatives(stack, x, 1)[1],
                                a, b, xtol=tol, rtol=4 * np.finfo(float).eps)
            roots.append(_polish(stack, z, a, b, tol))
    if sign[-1] == 0.0:
        roots.append(float(grid[-1]))
    return roots


def find_well(stack: ElectrodeStack, z_search, charge_sign: int = ELECTRON,
              k: PhysicalConstants = CODATA2018) -> AxialWell:
    """Locate the confining axial well for a particle of charge ``charge_sign * |e|``.

    The potential energy is U = charge_sign * |e| * phi; a well is a
    stationary point with U'' > 0. If several exist, the deepest is returned
    with ``ambiguous=True``.
    """
    if charge_sign not in (-1, 1):
        raise ValueError("charge_sign must be -1 or +1")
    wells = []
    for z0 in stationary_points(stack, z_search):
        phi, _, d2, d3, d4 = potential_derivatives(stack, z0, order=4)
        if charge_sign * d2 > 0:
            wells.append((charge_sign * phi, z0, d2, d3, d4))
    if not wells:
        raise NoTrapError(
            f"no confining stationary point for charge sign {charge_sign:+d} "
            f"in z in [{z_search[0]:.3g}, {z_search[1]:.3g}] m")
    wells.sort()
    if len(wells) > 1:
        logger.warning("%d confining minima found; returning the deepest", len(wells))
    _, z0, d2, d3, d4 = wells[0]
    omega_z = math.sqrt(k.charge_to_mass * abs(d2))
    return AxialWell(z0=z0, c2=d2 / 2, c3=d3 / 6, c4=d4 / 24, omega_z=omega_z,
                     ambiguous=len(wells) > 1)


def quadrupole_axial_frequency(v0: float, ell: float,
                               k: PhysicalConstants = CODATA2018) -> float:
    """omega_z = sqrt(2 |e| V0 / (m_e ell^2)) for an ideal quadrupole (rad/s)."""
    if v0 <= 0 or ell <= 0:
        raise DomainError("V0 and ell must be positive")
    return math.sqrt(2 * k.charge_to_mass * v0 / ell**2)


def anharmonicity(well: AxialWell, w3: float = 1.0, w4: float = 1.0) -> float:
    """Weighted squared relative cubic and quartic corrections over 0.1 * z0."""
    dz = 0.1 * well.z0
    r3 = well.c3 * dz / well.c2
    r4 = well.c4 * dz**2 / well.c2
    return w3 * r3**2 + w4 * r4**2


def default_search(stack: ElectrodeStack) -> tuple:
    return (0.01 * stack.radii[0], 10.0 * stack.radii[-1])


def harmonicity_objective(stack, z_search=None, weights=(1.0, 1.0),
                          charge_sign=ELECTRON, k=CODATA2018) -> float:
    """Anharmonicity of the confining well; raises NoTrapError if none."""
    z_search = z_search or default_search(stack)
    well = find_well(stack, z_search, charge_sign, k)
    return anharmonicity(well, *weights)


def optimize_harmonicity(stack: ElectrodeStack, tunable_indices, bounds,
                         z_search=None, weights=(1.0, 1.0), charge_sign=ELECTRON,
                         k: PhysicalConstants = CODATA2018, max_iter: int = 500,
                         xatol: float = 1e-9, fatol: float = 1e-14) -> ElectrodeStack:
    """Tune the selected voltages to minimise the anharmonicity objective.

    Bounded Nelder-Mead with a fixed initial simplex (5% of the bound span
    per tunable voltage), restarted once from the best point. Candidates
    without a confining well are rejected. The input is returned unchanged
    if nothing better is found.
    """
    idx = [int(i) for i in tunable_indices]
    if not idx:
        raise DomainError("at least one tunable voltage is required")
    if len(set(idx)) != len(idx) or not all(0 <= i < len(stack.voltages) for i in idx):
        raise DomainError("tunable indices must be distinct and valid")
    lo, hi = (float(b) for b in bounds)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError("bounds must be finite and ordered")
    z_search = z_search or default_search(stack)
    penalty = 1e30

    def build(x):
        v = list(stack.voltages)
        for i, val in zip(idx, x):
            v[i] = float(val)
        return stack.with_voltages(v)

    def objective(x):
        if np.any(x < lo) or np.any(x > hi):
            return penalty
        try:
            return harmonicity_objective(build(x), z_search, weights, charge_sign, k)
        except NoTrapError:
            return penalty

    x_in = np.array([stack.voltages[i] for i in idx])
    f_in = objective(x_in) if np.all((x_in >= lo) & (x_in <= hi)) else penalty
    x0 = np.clip(x_in, lo, hi)
    f0 = objective(x0)
    if f0 >= penalty:
        # coarse deterministic scan for a feasible starting point
        axes = [np.linspace(lo, hi, 9)] * len(idx)
        points = np.array(np.meshgrid(*axes, indexing="ij")).reshape(len(idx), -1).T
        values = [objective(p) for p in points[:4096]]
        best = int(np.argmin(values))
        if values[best] >= penalty:
            raise InfeasibleError("no confining well for any voltages within bounds")
        x0, f0 = points[best], values[best]

    span = hi - lo
    bounds_list = [(lo, hi)] * len(idx)

    def simplex(x):
        pts = [x.copy()]
        for d in range(len(x)):
            p = x.copy()
            step = 0.05 * span
            p[d] = p[d] + step if p[d] + step <= hi else p[d] - step
            pts.append(p)
        return np.array(pts)

    x_best, f_best = x0, f0
    for _ in range(2):
        res = optimize.minimize(objective, x_best, method="Nelder-Mead", bounds=bounds_list,
                                options={"initial_simplex": simplex(x_best), "maxiter": max_iter,
                                         "xatol": xatol, "fatol": fatol})
        if res.fun < f_best:
            x_best, f_best = np.asarray(res.x, dtype=float), float(res.fun)
    if f_best >= f_in:
        return stack
    logger.info("harmonicity objective %.3e -> %.3e", f_in, f_best)
    return build(x_best)
