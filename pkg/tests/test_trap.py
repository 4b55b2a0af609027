import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import minimize_scalar

from penning_nmr.errors import DomainError, InfeasibleError, NoTrapError
from penning_nmr.trap import (
    ElectrodeStack, anharmonicity, axial_potential, find_well, harmonicity_objective,
    optimize_harmonicity, potential_derivatives, quadrupole_axial_frequency,
)

MM = 1e-3
RADII = (1 * MM, 2 * MM, 3 * MM)
# Reference voltages for a positive-charge trap; an electron needs the signs flipped.
FIGURE_STACK = ElectrodeStack(RADII, (3.0, -10.0, 3.0))
ELECTRON_STACK = ElectrodeStack(RADII, (-3.0, 10.0, -3.0))
SEARCH = (0.05 * MM, 10 * MM)


def resum(stack, z):
    """Term-by-term evaluation, written independently of the library."""
    total = 0.0
    inner = 0.0
    for r, v in zip(stack.radii, stack.voltages):
        a = 1.0 if inner == 0.0 else z / math.sqrt(z * z + inner * inner)
        b = z / math.sqrt(z * z + r * r)
        total += v * (a - b)
        inner = r
    return total


def test_stack_validation():
    with pytest.raises(DomainError):
        ElectrodeStack((1e-3,), (1.0,))
    with pytest.raises(DomainError):
        ElectrodeStack((2e-3, 1e-3), (1.0, 1.0))
    with pytest.raises(DomainError):
        ElectrodeStack((1e-3, 2e-3), (1.0,))


def test_limit_at_surface_is_first_voltage():
    assert axial_potential(FIGURE_STACK, 1e-12) == pytest.approx(3.0, abs=1e-8)


def test_far_field_decays():
    z = 1e6 * RADII[-1]
    assert abs(axial_potential(FIGURE_STACK, z)) < 1e-5 * 10.0


def test_value_matches_high_precision_resummation():
    # 40-digit mpmath evaluation of the same sum
    expected = -1.327294711976178406146793
    got = axial_potential(FIGURE_STACK, 1 * MM)
    assert got == pytest.approx(expected, rel=1e-12)
    assert resum(FIGURE_STACK, 1 * MM) == pytest.approx(expected, rel=1e-12)


@pytest.mark.parametrize("z", [0.0, -1e-3])
def test_non_positive_height_rejected(z):
    with pytest.raises(DomainError):
        axial_potential(FIGURE_STACK, z)


voltages = st.lists(st.floats(-20, 20), min_size=3, max_size=3)
heights = st.floats(1e-6, 5e-2)


@settings(max_examples=100, derandomize=True)
@given(voltages, heights)
def test_linearity_in_voltages(v, z):
    s = ElectrodeStack(RADII, v)
    s2 = ElectrodeStack(RADII, [2 * x for x in v])
    assert axial_potential(s2, z) == pytest.approx(2 * axial_potential(s, z), rel=1e-12, abs=1e-300)


@settings(max_examples=100, derandomize=True)
@given(voltages, heights)
def test_additivity_over_electrodes(v, z):
    whole = axial_potential(ElectrodeStack(RADII, v), z)
    parts = 0.0
    for i in range(3):
        single = [0.0] * 3
        single[i] = v[i]
        parts += axial_potential(ElectrodeStack(RADII, single), z)
    assert whole == pytest.approx(parts, rel=1e-12, abs=1e-12 * max(map(abs, v), default=1))


def test_derivatives_match_finite_differences():
    z = 1.3 * MM
    d = potential_derivatives(ELECTRON_STACK, z, order=4)
    h1 = 1e-6 * z
    phi = lambda x: axial_potential(ELECTRON_STACK, x)
    fd1 = (phi(z + h1) - phi(z - h1)) / (2 * h1)
    fd2 = (phi(z + h1) - 2 * phi(z) + phi(z - h1)) / h1**2
    assert fd1 == pytest.approx(d[1], rel=1e-7)
    assert fd2 == pytest.approx(d[2], rel=1e-3)
    # higher orders: differentiate the analytic second derivative with a wider step
    h = 1e-4 * z
    phi2 = lambda x: potential_derivatives(ELECTRON_STACK, x, 2)[2]
    fd3 = (phi2(z + h) - phi2(z - h)) / (2 * h)
    fd4 = (phi2(z + h) - 2 * phi2(z) + phi2(z - h)) / h**2
    assert fd3 == pytest.approx(d[3], rel=1e-6)
    assert fd4 == pytest.approx(d[4], rel=1e-4)


def test_figure_voltages_do_not_trap_electrons():
    with pytest.raises(NoTrapError):
        find_well(FIGURE_STACK, SEARCH)


def test_electron_well_location_against_scan_oracle():
    # dense grid (1e5 points) + golden-section on U = -|e| phi
    U = lambda z: -axial_potential(ELECTRON_STACK, z)
    zs = np.linspace(*SEARCH, 100_000)
    k = int(np.argmin(U(zs)))
    oracle = minimize_scalar(U, bracket=(zs[k - 1], zs[k], zs[k + 1]), method="golden", tol=1e-12).x
    well = find_well(ELECTRON_STACK, SEARCH)
    assert well.z0 == pytest.approx(oracle, rel=1e-6)
    assert well.z0 == pytest.approx(1.2464702465932959e-3, rel=1e-6)
    assert 0.3 * RADII[0] <= well.z0 <= 3 * RADII[0]
    assert not well.ambiguous


def test_sign_reversed_stack_traps_positive_charge_at_same_height():
    w_e = find_well(ELECTRON_STACK, SEARCH)
    w_p = find_well(FIGURE_STACK, SEARCH, charge_sign=+1)
    assert w_p.z0 == pytest.approx(w_e.z0, rel=1e-12)
    assert w_p.omega_z == pytest.approx(w_e.omega_z, rel=1e-12)


def test_well_is_stationary_and_frequency_consistent():
    from penning_nmr.constants import CODATA2018 as k
    well = find_well(ELECTRON_STACK, SEARCH)
    _, d1, d2 = potential_derivatives(ELECTRON_STACK, well.z0, order=2)
    assert abs(d1) < 1e-9 * abs(d2) * well.z0
    assert well.omega_z == pytest.approx(math.sqrt(2 * k.charge_to_mass * abs(well.c2)), rel=1e-12)
    assert well.curvature == pytest.approx(d2, rel=1e-12)


def test_zero_voltages_have_no_trap():
    with pytest.raises(NoTrapError):
        find_well(ElectrodeStack(RADII, (0, 0, 0)), SEARCH)


def test_bad_search_interval():
    with pytest.raises(DomainError):
        find_well(ELECTRON_STACK, (2e-3, 1e-3))


def test_quadrupole_frequency_anchor():
    f = quadrupole_axial_frequency(0.01, 1e-3) / (2 * math.pi)
    assert f == pytest.approx(9.44e6, rel=2e-3)


# Near the onset of confinement the well is shallow and strongly anharmonic.
SHALLOW = ElectrodeStack(RADII, (-3.0, 3.5, -3.0))
BOUNDS = (0.0, 20.0)


def test_optimizer_beats_initial_by_factor_ten():
    f0 = harmonicity_objective(SHALLOW)
    # coarse grid oracle over the tunable voltage
    grid = np.linspace(*BOUNDS, 41)
    feasible = []
    for v in grid:
        try:
            feasible.append(harmonicity_objective(SHALLOW.with_voltages((-3.0, v, -3.0))))
        except NoTrapError:
            pass
    assert min(feasible) < f0 / 10
    out = optimize_harmonicity(SHALLOW, [1], BOUNDS)
    f1 = harmonicity_objective(out)
    assert f1 <= f0 / 10
    assert f1 <= min(feasible) * (1 + 1e-9)
    assert out.voltages[0] == -3.0 and out.voltages[2] == -3.0


def test_optimizer_fixed_point_and_determinism():
    once = optimize_harmonicity(SHALLOW, [1], BOUNDS)
    twice = optimize_harmonicity(once, [1], BOUNDS)
    f1, f2 = harmonicity_objective(once), harmonicity_objective(twice)
    assert abs(f2 - f1) < 1e-6 * f1
    assert optimize_harmonicity(SHALLOW, [1], BOUNDS) == once


def test_optimizer_never_worsens():
    for stack in (ELECTRON_STACK, SHALLOW):
        out = optimize_harmonicity(stack, [2], (-10.0, 10.0))
        assert harmonicity_objective(out) <= harmonicity_objective(stack)


def test_optimizer_infeasible_bounds():
    with pytest.raises(InfeasibleError):
        optimize_harmonicity(ELECTRON_STACK, [1], (-20.0, 0.0))


def test_optimizer_argument_checks():
    with pytest.raises(DomainError):
        optimize_harmonicity(ELECTRON_STACK, [], (0, 1))
    with pytest.raises(DomainError):
        optimize_harmonicity(ELECTRON_STACK, [1], (0, math.inf))


def test_anharmonicity_weights():
    well = find_well(ELECTRON_STACK, SEARCH)
    assert anharmonicity(well, 0, 0) == 0
    assert anharmonicity(well, 1, 1) == pytest.approx(
        anharmonicity(well, 1, 0) + anharmonicity(well, 0, 1))
