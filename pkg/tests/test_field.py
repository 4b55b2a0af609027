import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from penning_nmr.constants import CODATA2018 as K, PhysicalConstants
from penning_nmr.errors import DomainError, UnstableTrapError
from penning_nmr.field import (
    MagneticConfig, field_at_center, site_frequencies, z_dependent_frequencies,
)

TWO_PI = 2 * math.pi
CFG = MagneticConfig(B0=3.58, b=50.0)
WZ = TWO_PI * 10e6


def test_constants_invariants():
    with pytest.raises(ValueError):
        PhysicalConstants(g_factor=2.1)
    with pytest.raises(ValueError):
        PhysicalConstants(hbar=0.0)


def test_magnetic_config_validation():
    with pytest.raises(DomainError):
        MagneticConfig(0.0, 1.0)
    with pytest.raises(DomainError):
        MagneticConfig(1.0, -1.0)


def test_field_on_axis():
    assert field_at_center(CFG, 0.0) == 3.58


def test_field_off_axis_hand_value():
    # sqrt(3.58^2 + 0.25^2)
    assert field_at_center(CFG, 10e-3) == pytest.approx(3.588718434204612, rel=1e-14)
    assert field_at_center(CFG, -10e-3) == field_at_center(CFG, 10e-3)


def test_cyclotron_frequency_order():
    s = site_frequencies(CFG, 0.0, WZ)
    assert s.omega_c0 / TWO_PI == pytest.approx(100.2131137e9, rel=1e-8)
    assert s.omega_s0 == pytest.approx(K.g_factor * s.omega_c0 / 2, rel=1e-15)


def test_axial_amplitude_and_epsilon_hand_values():
    s = site_frequencies(CFG, 0.0, WZ)
    assert s.delta_z == pytest.approx(9.59817470342862e-07, rel=1e-12)
    assert s.epsilon == pytest.approx(0.1343384040893044, rel=1e-12)
    assert s.dz_omega_s * s.delta_z / WZ == pytest.approx(s.epsilon * K.g_factor / 2, rel=1e-12)
    assert s.omega_m0 == pytest.approx(WZ**2 / (2 * s.omega_c0), rel=1e-12)


def test_no_gradient():
    cfg = MagneticConfig(3.58, 0.0)
    a, b = site_frequencies(cfg, 0.0, WZ), site_frequencies(cfg, 5e-3, WZ)
    assert a.epsilon == 0.0
    assert a.omega_s0 == b.omega_s0


def test_unstable_trap():
    weak = MagneticConfig(1e-6, 0.0)
    with pytest.raises(UnstableTrapError):
        site_frequencies(weak, 0.0, WZ)
    with pytest.raises(UnstableTrapError):
        z_dependent_frequencies(weak, 0.0, WZ, 0.0)


def test_z_dependent_product_identity_no_gradient():
    cfg = MagneticConfig(3.58, 0.0)
    wc, wct, wm, wcp = z_dependent_frequencies(cfg, 0.0, WZ, 0.0)
    assert wm * wcp == pytest.approx(WZ**2 / 2, rel=1e-12)


def test_cyclotron_shift_at_height():
    wc0 = z_dependent_frequencies(CFG, 0.0, WZ, 0.0)[0]
    wc = z_dependent_frequencies(CFG, 0.0, WZ, 20e-6)[0]
    assert (wc - wc0) / TWO_PI == pytest.approx(27.99248987e6, rel=1e-6)


params = st.tuples(
    st.floats(0.1, 10.0),  # B0
    st.floats(0.0, 200.0),  # b
    st.floats(-2e-2, 2e-2),  # x0
    st.floats(1e6, 1e9).map(lambda f: TWO_PI * f),  # omega_z
    st.floats(-1e-4, 1e-4),  # z
)


@settings(max_examples=300, derandomize=True)
@given(params)
def test_invariance_and_sum_product_identities(p):
    B0, b, x0, wz, z = p
    wc, wct, wm, wcp = z_dependent_frequencies(MagneticConfig(B0, b), x0, wz, z)
    assert wcp**2 + wm**2 + wz**2 == pytest.approx(wc**2, rel=1e-12)
    assert wcp + wm == pytest.approx(wc, rel=1e-12)
    assert wcp * wm == pytest.approx(wz**2 / 2, rel=1e-12)


@settings(max_examples=100, derandomize=True)
@given(st.floats(-2e-2, 2e-2))
def test_outputs_even_in_x0(x0):
    a, b = site_frequencies(CFG, x0, WZ), site_frequencies(CFG, -x0, WZ)
    assert a.Bc == b.Bc and a.omega_s0 == b.omega_s0 and a.epsilon == b.epsilon


def test_epsilon_scaling():
    e1 = site_frequencies(CFG, 0, WZ).epsilon
    e2 = site_frequencies(MagneticConfig(3.58, 100.0), 0, WZ).epsilon
    e3 = site_frequencies(CFG, 0, 4 * WZ).epsilon
    assert e2 / e1 == pytest.approx(2.0, rel=1e-12)
    assert e3 / e1 == pytest.approx(4**-1.5, rel=1e-12)


def test_delta_z_independent_evaluation():
    s = site_frequencies(CFG, 0, WZ)
    expected = (K.hbar / 2 / K.electron_mass / WZ) ** 0.5
    assert s.delta_z == pytest.approx(expected, rel=1e-12)
