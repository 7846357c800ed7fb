import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import gamma_hand, lande_gF
from shelltrap import constants as C
from shelltrap.core import (RB87, AtomSpecies, Manifold, RFTone, TrapConfig,
                            clock_manifolds, compute_gF, gamma, larmor, quadrupole_field,
                            require_trap)
from shelltrap.errors import ConfigError, DomainError, NoTrapError, NotTrappableError


def test_species_constants():
    assert RB87.gJ == 2.002331
    assert RB87.gI == -0.000995
    assert RB87.hfs_hz == pytest.approx(6.834682610904e9, rel=1e-12)
    assert RB87.mass == pytest.approx(1.44316e-25, rel=1e-5)
    # A_hfs (I + 1/2) = hbar omega_hfs
    assert RB87.hfs_constant * 2.0 == pytest.approx(C.HBAR * RB87.omega_hfs, rel=1e-15)


@pytest.mark.parametrize("F,expected", [(1, -0.5018), (2, 0.4998)])
def test_gF_four_decimals(F, expected):
    assert compute_gF(RB87, F) == pytest.approx(expected, abs=1e-4)
    assert compute_gF(RB87, F) == pytest.approx(lande_gF(F), rel=1e-14)


def test_gF_electron_only():
    sp = AtomSpecies.from_hfs_frequency("e", 1.5, 0.5, 2.0, 0.0, 1e9, 1e-25)
    assert compute_gF(sp, 2) == 0.5
    assert compute_gF(sp, 1) == -0.5


@pytest.mark.parametrize("F", [0, 3, 1.5])
def test_gF_invalid(F):
    with pytest.raises(DomainError):
        compute_gF(RB87, F)


def test_manifold_signs():
    m1, m2 = clock_manifolds()
    assert (m1.F, m1.mbar, m1.sign) == (1, -1, -1)
    assert (m2.F, m2.mbar, m2.sign) == (2, 1, 1)
    with pytest.raises(DomainError):
        Manifold.of(RB87, 1, 2)


@pytest.mark.parametrize("alpha,expected", [(70.0, 0.217), (45.0, 0.338)])
def test_gamma_examples(alpha, expected):
    cfg = TrapConfig.from_lab(alpha, 2e6, 1e5)
    g = gamma(cfg, cfg.manifold(1))
    assert g == pytest.approx(expected, abs=1e-3)
    assert g == pytest.approx(gamma_hand(alpha, abs(compute_gF(RB87, 1))), rel=1e-6)


def test_gamma_limit_and_errors():
    assert gamma(TrapConfig.from_lab(1e12, 2e6, 1e5), Manifold.of(RB87, 1, -1)) < 1e-10
    cfg = TrapConfig.from_lab(45.0, 2e6, 1e5)
    with pytest.raises(NotTrappableError):
        gamma(cfg, Manifold.of(RB87, 1, 1))
    with pytest.raises(NotTrappableError):
        gamma(cfg, Manifold.of(RB87, 2, 0))
    with pytest.raises(NoTrapError):
        require_trap(TrapConfig.from_lab(5.0, 2e6, 1e5), cfg.manifold(1))


def test_gamma_exactly_one_is_no_trap():
    m = clock_manifolds()[0]
    cfg = TrapConfig.from_lab(45.0, 2e6, 1e5)
    g_one = cfg.gravity / gamma(cfg, m)
    with pytest.raises(NoTrapError):
        require_trap(TrapConfig(cfg.alpha, cfg.tone1, gravity=g_one), m)


@given(st.floats(1.0, 1e3))
def test_gamma_scales_inverse_alpha(alpha):
    m = clock_manifolds()[0]
    g1 = gamma(TrapConfig.from_lab(alpha, 2e6, 1e5), m)
    g2 = gamma(TrapConfig.from_lab(2 * alpha, 2e6, 1e5), m)
    assert g2 == pytest.approx(g1 / 2, rel=1e-15)


def test_larmor_examples():
    cfg = TrapConfig.from_lab(50.0, 2.294336e6, 0.0)
    m1 = cfg.manifold(1)
    z = -3.266e-4 / (2 * cfg.alpha)  # |B| = 3.266 G on the axis
    assert larmor(cfg, m1, (0, 0, z)) / C.TWO_PI == pytest.approx(2.294e6, rel=1e-3)
    assert larmor(cfg, m1, (0, 0, 0)) == 0.0
    assert larmor(cfg, m1, (1e-4, 0, 0)) == larmor(cfg, m1, (0, 1e-4, 0))
    # |g_1| mu_B / h in MHz/G
    assert abs(m1.gF) * C.MU_B * C.GAUSS / C.H_PLANCK == pytest.approx(0.70233e6, rel=1e-4)


def test_quadrupole_field_and_bias():
    cfg = TrapConfig.from_lab(10.0, 2e6, 1e5, bias_G=2.0)
    a = cfg.alpha
    b = quadrupole_field(cfg, np.array([1e-3, 2e-3, 3e-3]))
    np.testing.assert_allclose(b, [a * 1e-3, a * 2e-3, -2 * a * 3e-3 + 2e-4])
    # the bias moves the zero to Bz / (2 alpha)
    assert np.all(quadrupole_field(cfg, (0, 0, cfg.center_z)) == pytest.approx(0, abs=1e-20))


@given(st.floats(1e-3, 1e9), st.floats(1e-3, 1e4), st.floats(1e-3, 1e3))
def test_unit_roundtrip(f, b, a):
    assert C.angular_to_hz(C.hz_to_angular(f)) == pytest.approx(f, rel=1e-12)
    assert C.tesla_to_gauss(C.gauss_to_tesla(b)) == pytest.approx(b, rel=1e-12)
    assert C.tesla_per_m_to_gauss_per_cm(C.gauss_per_cm_to_tesla_per_m(a)) == pytest.approx(a, rel=1e-12)
    cfg = TrapConfig.from_lab(a, f, 0.5 * f, bias_G=b)
    assert cfg.alpha_G_per_cm == pytest.approx(a, rel=1e-12)
    assert cfg.bias_G == pytest.approx(b, rel=1e-12)
    assert cfg.tone1.freq_hz == pytest.approx(f, rel=1e-12)


def test_tone_validation():
    with pytest.raises(DomainError):
        RFTone(0.0, 1.0)
    with pytest.raises(DomainError):
        RFTone(1.0, -1.0)
    with pytest.raises(DomainError):
        TrapConfig.from_lab(0.0, 2e6, 1e5)


def test_config_json_roundtrip():
    cfg = TrapConfig.from_lab(45.0, 2.294336e6, 250e3, 2.285238e6, 247e3, bias_G=1.5)
    back = TrapConfig.from_json(cfg.to_json())
    assert back == cfg
    d = json.loads(cfg.to_json())
    assert set(d) == {"species", "alpha_G_per_cm", "bias_G", "gravity_m_s2", "tone1", "tone2"}
    assert d["tone1"] == {"freq_Hz": pytest.approx(2.294336e6), "rabi_Hz": pytest.approx(250e3)}


def test_config_custom_species_roundtrip(symmetric_species):
    cfg = TrapConfig.from_lab(45.0, 2e6, 1e5, species=symmetric_species)
    assert TrapConfig.from_json(cfg.to_json()).species == symmetric_species


@pytest.mark.parametrize("doc", [
    '{"alpha_G_per_cm": 45, "tone1": {"freq_Hz": 2e6, "rabi_Hz": 1e5}, "colour": 1}',
    '{"tone1": {"freq_Hz": 2e6, "rabi_Hz": 1e5}}',
    '{"alpha_G_per_cm": 45, "tone1": {"freq_Hz": 2e6}}',
    '{"alpha_G_per_cm": 45, "tone1": {"freq_Hz": 2e6, "rabi_Hz": 1e5, "phase": 0}}',
    '{"alpha_G_per_cm": "45", "tone1": {"freq_Hz": 2e6, "rabi_Hz": 1e5}}',
    '{"alpha_G_per_cm": 45, "species": "Na23", "tone1": {"freq_Hz": 2e6, "rabi_Hz": 1e5}}',
    '{"alpha_G_per_cm": -1, "tone1": {"freq_Hz": 2e6, "rabi_Hz": 1e5}}',
    '[1, 2]',
    '{not json',
])
def test_config_strict_parsing(doc):
    with pytest.raises(ConfigError):
        TrapConfig.from_json(doc)


def test_config_is_immutable(cfg45):
    with pytest.raises(Exception):
        cfg45.alpha = 1.0
    assert cfg45.with_alpha(2.0).alpha == 2.0 and cfg45.alpha != 2.0
    assert math.isclose(cfg45.with_bias(1e-4).bias_G, 1.0)
