import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arisblock import channel
from arisblock.channel import ArisLinkInputs, RadioParams
from arisblock.errors import ConfigurationError, GeometryError

import oracles

RADIO = RadioParams()
LAM_60 = 299_792_458.0 / 60e9
SYM = math.sqrt(194.0)
SYM_INPUTS = ArisLinkInputs(SYM, SYM, math.acos(13.0 / SYM))


def test_wavelength_and_wavenumber_60ghz():
    assert channel.wavelength(60e9) == pytest.approx(4.9965e-3, rel=1e-4)
    assert channel.wavenumber(60e9) == pytest.approx(1257.5, rel=1e-4)


@pytest.mark.parametrize("f", [1e9, 28e9, 60e9, 3e11])
def test_wavelength_wavenumber_identity(f):
    assert channel.wavelength(f) * channel.wavenumber(f) == pytest.approx(2 * math.pi, rel=1e-15)


@pytest.mark.parametrize("f", [0.0, -1.0])
def test_non_positive_frequency(f):
    with pytest.raises(ConfigurationError):
        channel.wavelength(f)


def test_effective_aperture():
    assert channel.effective_aperture(20, LAM_60) == pytest.approx(1.986e-4, rel=1e-3)
    assert channel.effective_aperture(0, 2 * math.sqrt(math.pi)) == pytest.approx(1.0, rel=1e-15)
    assert channel.effective_aperture(7, 2 * LAM_60) == pytest.approx(
        4 * channel.effective_aperture(7, LAM_60), rel=1e-15)


def test_rayleigh_length():
    assert channel.rayleigh_length(13, 45, 60e9) == pytest.approx(26.88, rel=1e-3)
    assert channel.rayleigh_length(SYM, 45, 60e9) == pytest.approx(30.86, rel=1e-3)
    assert channel.rayleigh_length(26, 45, 60e9) == pytest.approx(
        4 * channel.rayleigh_length(13, 45, 60e9), rel=1e-14)


def test_power_density_symmetric_geometry():
    expected = oracles.aris_power_density(1, 45, 60e9, 0.9, SYM, SYM, math.acos(13 / SYM))
    assert expected == pytest.approx(8.50, abs=0.01)
    assert channel.aris_power_density(RADIO, SYM_INPUTS) == pytest.approx(expected, rel=1e-12)


def test_power_density_near_field_limit():
    zr = channel.rayleigh_length(SYM, 45, 60e9)
    peak = 2 * 1.0 * 0.9 ** 2 / (LAM_60 * zr)
    got = channel.aris_power_density(RADIO, ArisLinkInputs(SYM, 1e-9, 0.0))
    assert got == pytest.approx(peak, rel=1e-12)


def test_power_density_reflection_scaling():
    half = RadioParams(reflection_amplitude=0.45)
    assert channel.aris_power_density(half, SYM_INPUTS) == pytest.approx(
        channel.aris_power_density(RADIO, SYM_INPUTS) / 4, rel=1e-14)


def test_power_density_rejects_horizon():
    with pytest.raises(GeometryError):
        channel.aris_power_density(RADIO, ArisLinkInputs(10, 10, math.pi / 2))


def test_explicit_tx_gain_switch():
    boosted = RadioParams(include_tx_gain_in_density=True)
    ratio = channel.aris_power_density(boosted, SYM_INPUTS) / channel.aris_power_density(RADIO, SYM_INPUTS)
    assert ratio == pytest.approx(10 ** 4.5, rel=1e-12)


def test_aris_rx_power_symmetric():
    res = channel.aris_rx_power(RADIO, SYM_INPUTS)
    assert res.rx_power == pytest.approx(1.689e-3, rel=1e-3)
    assert res.spectral_efficiency == pytest.approx(24.0, abs=0.02)
    assert res.rx_power == res.effective_aperture * res.power_density
    assert res.rayleigh_length == pytest.approx(30.86, rel=1e-3)


def test_aris_rx_power_linear_in_tx_power():
    ten = RadioParams(tx_power_w=10.0)
    assert channel.aris_rx_power(ten, SYM_INPUTS).rx_power == pytest.approx(
        10 * channel.aris_rx_power(RADIO, SYM_INPUTS).rx_power, rel=1e-14)


def test_zero_power_gives_zero_se():
    budget = channel.aris_rx_power(RADIO, SYM_INPUTS)
    zero = channel.apply_loss_and_se(
        channel.LinkBudgetResult(0.0, -math.inf, 0.0, 0.0, LAM_60, 0.0), 0.0, -70)
    assert zero.rx_power == 0.0 and zero.spectral_efficiency == 0.0
    assert budget.spectral_efficiency > 0


def test_friis():
    res = channel.friis_rx_power(RADIO, 10.0)
    assert res.rx_power == pytest.approx(oracles.friis(1, 45, 20, 60e9, 10), rel=1e-12)
    assert res.rx_power == pytest.approx(4.9994e-3, rel=1e-4)
    assert res.spectral_efficiency == pytest.approx(25.6, abs=0.05)
    assert channel.friis_rx_power(RADIO, 20.0).rx_power == pytest.approx(res.rx_power / 4, rel=1e-14)
    iso = RadioParams(tx_gain_db=0.0, rx_gain_db=0.0)
    assert channel.friis_rx_power(iso, LAM_60 / (4 * math.pi)).rx_power == pytest.approx(1.0, rel=1e-14)
    with pytest.raises(GeometryError):
        channel.friis_rx_power(RADIO, 0.0)


def test_apply_loss():
    budget = channel.friis_rx_power(RADIO, 10.0)
    assert channel.apply_loss_and_se(budget, 0.0, -70) == budget
    assert channel.apply_loss_and_se(budget, 10.0, -70).rx_power == pytest.approx(
        budget.rx_power / 10, rel=1e-15)
    fixed = channel.LinkBudgetResult(1e-3, 0.0, 0.0, 0.0, LAM_60, 0.0)
    out = channel.apply_loss_and_se(fixed, 0.0, -70)
    assert out.snr_linear == pytest.approx(1e7, rel=1e-12)
    assert out.spectral_efficiency == pytest.approx(23.25, abs=0.005)
    with pytest.raises(ValueError):
        channel.apply_loss_and_se(budget, -1.0, -70)


radios = st.builds(
    RadioParams,
    tx_power_w=st.floats(1e-3, 10), tx_gain_db=st.floats(0, 50), rx_gain_db=st.floats(0, 30),
    frequency_hz=st.floats(1e9, 3e11), reflection_amplitude=st.floats(0.05, 1.0),
)


@settings(max_examples=100, deadline=None)
@given(radios, st.floats(0.5, 100), st.floats(0.5, 100), st.floats(0, 1.5))
def test_rx_power_is_aperture_times_density(radio, d_in, d_out, theta):
    inputs = ArisLinkInputs(d_in, d_out, theta)
    res = channel.aris_rx_power(radio, inputs)
    prod = channel.effective_aperture(radio.rx_gain_db, radio.wavelength) * channel.aris_power_density(radio, inputs)
    assert res.rx_power == pytest.approx(prod, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(1, 60), st.floats(1, 60), st.floats(0.01, 1.5), st.floats(1.01, 2.0))
def test_density_decreasing_in_distance_and_angle(d_in, d_out, theta, factor):
    base = channel.aris_power_density(RADIO, ArisLinkInputs(d_in, d_out, theta))
    farther = channel.aris_power_density(RADIO, ArisLinkInputs(d_in, d_out * factor, theta))
    steeper = channel.aris_power_density(
        RADIO, ArisLinkInputs(d_in, d_out, theta + (math.pi / 2 - theta) * (1 - 1 / factor)))
    assert farther < base
    assert steeper < base


@settings(max_examples=100, deadline=None)
@given(st.floats(1e-12, 10))
def test_dbm_round_trip(p):
    assert channel.dbm_to_watts(channel.watts_to_dbm(p)) == pytest.approx(p, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(1, 200), st.floats(0, 60), st.floats(0.01, 10))
def test_se_monotone(d, loss, extra):
    budget = channel.friis_rx_power(RADIO, d)
    a = channel.apply_loss_and_se(budget, loss, -70).spectral_efficiency
    b = channel.apply_loss_and_se(budget, loss + extra, -70).spectral_efficiency
    stronger = channel.apply_loss_and_se(channel.friis_rx_power(RADIO, d / 2), loss, -70)
    assert b < a
    assert stronger.spectral_efficiency > a


def test_array_inputs_match_scalar():
    d = np.array([10.0, 20.0, 30.0])
    got = channel.aris_power_density(RADIO, ArisLinkInputs(d, d, np.array([0.1, 0.5, 1.0])))
    want = [channel.aris_power_density(RADIO, ArisLinkInputs(x, x, t)) for x, t in zip(d, [0.1, 0.5, 1.0])]
    assert got == pytest.approx(want, rel=1e-15)
