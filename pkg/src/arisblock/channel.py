"""Link budgets for the reflected (source -> ARIS -> destination) and direct paths.

The reflected path uses the beam model of an RIS operating as a single
reflector: received power is the receive aperture times the power density
of a Gaussian-like beam launched from the surface,

    S_r = (2 P_t |R|^2 / (lambda Z_R))
          / sqrt((1 + d^2/Z_R^2) (1 + d^2/(Z_R^2 cos^4 theta)))
    Z_R = 4 k d_in^2 / G_t

where d is the surface-to-destination distance, theta the reflected
elevation from the surface normal and d_in the source-to-surface distance.
The direct path is free-space Friis.

Functions accept scalars or numpy arrays (the simulator evaluates many ARIS
altitudes at once).
"""
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, GeometryError

SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


def watts_to_dbm(p_w):
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(p_w) + 30.0


def dbm_to_watts(p_dbm):
    return 10.0 ** ((np.asarray(p_dbm, dtype=float) - 30.0) / 10.0)


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


@dataclass(frozen=True)
class RadioParams:
    tx_power_w: float = 1.0
    tx_gain_db: float = 45.0
    rx_gain_db: float = 20.0
    frequency_hz: float = 60e9
    reflection_amplitude: float = 0.9
    noise_power_dbm: float = -70.0
    # multiply the reflected power density by G_t as well (sensitivity switch)
    include_tx_gain_in_density: bool = False
    # direct-link distance exponent; 2 is free space
    path_loss_exponent: float = 2.0

    def __post_init__(self):
        if not self.tx_power_w > 0:
            raise ConfigurationError("must be > 0", field="radio.tx_power_w")
        if not self.frequency_hz > 0:
            raise ConfigurationError("must be > 0", field="radio.frequency_hz")
        if not 0 < self.reflection_amplitude <= 1:
            raise ConfigurationError("must lie in (0, 1]", field="radio.reflection_amplitude")
        if not self.path_loss_exponent > 0:
            raise ConfigurationError("must be > 0", field="radio.path_loss_exponent")

    @property
    def wavelength(self):
        return wavelength(self.frequency_hz)


@dataclass(frozen=True)
class ArisLinkInputs:
    d_s_aris: float
    d_aris_d: float
    theta_aris_d: float


@dataclass(frozen=True)
class LinkBudgetResult:
    rx_power: float
    rx_power_dbm: float
    snr_linear: float
    spectral_efficiency: float
    wavelength: float
    wavenumber: float
    rayleigh_length: float = float("nan")
    effective_aperture: float = float("nan")
    power_density: float = float("nan")


def wavelength(frequency):
    if np.any(np.asarray(frequency) <= 0):
        raise ConfigurationError("frequency must be positive", field="radio.frequency_hz")
    return _out(SPEED_OF_LIGHT / np.asarray(frequency, dtype=float))


def wavenumber(frequency):
    return _out(2.0 * np.pi / np.asarray(wavelength(frequency)))


def effective_aperture(rx_gain_db, wavelength):
    return _out(db_to_linear(rx_gain_db) * np.asarray(wavelength) ** 2 / (4.0 * np.pi))


def rayleigh_length(d_s_aris, tx_gain_db, frequency):
    d = np.asarray(d_s_aris, dtype=float)
    return _out(4.0 * wavenumber(frequency) * d * d / db_to_linear(tx_gain_db))


def aris_power_density(radio, inputs):
    theta = np.asarray(inputs.theta_aris_d, dtype=float)
    if np.any(theta >= np.pi / 2) or np.any(theta < 0):
        raise GeometryError("reflected elevation must lie in [0, pi/2)")
    d = np.asarray(inputs.d_aris_d, dtype=float)
    if np.any(d <= 0) or np.any(np.asarray(inputs.d_s_aris) <= 0):
        raise GeometryError("ARIS hop distances must be positive")
    zr = np.asarray(rayleigh_length(inputs.d_s_aris, radio.tx_gain_db, radio.frequency_hz))
    lam = radio.wavelength
    peak = 2.0 * radio.tx_power_w / (lam * zr) * radio.reflection_amplitude ** 2
    if radio.include_tx_gain_in_density:
        peak = peak * db_to_linear(radio.tx_gain_db)
    ratio = d * d / (zr * zr)
    spread = np.sqrt((1.0 + ratio) * (1.0 + ratio / np.cos(theta) ** 4))
    return _out(peak / spread)


def snr_and_se(rx_power, noise_dbm):
    snr = np.asarray(rx_power) / dbm_to_watts(noise_dbm)
    return _out(snr), _out(np.log2(1.0 + snr))


def aris_rx_power(radio, inputs):
    lam = radio.wavelength
    aperture = effective_aperture(radio.rx_gain_db, lam)
    density = aris_power_density(radio, inputs)
    p = aperture * density
    snr, se = snr_and_se(p, radio.noise_power_dbm)
    return LinkBudgetResult(
        rx_power=p,
        rx_power_dbm=_out(watts_to_dbm(p)),
        snr_linear=snr,
        spectral_efficiency=se,
        wavelength=lam,
        wavenumber=wavenumber(radio.frequency_hz),
        rayleigh_length=rayleigh_length(inputs.d_s_aris, radio.tx_gain_db, radio.frequency_hz),
        effective_aperture=aperture,
        power_density=density,
    )


def friis_rx_power(radio, distance):
    """Direct-path power: P_t G_t G_r (lambda / 4 pi)^2 / d^n, with n = 2 in free space."""
    d = np.asarray(distance, dtype=float)
    if np.any(d <= 0):
        raise GeometryError("direct link distance must be positive")
    lam = radio.wavelength
    gains = db_to_linear(radio.tx_gain_db) * db_to_linear(radio.rx_gain_db)
    p = _out(radio.tx_power_w * gains * (lam / (4.0 * np.pi)) ** 2 / d ** radio.path_loss_exponent)
    snr, se = snr_and_se(p, radio.noise_power_dbm)
    return LinkBudgetResult(
        rx_power=p,
        rx_power_dbm=_out(watts_to_dbm(p)),
        snr_linear=snr,
        spectral_efficiency=se,
        wavelength=lam,
        wavenumber=wavenumber(radio.frequency_hz),
    )


def apply_loss_and_se(budget, blockage_loss_db, noise_dbm):
    loss = np.asarray(blockage_loss_db, dtype=float)
    if np.any(loss < 0):
        raise ValueError("blockage loss must be non-negative")
    p = budget.rx_power if not np.any(loss) else _out(budget.rx_power * 10.0 ** (-loss / 10.0))
    snr, se = snr_and_se(p, noise_dbm)
    return replace(budget, rx_power=p, rx_power_dbm=_out(watts_to_dbm(p)),
                   snr_linear=snr, spectral_efficiency=se)
