"""Knife-edge screen attenuation of links by human bodies.

Each body is a finite vertical screen with four diffracting edges. Every
edge contributes a knife-edge factor

    F = atan(+/- (pi/2) * sqrt((pi/lambda) * (D1 + D2 - r))) / pi

(positive sign when the direct ray lies on the screen side of the edge)
and a screen attenuates the field by ``1 - (F_top + F_bottom)(F_side- + F_side+)``.
Losses of several screens on one link add in dB.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import geometry
from .errors import ConfigurationError, GeometryError

KNIFE_EDGE = "knife_edge"
FIXED_LOSS = "fixed_loss"
DETOUR_TOL = 1e-12


@dataclass(frozen=True)
class BlockageModelParams:
    mode: str = KNIFE_EDGE
    fixed_loss_db: float = 30.0
    # per-blocker losses are clamped from below at this value
    loss_floor_db: float = 0.0

    def __post_init__(self):
        if self.mode not in (KNIFE_EDGE, FIXED_LOSS):
            raise ConfigurationError(f"unknown blockage mode {self.mode!r}", field="blockage.mode")
        if self.fixed_loss_db < 0:
            raise ConfigurationError("must be >= 0", field="blockage.fixed_loss_db")
        if self.loss_floor_db < 0:
            raise ConfigurationError("must be >= 0", field="blockage.loss_floor_db")


@dataclass(frozen=True)
class LinkBlockageResult:
    shadowed: bool
    total_loss_db: float
    shadowing_blocker_count: int


def edge_diffraction_factor(d1, d2, r, wavelength, shadowed):
    """Knife-edge factor F in (-1/2, 1/2); works elementwise on arrays."""
    detour = np.asarray(d1) + np.asarray(d2) - np.asarray(r)
    if np.any(detour < -DETOUR_TOL):
        raise GeometryError(f"edge path shorter than the direct path by {-np.min(detour):.3e} m")
    detour = np.maximum(detour, 0.0)
    v = (np.pi / 2.0) * np.sqrt((np.pi / wavelength) * detour)
    f = np.arctan(np.where(shadowed, v, -v)) / np.pi
    return float(f) if np.ndim(f) == 0 else f


def screen_losses(run, t, lateral, za, zb, height, half_width, wavelength, params):
    """Per-screen loss (dB) and shadowed flag for broadcast arrays of crossings."""
    r, z0, d1, d2, sh = geometry.edge_paths(run, t, lateral, za, zb, height, half_width)
    shadowed = z0 < height
    if params.mode == FIXED_LOSS:
        loss = np.where(shadowed, params.fixed_loss_db, 0.0)
        return loss, shadowed
    f = {n: edge_diffraction_factor(d1[n], d2[n], r, wavelength, sh[n]) for n in geometry.EDGE_NAMES}
    transmission = 1.0 - (f["top"] + f["bottom"]) * (f["side_minus"] + f["side_plus"])
    with np.errstate(divide="ignore"):
        loss = -20.0 * np.log10(transmission)
    return np.maximum(loss, params.loss_floor_db), shadowed


def blocker_loss_db(link, blocker, wavelength, params=BlockageModelParams()):
    info = geometry.intersect_link_screen(link, blocker)
    if info is None:
        return 0.0
    loss, _ = screen_losses(
        link.horizontal_length, info.t, info.lateral,
        link.endpoint_a.z, link.endpoint_b.z,
        blocker.height, blocker.width / 2.0, wavelength, params,
    )
    return float(loss)


def link_blockage(link, blockers, wavelength, params=BlockageModelParams()):
    """Aggregate the effect of ``blockers`` on ``link``.

    Per-blocker dB losses are added with ``math.fsum`` (exactly rounded), so
    the result does not depend on the order of ``blockers``.
    """
    losses = [blocker_loss_db(link, b, wavelength, params) for b in blockers]
    count = sum(geometry.is_los_shadowed(link, b) for b in blockers)
    return LinkBlockageResult(count > 0, math.fsum(losses), int(count))
