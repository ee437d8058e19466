"""Placement sampling and link/screen intersection geometry.

Coordinates are meters in a right-handed frame with the ground at z = 0.
Human bodies are modelled as thin vertical screens that always face the
link being evaluated: the screen plane is perpendicular to the horizontal
projection of the link and is centered on the body's base point.

The scalar functions (``make_link``, ``intersect_link_screen`` ...) are the
public surface; ``crossing_candidates`` and ``edge_paths`` are the
vectorised kernels the simulation runs on. Both routes share the same
formulas.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, GeometryError

EDGE_NAMES = ("top", "bottom", "side_minus", "side_plus")


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Area:
    """Rectangular service area spanning [0, width] x [0, depth]."""

    width: float = 50.0
    depth: float = 50.0

    def __post_init__(self):
        if not (self.width > 0 and self.depth > 0):
            raise ConfigurationError(
                f"area extent must be positive, got {self.width} x {self.depth}", field="area"
            )

    @property
    def size(self):
        return self.width * self.depth

    @property
    def center(self):
        return (self.width / 2.0, self.depth / 2.0)

    def contains(self, x, y):
        return 0.0 <= x <= self.width and 0.0 <= y <= self.depth


@dataclass(frozen=True)
class Blocker:
    """A standing human body: base point plus height, screen width and depth.

    ``depth`` is carried for completeness; the thin-screen model ignores it.
    """

    base_center: Point3
    height: float = 1.75
    width: float = 0.5
    depth: float = 0.2

    def __post_init__(self):
        if not (self.height > 0 and self.width > 0 and self.depth >= 0):
            raise ConfigurationError("blocker dimensions must be positive", field="blocker_dims")


@dataclass(frozen=True)
class LinkGeometry:
    endpoint_a: Point3
    endpoint_b: Point3
    length: float
    theta: float
    phi: float

    @property
    def horizontal_length(self):
        return float(np.hypot(self.endpoint_b.x - self.endpoint_a.x,
                              self.endpoint_b.y - self.endpoint_a.y))


@dataclass(frozen=True)
class Screen:
    """Vertical rectangle: centered at (cx, cy), normal (nx, ny) in the ground plane."""

    cx: float
    cy: float
    nx: float
    ny: float
    width: float
    height: float

    @property
    def tangent(self):
        return (-self.ny, self.nx)

    def edge_endpoints(self):
        """Ground-level endpoints of the footprint segment (minus side first)."""
        tx, ty = self.tangent
        hw = self.width / 2.0
        return ((self.cx - hw * tx, self.cy - hw * ty),
                (self.cx + hw * tx, self.cy + hw * ty))


@dataclass(frozen=True)
class EdgePath:
    d1: float
    d2: float
    shadowed: bool

    @property
    def detour(self):
        return self.d1 + self.d2


@dataclass(frozen=True)
class CrossingInfo:
    crossing_height: float
    direct_distance: float
    # fraction of the horizontal run from endpoint a at which the screen is met
    t: float
    # lateral position of the ray on the screen, measured from the screen center
    lateral: float
    edges: dict = field(default_factory=dict)


def sample_devices(rng, area, device_height):
    """Draw source and destination uniformly over ``area`` at ``device_height``."""
    if device_height <= 0:
        raise ConfigurationError("device height must be positive", field="device_height")
    if not (area.width > 0 and area.depth > 0):
        raise ConfigurationError("degenerate area", field="area")
    xy = rng.random(4)
    s = Point3(float(xy[0] * area.width), float(xy[1] * area.depth), float(device_height))
    d = Point3(float(xy[2] * area.width), float(xy[3] * area.depth), float(device_height))
    return s, d


def blocker_count(density, area):
    return int(round(density * area.size))


def sample_blocker_centers(rng, area, n):
    """``n`` base centers as an (n, 2) array; a prefix of a longer draw is a shorter draw."""
    return rng.random((n, 2)) * np.array([area.width, area.depth])


def sample_blockers(rng, area, density, dims=(1.75, 0.5, 0.2)):
    if density < 0:
        raise ConfigurationError("density must be non-negative", field="blocker_density")
    h, w, l = dims
    centers = sample_blocker_centers(rng, area, blocker_count(density, area))
    return [Blocker(Point3(float(x), float(y), 0.0), h, w, l) for x, y in centers]


def make_link(a, b):
    dx, dy, dz = b.x - a.x, b.y - a.y, b.z - a.z
    d = float(np.sqrt(dx * dx + dy * dy + dz * dz))
    if d == 0.0:
        raise GeometryError(f"coincident link endpoints at {a}")
    theta = float(np.arccos(min(abs(dz) / d, 1.0)))
    phi = float(np.arctan2(dy, dx)) % (2.0 * np.pi)
    return LinkGeometry(a, b, d, theta, phi)


def _horizontal_direction(link):
    dx = link.endpoint_b.x - link.endpoint_a.x
    dy = link.endpoint_b.y - link.endpoint_a.y
    run = np.hypot(dx, dy)
    if run == 0.0:
        return 1.0, 0.0, 0.0
    return dx / run, dy / run, float(run)


def orient_screen(blocker, link):
    ux, uy, _ = _horizontal_direction(link)
    c = blocker.base_center
    return Screen(c.x, c.y, ux, uy, blocker.width, blocker.height)


def crossing_candidates(a_xy, b_xy, centers, half_width):
    """Blockers whose facing screen is crossed by the ground projection of a->b.

    Returns ``(index, t, lateral, run)``: indices into ``centers`` (ascending),
    the crossing fraction along the run, the ray's lateral offset from each
    screen center, and the horizontal run length. Crossings must fall strictly
    inside the run and strictly inside the footprint.
    """
    dx, dy = b_xy[0] - a_xy[0], b_xy[1] - a_xy[1]
    run = float(np.hypot(dx, dy))
    empty = np.empty(0)
    if run == 0.0 or len(centers) == 0:
        return np.empty(0, dtype=np.intp), empty, empty, run
    ux, uy = dx / run, dy / run
    rx = centers[:, 0] - a_xy[0]
    ry = centers[:, 1] - a_xy[1]
    along = rx * ux + ry * uy
    offset = ry * ux - rx * uy
    hit = (along > 0.0) & (along < run) & (np.abs(offset) < half_width)
    idx = np.flatnonzero(hit)
    # ray sits on the opposite side of the center from the blocker's offset
    return idx, along[idx] / run, -offset[idx], run


def edge_paths(run, t, lateral, za, zb, height, half_width):
    """Endpoint-to-edge path lengths for the four screen edges.

    All array arguments broadcast together. Returns ``(r, z0, d1, d2, shadowed)``
    where ``d1``/``d2``/``shadowed`` are dicts keyed by :data:`EDGE_NAMES`.
    Edges are treated as infinite lines (top at z = height, bottom at z = 0,
    sides at lateral = -/+ half_width).
    """
    da = t * run
    db = (1.0 - t) * run
    dz = zb - za
    r = np.sqrt(run * run + dz * dz)
    z0 = za + t * dz
    d1, d2, sh = {}, {}, {}

    d1["top"] = np.hypot(da, height - za)
    d2["top"] = np.hypot(db, height - zb)
    sh["top"] = z0 < height
    d1["bottom"] = np.hypot(da, za)
    d2["bottom"] = np.hypot(db, zb)
    sh["bottom"] = z0 > 0.0

    for name, q_edge in (("side_minus", -half_width), ("side_plus", half_width)):
        dq = q_edge - lateral
        ha = np.hypot(da, dq)
        hb = np.hypot(db, dq)
        # unfold around the vertical edge: the optimal crossing height splits dz by ha : hb
        frac = ha / (ha + hb)
        d1[name] = np.hypot(ha, frac * dz)
        d2[name] = np.hypot(hb, (1.0 - frac) * dz)
    sh["side_minus"] = lateral > -half_width
    sh["side_plus"] = lateral < half_width
    return r, z0, d1, d2, sh


def intersect_link_screen(link, blocker):
    a, b = link.endpoint_a, link.endpoint_b
    c = blocker.base_center
    hw = blocker.width / 2.0
    idx, t, lateral, run = crossing_candidates(
        (a.x, a.y), (b.x, b.y), np.array([[c.x, c.y]]), hw
    )
    if len(idx) == 0:
        return None
    t, lateral = float(t[0]), float(lateral[0])
    r, z0, d1, d2, sh = edge_paths(run, t, lateral, a.z, b.z, blocker.height, hw)
    edges = {n: EdgePath(float(d1[n]), float(d2[n]), bool(sh[n])) for n in EDGE_NAMES}
    return CrossingInfo(float(z0), float(r), t, lateral, edges)


def is_los_shadowed(link, blocker):
    info = intersect_link_screen(link, blocker)
    return info is not None and info.crossing_height < blocker.height
