"""Seeded Monte Carlo evaluation of blockage probability and spectral efficiency.

Every trial draws from its own counter-based stream ``trial_rng(seed, i)``:
first the source and destination positions, then the blocker base centers.
Because a shorter blocker draw is a prefix of a longer one, and the ARIS
altitude never enters the draws, all points of a density or clearance sweep
see common random numbers. The engine exploits this by evaluating a whole
(density x clearance) grid from one set of draws per trial.

Trials are processed in fixed-size chunks whose partial statistics are
merged in chunk order, so results are bit-identical for any worker count.
"""
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import blockage, channel, geometry
from .blockage import BlockageModelParams
from .channel import ArisLinkInputs, RadioParams
from .errors import ConfigurationError, PhysicsValidationError
from .geometry import Area, Point3

WITH_ARIS = "with_aris"
WITHOUT_ARIS = "without_aris"
CHUNK_TRIALS = 500
WORKERS_ENV = "ARISBLOCK_WORKERS"


@dataclass(frozen=True)
class BlockerDims:
    height: float = 1.75
    width: float = 0.5
    depth: float = 0.2

    def __post_init__(self):
        for name in ("height", "width"):
            if not getattr(self, name) > 0:
                raise ConfigurationError("must be > 0", field=f"blocker_dims.{name}")
        if self.depth < 0:
            raise ConfigurationError("must be >= 0", field="blocker_dims.depth")


@dataclass(frozen=True)
class ScenarioConfig:
    area: Area = field(default_factory=Area)
    device_height: float = 1.0
    # None places the ARIS over the center of the area
    aris_xy: tuple = None
    aris_clearance: float = 13.0
    radio: RadioParams = field(default_factory=RadioParams)
    blocker_dims: BlockerDims = field(default_factory=BlockerDims)
    blocker_density: float = 0.2
    blockage: BlockageModelParams = field(default_factory=BlockageModelParams)
    mode: str = WITH_ARIS
    # how the two hop events combine into "blocked": "any" or "all"
    blocked_rule: str = "any"
    trials: int = 100_000
    seed: int = 2023

    def __post_init__(self):
        if self.aris_xy is not None:
            object.__setattr__(self, "aris_xy", tuple(float(v) for v in self.aris_xy))
        if isinstance(self.trials, bool) or not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ConfigurationError("must be an integer >= 1", field="trials")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2 ** 64:
            raise ConfigurationError("must be an integer in [0, 2**64)", field="seed")
        if not self.blocker_density >= 0:
            raise ConfigurationError("must be >= 0", field="blocker_density")
        if not self.device_height > 0:
            raise ConfigurationError("must be > 0", field="device_height")
        if self.mode not in (WITH_ARIS, WITHOUT_ARIS):
            raise ConfigurationError(f"unknown mode {self.mode!r}", field="mode")
        if self.blocked_rule not in ("any", "all"):
            raise ConfigurationError(f"unknown rule {self.blocked_rule!r}", field="blocked_rule")
        if len(self.aris_ground) != 2:
            raise ConfigurationError("must be an (x, y) pair", field="aris_xy")
        if not self.area.contains(*self.aris_ground):
            raise PhysicsValidationError("ARIS must hover over the service area", field="aris_xy")
        if self.mode == WITH_ARIS and not self.aris_clearance > 0:
            # a device level with the ARIS sees it at 90 degrees from the surface normal
            raise PhysicsValidationError(
                "must be > 0 so the reflected elevation stays below pi/2", field="aris_clearance"
            )

    @property
    def aris_ground(self):
        return self.area.center if self.aris_xy is None else self.aris_xy

    @property
    def aris_position(self):
        x, y = self.aris_ground
        return Point3(x, y, self.device_height + self.aris_clearance)

    def to_dict(self):
        """Plain nested dict with every default expanded."""
        d = asdict(self)
        d["aris_xy"] = list(self.aris_ground)
        return d


@dataclass(frozen=True)
class TrialOutcome:
    blocked: bool
    se: float
    # (LinkGeometry, LinkBlockageResult, LinkBudgetResult) per evaluated link
    per_link: tuple
    source: Point3
    destination: Point3


@dataclass(frozen=True)
class MetricsSummary:
    blockage_probability: float
    mean_se: float
    se_ci95_halfwidth: float
    trials: int
    seed: int
    blocked_count: int
    config: ScenarioConfig

    @property
    def blockage_ci95_halfwidth(self):
        p = self.blockage_probability
        return 1.96 * math.sqrt(p * (1.0 - p) / self.trials)


def trial_rng(seed, trial_index):
    """Independent Philox stream keyed by ``(seed, trial_index)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.Philox(ss))


def _draw(config, trial_index, n_blockers):
    rng = trial_rng(config.seed, trial_index)
    s, d = geometry.sample_devices(rng, config.area, config.device_height)
    centers = geometry.sample_blocker_centers(rng, config.area, n_blockers)
    return s, d, centers


def run_trial(config, trial_index):
    """One fully itemised trial, built from the scalar geometry/channel API."""
    dims = config.blocker_dims
    s, d, centers = _draw(config, trial_index, geometry.blocker_count(config.blocker_density, config.area))
    blockers = [geometry.Blocker(Point3(float(x), float(y), 0.0), dims.height, dims.width, dims.depth)
                for x, y in centers]
    lam = config.radio.wavelength
    noise = config.radio.noise_power_dbm

    if config.mode == WITHOUT_ARIS:
        link = geometry.make_link(s, d)
        lb = blockage.link_blockage(link, blockers, lam, config.blockage)
        budget = channel.apply_loss_and_se(
            channel.friis_rx_power(config.radio, link.length), lb.total_loss_db, noise)
        return TrialOutcome(lb.shadowed, budget.spectral_efficiency, ((link, lb, budget),), s, d)

    aris = config.aris_position
    up = geometry.make_link(s, aris)
    down = geometry.make_link(aris, d)
    lb_up = blockage.link_blockage(up, blockers, lam, config.blockage)
    lb_down = blockage.link_blockage(down, blockers, lam, config.blockage)
    clean = channel.aris_rx_power(config.radio, ArisLinkInputs(up.length, down.length, down.theta))
    budget = channel.apply_loss_and_se(clean, lb_up.total_loss_db + lb_down.total_loss_db, noise)
    combine = any if config.blocked_rule == "any" else all
    blocked = combine((lb_up.shadowed, lb_down.shadowed))
    return TrialOutcome(blocked, budget.spectral_efficiency,
                        ((up, lb_up, budget), (down, lb_down, budget)), s, d)


def _chunk_draws(config, start, stop, n_blockers):
    k = stop - start
    src = np.empty((k, 2))
    dst = np.empty((k, 2))
    centers = np.empty((k, n_blockers, 2))
    for row, i in enumerate(range(start, stop)):
        s, d, c = _draw(config, i, n_blockers)
        src[row] = (s.x, s.y)
        dst[row] = (d.x, d.y)
        centers[row] = c
    return src, dst, centers


def _hop_sums(config, a_xy, b_xy, za, zb, centers, counts):
    """Summed loss and shadow counts of one hop, per trial, density and clearance.

    ``a_xy``/``b_xy`` are (K, 2) ground points, ``centers`` is (K, n, 2) and
    ``zb`` a 1-D array of far-end heights. Candidate crossings are the same as
    :func:`geometry.crossing_candidates` applied trial by trial. Returns two
    arrays shaped (K, len(counts), len(zb)).
    """
    dims = config.blocker_dims
    hw = dims.width / 2.0
    n_trials = len(a_xy)
    zb = np.atleast_1d(np.asarray(zb, dtype=float))
    nc = len(zb)
    loss_out = np.zeros((n_trials, len(counts), nc))
    sh_out = np.zeros((n_trials, len(counts), nc), dtype=np.intp)
    delta = b_xy - a_xy
    run = np.hypot(delta[:, 0], delta[:, 1])
    safe = np.where(run > 0.0, run, 1.0)
    ux = delta[:, 0] / safe
    uy = delta[:, 1] / safe
    rx = centers[:, :, 0] - a_xy[:, 0:1]
    ry = centers[:, :, 1] - a_xy[:, 1:2]
    along = rx * ux[:, None] + ry * uy[:, None]
    offset = ry * ux[:, None] - rx * uy[:, None]
    hit = (along > 0.0) & (along < run[:, None]) & (np.abs(offset) < hw) & (run[:, None] > 0.0)
    trial, idx = np.nonzero(hit)
    if len(trial) == 0:
        return loss_out, sh_out
    t = along[trial, idx] / run[trial]
    lateral = -offset[trial, idx]
    loss, shadowed = blockage.screen_losses(
        run[trial][:, None], t[:, None], lateral[:, None], za, zb[None, :],
        dims.height, hw, config.radio.wavelength, config.blockage,
    )
    loss = np.broadcast_to(loss, (len(trial), nc))
    shadowed = np.broadcast_to(shadowed, (len(trial), nc))
    bins = (trial[:, None] * nc + np.arange(nc)[None, :]).ravel()
    size = n_trials * nc
    for m, count in enumerate(counts):
        keep = (idx < count)[:, None]
        loss_out[:, m, :] = np.bincount(
            bins, weights=np.where(keep, loss, 0.0).ravel(), minlength=size).reshape(n_trials, nc)
        sh_out[:, m, :] = np.bincount(
            bins, weights=(keep & shadowed).ravel(), minlength=size).reshape(n_trials, nc)
    return loss_out, sh_out


def _chunk_grid(config, start, stop, counts, clearances):
    """(blocked, se) arrays shaped (K, densities, clearances) for trials [start, stop)."""
    src, dst, centers = _chunk_draws(config, start, stop, int(max(counts)))
    radio = config.radio
    h = config.device_height
    clearances = np.asarray(clearances, dtype=float)
    shape = (stop - start, len(counts), len(clearances))

    if config.mode == WITHOUT_ARIS:
        loss, sh = _hop_sums(config, src, dst, h, h, centers, counts)
        dist = np.hypot(dst[:, 0] - src[:, 0], dst[:, 1] - src[:, 1])
        p = channel.friis_rx_power(radio, dist).rx_power[:, None, None]
        loss = np.broadcast_to(loss, shape)
        blocked = np.broadcast_to(sh > 0, shape)
    else:
        aris = np.broadcast_to(np.asarray(config.aris_ground, dtype=float), src.shape)
        za = h + clearances
        loss_up, sh_up = _hop_sums(config, src, aris, h, za, centers, counts)
        # the down hop runs ARIS -> D; swapping endpoints leaves the screen geometry unchanged
        loss_dn, sh_dn = _hop_sums(config, dst, aris, h, za, centers, counts)
        loss = loss_up + loss_dn
        if config.blocked_rule == "any":
            blocked = (sh_up > 0) | (sh_dn > 0)
        else:
            blocked = (sh_up > 0) & (sh_dn > 0)
        r_up = np.hypot(src[:, 0] - aris[:, 0], src[:, 1] - aris[:, 1])[:, None]
        r_dn = np.hypot(dst[:, 0] - aris[:, 0], dst[:, 1] - aris[:, 1])[:, None]
        d_up = np.hypot(r_up, clearances[None, :])
        d_dn = np.hypot(r_dn, clearances[None, :])
        theta = np.arccos(np.minimum(clearances[None, :] / d_dn, 1.0))
        p = channel.aris_rx_power(radio, ArisLinkInputs(d_up, d_dn, theta)).rx_power[:, None, :]
    _, se = channel.snr_and_se(p * 10.0 ** (-loss / 10.0), radio.noise_power_dbm)
    return blocked, np.asarray(se)


@dataclass
class _Accumulator:
    """Running count/mean/M2 per grid cell, merged with Chan's pairwise rule."""

    n: int
    blocked: np.ndarray
    mean: np.ndarray
    m2: np.ndarray

    def merge(self, other):
        if self.n == 0:
            return other
        n = self.n + other.n
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.n / n)
        m2 = self.m2 + other.m2 + delta * delta * (self.n * other.n / n)
        return _Accumulator(n, self.blocked + other.blocked, mean, m2)


def _run_chunk(args):
    config, start, stop, counts, clearances = args
    blocked, se = _chunk_grid(config, start, stop, counts, clearances)
    mean = se.mean(axis=0)
    m2 = ((se - mean) ** 2).sum(axis=0)
    return _Accumulator(stop - start, blocked.sum(axis=0), mean, m2)


def resolve_workers(workers=None):
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        workers = int(env) if env else 1
    if workers < 1:
        raise ConfigurationError("worker count must be >= 1", field="workers")
    return workers


def run_grid(config, densities, clearances, workers=None, progress=None):
    """Evaluate every (density, clearance) pair with shared trial streams.

    Returns a nested list ``summaries[i][j]`` for ``densities[i]`` and
    ``clearances[j]``.
    """
    densities = [float(v) for v in densities]
    clearances = [float(v) for v in clearances]
    for b in densities:
        if b < 0:
            raise ConfigurationError("must be >= 0", field="blocker_density")
    if config.mode == WITH_ARIS:
        for c in clearances:
            if not c > 0:
                raise PhysicsValidationError("must be > 0", field="aris_clearance")
    counts = np.array([geometry.blocker_count(b, config.area) for b in densities], dtype=np.intp)
    chunks = [(config, lo, min(lo + CHUNK_TRIALS, config.trials), counts, clearances)
              for lo in range(0, config.trials, CHUNK_TRIALS)]
    workers = resolve_workers(workers)
    acc = _Accumulator(0, 0, 0.0, 0.0)
    if workers == 1 or len(chunks) == 1:
        results = map(_run_chunk, chunks)
        for k, part in enumerate(results, 1):
            acc = acc.merge(part)
            if progress:
                progress(k, len(chunks))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for k, part in enumerate(pool.map(_run_chunk, chunks), 1):
                acc = acc.merge(part)
                if progress:
                    progress(k, len(chunks))

    n = config.trials
    sd = np.sqrt(acc.m2 / (n - 1)) if n > 1 else np.zeros_like(acc.mean)
    grid = []
    for i, b in enumerate(densities):
        row = []
        for j, c in enumerate(clearances):
            row.append(MetricsSummary(
                blockage_probability=int(acc.blocked[i, j]) / n,
                mean_se=float(acc.mean[i, j]),
                se_ci95_halfwidth=float(1.96 * sd[i, j] / math.sqrt(n)),
                trials=n,
                seed=config.seed,
                blocked_count=int(acc.blocked[i, j]),
                config=replace(config, blocker_density=b, aris_clearance=c),
            ))
        grid.append(row)
    return grid


def run_scenario(config, workers=None, progress=None):
    return run_grid(config, [config.blocker_density], [config.aris_clearance],
                    workers=workers, progress=progress)[0][0]


def _check_values(values):
    values = [float(v) for v in values]
    if not values:
        raise ConfigurationError("sweep values must be non-empty", field="values")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigurationError("sweep values must be strictly increasing", field="values")
    return values


def sweep(config, axis, values, workers=None, progress=None):
    """One summary per value along ``axis`` ("density" or "clearance")."""
    values = _check_values(values)
    if axis == "density":
        grid = run_grid(config, values, [config.aris_clearance], workers, progress)
        return [(v, row[0]) for v, row in zip(values, grid)]
    if axis == "clearance":
        grid = run_grid(config, [config.blocker_density], values, workers, progress)
        return list(zip(values, grid[0]))
    raise ConfigurationError(f"unknown sweep axis {axis!r}", field="axis")


def clearance_grid(lo, hi, step):
    if not lo < hi:
        raise ConfigurationError("lo must be below hi", field="lo")
    if not step > 0:
        raise ConfigurationError("must be > 0", field="step")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return [round(lo + k * step, 10) for k in range(n + 1)]


def argmax_clearance(points):
    """First (lowest) clearance with the strictly largest mean SE."""
    best = points[0]
    for c, summary in points[1:]:
        if summary.mean_se > best[1].mean_se:
            best = (c, summary)
    return best


def find_optimal_clearance(config, lo=2.0, hi=40.0, step=1.0, workers=None, progress=None):
    points = sweep(config, "clearance", clearance_grid(lo, hi, step), workers, progress)
    return argmax_clearance(points)
