"""Human-body blockage Monte Carlo for aerial-RIS assisted D2D mmWave links."""
__version__ = "0.1.0"

from .blockage import BlockageModelParams, LinkBlockageResult, blocker_loss_db, edge_diffraction_factor, link_blockage
from .channel import ArisLinkInputs, LinkBudgetResult, RadioParams, aris_rx_power, friis_rx_power
from .errors import ConfigurationError, GeometryError, PhysicsValidationError
from .geometry import Area, Blocker, LinkGeometry, Point3, is_los_shadowed, make_link
from .simulation import (
    MetricsSummary, ScenarioConfig, TrialOutcome, find_optimal_clearance, run_grid, run_scenario,
    run_trial, sweep, trial_rng,
)
