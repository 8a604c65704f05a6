"""Projected adaptive gradient-ascent beamforming for full-duplex mmWave links."""

from .channel import (
    ArrayGeometry,
    ClusterParams,
    DegenerateGeometryError,
    RicianParams,
    los_si_channel,
    sample_geometric_channel,
    sample_si_channel,
    ula_steering,
)
from .optimizer import (
    Constraint,
    Init,
    OptimizationError,
    OptimizerConfig,
    OptimizerTrace,
    ascend,
    finite_difference_gradient,
    init_gaussian,
    init_svd,
    project_constant_amplitude,
    project_unit_norm,
)
from .two_node import LinkPowers, TwoNodeScenario, two_node_gradients, two_node_sum_rate, upper_bound
from .relay import DuplexMode, RelayScenario, mode_rates, relay_gradients, relay_rates

__version__ = "0.1.0"
