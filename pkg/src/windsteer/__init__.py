"""Closed-loop wind farm flow control at desk scale.

Dynamic observation-point wake simulation, ensemble Kalman filter state
estimation, economic model-predictive yaw steering, dead-band look-up-table
reference controllers, and a synthetic truth plant.
"""

__version__ = "0.1.0"

from .wake import (  # noqa: F401
    ShearProfile,
    TurbineModel,
    WakeParams,
    YawLimitConfig,
)
