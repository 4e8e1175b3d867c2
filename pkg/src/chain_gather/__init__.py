"""Deterministic simulator and verifier for gathering a closed chain of
luminous robots with limited visibility in the plane.

The package splits into plane geometry (:mod:`~chain_gather.geometry`), the
ring data model (:mod:`~chain_gather.chain`), local symmetry patterns
(:mod:`~chain_gather.patterns`), movement operations (:mod:`~chain_gather.moves`),
the synchronous scheduler (:mod:`~chain_gather.engine`), configuration
generators (:mod:`~chain_gather.generators`), and the executable invariant
suite (:mod:`~chain_gather.verify`).  The hot per-round sweep lives in
:mod:`~chain_gather.kernels` with a compiled core and a numpy fallback.
"""

from .chain import (
    ChainConfiguration,
    InitKind,
    LocalView,
    RobotLights,
    RunToken,
    build_chain,
    chain_length,
    is_gathered,
    local_view,
)
from .engine import (
    AlreadyGathered,
    InvariantViolation,
    RunResult,
    Settings,
    SimulationState,
    new_simulation,
    run_until,
    step,
)
from .geometry import Circle, OrientedAngle, PlaneVector, Point2
from .tolerances import Tolerances

__version__ = "0.1.0"

__all__ = [
    "AlreadyGathered",
    "ChainConfiguration",
    "Circle",
    "InitKind",
    "InvariantViolation",
    "LocalView",
    "OrientedAngle",
    "PlaneVector",
    "Point2",
    "RobotLights",
    "RunResult",
    "RunToken",
    "Settings",
    "SimulationState",
    "Tolerances",
    "build_chain",
    "chain_length",
    "is_gathered",
    "local_view",
    "new_simulation",
    "run_until",
    "step",
    "__version__",
]
