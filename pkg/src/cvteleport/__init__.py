"""Continuous-variable teleportation with Gaussian and non-Gaussian resources.

The package is organized around a closed-form characteristic-function
algebra (``cfalgebra``), resource-state constructions (``states``), the
teleportation map and ensemble-averaged fidelities (``teleport``), fiber
and satellite channel models (``channels``), per-channel-point parameter
optimization (``optimize``), and a truncated-Fock-space oracle used for
verification (``fock``).
"""

from .cfalgebra import (
    CFError,
    NonIntegrableError,
    PolyGaussianCF,
    QuadForm,
    mode_map,
    negate_args,
)
from .channels import (
    ChannelPoint,
    FiberModel,
    SatelliteModel,
    fiber_channel,
    satellite_channel,
    zenith_to_range,
)
from .optimize import OptResult, ParamSpace, make_spec, optimize_point, sweep
from .states import (
    FAMILIES,
    ChannelParams,
    IDEAL_CHANNEL,
    ResourceSpec,
    ResourceState,
    TMSVParams,
    build_resource,
)
from .teleport import (
    ETA_SQUARED_1DB,
    FidelityResult,
    InputEnsemble,
    TeleportParams,
    classical_limit,
    fidelity,
    input_cf_coherent,
    input_cf_squeezed,
    mean_fidelity,
    teleport,
    teleport_fidelity,
)

__version__ = "0.1.0"

__all__ = [
    "CFError",
    "NonIntegrableError",
    "PolyGaussianCF",
    "QuadForm",
    "mode_map",
    "negate_args",
    "ChannelPoint",
    "FiberModel",
    "SatelliteModel",
    "fiber_channel",
    "satellite_channel",
    "zenith_to_range",
    "OptResult",
    "ParamSpace",
    "make_spec",
    "optimize_point",
    "sweep",
    "FAMILIES",
    "ChannelParams",
    "IDEAL_CHANNEL",
    "ResourceSpec",
    "ResourceState",
    "TMSVParams",
    "build_resource",
    "ETA_SQUARED_1DB",
    "FidelityResult",
    "InputEnsemble",
    "TeleportParams",
    "classical_limit",
    "fidelity",
    "input_cf_coherent",
    "input_cf_squeezed",
    "mean_fidelity",
    "teleport",
    "teleport_fidelity",
    "__version__",
]
