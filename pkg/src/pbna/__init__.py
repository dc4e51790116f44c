"""Feasibility checking and construction for precoding-based network alignment
of three unicast sessions over a random-linear-coded DAG."""

__version__ = "0.1.0"

from .field import Field, FieldError, make_field  # noqa: E402
from .netgraph import ExtendedNetwork, GraphError, Network, extend, parse_network  # noqa: E402
from .feasibility import (  # noqa: E402
    ConditionId,
    FeasibilityParams,
    FeasibilityReport,
    check_feasibility,
    classify_regime,
)

__all__ = [
    "ConditionId",
    "ExtendedNetwork",
    "FeasibilityParams",
    "FeasibilityReport",
    "Field",
    "FieldError",
    "GraphError",
    "Network",
    "check_feasibility",
    "classify_regime",
    "extend",
    "make_field",
    "parse_network",
]
