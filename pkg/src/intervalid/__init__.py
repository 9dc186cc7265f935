"""Inference on influence diagrams whose distributions are given by lower bounds."""

from ._backend import BACKEND
from .io import load_diagram, loads_diagram, save_diagram
from .model import (
    DiagramError,
    InfluenceDiagram,
    LowerBoundTable,
    OutcomeSpace,
    ProbInterval,
    ValidationError,
    bound_range,
    has_other_directed_path,
    upper_bounds,
    validate_diagram,
)
from .query import Query, QueryResult, answer, plan, prune_barren
from .transforms import marginal_lower_bounds, posterior_lower_bounds, remove_node, reverse_arc

__version__ = "0.1.0"
