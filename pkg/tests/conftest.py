from pathlib import Path

import numpy as np
import pytest

from intervalid import load_diagram
from intervalid.model import InfluenceDiagram, LowerBoundTable, OutcomeSpace

ROOT = Path(__file__).resolve().parents[1]
TWO_NODE_FILE = ROOT / "diagrams" / "two_node.json"

# lower bounds of the two-node worked example
B_Y = np.array([0.2, 0.1, 0.4])
B_X_GIVEN_Y = np.array([[0.2, 0.0, 0.1], [0.2, 0.3, 0.4], [0.1, 0.1, 0.8]])


@pytest.fixture
def two_node_path():
    return TWO_NODE_FILE


@pytest.fixture
def two_node():
    return load_diagram(TWO_NODE_FILE)


def make_diagram(spec):
    """Build a diagram from ``[(id, outcomes, parents, {ctx: bounds})...]``."""
    spaces = [OutcomeSpace(n, tuple(outs)) for n, outs, _, _ in spec]
    tables = [LowerBoundTable(n, tuple(ps), entries) for n, _, ps, entries in spec]
    return InfluenceDiagram(spaces, tables)
