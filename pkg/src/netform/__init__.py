"""Network formation simulations with pluggable link-choice policies."""

from netform.graph import Graph, GraphDiff, GraphError, edge_diff

__version__ = "0.1.0"

__all__ = ["Graph", "GraphDiff", "GraphError", "edge_diff", "__version__"]
