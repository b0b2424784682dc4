"""cellgraph: a hypermedia content engine.

Content lives in small addressable cells, structure in a non-hierarchical
relation graph, and hyperlinks in a separate three-layer linkbase that
decorates pages at render time. See README.md for the tour.
"""

__version__ = "0.1.0"
