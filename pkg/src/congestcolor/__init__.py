"""Deterministic (degree+1)-list coloring on a simulated synchronous network.

The library splits into layers: `sim` runs message-passing protocols
with bit-level accounting, `coins`/`prefixes`/`derand` implement the
seed-fixing machinery, `linial` the color reduction and MIS sweep,
`pipeline` the phase loop, and `decomposition` the clustered variant.
The names below are the usual entry points; anything deeper is
importable from its module.
"""

from .decomposition import (
    color_with_decomposition,
    generate_decomposition,
    load_decomposition,
    save_decomposition,
    validate_decomposition,
)
from .graphs import (
    Graph,
    ListColoringInstance,
    PartialColoring,
    attach_default_lists,
    generate_graph,
    load_coloring,
    load_instance,
    save_coloring,
    verify_coloring,
)
from .linial import linial_reduce, mis_by_colors
from .pipeline import color_fraction, list_color_full
from .sim import (
    BandwidthPolicy,
    Message,
    NodeProgram,
    RunStats,
    build_bfs_forest,
    run_protocol,
)

__all__ = [
    "BandwidthPolicy",
    "Graph",
    "ListColoringInstance",
    "Message",
    "NodeProgram",
    "PartialColoring",
    "RunStats",
    "attach_default_lists",
    "build_bfs_forest",
    "color_fraction",
    "color_with_decomposition",
    "generate_decomposition",
    "generate_graph",
    "linial_reduce",
    "list_color_full",
    "load_coloring",
    "load_decomposition",
    "load_instance",
    "mis_by_colors",
    "run_protocol",
    "save_coloring",
    "save_decomposition",
    "validate_decomposition",
    "verify_coloring",
]
