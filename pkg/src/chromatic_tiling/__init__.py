"""Chromatic numbers of canonical carpet partitions and their scaling bound."""

__version__ = "0.1.0"

from .exceptions import (BudgetExceededError, BudgetExhausted,  # noqa: E402
                         ChromaticTilingError, EmptyMaskError, EmptySetError,
                         InsufficientScalesError, InvalidBaseError,
                         InvalidDimensionError, InvalidRadiusRangeError,
                         MaskRangeError, SpecError)
from .ifs_core import (PRESETS, CellAddress, DigitalFractal, FractalSpec,  # noqa: E402
                       cell_box, load_spec, rasterize, similarity_dimension,
                       validate_spec)
from .partition import (AMBIENT, INTRINSIC, GRPReport, Tile, TileMetrics,  # noqa: E402
                        Tiling, canonical_partition, grp_check, tile_metrics)
from .separation import (DimensionEstimate, RegularityReport,  # noqa: E402
                         SeparationSet, ahlfors_regularity_probe,
                         box_counting_dimension, separation_set)
from .graph import (ColoringResult, Interface, PartitionGraph,  # noqa: E402
                    build_partition_graph, dsatur_coloring, exact_chromatic,
                    greedy_coloring, interface, interface_substantial,
                    is_proper_coloring)
from .theorem import (BoundReport, BoundRow, PackingResult, analyze,  # noqa: E402
                      degree_bound_check, packing_number, scaling_sweep)

__all__ = [
    "AMBIENT", "INTRINSIC", "PRESETS",
    "BoundReport", "BoundRow", "BudgetExceededError", "BudgetExhausted",
    "CellAddress", "ChromaticTilingError", "ColoringResult", "DigitalFractal",
    "DimensionEstimate", "EmptyMaskError", "EmptySetError", "FractalSpec",
    "GRPReport", "InsufficientScalesError", "Interface", "InvalidBaseError",
    "InvalidDimensionError", "InvalidRadiusRangeError", "MaskRangeError",
    "PackingResult", "PartitionGraph", "RegularityReport", "SeparationSet",
    "SpecError", "Tile", "TileMetrics", "Tiling",
    "ahlfors_regularity_probe", "analyze", "box_counting_dimension",
    "build_partition_graph", "canonical_partition", "cell_box",
    "degree_bound_check", "dsatur_coloring", "exact_chromatic",
    "greedy_coloring", "grp_check", "interface", "interface_substantial",
    "is_proper_coloring", "load_spec", "packing_number", "rasterize",
    "scaling_sweep", "separation_set", "similarity_dimension", "tile_metrics",
    "validate_spec",
]
