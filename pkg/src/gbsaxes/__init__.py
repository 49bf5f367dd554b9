"""Deformation spaces of GBS groups: normal forms, Lipschitz metric,
train tracks, laminations, Whitehead graphs, and axis projections."""

from .core import GbsError, GbsGraph, betti_number, build_graph, graph_stats, validate_graph
from .words import (CyclicWord, GroupWord, axis_turns, britton_reduce,
                    cyclic_reduce, translation_length)
from .marked import MarkedGraph, Presentation, Substitution, reference_marked, transport, twist
from .moves import collapse, expand, normalize_volume, random_deform, rescale, subdivide
from .lipschitz import Candidate, enumerate_candidates, lipschitz_distance, sup_check_random
from .traintrack import Constants, TrainTrackMap
from .lamination import LeafLibrary, detect_pieces, lamination_ratio, leaf_library
from .whitehead import cut_analysis, nonsimplicity_certificate, whitehead_graph
from .axis import Axis, AxisConfig, contraction_experiment

__version__ = "0.1.0"
