"""Temporal and semi-temporal hybridization networks from phylogenetic trees."""

from .cps import ConstraintSet, cps_weight, is_cps, is_tree_child_sequence, tcs_weight
from .generate import InstanceSpec, generate_instance
from .network import (
    Network,
    displays,
    is_temporal,
    is_tree_child,
    network_from_cps,
    network_from_tcs,
    reticulation_number,
)
from .newick import NewickError, parse_forest, parse_network, parse_tree, write_forest, write_network
from .nonbinary import cherry_picking_nb, min_temporal_nb
from .search import BudgetExhausted, SolveConfig, SolveStats
from .semitemporal import min_semitemporal, pareto_sweep, semi_temporal_cherry_picking
from .temporal import Solution, cherry_picking, min_temporal, pick
from .tree import LabelTable, Tree, TreeSet

__version__ = "0.1.0"

__all__ = [
    "BudgetExhausted", "ConstraintSet", "InstanceSpec", "LabelTable", "Network", "NewickError",
    "Solution", "SolveConfig", "SolveStats", "Tree", "TreeSet", "cherry_picking",
    "cherry_picking_nb", "cps_weight", "displays", "generate_instance", "is_cps", "is_temporal",
    "is_tree_child", "is_tree_child_sequence", "min_semitemporal", "min_temporal",
    "min_temporal_nb", "network_from_cps", "network_from_tcs", "parse_forest", "parse_network",
    "parse_tree", "pareto_sweep", "pick", "reticulation_number", "semi_temporal_cherry_picking",
    "tcs_weight", "write_forest", "write_network",
]
