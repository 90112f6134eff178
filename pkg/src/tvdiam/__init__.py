"""Total-variation diameters for sensitivity analysis of discrete Bayesian networks."""
from . import datasets, errors
from .inference import (
    JunctionTree,
    UndirectedGraph,
    conditional_table,
    joint_marginal,
    junction_tree,
    moralize,
    mutual_information,
    triangulate,
)
from .io import emit_dot, emit_jtree_dot, emit_report, load_network, parse_bif, parse_network, write_bif, write_json
from .model import (
    BayesNet,
    Cpt,
    Dag,
    DiscreteVariable,
    ParentAssignment,
    build_network,
    make_network,
    row_index,
    sub_cpt,
)
from .propagation import bounded_diameter, impact, impact_map, separator_chain, single_link_bound
from .refinement import amalgamate_levels, asymmetry_scan, csi_index, partial_index, suggest_amalgamation
from .sensitivity import (
    active_simple_trails,
    dwi,
    edge_strength,
    edge_strengths,
    ewi,
    influence_ranking,
    node_diameters,
)
from .variation import joint_diameter_bound, lower_diameter, tv_decompose, tv_distance, upper_diameter

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
