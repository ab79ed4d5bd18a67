"""Once-reinforced random walks on small graphs: exact tails, rates and exponents."""
from .dv import dv_functional, dv_infimum, dv_via_potential, kkt_check, tree_kernel
from .exact import (build_meta_chain, exact_alpha_oracle, exp_moment_diagnostic, perron_decay,
                    survival_curve)
from .fixtures import fixture
from .graphs import (DecreasingFamily, FiniteGraph, GraphError, LiftedGraph, build_graph,
                     cover_family, edge_boundary, enumerate_S, enumerate_growth_sequences,
                     full_family, is_decreasing, lift, lifted_boundary, make_family,
                     read_edge_file)
from .kernels import base_kernel, entropy_cost, lifted_kernel, relative_entropy
from .rates import alpha_c, alpha_c_boundary_form, rate_I, rate_I1, sweep_alpha, sweep_rate
from .simulate import BACKEND, estimate_tail_decay, run, step, stopping_time

__all__ = [
    "BACKEND", "DecreasingFamily", "FiniteGraph", "GraphError", "LiftedGraph", "alpha_c",
    "alpha_c_boundary_form", "base_kernel", "build_graph", "build_meta_chain", "cover_family",
    "dv_functional", "dv_infimum", "dv_via_potential", "edge_boundary", "entropy_cost",
    "enumerate_S", "enumerate_growth_sequences", "estimate_tail_decay", "exact_alpha_oracle",
    "exp_moment_diagnostic", "fixture", "full_family", "is_decreasing", "kkt_check", "lift",
    "lifted_boundary", "lifted_kernel", "make_family", "perron_decay", "rate_I", "rate_I1",
    "read_edge_file", "relative_entropy", "run", "step", "stopping_time", "survival_curve",
    "sweep_alpha", "sweep_rate", "tree_kernel",
]
