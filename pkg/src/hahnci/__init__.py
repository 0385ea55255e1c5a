"""Truncated Hahn series, pseudo-convergent sequences and complete-intersection
presentations over valuation rings F_q((t^Gamma)), Gamma = Q^n ordered lexicographically."""

__version__ = "0.1.0"

from .ordered import (INF, GroupElement, Mode, MonotoneSequence, ThresholdCertificate, ThresholdProblem,
                      certify_grid, compare, ge, solve_threshold_1d, solve_threshold_nd, zero)
from .hahn import FieldConfig, Series, divide, invert, val
from .poly import (MultiPoly, TowerSpec, content_normalize, hasse_derivative, hasse_multi,
                   ideal_membership_witness, pseudo_divide, reduce_mod_tower, taylor_expand)
from .pseudo import (PseudoSequence, check_pseudo_convergent, classify, factor_below_degree,
                     image_sequence, is_pseudo_limit, localize_representation, minimal_degree_witness,
                     scale_and_factor_multivar)
from .ci import (CIPresentation, TowerLevel, TransitionMap, build_presentation, element_reduction_report,
                 fraction_var, relation_poly, transition)
from .scenario import generate_planted, load_scenario, run_scenario
