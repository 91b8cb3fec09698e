"""Exact bubble-tree combinatorics for degenerating conical flat metrics
and A_k ALE spaces, with numeric cross-validation."""

from .exact import (GaussRat, Germ, INFINITE_ORDER, PolyFamily, Rat,
                    agree_order, ord_of)
from .flat import (AngleVector, BubbleModel, ConeModel, ConePoint,
                   FamilyConfig, PLANE, SectionAnalysis, alpha_exponents,
                   alpha_of_lambda, bubble_at_node, bubble_tree,
                   classify_rescaled_limit, subcone_angle)
from .gh import (ALEOrbifoldModel, MonopoleConfig, MonopoleFamily,
                 MonopolePoint, ak_rescaled_limits, curvature_norm,
                 defining_equation, potential)
from .moduli import (BubbleShape, Component, INF, MarkedTuple, NodalCurve,
                     bubbletree_shape, bubbletree_to_nodal_curve,
                     is_beta_stable, nodal_curve_to_bubbletree_shape,
                     node_weights, non_collapse_check, principal_component,
                     principal_component_bruteforce, resolve)
from .parser import parse_germ, parse_poly
from .rescale import (CuspStability, RescaleResult, WeightVector,
                      ak_unstable_check, breakpoints, cusp_classify,
                      iterate_cascade, rescale)
from .verify import (NumericConeConfig, QuadratureSpec, SlopeFit,
                     cone_angle_probe, distance_surrogate, path_length,
                     scaling_slope, sphere_area)
from .vtree import (SectionPath, TreeNode, VanishingTree, build_tree,
                    section_path)

__version__ = "0.1.0"
