"""Arbitrary-order finite element exterior calculus on the reference tesseract."""
__version__ = "0.1.0"

from .tensorpoly import TensorPoly4, gauss_legendre, legendre_family
from .exterior import (
    FormField,
    aux_curl,
    aux_div,
    curl4,
    d_proxy,
    div4,
    exterior_derivative,
    grad4,
    lmap,
    lmap_inv,
    skw_grad,
    upsilon,
    upsilon_inv,
)
from .geometry import TesseractMap, chart, entity_quadrature, reference_topology
from .spaces import bubble_basis, space_basis, space_dim, trace_dof_dim, vol_dof_dim
from .dofs import DofSet, build_dofset, check_unisolvence, dof_apply
from .pullback import pull, pull_values, push
from .interp import (
    commuting_check,
    conformity_pair_check,
    hyperplane_trace,
    ibp_identity_check,
    interpolate,
    maxwell_demo,
)
