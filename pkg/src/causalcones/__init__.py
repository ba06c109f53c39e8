"""Convex-cone geometry, Lorentzian causal structure on sampled events, and
finite-poset order topologies, verified at desk scale."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .causal_group import (
    AffineMap,
    ZeemanFactors,
    is_causal_map,
    is_cone_endomorphism,
    random_causal_element,
    zeeman_decompose,
)
from .cones import (
    ConeClassification,
    ConvexCone,
    classify,
    dual,
    edge_and_span,
    make_cone,
    member,
)
from .errors import (
    CapacityError,
    ConsistencyError,
    DomainError,
    InputError,
    NumericError,
)
from .events import (
    EventSet,
    HierarchyReport,
    Relation,
    causal_relation,
    chronological_relation,
    cone_preserving_check,
    down_cone,
    hierarchy_report,
    interval,
    is_partial_order,
    is_quasi_order,
    k_relation,
    reflexive_closure,
    sprinkle,
    transitive_closure,
    u_cone,
)
from .lorentz import (
    ConeRegion,
    LorentzFrame,
    boost,
    dilation,
    is_orthochronous,
    is_pseudo_orthogonal,
    lc_classify,
    orbit_decompose,
    q_form,
)
from .posets import (
    FinitePoset,
    TopologyBasis,
    basis_sets,
    causal_bridge_checks,
    is_bicontinuous,
    is_continuous,
    is_dcpo,
    is_directed,
    is_scott_open,
    infimum,
    make_poset,
    supremum,
    way_below,
)

__version__ = "0.1.0"
