"""Symbolic-numeric toolkit for Lie point symmetries of self-dual Yang-Mills."""

from .tensors import (
    GaugeAlgebra,
    gauge_algebra,
    kronecker,
    levi_civita,
    load_gauge_algebra,
    su2_algebra,
    z_component,
)
from .expressions import Expression, collect_jet, substitute_sdym
from .prolongation import (
    DeterminingSystem,
    check_reference_system,
    extract_determining_system,
    prolonged_action_expr,
    sdym_expr,
)
from .solver import (
    ConformalGaugeParams,
    SymmetryGenerator,
    bracket,
    closure_check,
    conformal_gauge_generator,
    dual_pair_nullspace,
    mixing_nullspace,
    solve_ansatz,
    verify_generator,
)
from .numeric import (
    FieldEvaluator,
    bpst_instanton,
    evolutionary_rep,
    flow_residual_scaling,
    sdym_residual_numeric,
)

__version__ = "0.1.0"
