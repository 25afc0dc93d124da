"""confgeo: chart-scale numerical verification of conformal rescaling,
twistor-form calculus, holonomy estimation, and triple warped products.

Everything runs on coordinate boxes with optional periodic axes; smooth
fields differentiate through forward-mode jets (order-4 finite differences
as the cross-check backend), and each geometric identity is verified as a
machine-checkable residual.
"""

from .backend import active_backend, numba_enabled, set_backend, use_backend
from .chart import ChartDomain, frame_gram_schmidt, integrate_chart
from .conformal import (
    ConformalPair,
    conformal_vector_residual,
    connection_law_residual,
    einstein_pair_diagnostics,
    mobius_einstein_pair,
    rescale,
    scalar_law_residual,
    trace_free_ricci_residual,
)
from .curvature import (
    ConnectionCoefficients,
    CurvatureBundle,
    MetricField,
    christoffel,
    curvature_pack,
    grad_laplace,
    lie_derivative_metric,
    volume_density,
)
from .exterior import (
    PForm,
    basic_form_residual,
    codifferential,
    codifferential_via_star,
    conformal_form_transport,
    exterior_derivative,
    hodge_star,
    twistor_killing_residual,
)
from .fields import ScalarField, VectorField, eval_jet
from .holonomy import (
    Distribution,
    HolonomyClassification,
    HolonomyEstimate,
    LoopFamily,
    classify_holonomy,
    constant_distribution,
    coordinate_block_distribution,
    default_loop_family,
    distribution_parallel_residual,
    invariant_subspaces,
    parallel_transport,
    path_transport_matrix,
    sample_holonomy,
    verify_parallel_field,
)
from .jets import Jet, symmetrize
from .report import VerificationReport, emit_report
from .scenarios import (
    BUILTIN_SCENARIOS,
    ScenarioConfig,
    concordance_table,
    load_scenario,
    run_scenario,
)
from .triple_warped import (
    FactorSpec,
    TripleWarpedPair,
    TripleWarpedSpec,
    alignment_diagnostics,
    build_triple_warped,
    conjugate_identity_residual,
    recover_factors,
    reducibility_certificate,
    split_from_holonomy,
)

__version__ = "0.1.0"
