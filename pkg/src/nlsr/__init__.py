"""Relaxation low-regularity integrators for the periodic NLS equation,
with a pseudospectral core and a CSV benchmark harness."""

__version__ = "0.1.0"

from .errors import (
    BlowUpError,
    CacheError,
    ConfigurationError,
    ImplicitSolveError,
    NlsrError,
    NumericsError,
    RelaxationFailureError,
)
from .initial_data import rough_data, smooth_data
from .integrators import (
    SolverOptions,
    StepKernel,
    exact_plane_wave,
    lawson_step,
    lri1_step_u,
    lri2_step_v,
    phi_p_step_v,
    psi_step_v,
    slri_step,
    strang_step,
)
from .methods import METHOD_NAMES, make_method
from .relaxation import (
    MethodSpec,
    RelaxedStep,
    Trajectory,
    compute_gamma,
    integrate,
    relaxed_step_v,
    rlri_u_step,
)
from .spectral import (
    Grid,
    NonlinearityParams,
    SpectralState,
    apply_phi,
    conjugate,
    energy,
    free_flow,
    hs_norm,
    inv_derivative,
    l2_norm,
    make_grid,
    phi1,
    phi2,
    pointwise_power_abs,
    pointwise_product,
    to_frequency,
    to_physical,
    zero_mode,
)
