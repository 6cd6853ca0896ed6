"""Named method roster mapping experiment labels to kernel + relaxation."""

from .errors import ConfigurationError
from .integrators import SolverOptions, StepKernel
from .relaxation import MethodSpec
from .spectral import NonlinearityParams

# label -> (kernel id, relax mode, note)
_ROSTER = {
    "RLRI1-v": ("LRI1", "V_RELAX", "relaxed cubic low-regularity scheme (twisted variable)"),
    "RLRI2-v": ("LRI2", "V_RELAX", "relaxed exact-phase low-regularity scheme (twisted variable)"),
    "RLRI-u": ("LRI1", "U_RELAX", "relaxation applied to u; order-reducing on rough data"),
    "LRI1": ("LRI1", "NONE", "unrelaxed second-order low-regularity scheme"),
    "LRI-P": ("LRI_P", "NONE", "general-power low-regularity scheme"),
    "Strang": ("STRANG", "NONE", "Strang splitting with exact nonlinear phase"),
    "Lawson": ("LAWSON", "NONE", "norm-preserving Lawson method (implicit)"),
    "SLRI": ("SLRI", "NONE", "symplectic low-regularity integrator (implicit)"),
}

METHOD_NAMES = tuple(_ROSTER)


def make_method(name: str, params: NonlinearityParams,
                solver: SolverOptions | None = None) -> MethodSpec:
    if name not in _ROSTER:
        raise ConfigurationError(
            f"unknown method {name!r}; known: {', '.join(METHOD_NAMES)}")
    kernel_id, relax, _ = _ROSTER[name]
    kernel = StepKernel(kernel_id, params, solver or SolverOptions())
    return MethodSpec(name, kernel, relax)


def method_table():
    """Rows (name, kernel, relax mode, implicit?, note) for the CLI listing."""
    rows = []
    for name, (kid, relax, note) in _ROSTER.items():
        implicit = kid in ("LAWSON", "SLRI")
        rows.append((name, kid, relax, implicit, note))
    return rows
