r"""One-step maps for the periodic NLS equation i u_t + u_xx = lam |u|^{2p} u.

Two families live here.  The resonance-based exponential schemes are
formulated on the twisted variable v = e^{-it Lap} u and return the
*increment* psi(v) so the relaxation driver can scale it; their u-space
counterparts return the full new state.  The comparators (Strang
splitting, the norm-preserving Lawson method, and the symplectic
low-regularity scheme SLRI) are u-space one-step maps, the last two
implicit and solved by fixed-point iteration.

Notation used in the docstrings: FF(f, t) is the free flow e^{it Lap}
(see :mod:`nlsr.spectral`), P1/P2 the phi_1/phi_2 filters
phi_j(-2i tau Lap), and fb the complex conjugate field.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, ImplicitSolveError
from .spectral import (
    Grid,
    NonlinearityParams,
    SpectralState,
    apply_phi,
    conjugate,
    ensure_finite,
    free_flow,
    inv_derivative,
    l2_norm,
    to_frequency,
    to_physical,
    zero_mode,
)

V_FORM_KERNELS = ("LRI1", "LRI_P", "LRI2")
U_FORM_KERNELS = ("LRI1", "LRI_P", "STRANG", "LAWSON", "SLRI")
IMPLICIT_KERNELS = ("LAWSON", "SLRI")
CUBIC_ONLY_KERNELS = ("LRI2", "LAWSON", "SLRI")
KERNEL_IDS = ("LRI1", "LRI_P", "LRI2", "STRANG", "LAWSON", "SLRI")


@dataclass(frozen=True)
class SolverOptions:
    """Fixed-point controls for the implicit kernels."""

    tolerance: float = 1e-14
    max_iterations: int = 100

    def __post_init__(self):
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise ConfigurationError("tolerance must be > 0 and max_iterations >= 1")


@dataclass(frozen=True)
class StepKernel:
    """An integrator kernel identity plus its nonlinearity and solver knobs."""

    id: str
    params: NonlinearityParams
    solver: SolverOptions = field(default_factory=SolverOptions)

    def __post_init__(self):
        if self.id not in KERNEL_IDS:
            raise ConfigurationError(f"unknown kernel id {self.id!r}")
        if self.id in CUBIC_ONLY_KERNELS and self.params.p != 1:
            raise ConfigurationError(f"{self.id} is a cubic (p=1) scheme")
        if self.id == "LRI1" and self.params.p != 1:
            raise ConfigurationError("LRI1 is the cubic scheme; use LRI_P for p > 1")

    @property
    def has_v_form(self):
        return self.id in V_FORM_KERNELS

    @property
    def has_u_form(self):
        return self.id in U_FORM_KERNELS

    @property
    def is_implicit(self):
        return self.id in IMPLICIT_KERNELS

    def v_increment(self, v: SpectralState, t: float, tau: float) -> SpectralState:
        """Twisted increment psi_t^tau(v); the new state is v + increment."""
        if self.id == "LRI1":
            return psi_step_v(v, t, tau, self.params)
        if self.id == "LRI_P":
            return phi_p_step_v(v, t, tau, self.params)
        if self.id == "LRI2":
            return lri2_step_v(v, t, tau, self.params)
        raise ConfigurationError(f"kernel {self.id} has no twisted form")

    def u_step(self, u: SpectralState, tau: float) -> SpectralState:
        """Full one-step map on the untwisted variable."""
        if self.id in ("LRI1", "LRI_P"):
            return lri1_step_u(u, tau, self.params)
        if self.id == "STRANG":
            return strang_step(u, tau, self.params)
        if self.id == "LAWSON":
            return lawson_step(u, tau, self.params, self.solver)
        if self.id == "SLRI":
            return slri_step(u, tau, self.params, self.solver)
        raise ConfigurationError(f"kernel {self.id} has no u-space form")


def _prod(grid: Grid, phys) -> SpectralState:
    return to_frequency(phys, grid)


def psi_step_v(v: SpectralState, t: float, tau: float,
               params: NonlinearityParams) -> SpectralState:
    r"""Cubic second-order twisted increment.

    psi_t^tau(f) = -i lam tau FF(-t)[ (FF(t)f)^2 (P1-P2) FF(-t)fb ]
                   - i lam tau FF(-t-tau)[ (FF(t+tau)f)^2 P2 FF(tau-t)fb ]
                   - lam^2 tau^2/2 FF(-t)[ |FF(t)f|^4 FF(t)f ]
    """
    if params.p != 1:
        raise ConfigurationError("psi_step_v is the cubic (p=1) scheme")
    lam = params.lam
    grid = v.grid
    fb = conjugate(v)

    g = to_physical(free_flow(v, t))
    fb_t = free_flow(fb, -t)
    filt = to_physical(apply_phi(fb_t, 1, tau) - apply_phi(fb_t, 2, tau))
    term1 = free_flow(_prod(grid, g * g * filt), -t) * (-1j * lam * tau)

    g_sh = to_physical(free_flow(v, t + tau))
    fb_sh = to_physical(apply_phi(free_flow(fb, tau - t), 2, tau))
    term2 = free_flow(_prod(grid, g_sh * g_sh * fb_sh), -(t + tau)) * (-1j * lam * tau)

    term3 = free_flow(_prod(grid, np.abs(g) ** 4 * g), -t) * (-0.5 * lam * lam * tau * tau)

    return ensure_finite(term1 + term2 + term3, "psi_step_v")


def phi_p_step_v(v: SpectralState, t: float, tau: float,
                 params: NonlinearityParams) -> SpectralState:
    r"""General-power twisted increment; coincides with psi_step_v at p = 1.

    Same three-term structure with (FF(t)f)^{p+1}, the filters acting on
    (FF(-t)fb)^p, and the quintic correction |.|^{4p}.
    """
    lam, p = params.lam, params.p
    grid = v.grid
    fb = conjugate(v)

    g = to_physical(free_flow(v, t))
    fbp = _prod(grid, to_physical(free_flow(fb, -t)) ** p)
    filt = to_physical(apply_phi(fbp, 1, tau) - apply_phi(fbp, 2, tau))
    term1 = free_flow(_prod(grid, g ** (p + 1) * filt), -t) * (-1j * lam * tau)

    g_sh = to_physical(free_flow(v, t + tau))
    fbp_sh = _prod(grid, to_physical(free_flow(fb, tau - t)) ** p)
    filt_sh = to_physical(apply_phi(fbp_sh, 2, tau))
    term2 = free_flow(_prod(grid, g_sh ** (p + 1) * filt_sh), -(t + tau)) * (-1j * lam * tau)

    term3 = free_flow(_prod(grid, np.abs(g) ** (4 * p) * g), -t) * (-0.5 * lam * lam * tau * tau)

    return ensure_finite(term1 + term2 + term3, "phi_p_step_v")


def lri1_step_u(u: SpectralState, tau: float,
                params: NonlinearityParams) -> SpectralState:
    r"""Second-order low-regularity map on u (general power p).

    Psi(f) = FF(tau)f - i lam tau FF(tau)[ f^{p+1} (P1-P2) fb^p ]
             - i lam tau (FF(tau)f)^{p+1} FF(tau) P2 fb^p
             - lam^2 tau^2/2 FF(tau)[ |f|^{4p} f ]
    """
    lam, p = params.lam, params.p
    grid = u.grid
    f = to_physical(u)
    fbp = _prod(grid, np.conj(f) ** p)

    filt = to_physical(apply_phi(fbp, 1, tau) - apply_phi(fbp, 2, tau))
    term2 = free_flow(_prod(grid, f ** (p + 1) * filt), tau) * (-1j * lam * tau)

    g_sh = to_physical(free_flow(u, tau))
    fb_sh = to_physical(free_flow(apply_phi(fbp, 2, tau), tau))
    term3 = _prod(grid, g_sh ** (p + 1) * fb_sh) * (-1j * lam * tau)

    term4 = free_flow(_prod(grid, np.abs(f) ** (4 * p) * f), tau) * (-0.5 * lam * lam * tau * tau)

    out = free_flow(u, tau) + term2 + term3 + term4
    return ensure_finite(out, "lri1_step_u")


def lri2_step_v(v: SpectralState, t: float, tau: float,
                params: NonlinearityParams) -> SpectralState:
    r"""Twisted increment of the cubic scheme with exact-phase main term.

    The map is FF(-t)( e^{i lam tau |g|^2} g - i lam (J1(g) + J2(g)) )
    with g = FF(t)v; J1 and J2 collect antiderivative commutators and
    zero-mode corrections.  Returns the increment (map minus v).
    """
    if params.p != 1:
        raise ConfigurationError("lri2_step_v is a cubic (p=1) scheme")
    lam = params.lam
    grid = v.grid

    g_state = free_flow(v, t)
    g = to_physical(g_state)
    g0 = zero_mode(g_state)
    g0b = np.conj(g0)
    g2 = _prod(grid, g * g)
    mean_ggg = complex(np.mean(np.abs(g) ** 2 * g))
    mean_g2 = complex(np.mean(g * g))

    main = _prod(grid, np.exp(1j * lam * tau * np.abs(g) ** 2) * g)

    # J1: i/2 [ FF(-tau) dxinv( (FF(-tau) dxinv gb) (FF(tau) g^2) )
    #           - dxinv( (dxinv gb) g^2 ) ]
    #     + tau gb0 g^2 + tau mean(|g|^2 g) - tau gb0 mean(g^2)
    igb = inv_derivative(conjugate(g_state))
    a = to_physical(free_flow(igb, -tau))
    b = to_physical(free_flow(g2, tau))
    piece1 = free_flow(inv_derivative(_prod(grid, a * b)), -tau)
    piece2 = inv_derivative(_prod(grid, to_physical(igb) * g * g))
    j1 = (piece1 - piece2) * 0.5j + g2 * (tau * g0b)
    j1.coeffs[0] += tau * (mean_ggg - g0b * mean_g2)

    # J2: i/2 [ FF(-tau)(FF(tau) dxinv g)^2 - (dxinv g)^2 ] gb
    #     + tau g0 (2g - g0) gb
    ig_state = inv_derivative(g_state)
    ig = to_physical(ig_state)
    c = to_physical(free_flow(_prod(grid, to_physical(free_flow(ig_state, tau)) ** 2), -tau))
    j2_phys = 0.5j * (c - ig * ig) * np.conj(g) + tau * g0 * (2.0 * g - g0) * np.conj(g)
    j2 = _prod(grid, j2_phys)

    out = free_flow(main - (j1 + j2) * (1j * lam), -t)
    return ensure_finite(out - v, "lri2_step_v")


def strang_step(u: SpectralState, tau: float,
                params: NonlinearityParams) -> SpectralState:
    """Half free flow, exact nonlinear phase, half free flow."""
    w = to_physical(free_flow(u, 0.5 * tau))
    w = np.exp(-1j * params.lam * tau * np.abs(w) ** (2 * params.p)) * w
    return free_flow(to_frequency(w, u.grid), 0.5 * tau)


def _phys_l2(values, grid: Grid) -> float:
    return float(np.sqrt(2.0 * np.pi / grid.K) * np.linalg.norm(values))


def lawson_step(u: SpectralState, tau: float, params: NonlinearityParams,
                solver: SolverOptions | None = None) -> SpectralState:
    """Norm-preserving Lawson method (implicit stage, cubic)."""
    state, _, _ = lawson_step_info(u, tau, params, solver)
    return state


def lawson_step_info(u, tau, params, solver=None):
    """Lawson step plus (iterations, last residual) from the stage solve.

    Stage: L = -i lam |w + tau/2 L|^2 (w + tau/2 L), w = FF(tau/2)u,
    solved pointwise by fixed point from L0 = -i lam |w|^2 w; then
    u' = FF(tau)u + tau FF(tau/2)L.
    """
    if params.p != 1:
        raise ConfigurationError("lawson_step is a cubic (p=1) scheme")
    solver = solver or SolverOptions()
    lam = params.lam
    grid = u.grid
    w = to_physical(free_flow(u, 0.5 * tau))

    L = -1j * lam * np.abs(w) ** 2 * w
    resid = np.inf
    for it in range(1, solver.max_iterations + 1):
        m = w + 0.5 * tau * L
        L_new = -1j * lam * np.abs(m) ** 2 * m
        resid = _phys_l2(L_new - L, grid)
        L = L_new
        if resid <= solver.tolerance:
            break
    else:
        raise ImplicitSolveError(
            f"Lawson stage did not converge in {solver.max_iterations} iterations "
            f"(last residual {resid:.3e})", residual=resid,
            iterations=solver.max_iterations)

    out = free_flow(u, tau) + free_flow(to_frequency(L, grid), 0.5 * tau) * tau
    return ensure_finite(out, "lawson_step"), it, resid


def _slri_map(f: SpectralState, g_state: SpectralState, tau: float, lam: float) -> SpectralState:
    """Evaluate the symplectic low-regularity map at a given midpoint g."""
    grid = f.grid
    g = to_physical(g_state)
    g0 = zero_mode(g_state)
    g0b = np.conj(g0)
    g2 = _prod(grid, g * g)
    igb = inv_derivative(conjugate(g_state))
    ig = inv_derivative(g_state)

    # i/2 [ dxinv( (FF(-tau) dxinv gb)(FF(tau) g^2) ) - FF(tau) dxinv( (dxinv gb) g^2 ) ]
    x1 = inv_derivative(_prod(grid, to_physical(free_flow(igb, -tau))
                              * to_physical(free_flow(g2, tau))))
    x2 = free_flow(inv_derivative(_prod(grid, to_physical(igb) * g * g)), tau)
    bracket1 = (x1 - x2) * 0.5j

    # FF(tau)[ i/2 gb FF(-tau)(FF(tau) dxinv g)^2 - i/2 gb (dxinv g)^2 - tau |g|^2 g ]
    c = to_physical(free_flow(_prod(grid, to_physical(free_flow(ig, tau)) ** 2), -tau))
    ig_phys = to_physical(ig)
    inner = 0.5j * np.conj(g) * (c - ig_phys * ig_phys) - tau * np.abs(g) ** 2 * g
    bracket2 = free_flow(_prod(grid, inner), tau)

    # tau [ mean(|g|^2 g - gb0 g^2) + gb0 FF(tau) g^2
    #       + 2 g0 FF(tau)|g|^2 - g0^2 FF(tau) gb ]
    bracket3 = (free_flow(g2, tau) * g0b
                + free_flow(_prod(grid, np.abs(g) ** 2), tau) * (2.0 * g0)
                - free_flow(conjugate(g_state), tau) * (g0 * g0))
    bracket3.coeffs[0] += complex(np.mean(np.abs(g) ** 2 * g)) - g0b * complex(np.mean(g * g))

    return free_flow(f, tau) - (bracket1 + bracket2 + bracket3 * tau) * (1j * lam)


def slri_step(u: SpectralState, tau: float, params: NonlinearityParams,
              solver: SolverOptions | None = None) -> SpectralState:
    """Symplectic low-regularity integrator (implicit midpoint-type, cubic)."""
    state, _, _ = slri_step_info(u, tau, params, solver)
    return state


def slri_step_info(u, tau, params, solver=None):
    """SLRI step plus (iterations, last residual).

    The midpoint field solves g = (f + FF(-tau) Psi_sym(f; g)) / 2,
    iterated from g = f to the solver tolerance in L2.
    """
    if params.p != 1:
        raise ConfigurationError("slri_step is a cubic (p=1) scheme")
    solver = solver or SolverOptions()
    g_state = u
    resid = np.inf
    for it in range(1, solver.max_iterations + 1):
        psi = _slri_map(u, g_state, tau, params.lam)
        g_new = (u + free_flow(psi, -tau)) * 0.5
        resid = l2_norm(g_new - g_state)
        g_state = g_new
        if resid <= solver.tolerance:
            break
    else:
        raise ImplicitSolveError(
            f"SLRI midpoint iteration did not converge in {solver.max_iterations} "
            f"iterations (last residual {resid:.3e})", residual=resid,
            iterations=solver.max_iterations)

    return ensure_finite(_slri_map(u, g_state, tau, params.lam), "slri_step"), it, resid


def exact_plane_wave(A: complex, k: int, t: float, params: NonlinearityParams,
                     grid: Grid) -> SpectralState:
    r"""Analytic solution A e^{i(kx - (k^2 + lam |A|^{2p}) t)} as a state."""
    if abs(k) >= grid.K // 2:
        raise ConfigurationError(f"mode {k} out of band for K={grid.K}")
    coeffs = np.zeros(grid.K, dtype=np.complex128)
    omega = k * k + params.lam * abs(A) ** (2 * params.p)
    coeffs[k % grid.K] = A * np.exp(-1j * omega * t)
    return SpectralState(coeffs, grid)
