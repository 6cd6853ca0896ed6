r"""Relaxation of the low-regularity one-step maps for exact mass conservation.

Given a kernel increment Phi(v), each step is scaled by a coefficient
gamma chosen in closed form so that the L2 norm of the update returns
exactly to ||u0||:

    gamma = 1 - ( ||v + Phi||^2 - mass0^2 ) / ||Phi||^2,

the anchored variant of the conservation equation (anchoring to the
initial mass rather than ||v^n|| keeps rounding residue from
accumulating: each step multiplies the previous norm defect by the
small factor |1 - gamma|).  The simulated clock advances by the
stretched step gamma*tau, so trajectories carry their own slightly
non-uniform time grid and finish with one unrelaxed completion step of
size T - t_last <= 2*tau.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BlowUpError, ConfigurationError, RelaxationFailureError
from .integrators import StepKernel
from .spectral import SpectralState, free_flow, l2_norm

# ||increment|| below this multiple of the anchor mass counts as the
# zero-increment branch (gamma = 1).
ZERO_INCREMENT_RTOL = 1e-14

# Loop guard: continue stepping while T - t > tau*(1 + eps); protects the
# completion step from rounding-induced zero length.
_ENDPOINT_EPS = 1e-12

BLOWUP_NORM = 1e6


def compute_gamma(v: SpectralState, increment: SpectralState, mass0: float) -> float:
    """Relaxation coefficient anchored to the initial mass.

    Returns 1 on the zero-increment branch.  The caller is responsible
    for rejecting nonpositive values.
    """
    if mass0 <= 0:
        raise ConfigurationError(f"anchor mass must be positive, got {mass0}")
    inc_norm = l2_norm(increment)
    if inc_norm <= ZERO_INCREMENT_RTOL * mass0:
        return 1.0
    full = l2_norm(v + increment)
    return 1.0 - (full * full - mass0 * mass0) / (inc_norm * inc_norm)


@dataclass(frozen=True)
class RelaxedStep:
    """Result of one relaxed update."""

    state: SpectralState
    gamma: float
    t_next: float
    increment_norm: float
    denominator: float


@dataclass
class Trajectory:
    """Step-by-step record of one run; final state is at time T exactly."""

    times: list = field(default_factory=list)
    gammas: list = field(default_factory=list)
    mass_errors: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    state: SpectralState | None = None
    mass0: float = 0.0

    def record(self, t, gamma, state):
        self.times.append(t)
        self.gammas.append(gamma)
        self.mass_errors.append(abs(l2_norm(state) - self.mass0) / self.mass0)

    @property
    def final_time(self):
        return self.times[-1]

    @property
    def max_mass_error(self):
        return max(self.mass_errors)

    def relaxed_gammas(self):
        """Gamma values of the relaxed steps (initial and completion rows are NaN)."""
        return [g for g in self.gammas if not math.isnan(g)]


def _accept_gamma(gamma, t):
    if not np.isfinite(gamma) or gamma <= 0.0 or gamma >= 2.0:
        raise RelaxationFailureError(
            f"relaxation coefficient {gamma} outside (0, 2) at t={t}; "
            "the step size is too coarse for this data", gamma=gamma, t=t)


def relaxed_step_v(v: SpectralState, t_tilde: float, tau: float,
                   kernel: StepKernel, mass0: float,
                   pin_gamma: float | None = None) -> RelaxedStep:
    """One relaxed step of a twisted-variable kernel.

    pin_gamma bypasses the conservation solve (diagnostic mode); with
    pin_gamma=1 the update coincides with the unrelaxed scheme.
    """
    if not kernel.has_v_form:
        raise ConfigurationError(f"kernel {kernel.id} has no twisted form")
    inc = kernel.v_increment(v, t_tilde, tau)
    inc_norm = l2_norm(inc)
    if pin_gamma is None:
        gamma = compute_gamma(v, inc, mass0)
        _accept_gamma(gamma, t_tilde)
    else:
        gamma = pin_gamma
    state = v + inc if gamma == 1.0 else v + inc * gamma
    return RelaxedStep(state=state, gamma=gamma, t_next=t_tilde + gamma * tau,
                       increment_norm=inc_norm, denominator=inc_norm * inc_norm)


def rlri_u_step(u: SpectralState, t_tilde: float, tau: float,
                kernel: StepKernel, mass0: float,
                pin_gamma: float | None = None) -> RelaxedStep:
    """One relaxed step applied directly to u (order-reducing on rough data)."""
    if not kernel.has_u_form:
        raise ConfigurationError(f"kernel {kernel.id} has no u-space form")
    inc = kernel.u_step(u, tau) - u
    inc_norm = l2_norm(inc)
    if pin_gamma is None:
        gamma = compute_gamma(u, inc, mass0)
        _accept_gamma(gamma, t_tilde)
    else:
        gamma = pin_gamma
    state = u + inc if gamma == 1.0 else u + inc * gamma
    return RelaxedStep(state=state, gamma=gamma, t_next=t_tilde + gamma * tau,
                       increment_norm=inc_norm, denominator=inc_norm * inc_norm)


@dataclass(frozen=True)
class MethodSpec:
    """Kernel plus relaxation mode; what an experiment row calls a method.

    variable forces an unrelaxed baseline onto "v" or "u" when the
    kernel supports both; by default NONE runs use the u-space map.
    """

    name: str
    kernel: StepKernel
    relax: str  # V_RELAX | U_RELAX | NONE
    variable: str | None = None

    def __post_init__(self):
        if self.relax not in ("V_RELAX", "U_RELAX", "NONE"):
            raise ConfigurationError(f"unknown relax mode {self.relax!r}")
        if self.relax == "V_RELAX" and not self.kernel.has_v_form:
            raise ConfigurationError(
                f"V_RELAX needs a twisted kernel, {self.kernel.id} has none")
        if self.relax == "U_RELAX" and self.kernel.id != "LRI1":
            raise ConfigurationError("U_RELAX is defined for the LRI1 kernel only")
        if self.variable not in (None, "v", "u"):
            raise ConfigurationError(f"variable must be 'v' or 'u', got {self.variable!r}")

    @property
    def uses_v_variable(self):
        if self.relax == "V_RELAX":
            return True
        if self.relax == "U_RELAX":
            return False
        if self.variable is not None:
            return self.variable == "v"
        # unrelaxed runs prefer the u-space map when the kernel has one
        return not self.kernel.has_u_form


def _guard(state, t, what):
    norm = l2_norm(state)
    if not np.isfinite(norm) or norm > BLOWUP_NORM:
        raise BlowUpError(f"{what} norm {norm:.3e} exceeded blow-up guard at t={t}",
                          t=t, norm=norm)


def integrate(method: MethodSpec, u0: SpectralState, T: float, tau: float,
              snapshot_times=None, pin_gamma: float | None = None,
              complete_endpoint: bool = True) -> Trajectory:
    """Run a full trajectory on [0, T].

    Relaxed modes advance the stretched clock t <- t + gamma*tau and,
    when complete_endpoint is set, append one unrelaxed kernel step of
    size T - t_last so the final state sits at T exactly (the final u
    is untwisted from v at time T).  With complete_endpoint=False the
    run stops at the last stretched step before T, which is what the
    long-horizon conservation study records.
    """
    if T <= 0 or tau <= 0 or tau > T:
        raise ConfigurationError(f"need 0 < tau <= T, got tau={tau}, T={T}")
    pending = sorted(snapshot_times) if snapshot_times else []
    traj = Trajectory(mass0=l2_norm(u0), state=u0)
    use_v = method.uses_v_variable

    # t=0 twist is the identity, so v0 = u0 for the twisted modes
    y = u0
    t = 0.0
    traj.record(0.0, math.nan, y)

    def take_relaxed(y, t):
        if method.relax == "V_RELAX":
            return relaxed_step_v(y, t, tau, method.kernel, traj.mass0, pin_gamma)
        if method.relax == "U_RELAX":
            return rlri_u_step(y, t, tau, method.kernel, traj.mass0, pin_gamma)
        # unrelaxed baseline: gamma identically 1
        if use_v:
            inc = method.kernel.v_increment(y, t, tau)
            return RelaxedStep(y + inc, 1.0, t + tau, l2_norm(inc), 0.0)
        state = method.kernel.u_step(y, tau)
        return RelaxedStep(state, 1.0, t + tau, 0.0, 0.0)

    def plain_step(y, t, h):
        if use_v:
            return y + method.kernel.v_increment(y, t, h)
        return method.kernel.u_step(y, h)

    while T - t > tau * (1.0 + _ENDPOINT_EPS):
        step = take_relaxed(y, t)
        if step.t_next > T:
            # stretched step would overshoot; fall through to completion
            break
        y, t = step.state, step.t_next
        _guard(y, t, method.name)
        traj.record(t, step.gamma, y)
        while pending and t >= pending[0]:
            traj.snapshots.append((t, y))
            pending.pop(0)

    if complete_endpoint and t < T:
        tau_last = T - t
        y = plain_step(y, t, tau_last)
        t = T
        _guard(y, t, method.name)
        traj.record(T, math.nan, y)
        while pending and t >= pending[0]:
            traj.snapshots.append((t, y))
            pending.pop(0)

    traj.state = free_flow(y, t) if use_v else y
    return traj
