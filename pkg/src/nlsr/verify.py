"""Fast standalone property suite behind the ``verify`` CLI command.

Each check is a named predicate over randomly sampled inputs with a
fixed seed; all of them together run in a few seconds.  The phi
evaluations can be overridden so tests can inject a broken variant and
confirm the suite catches it.
"""

import time
from dataclasses import dataclass

import numpy as np

from . import spectral as sp
from .initial_data import smooth_data
from .integrators import StepKernel, exact_plane_wave, lri1_step_u, psi_step_v
from .relaxation import MethodSpec, compute_gamma, integrate
from .spectral import NonlinearityParams

N_SAMPLES = 1_000_000


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _random_state(grid, rng, decay=2.0):
    c = (rng.standard_normal(grid.K) + 1j * rng.standard_normal(grid.K))
    c *= (1.0 + np.abs(grid.modes)) ** (-decay)
    st = sp.SpectralState(c, grid)
    return st * (1.0 / sp.l2_norm(st))


def _check_phi_bounds(phi1_fn, phi2_fn, rng):
    x = rng.uniform(-1e3, 1e3, N_SAMPLES)
    m1 = np.max(np.abs(phi1_fn(1j * x)))
    m2 = np.max(np.abs(phi2_fn(1j * x)))
    # unit slack for floating-point evaluation of the exact bounds
    ok1 = m1 <= 1.0 + 1e-12
    ok2 = m2 <= 0.5 + 1e-12
    return ok1, ok2, f"max|phi1|={m1:.15f}", f"max|phi2|={m2:.15f}"


def _check_phi_lipschitz(phi1_fn, phi2_fn, rng):
    x = rng.uniform(-50, 50, N_SAMPLES)
    y = rng.uniform(-50, 50, N_SAMPLES)
    d = np.abs(x - y)
    tol = 1e-12
    checks = {
        "phi1-lipschitz": np.abs(phi1_fn(1j * x) - phi1_fn(1j * y)) <= d / 2 + tol,
        "phi2-lipschitz": np.abs(phi2_fn(1j * x) - phi2_fn(1j * y)) <= d / 3 + tol,
        "exp-phi1-lipschitz": np.abs(np.exp(1j * x) * phi1_fn(1j * x)
                                     - np.exp(1j * y) * phi1_fn(1j * y)) <= 2 * d + tol,
        "exp-phi2-lipschitz": np.abs(np.exp(1j * x) * phi2_fn(1j * x)
                                     - np.exp(1j * y) * phi2_fn(1j * y)) <= d + tol,
    }
    return {name: (bool(ok.all()), f"{int((~ok).sum())} violations")
            for name, ok in checks.items()}


def run_verification(phi1_fn=None, phi2_fn=None, seed=20240901):
    """Run every property check; returns a list of CheckResult."""
    phi1_fn = phi1_fn or sp.phi1
    phi2_fn = phi2_fn or sp.phi2
    rng = np.random.default_rng(seed)
    results = []

    def add(name, passed, detail, t0):
        results.append(CheckResult(name, bool(passed), detail, time.perf_counter() - t0))

    t0 = time.perf_counter()
    ok1, ok2, d1, d2 = _check_phi_bounds(phi1_fn, phi2_fn, rng)
    add("phi1-bound", ok1, d1, t0)
    add("phi2-bound", ok2, d2, t0)

    t0 = time.perf_counter()
    for name, (ok, detail) in _check_phi_lipschitz(phi1_fn, phi2_fn, rng).items():
        add(name, ok, detail, t0)

    grid = sp.make_grid(256)
    params = NonlinearityParams(1.0, 1)

    # free flow is an isometry and a semigroup (dyadic times keep s+t exact)
    t0 = time.perf_counter()
    v = _random_state(grid, rng)
    worst_iso = 0.0
    for t in (0.5, 3.25, 1e4):
        w = sp.free_flow(v, t)
        worst_iso = max(worst_iso,
                        abs(sp.l2_norm(w) - sp.l2_norm(v)) / sp.l2_norm(v),
                        abs(sp.hs_norm(w, 1) - sp.hs_norm(v, 1)) / sp.hs_norm(v, 1))
    add("free-flow-isometry", worst_iso <= 1e-12, f"worst rel drift {worst_iso:.2e}", t0)

    t0 = time.perf_counter()
    worst_semi = 0.0
    for _ in range(20):
        s, t = rng.integers(-2 ** 20, 2 ** 20, 2) / 2.0 ** 18
        lhs = sp.free_flow(sp.free_flow(v, s), t)
        rhs = sp.free_flow(v, s + t)
        worst_semi = max(worst_semi, sp.l2_norm(lhs - rhs))
    add("free-flow-semigroup", worst_semi <= 1e-12, f"worst defect {worst_semi:.2e}", t0)

    # gamma anchoring: ||v + gamma*inc|| returns to the anchor mass for
    # increments produced by an actual kernel step
    t0 = time.perf_counter()
    worst_anchor = 0.0
    for _ in range(50):
        v = _random_state(grid, rng)
        tau = 10.0 ** rng.uniform(-4, -1.3)
        inc = psi_step_v(v, rng.uniform(0, 5), tau, params)
        gamma = compute_gamma(v, inc, 1.0)
        worst_anchor = max(worst_anchor, abs(sp.l2_norm(v + inc * gamma) - 1.0))
    add("gamma-anchoring", worst_anchor <= 1e-13, f"worst defect {worst_anchor:.2e}", t0)

    # twisted and untwisted forms of the cubic scheme agree
    t0 = time.perf_counter()
    v = _random_state(grid, rng)
    worst_tw = 0.0
    for t in (0.0, 0.4, 2.7):
        tau = 0.01
        lhs = sp.free_flow(v + psi_step_v(v, t, tau, params), t + tau)
        rhs = lri1_step_u(sp.free_flow(v, t), tau, params)
        worst_tw = max(worst_tw, sp.l2_norm(lhs - rhs))
    add("twisted-kernel-consistency", worst_tw <= 1e-12, f"worst defect {worst_tw:.2e}", t0)

    # gamma pinned to 1 reproduces the unrelaxed scheme
    t0 = time.perf_counter()
    kernel = StepKernel("LRI1", params)
    u0 = smooth_data(grid)
    ta = integrate(MethodSpec("pinned", kernel, "V_RELAX"), u0, 0.5, 0.01, pin_gamma=1.0)
    tb = integrate(MethodSpec("plain", kernel, "NONE", variable="v"), u0, 0.5, 0.01)
    defect = sp.l2_norm(ta.state - tb.state)
    add("gamma-pinned-equivalence", defect <= 1e-14, f"defect {defect:.2e}", t0)

    # one kernel step against the analytic plane wave (local error ~ tau^3)
    t0 = time.perf_counter()
    A, k, tau = 0.9 + 0.2j, 1, 2e-4
    u0 = exact_plane_wave(A, k, 0.0, params, grid)
    u1 = lri1_step_u(u0, tau, params)
    err = sp.l2_norm(u1 - exact_plane_wave(A, k, tau, params, grid))
    add("plane-wave-oracle", err <= 1e-10, f"one-step error {err:.2e}", t0)

    return results


def format_results(results):
    lines = []
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        lines.append(f"[{status}] {r.name:28s} {r.detail}  ({r.seconds:.2f}s)")
    n_fail = sum(not r.passed for r in results)
    lines.append(f"{len(results) - n_fail}/{len(results)} properties passed")
    return "\n".join(lines)
