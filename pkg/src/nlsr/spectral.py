r"""Fourier representation of periodic fields on the 1-D torus [0, 2pi).

A field f is stored through its discrete Fourier coefficients with the
normalization

    fhat(k) ~ (1/2pi) \int_T e^{-ikx} f(x) dx,

i.e. the raw FFT sums divided by the number of modes K.  With this
convention the L2 norm carries the Plancherel factor

    ||f||_{L2} = sqrt(2pi) * ||fhat||_{l2},

so norms and the conserved mass are directly comparable across grid
resolutions.  Modes are kept in standard FFT order
(0, 1, ..., K/2-1, -K/2, ..., -1).

All operations are pure: they accept states by value and return new
states, so instances can be shared freely between threads.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

TWO_PI = 2.0 * np.pi

# Phase arguments t*k^2 can reach ~1e10 in long-time runs; reduce them
# modulo 2pi in 80-bit precision before exponentiating.
_TWO_PI_LD = np.longdouble(2) * np.arccos(np.longdouble(-1))

_SERIES_RADIUS = 0.05
# Taylor coefficients: phi_1 = sum z^n/(n+1)!,  phi_2 = sum z^n (n+1)/(n+2)!
_FACT = np.cumprod(np.concatenate([[1.0], np.arange(1.0, 15.0)]))
_PHI1_COEF = 1.0 / _FACT[1:14]
_PHI2_COEF = np.arange(1.0, 14.0) / _FACT[2:15]


def _series(z, coef):
    acc = np.full_like(z, coef[-1])
    for c in coef[-2::-1]:
        acc = acc * z + c
    return acc


def phi1(z):
    r"""phi_1(z) = (e^z - 1)/z, the filtered exponential \int_0^1 e^{zs} ds.

    Removable singularity at z = 0 (value 1) is handled by a Taylor
    series below |z| = 0.05; the closed form loses digits there.
    """
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    out[small] = _series(z[small], _PHI1_COEF)
    zl = z[~small]
    out[~small] = np.expm1(zl) / zl
    return out


def phi2(z):
    r"""phi_2(z) = (z e^z - e^z + 1)/z^2, i.e. \int_0^1 s e^{zs} ds.

    Evaluated as (e^z - phi_1(z))/z away from the origin, which avoids
    the catastrophic cancellation of the textbook form, and by series
    below |z| = 0.05 (value 1/2 at z = 0).
    """
    z = np.asarray(z, dtype=np.complex128)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    out[small] = _series(z[small], _PHI2_COEF)
    zl = z[~small]
    out[~small] = (np.exp(zl) - phi1(zl)) / zl
    return out


@dataclass(frozen=True)
class Grid:
    """Torus discretization: K modes in FFT order and the physical nodes."""

    K: int
    modes: np.ndarray
    nodes: np.ndarray

    def __eq__(self, other):
        return isinstance(other, Grid) and self.K == other.K

    def __hash__(self):
        return hash(self.K)


def make_grid(K: int) -> Grid:
    """Build the K-mode grid; K must be a power of two, K >= 4."""
    if not isinstance(K, (int, np.integer)):
        raise ConfigurationError(f"K must be an integer, got {K!r}")
    K = int(K)
    if K < 4 or (K & (K - 1)) != 0:
        raise ConfigurationError(f"K must be a power of two >= 4, got {K}")
    modes = np.fft.fftfreq(K, d=1.0 / K).astype(np.int64)
    nodes = TWO_PI * np.arange(K) / K
    return Grid(K=K, modes=modes, nodes=nodes)


@dataclass(frozen=True)
class SpectralState:
    """Fourier coefficients of one field; coeffs[i] belongs to grid.modes[i]."""

    coeffs: np.ndarray
    grid: Grid

    def __post_init__(self):
        if len(self.coeffs) != self.grid.K:
            raise ConfigurationError(
                f"coefficient vector length {len(self.coeffs)} != K={self.grid.K}")

    def copy(self):
        return SpectralState(self.coeffs.copy(), self.grid)

    def __add__(self, other):
        _check_same_grid(self, other)
        return SpectralState(self.coeffs + other.coeffs, self.grid)

    def __sub__(self, other):
        _check_same_grid(self, other)
        return SpectralState(self.coeffs - other.coeffs, self.grid)

    def __mul__(self, scalar):
        return SpectralState(self.coeffs * scalar, self.grid)

    __rmul__ = __mul__


@dataclass(frozen=True)
class NonlinearityParams:
    """Nonlinear term lambda*|u|^{2p} u."""

    lam: float
    p: int = 1

    def __post_init__(self):
        if self.p < 1 or int(self.p) != self.p:
            raise ConfigurationError(f"p must be a positive integer, got {self.p}")
        if self.lam == 0.0:
            # lambda = 0 makes the relaxation denominator bound vacuous
            raise ConfigurationError("lambda must be nonzero")


def _check_same_grid(a: SpectralState, b: SpectralState):
    if a.grid.K != b.grid.K:
        raise ConfigurationError(
            f"grid mismatch: K={a.grid.K} vs K={b.grid.K}")


def zero_state(grid: Grid) -> SpectralState:
    return SpectralState(np.zeros(grid.K, dtype=np.complex128), grid)


def to_frequency(values, grid: Grid) -> SpectralState:
    """Transform nodal values to coefficients (raw FFT sums / K)."""
    values = np.asarray(values, dtype=np.complex128)
    if len(values) != grid.K:
        raise ConfigurationError(
            f"value vector length {len(values)} != K={grid.K}")
    return SpectralState(np.fft.fft(values) / grid.K, grid)


def to_physical(state: SpectralState):
    """Evaluate the field at the grid nodes."""
    return np.fft.ifft(state.coeffs) * state.grid.K


def _phase_factor(modes, t):
    """exp(-i t k^2) with t*k^2 reduced mod 2pi in extended precision."""
    k2 = modes.astype(np.longdouble) ** 2
    theta = np.mod(np.longdouble(t) * k2, _TWO_PI_LD).astype(np.float64)
    return np.exp(-1j * theta)


def free_flow(state: SpectralState, t: float) -> SpectralState:
    """Apply the free Schrodinger flow e^{it Laplacian} (symbol e^{-itk^2})."""
    if t == 0.0:
        return state
    return SpectralState(state.coeffs * _phase_factor(state.grid.modes, t),
                         state.grid)


def apply_phi(state: SpectralState, j: int, c: float) -> SpectralState:
    """Apply the operator phi_j(-2ic*Laplacian), i.e. phi_j(2ic k^2) per mode."""
    if j == 1:
        mult = phi1(2j * c * state.grid.modes.astype(np.float64) ** 2)
    elif j == 2:
        mult = phi2(2j * c * state.grid.modes.astype(np.float64) ** 2)
    else:
        raise ConfigurationError(f"phi index must be 1 or 2, got {j}")
    return SpectralState(state.coeffs * mult, state.grid)


def inv_derivative(state: SpectralState) -> SpectralState:
    """Spectral antiderivative: divide mode k != 0 by ik, zero the mean."""
    k = state.grid.modes
    out = np.zeros_like(state.coeffs)
    nz = k != 0
    out[nz] = state.coeffs[nz] / (1j * k[nz])
    return SpectralState(out, state.grid)


def derivative(state: SpectralState) -> SpectralState:
    """Spectral derivative: multiply mode k by ik."""
    return SpectralState(state.coeffs * (1j * state.grid.modes), state.grid)


def zero_mode(state: SpectralState) -> complex:
    """Coefficient of mode 0 (the mean value of the field)."""
    return complex(state.coeffs[0])


def l2_norm(state: SpectralState) -> float:
    """L2 norm with the Plancherel factor sqrt(2pi)."""
    return float(np.sqrt(TWO_PI) * np.linalg.norm(state.coeffs))


def hs_norm(state: SpectralState, s: float) -> float:
    """Sobolev H^s norm via the weights (1 + k^2)^{s/2}, s >= 0."""
    if s < 0:
        raise ConfigurationError(f"Sobolev index must be >= 0, got {s}")
    w = (1.0 + state.grid.modes.astype(np.float64) ** 2) ** (s / 2.0)
    return float(np.sqrt(TWO_PI) * np.linalg.norm(w * state.coeffs))


def conjugate(state: SpectralState) -> SpectralState:
    """Complex conjugate of the field: ghat(k) = conj(fhat(-k)), index mod K."""
    K = state.grid.K
    idx = (-np.arange(K)) % K
    return SpectralState(np.conj(state.coeffs[idx]), state.grid)


def pointwise_product(a: SpectralState, b: SpectralState) -> SpectralState:
    """Product of two fields via collocation (no dealiasing)."""
    _check_same_grid(a, b)
    return to_frequency(to_physical(a) * to_physical(b), a.grid)


def pointwise_power_abs(a: SpectralState, q: int) -> SpectralState:
    """|a|^{2q} * a computed at the nodes (identity for q = 0)."""
    if q < 0 or int(q) != q:
        raise ConfigurationError(f"power must be a nonnegative integer, got {q}")
    if q == 0:
        return a
    w = to_physical(a)
    return to_frequency(np.abs(w) ** (2 * q) * w, a.grid)


def energy(state: SpectralState, params: NonlinearityParams) -> float:
    r"""Hamiltonian \int |grad u|^2 + lam/(p+1) |u|^{2p+2} dx (diagnostic)."""
    k2 = state.grid.modes.astype(np.float64) ** 2
    grad_term = TWO_PI * float(np.sum(k2 * np.abs(state.coeffs) ** 2))
    w = np.abs(to_physical(state))
    pot_term = (params.lam / (params.p + 1.0)
                * float(np.sum(w ** (2 * params.p + 2))) * TWO_PI / state.grid.K)
    return grad_term + pot_term


def ensure_finite(state: SpectralState, context: str = "state"):
    """Raise NumericsError when a coefficient is NaN or infinite."""
    if not np.all(np.isfinite(state.coeffs)):
        from .errors import NumericsError
        raise NumericsError(f"non-finite values in {context}")
    return state


def embed(state: SpectralState, grid: Grid) -> SpectralState:
    """Zero-pad a state onto a finer grid (exact for band-limited fields)."""
    if grid.K == state.grid.K:
        return state
    if grid.K < state.grid.K:
        raise ConfigurationError("embed target must be at least as fine")
    out = np.zeros(grid.K, dtype=np.complex128)
    Ks = state.grid.K
    out[: Ks // 2] = state.coeffs[: Ks // 2]
    out[-Ks // 2:] = state.coeffs[-(Ks // 2):]
    return SpectralState(out, grid)


def restrict(state: SpectralState, grid: Grid) -> SpectralState:
    """Drop modes outside a coarser grid's band."""
    if grid.K == state.grid.K:
        return state
    if grid.K > state.grid.K:
        raise ConfigurationError("restrict target must be coarser")
    Kt = grid.K
    out = np.concatenate([state.coeffs[: Kt // 2], state.coeffs[-(Kt // 2):]])
    return SpectralState(out.copy(), grid)
