"""Benchmark studies: convergence, relaxation-coefficient statistics,
long-horizon mass conservation, and efficiency timing.

Each study expands into independent (method, tau) cells, runs them in a
thread pool, and appends one CSV row per cell (or per step, for the
series studies) in a fixed order so reruns with the same config and
seed are byte-identical apart from the wall_time_s column.  Reference
solutions are cached on disk in a small binary snapshot format keyed by
a hash of the initial data and run settings.
"""

import hashlib
import struct
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CacheError, ConfigurationError, NlsrError
from .initial_data import rough_data, smooth_data
from .integrators import SolverOptions
from .methods import make_method
from .relaxation import MethodSpec, integrate
from .spectral import (
    Grid,
    NonlinearityParams,
    SpectralState,
    embed,
    hs_norm,
    make_grid,
    restrict,
)

SNAPSHOT_MAGIC = b"NLSR1"

CSV_SCHEMAS = {
    "convergence": ["study", "method", "relax_mode", "theta", "seed", "K", "T",
                    "tau", "h1_error", "wall_time_s", "status"],
    "gamma": ["study", "method", "theta", "seed", "K", "tau", "n", "t_tilde",
              "gamma"],
    "longtime": ["study", "method", "theta", "seed", "K", "tau", "t_tilde",
                 "mass_rel_err"],
}

STUDIES = ("convergence", "gamma_stats", "longtime_mass", "efficiency")

# drop sweep points whose error sits within this factor of the estimated
# reference-error floor before fitting the log-log slope
FLOOR_FACTOR = 10.0


def fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


# ---------------------------------------------------------------------------
# configuration

@dataclass(frozen=True)
class InitialDataSpec:
    kind: str  # smooth | rough
    theta: float = 2.0
    seed: int = 12345

    def __post_init__(self):
        if self.kind not in ("smooth", "rough"):
            raise ConfigurationError(f"data kind must be smooth|rough, got {self.kind!r}")
        if self.kind == "rough" and self.theta <= 0.5:
            raise ConfigurationError(f"theta must be > 1/2, got {self.theta}")

    def build(self, grid: Grid) -> SpectralState:
        if self.kind == "smooth":
            return smooth_data(grid)
        return rough_data(grid, self.theta, self.seed)

    @property
    def theta_label(self):
        return "smooth" if self.kind == "smooth" else fmt(float(self.theta))


@dataclass(frozen=True)
class ReferenceSettings:
    method: str = "LRI1"
    tau_ref: float = 5e-5
    K_ref: int = 4096


@dataclass(frozen=True)
class ExperimentConfig:
    study: str
    methods: tuple
    K: int
    data: InitialDataSpec
    T: float
    tau_list: tuple
    error_norm_s: float = 1.0
    reference: ReferenceSettings = field(default_factory=ReferenceSettings)
    params: NonlinearityParams = field(default_factory=lambda: NonlinearityParams(1.0, 1))
    solver: SolverOptions = field(default_factory=SolverOptions)
    gamma_series_tau: float = 0.01
    output_dir: str = "out"
    cache_dir: str = ".nlsr-cache"
    threads: int = 0  # 0 = use all logical cores

    def __post_init__(self):
        if self.study not in STUDIES:
            raise ConfigurationError(f"unknown study {self.study!r}; known: {STUDIES}")
        if not self.methods:
            raise ConfigurationError("methods list is empty")
        if list(self.tau_list) != sorted(self.tau_list, reverse=True):
            raise ConfigurationError("tau_list must be sorted descending")
        if self.study in ("convergence", "efficiency"):
            # the reference must resolve well below the sweep floor
            if self.reference.tau_ref > min(self.tau_list) / 2:
                raise ConfigurationError(
                    "reference tau_ref must be at most half the smallest sweep tau")
            if self.reference.K_ref < self.K:
                raise ConfigurationError("reference grid must be at least as fine as K")

    def method_specs(self):
        return [make_method(name, self.params, self.solver) for name in self.methods]


# ---------------------------------------------------------------------------
# snapshot cache (binary header "NLSR1", u64 K, then K little-endian
# (f64 re, f64 im) pairs)

def save_state(path, state: SpectralState):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = state.coeffs.astype("<c16").tobytes()
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<Q", state.grid.K))
        fh.write(payload)


def load_state(path) -> SpectralState:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise CacheError(f"cannot read snapshot {path}: {exc}") from exc
    if len(raw) < 13 or raw[:5] != SNAPSHOT_MAGIC:
        raise CacheError(f"snapshot {path} has a bad header")
    (K,) = struct.unpack("<Q", raw[5:13])
    body = raw[13:]
    if len(body) != 16 * K:
        raise CacheError(f"snapshot {path} is truncated: {len(body)} bytes for K={K}")
    coeffs = np.frombuffer(body, dtype="<c16").astype(np.complex128)
    return SpectralState(coeffs, make_grid(int(K)))


def _reference_key(u0: SpectralState, T, tau_ref, params: NonlinearityParams):
    h = hashlib.sha256()
    h.update(SNAPSHOT_MAGIC)
    h.update(struct.pack("<Qddd i", u0.grid.K, T, tau_ref, params.lam, params.p))
    h.update(u0.coeffs.astype("<c16").tobytes())
    return h.hexdigest()[:20]


def make_reference(u0: SpectralState, T: float, tau_ref: float,
                   params: NonlinearityParams, cache_dir,
                   method_name: str = "LRI1") -> SpectralState:
    """Integrate the reference method at tau_ref, memoized on disk."""
    if T == 0.0:
        return u0
    cache_dir = Path(cache_dir)
    path = cache_dir / f"ref_{_reference_key(u0, T, tau_ref, params)}.nlsr"
    if path.exists():
        try:
            return load_state(path)
        except CacheError as exc:
            warnings.warn(f"reference cache rejected ({exc}); recomputing")
    method = make_method(method_name, params)
    traj = integrate(method, u0, T, tau_ref)
    save_state(path, traj.state)
    return traj.state


# ---------------------------------------------------------------------------
# CSV plumbing

def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(row[col]) for col in header) + "\n")
    return path


def fit_slope(taus, errors, floor=0.0):
    """OLS slope of log(error) vs log(tau) above the error floor.

    Returns (slope, n_used); slope is NaN when fewer than two points
    survive the floor cut.
    """
    taus = np.asarray(taus, dtype=float)
    errors = np.asarray(errors, dtype=float)
    keep = np.isfinite(errors) & (errors > FLOOR_FACTOR * floor)
    if keep.sum() < 2:
        return float("nan"), int(keep.sum())
    slope = np.polyfit(np.log(taus[keep]), np.log(errors[keep]), 1)[0]
    return float(slope), int(keep.sum())


def _pool_map(fn, cells, threads):
    if threads == 1 or len(cells) <= 1:
        return [fn(c) for c in cells]
    workers = threads if threads > 0 else None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, cells))


# ---------------------------------------------------------------------------
# studies

@dataclass
class StudyResult:
    study: str
    csv_path: Path
    summary_path: Path | None
    rows: list
    summary: list          # list of dicts, free-form per study
    failures: int = 0


def _base_row(config, method: MethodSpec, tau):
    return {
        "study": config.study,
        "method": method.name,
        "relax_mode": method.relax,
        "theta": config.data.theta_label,
        "seed": config.data.seed,
        "K": config.K,
        "T": config.T,
        "tau": tau,
        "code_version": __version__,
    }


def _prepare_reference(config, u0, grid):
    """Reference solution restricted to the run grid, plus the error floor."""
    ref = config.reference
    ref_grid = make_grid(ref.K_ref)
    u0_ref = embed(u0, ref_grid)
    cache = config.cache_dir
    u_ref = make_reference(u0_ref, config.T, ref.tau_ref, config.params, cache,
                           ref.method)
    u_ref_coarse = make_reference(u0_ref, config.T, 2 * ref.tau_ref, config.params,
                                  cache, ref.method)
    s = config.error_norm_s
    floor = hs_norm(restrict(u_ref, grid) - restrict(u_ref_coarse, grid), s)
    return restrict(u_ref, grid), floor


def _error_cells(config, u0, grid, u_ref, serial=False):
    """Shared engine of the convergence and efficiency studies."""
    s = config.error_norm_s
    specs = config.method_specs()
    cells = [(m, tau) for m in specs for tau in config.tau_list]

    def run_cell(cell):
        method, tau = cell
        row = _base_row(config, method, tau)
        t0 = time.perf_counter()
        try:
            traj = integrate(method, u0, config.T, tau)
            row["h1_error"] = hs_norm(traj.state - u_ref, s)
            row["status"] = "ok"
        except NlsrError as exc:
            row["h1_error"] = float("nan")
            row["status"] = "error:" + type(exc).__name__
        row["wall_time_s"] = time.perf_counter() - t0
        return row

    threads = 1 if serial else config.threads
    return _pool_map(run_cell, cells, threads)


def _convergence_summary(config, rows, floor):
    summary = []
    for name in config.methods:
        mine = [r for r in rows if r["method"] == name and r["status"] == "ok"]
        taus = [r["tau"] for r in mine]
        errs = [r["h1_error"] for r in mine]
        slope, used = fit_slope(taus, errs, floor)
        summary.append({
            "study": config.study, "method": name, "theta": config.data.theta_label,
            "seed": config.data.seed, "K": config.K, "T": config.T,
            "slope": slope, "fit_points": used, "error_floor": floor,
            "total_wall_time_s": sum(r["wall_time_s"] for r in mine),
        })
    return summary


def run_convergence(config: ExperimentConfig, serial=False) -> StudyResult:
    """Final-time H^s error per (method, tau) against the cached reference."""
    grid = make_grid(config.K)
    u0 = config.data.build(grid)
    u_ref, floor = _prepare_reference(config, u0, grid)
    rows = _error_cells(config, u0, grid, u_ref, serial=serial)
    summary = _convergence_summary(config, rows, floor)
    out = Path(config.output_dir)
    csv_path = write_csv(out / f"{config.study}.csv", CSV_SCHEMAS["convergence"], rows)
    sum_path = write_csv(out / f"{config.study}_summary.csv",
                         list(summary[0].keys()), summary)
    failures = sum(r["status"] != "ok" for r in rows)
    return StudyResult(config.study, csv_path, sum_path, rows, summary, failures)


def run_efficiency(config: ExperimentConfig) -> StudyResult:
    """Same cells as convergence, timed; cells run serially so the
    wall_time_s column is meaningful.  Ordering claims only."""
    return run_convergence(replace(config, study="efficiency"), serial=True)


def run_gamma_stats(config: ExperimentConfig) -> StudyResult:
    """Per-step gamma series at gamma_series_tau plus the d(gamma) slope table."""
    specs = config.method_specs()
    for m in specs:
        if m.relax == "NONE":
            raise ConfigurationError(f"gamma study needs relaxed methods, got {m.name}")
    grid = make_grid(config.K)
    u0 = config.data.build(grid)

    rows = []
    for method in specs:
        traj = integrate(method, u0, config.T, config.gamma_series_tau)
        n = 0
        for t, g in zip(traj.times, traj.gammas):
            if np.isnan(g):
                continue
            rows.append({"study": config.study, "method": method.name,
                         "theta": config.data.theta_label, "seed": config.data.seed,
                         "K": config.K, "tau": config.gamma_series_tau,
                         "n": n, "t_tilde": t, "gamma": g})
            n += 1

    def run_cell(cell):
        method, tau = cell
        traj = integrate(method, u0, config.T, tau)
        g = np.array(traj.relaxed_gammas())
        return {"method": method.name, "tau": tau,
                "d_gamma": float(np.mean(np.abs(g - 1.0))),
                "gamma_min": float(g.min()), "gamma_max": float(g.max())}

    cells = [(m, tau) for m in specs for tau in config.tau_list]
    d_rows = _pool_map(run_cell, cells, config.threads)

    summary = []
    for name in config.methods:
        mine = [r for r in d_rows if r["method"] == name]
        slope, used = fit_slope([r["tau"] for r in mine], [r["d_gamma"] for r in mine])
        for r in mine:
            summary.append({"study": config.study, "method": name,
                            "theta": config.data.theta_label, "seed": config.data.seed,
                            "K": config.K, "tau": r["tau"], "d_gamma": r["d_gamma"],
                            "gamma_min": r["gamma_min"], "gamma_max": r["gamma_max"],
                            "slope": slope, "fit_points": used})
    out = Path(config.output_dir)
    csv_path = write_csv(out / "gamma_series.csv", CSV_SCHEMAS["gamma"], rows)
    sum_path = write_csv(out / "gamma_summary.csv", list(summary[0].keys()), summary)
    return StudyResult(config.study, csv_path, sum_path, rows, summary, 0)


def run_longtime_mass(config: ExperimentConfig) -> StudyResult:
    """Stepwise relative mass error over a long horizon.

    Trajectories stop at the last stretched step at or before T (no
    completion step): the study measures the conservation of the
    stepping itself, matching the stepwise summary statistics.  A
    blow-up aborts only that method's series.
    """
    grid = make_grid(config.K)
    u0 = config.data.build(grid)
    tau = config.tau_list[0]
    specs = config.method_specs()

    def run_cell(method):
        status = "ok"
        try:
            traj = integrate(method, u0, config.T, tau, complete_endpoint=False)
        except NlsrError as exc:
            status = "error:" + type(exc).__name__
            traj = None
        return method, traj, status

    results = _pool_map(run_cell, specs, config.threads)

    rows, summary = [], []
    failures = 0
    for method, traj, status in results:
        if traj is None:
            failures += 1
            summary.append({"study": config.study, "method": method.name,
                            "theta": config.data.theta_label, "seed": config.data.seed,
                            "K": config.K, "tau": tau, "T": config.T,
                            "mass_err_max": float("nan"), "mass_err_min": float("nan"),
                            "status": status})
            continue
        errs = traj.mass_errors[1:]  # skip the t=0 row, which is zero by definition
        for t, e in zip(traj.times[1:], errs):
            rows.append({"study": config.study, "method": method.name,
                         "theta": config.data.theta_label, "seed": config.data.seed,
                         "K": config.K, "tau": tau, "t_tilde": t, "mass_rel_err": e})
        summary.append({"study": config.study, "method": method.name,
                        "theta": config.data.theta_label, "seed": config.data.seed,
                        "K": config.K, "tau": tau, "T": config.T,
                        "mass_err_max": max(errs), "mass_err_min": min(errs),
                        "status": status})
    out = Path(config.output_dir)
    csv_path = write_csv(out / "longtime_mass.csv", CSV_SCHEMAS["longtime"], rows)
    sum_path = write_csv(out / "longtime_summary.csv", list(summary[0].keys()), summary)
    return StudyResult(config.study, csv_path, sum_path, rows, summary, failures)


def run_study(config: ExperimentConfig) -> StudyResult:
    if config.study == "convergence":
        return run_convergence(config)
    if config.study == "efficiency":
        return run_efficiency(config)
    if config.study == "gamma_stats":
        return run_gamma_stats(config)
    if config.study == "longtime_mass":
        return run_longtime_mass(config)
    raise ConfigurationError(f"unknown study {config.study!r}")
