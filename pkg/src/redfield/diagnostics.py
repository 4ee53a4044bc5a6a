"""Complete-positivity checks and trajectory analysis."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bath import BathParameters, validate
from .entanglement import (
    BELL_PLUS,
    XState,
    concurrence,
    evolve,
    mutual_information,
    positivity_minors,
)
from .errors import PositivityError, ResolutionError
from .numerics import hermitian_eig
from .qubit import big_omega

PSD_TOL = 1e-11
RISE_TOL = 1e-12
ALIVE_TOL = 1e-9
POINTS_PER_OSCILLATION = 20


@dataclass(frozen=True)
class ChoiReport:
    t: float
    min_eig: float
    is_cp: bool
    spectrum: np.ndarray


def choi_matrix(params: BathParameters, t: float) -> np.ndarray:
    """(id (x) gamma_t)[P+] with P+ the projector on (|00> + |11>)/sqrt(2)."""
    return evolve(BELL_PLUS, params, t).matrix()


def choi_at(params: BathParameters, t: float, tol: float = PSD_TOL) -> ChoiReport:
    spectrum = hermitian_eig(choi_matrix(params, t)).values
    return ChoiReport(t=float(t), min_eig=float(spectrum[0]), is_cp=bool(spectrum[0] >= -tol), spectrum=spectrum)


def cp_divisibility_scan(params: BathParameters, taus) -> list[tuple[float, float]]:
    """Choi minimum eigenvalue of the intermediate map over each gap ``tau``.

    The dynamics is a semigroup, so the map from s to t depends on t - s only.
    """
    out = []
    for tau in taus:
        if tau <= 0:
            raise ValueError(f"intermediate-map gaps must be positive, got {tau}")
        out.append((float(tau), choi_at(params, tau).min_eig))
    return out


@dataclass
class TimeSeries:
    t: np.ndarray
    concurrence: np.ndarray
    mutual_info: np.ndarray
    choi_min_eig: np.ndarray
    minor1: np.ndarray
    minor2: np.ndarray
    diag_min: np.ndarray
    bloch_det: np.ndarray
    r03_t: np.ndarray

    def __post_init__(self):
        n = len(self.t)
        for name in self.columns():
            if len(getattr(self, name)) != n:
                raise ValueError(f"series column {name} has length {len(getattr(self, name))}, expected {n}")

    @staticmethod
    def columns() -> tuple[str, ...]:
        return ("t", "concurrence", "mutual_info", "choi_min_eig", "minor1", "minor2", "diag_min", "bloch_det", "r03_t")

    def __len__(self) -> int:
        return len(self.t)


@dataclass
class TrajectoryFindings:
    increase_intervals: list[tuple[float, float]] = field(default_factory=list)
    n_cycles: int = 0
    death_time: float | None = None
    t_cp: float | None = None
    t_cp_uncertainty: float = 0.0
    mi_violations: list[float] = field(default_factory=list)
    maxima_times: list[float] = field(default_factory=list)


def max_time_step(params: BathParameters) -> float:
    return math.pi / big_omega(params) / POINTS_PER_OSCILLATION


def check_resolution(params: BathParameters, grid) -> None:
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ResolutionError("time grid needs at least two points")
    steps = np.diff(grid)
    if np.any(steps <= 0):
        raise ResolutionError("time grid must be strictly increasing")
    limit = max_time_step(params)
    if steps.max() > limit * (1.0 + 1e-12):
        raise ResolutionError(
            f"time step {steps.max():.6g} exceeds (pi/Omega)/{POINTS_PER_OSCILLATION} = {limit:.6g}"
        )


def scan_trajectory(x0: XState, params: BathParameters, grid, full: bool = True) -> TimeSeries:
    """Evaluate all per-sample diagnostics along ``grid``.

    With ``full=False`` the Choi and mutual-information columns are left as
    NaN, which is all a concurrence-only sweep needs.  Samples where the
    evolved state is not positive get NaN concurrence and mutual information.
    """
    validate(params)
    check_resolution(params, grid)
    grid = np.asarray(grid, dtype=float)
    n = grid.size
    cols = {name: np.full(n, np.nan) for name in TimeSeries.columns()[1:]}

    for k, t in enumerate(grid):
        x = evolve(x0, params, t)
        m1, m2, dmin = positivity_minors(x)
        cols["minor1"][k], cols["minor2"][k], cols["diag_min"][k] = m1, m2, dmin
        r03 = x.rho11 - x.rho22 + x.rho33 - x.rho44
        cols["r03_t"][k] = r03
        cols["bloch_det"][k] = 0.25 * (1.0 - r03 * r03)
        try:
            cols["concurrence"][k] = concurrence(x)
        except PositivityError:
            pass
        if full:
            cols["choi_min_eig"][k] = choi_at(params, t).min_eig
            try:
                cols["mutual_info"][k] = mutual_information(x.matrix())
            except PositivityError:
                pass
    return TimeSeries(t=grid, **cols)


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of True as (first, last) index pairs."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, len(mask) - 1))
    return runs


def analyze(
    series: TimeSeries,
    rise: float = RISE_TOL,
    alive: float = ALIVE_TOL,
    psd_tol: float = PSD_TOL,
) -> TrajectoryFindings:
    t = np.asarray(series.t, dtype=float)
    c = np.asarray(series.concurrence, dtype=float)
    n = t.size
    findings = TrajectoryFindings()
    if n == 0:
        return findings
    findings.t_cp_uncertainty = float(np.max(np.diff(t))) if n > 1 else 0.0

    dead = ~(c > alive)  # NaN counts as not alive
    death_idx = None
    if dead[-1]:
        alive_idx = np.flatnonzero(~dead)
        death_idx = 0 if alive_idx.size == 0 else int(alive_idx[-1]) + 1
        findings.death_time = float(t[death_idx])
    end = n if death_idx is None else death_idx

    if end > 1:
        diffs = c[1:end] - c[: end - 1]
        for first, last in _runs(diffs > rise):
            findings.increase_intervals.append((float(t[first]), float(t[last + 1])))
    for i in range(1, end - 1):
        if c[i] > alive and c[i] > c[i - 1] and c[i] > c[i + 1]:
            findings.maxima_times.append(float(t[i]))
    findings.n_cycles = len(findings.maxima_times)

    choi = np.asarray(series.choi_min_eig, dtype=float)
    if not np.all(np.isnan(choi)):
        bad = np.flatnonzero(~(choi >= -psd_tol))
        if bad.size == 0:
            findings.t_cp = float(t[0])
        elif bad[-1] + 1 < n:
            findings.t_cp = float(t[bad[-1] + 1])

    if findings.t_cp is not None:
        mi = np.asarray(series.mutual_info, dtype=float)
        for i in range(n - 1):
            if t[i] > findings.t_cp and mi[i + 1] - mi[i] > rise:
                findings.mi_violations.append(float(t[i]))
    return findings
