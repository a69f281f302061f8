"""Frequency-domain analysis: sweeps, peak detection, compliance, studies.

Sweeps evaluate either the closed-form rational function or the nodal oracle
on a logarithmic grid.  Points are independent, so a sweep may fan out over
worker threads; results are assembled by grid index and are bit-identical to
the serial run.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import BadRange, EvaluationSingular, SingularSystem, TooFewPoints
from .pdn import PdnSystem, set_branch_field, system_rf, to_netlist

DEFAULT_FMIN = 1e6
DEFAULT_FMAX = 1e11
DEFAULT_POINTS = 1000

_PLATEAU_RTOL = 1e-12

CLOSED_FORM = "closed"
ORACLE = "oracle"


@dataclass(frozen=True)
class SweepGrid:
    f_min: float
    f_max: float
    points: int

    def __post_init__(self):
        if not (0 < self.f_min < self.f_max) or self.points < 2:
            raise BadRange(f"bad grid [{self.f_min}, {self.f_max}] x {self.points}")

    def freqs(self) -> np.ndarray:
        return np.geomspace(self.f_min, self.f_max, self.points)


def log_grid(f_min: float, f_max: float, points: int) -> SweepGrid:
    """Geometrically spaced frequency grid, endpoints inclusive."""
    return SweepGrid(f_min, f_max, points)


def default_grid() -> SweepGrid:
    return SweepGrid(DEFAULT_FMIN, DEFAULT_FMAX, DEFAULT_POINTS)


@dataclass
class SweepResult:
    freqs: np.ndarray
    z: np.ndarray
    source: str

    @property
    def mag(self) -> np.ndarray:
        return np.abs(self.z)


def _chunks(n, workers):
    size = max(1, math.ceil(n / workers))
    return [(i, min(i + size, n)) for i in range(0, n, size)]


def sweep(system: PdnSystem, grid: SweepGrid, source: str = CLOSED_FORM,
          workers: int | None = None) -> SweepResult:
    """Impedance at every grid frequency via the selected source."""
    freqs = grid.freqs()
    omega = 2.0 * math.pi * freqs
    if source == CLOSED_FORM:
        rf = system_rf(system)
        num = np.asarray(rf.num.coeffs)
        den = np.asarray(rf.den.coeffs)

        def run(lo, hi):
            return _kernels.eval_ratio(num, den, omega[lo:hi])
    elif source == ORACLE:
        net = to_netlist(system)
        arrays = net._element_arrays()

        def run(lo, hi):
            return _kernels.mna_solve(*arrays, net.node_count, net.port,
                                      net.port, omega[lo:hi])
    else:
        raise ValueError(f"unknown source {source!r}")

    if workers and workers > 1:
        parts = _chunks(len(freqs), workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda p: run(*p), parts))
        values = np.concatenate([v for v, _ in results])
        status = np.concatenate([s for _, s in results])
    else:
        values, status = run(0, len(freqs))
    if status.any():
        bad = float(freqs[int(np.argmax(status))])
        if source == CLOSED_FORM:
            raise EvaluationSingular(bad)
        raise SingularSystem(bad)
    return SweepResult(freqs, values, source)


# ---------------------------------------------------------------------------
# peaks
# ---------------------------------------------------------------------------

RESONANCE = "resonance"
ANTI_RESONANCE = "anti_resonance"


@dataclass(frozen=True)
class Peak:
    kind: str
    freq: float       # parabolically refined in (log f, log |Z|)
    magnitude: float  # |Z| at the discrete extremum sample
    index: int        # grid index of the discrete extremum
    q_estimate: float | None = None


@dataclass(frozen=True)
class PeakReport:
    peaks: tuple

    @property
    def resonances(self):
        return tuple(p for p in self.peaks if p.kind == RESONANCE)

    @property
    def anti_resonances(self):
        return tuple(p for p in self.peaks if p.kind == ANTI_RESONANCE)


def _plateau_groups(mag):
    groups = []
    start = 0
    for i in range(1, len(mag)):
        if abs(mag[i] - mag[i - 1]) <= _PLATEAU_RTOL * max(abs(mag[i]), abs(mag[i - 1])):
            continue
        groups.append((start, i - 1))
        start = i
    groups.append((start, len(mag) - 1))
    return groups


def detect_peaks(result: SweepResult) -> PeakReport:
    """Interior strict local extrema of |Z|, refined on the log-log grid.

    Plateaus (neighbors equal within 1e-12 relative) count as one sample at
    their leftmost point.  Grid endpoints are never reported.  Minima are
    resonances, maxima anti-resonances.
    """
    mag = result.mag
    if len(mag) < 5:
        raise TooFewPoints(f"need at least 5 points, got {len(mag)}")
    lf = np.log(result.freqs)
    lm = np.log(mag)
    groups = _plateau_groups(mag)
    peaks = []
    for gi in range(1, len(groups) - 1):
        i0 = groups[gi][0]
        left = mag[groups[gi - 1][1]]
        right = mag[groups[gi + 1][0]]
        if mag[i0] > left and mag[i0] > right:
            kind = ANTI_RESONANCE
        elif mag[i0] < left and mag[i0] < right:
            kind = RESONANCE
        else:
            continue
        # parabola through the extremum and its grid neighbors
        h = 0.5 * (lf[i0 + 1] - lf[i0 - 1])
        curv = lm[i0 - 1] - 2.0 * lm[i0] + lm[i0 + 1]
        if curv != 0.0:
            dx = 0.5 * h * (lm[i0 - 1] - lm[i0 + 1]) / curv
            dx = min(max(dx, -h), h)  # refined peak stays within one cell
            freq = math.exp(lf[i0] + dx)
        else:
            freq = float(result.freqs[i0])
        peaks.append(Peak(kind, freq, float(mag[i0]), i0))
    return PeakReport(tuple(peaks))


def q_estimate(peak: Peak, result: SweepResult) -> float | None:
    """Half-power quality estimate f_peak/(f_hi - f_lo), or None.

    The crossings of |Z|_peak/sqrt(2) (anti-resonance) or sqrt(2)*|Z|_peak
    (resonance) nearest the peak are interpolated linearly in log-log.  None
    when a crossing runs off the grid or another extremum intervenes first.
    """
    mag = result.mag
    lf = np.log(result.freqs)
    lm = np.log(mag)
    if peak.kind == ANTI_RESONANCE:
        target = peak.magnitude / math.sqrt(2.0)
        crossed = lambda v: v <= target
        receding = lambda prev, cur: cur > prev
    else:
        target = peak.magnitude * math.sqrt(2.0)
        crossed = lambda v: v >= target
        receding = lambda prev, cur: cur < prev
    lt = math.log(target)

    def crossing(direction):
        j = peak.index
        while True:
            jn = j + direction
            if jn < 0 or jn >= len(mag):
                return None
            if crossed(mag[jn]):
                frac = (lt - lm[j]) / (lm[jn] - lm[j])
                return math.exp(lf[j] + frac * (lf[jn] - lf[j]))
            if j != peak.index and receding(mag[j], mag[jn]):
                return None  # another peak intervenes before the crossing
            j = jn

    f_lo = crossing(-1)
    f_hi = crossing(+1)
    if f_lo is None or f_hi is None:
        return None
    return peak.freq / (f_hi - f_lo)


def attach_q(report: PeakReport, result: SweepResult) -> PeakReport:
    """Report with q_estimate filled in for every peak."""
    return PeakReport(tuple(replace(p, q_estimate=q_estimate(p, result))
                            for p in report.peaks))


# ---------------------------------------------------------------------------
# target impedance and compliance
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TargetSpec:
    vdd: float
    ripple: float
    current: float

    def __post_init__(self):
        if self.vdd <= 0 or self.current <= 0 or not 0 < self.ripple < 1:
            raise ValueError("need vdd > 0, current > 0, 0 < ripple < 1")


def target_impedance(spec: TargetSpec) -> float:
    """Maximum allowed impedance vdd * ripple / current."""
    return spec.vdd * spec.ripple / spec.current


@dataclass(frozen=True)
class ComplianceReport:
    z_target: float
    violations: tuple  # (f_lo, f_hi) intervals where |Z| > z_target
    worst: tuple       # (freq, |Z|) at the curve maximum

    @property
    def compliant(self) -> bool:
        return not self.violations


def check_compliance(result: SweepResult, z_target: float) -> ComplianceReport:
    """Maximal disjoint intervals where |Z| exceeds the target (strictly).

    Interval edges between samples are interpolated linearly in log-log;
    grazing contact (|Z| == target) is compliant.
    """
    if z_target <= 0:
        raise ValueError("z_target must be positive")
    mag = result.mag
    freqs = result.freqs
    lf = np.log(freqs)
    lm = np.log(mag)
    lt = math.log(z_target)
    over = mag > z_target
    intervals = []
    i = 0
    n = len(mag)
    while i < n:
        if not over[i]:
            i += 1
            continue
        j = i
        while j + 1 < n and over[j + 1]:
            j += 1
        if i == 0:
            f_lo = float(freqs[0])
        else:
            frac = (lt - lm[i - 1]) / (lm[i] - lm[i - 1])
            f_lo = math.exp(lf[i - 1] + frac * (lf[i] - lf[i - 1]))
        if j == n - 1:
            f_hi = float(freqs[-1])
        else:
            frac = (lt - lm[j]) / (lm[j + 1] - lm[j])
            f_hi = math.exp(lf[j] + frac * (lf[j + 1] - lf[j]))
        intervals.append((f_lo, f_hi))
        i = j + 1
    k = int(np.argmax(mag))
    return ComplianceReport(z_target, tuple(intervals),
                            (float(freqs[k]), float(mag[k])))


# ---------------------------------------------------------------------------
# parameter studies and oracle comparison
# ---------------------------------------------------------------------------

def param_sweep(system: PdnSystem, param: str, values, grid: SweepGrid,
                source: str = CLOSED_FORM):
    """One independent sweep + peak report per parameter value.

    param addresses a base branch field, e.g. "z12.C"; the input system is
    left untouched.
    """
    values = [float(v) for v in values]
    if any(v <= 0 for v in values):
        raise ValueError("parameter values must be positive")
    out = []
    for value in values:
        modified = set_branch_field(system, param, value)
        result = sweep(modified, grid, source)
        report = attach_q(detect_peaks(result), result)
        out.append((value, result, report))
    return out


@dataclass(frozen=True)
class OracleComparison:
    freqs: np.ndarray
    z_closed: np.ndarray
    z_oracle: np.ndarray
    rel_err: np.ndarray
    max_rel_err: float
    worst_freq: float


def compare_with_oracle(system: PdnSystem, grid: SweepGrid) -> OracleComparison:
    """Pointwise closed-form vs nodal-oracle agreement over the grid."""
    closed = sweep(system, grid, CLOSED_FORM)
    oracle = sweep(system, grid, ORACLE)
    rel = np.abs(closed.z - oracle.z) / np.abs(oracle.z)
    k = int(np.argmax(rel))
    return OracleComparison(closed.freqs, closed.z, oracle.z, rel,
                            float(rel[k]), float(closed.freqs[k]))
