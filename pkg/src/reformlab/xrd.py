"""Catalyst descriptors from digitized diffraction curves.

A digitized intensity trace plus user-selected peak windows yields fitted
Gaussian peaks, their full width at half maximum, crystal size from peak
broadening, and the crystallinity index (crystalline peak area over total
peak area).  Windows and crystalline/amorphous labels are supplied by the
user; there is no automatic peak detection.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

SQRT_HALF_PI = math.sqrt(math.pi / 2.0)
FWHM_FACTOR = math.sqrt(2.0 * math.log(2.0))

#: Conventional shape factor for near-spherical crystallites.
DEFAULT_SHAPE_FACTOR = 0.9
#: Cu Kα wavelength in nm.
DEFAULT_WAVELENGTH_NM = 0.15406
#: Peak-broadening size estimates are only meaningful below this size.
SIZE_VALIDITY_LIMIT_NM = 200.0

CRYSTALLINE = "crystalline"
AMORPHOUS = "amorphous"


class XrdError(ValueError):
    pass


class FitError(XrdError):
    pass


@dataclass(frozen=True)
class XrdCurve:
    """Digitized trace: 2θ angles in degrees (strictly increasing) and intensities."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        if x.ndim != 1 or x.shape != y.shape:
            raise XrdError("curve needs matching 1-D x and y")
        if x.size < 2 or np.any(np.diff(x) <= 0):
            raise XrdError("curve x values must be strictly increasing")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise XrdError("curve contains non-finite values")

    def window(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
        mask = (self.x >= lo) & (self.x <= hi)
        return self.x[mask], self.y[mask]


@dataclass(frozen=True)
class GaussianPeak:
    """Fitted peak: baseline y0, center x_c (deg 2θ), width w (deg), area A."""

    y0: float
    x_c: float
    w: float
    A: float
    label: str = CRYSTALLINE

    def __post_init__(self):
        if self.label not in (CRYSTALLINE, AMORPHOUS):
            raise XrdError(f"peak label must be crystalline|amorphous, got {self.label!r}")
        if not (self.w > 0):
            raise XrdError(f"peak width must be positive, got {self.w}")
        if not (self.A > 0):
            raise XrdError(f"peak area must be positive, got {self.A}")

    def height(self) -> float:
        return self.A / (self.w * SQRT_HALF_PI)

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.y0 + self.height() * np.exp(-2.0 * (x - self.x_c) ** 2 / self.w ** 2)


def _peak_model(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    y0, xc, w, A = p
    return y0 + (A / (w * SQRT_HALF_PI)) * np.exp(-2.0 * (x - xc) ** 2 / w ** 2)


def _peak_jacobian(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    y0, xc, w, A = p
    d = x - xc
    E = np.exp(-2.0 * d ** 2 / w ** 2)
    g = (A / (w * SQRT_HALF_PI)) * E
    J = np.empty((x.size, 4))
    J[:, 0] = 1.0
    J[:, 1] = g * 4.0 * d / w ** 2
    J[:, 2] = g * (-1.0 / w + 4.0 * d ** 2 / w ** 3)
    J[:, 3] = E / (w * SQRT_HALF_PI)
    return J


def fit_gaussian(curve: XrdCurve, lo: float, hi: float, label: str = CRYSTALLINE,
                 max_iter: int = 500, rel_tol: float = 1e-10) -> GaussianPeak:
    """Least-squares fit of a constant-baseline Gaussian to one window.

    Damped Gauss-Newton on (y0, x_c, w, A): full steps are halved until the
    residual sum of squares decreases, so accepted iterates improve
    monotonically.  Converges when the relative residual change drops below
    ``rel_tol`` or after ``max_iter`` iterations.
    """
    x, y = curve.window(lo, hi)
    if x.size < 8:
        raise FitError(f"window [{lo}, {hi}] holds {x.size} points; need at least 8")
    if np.ptp(y) == 0.0:
        raise FitError(f"window [{lo}, {hi}] is flat: no local maximum")
    peak_idx = int(np.argmax(y))
    interior = np.argmax(y[1:-1]) + 1 if x.size > 2 else peak_idx
    if y[interior] < y[peak_idx]:  # global max only at a window edge
        raise FitError(f"window [{lo}, {hi}] has no interior local maximum")
    peak_idx = int(interior)

    span = float(x[-1] - x[0])
    y0_init = float(np.min(y))
    w_init = span / 4.0
    p = np.array([y0_init, float(x[peak_idx]),
                  w_init, (float(y[peak_idx]) - y0_init) * w_init * SQRT_HALF_PI])
    sse = float(np.sum((_peak_model(x, p) - y) ** 2))

    for _ in range(max_iter):
        r = _peak_model(x, p) - y
        J = _peak_jacobian(x, p)
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        alpha = 1.0
        new_p, new_sse = None, None
        for _ in range(40):
            cand = p + alpha * step
            if cand[2] > 0 and np.all(np.isfinite(cand)):
                cand_sse = float(np.sum((_peak_model(x, cand) - y) ** 2))
                if np.isfinite(cand_sse) and cand_sse < sse:
                    new_p, new_sse = cand, cand_sse
                    break
            alpha *= 0.5
        if new_p is None:
            break  # no improving step left: converged to numerical precision
        p, prev_sse, sse = new_p, sse, new_sse
        if prev_sse - sse <= rel_tol * max(prev_sse, 1e-300):
            break

    if not np.all(np.isfinite(p)):
        raise FitError(f"fit diverged in window [{lo}, {hi}]: non-finite parameters")
    y0, xc, w, A = (float(v) for v in p)
    if w <= 0 or A <= 0:
        raise FitError(f"fit in window [{lo}, {hi}] produced a degenerate peak "
                       f"(w={w!r}, A={A!r})")
    if not (curve.x[0] <= xc <= curve.x[-1]):
        raise FitError(f"fitted center {xc!r} escaped the curve range")
    return GaussianPeak(y0, xc, w, A, label)


def fwhm(peak: GaussianPeak) -> float:
    """Full width at half maximum in degrees: w·sqrt(2·ln 2) for this profile."""
    if peak.w <= 0:
        raise XrdError(f"width must be positive, got {peak.w}")
    return peak.w * FWHM_FACTOR


@dataclass(frozen=True)
class ScherrerSize:
    """Crystal size from peak broadening; sizes at or above the validity
    limit are flagged rather than dropped."""

    nm: float
    valid: bool


def scherrer_size(beta_rad: float, theta_rad: float,
                  shape_factor: float = DEFAULT_SHAPE_FACTOR,
                  wavelength_nm: float = DEFAULT_WAVELENGTH_NM) -> ScherrerSize:
    """D = K·λ / (β·cos θ), β in radians, θ the Bragg angle in radians."""
    if beta_rad <= 0:
        raise XrdError(f"beta must be positive, got {beta_rad}")
    if not (0.0 < theta_rad < math.pi / 2.0):
        raise XrdError(f"theta must lie in (0, pi/2), got {theta_rad}")
    if shape_factor <= 0 or wavelength_nm <= 0:
        raise XrdError("shape factor and wavelength must be positive")
    d = shape_factor * wavelength_nm / (beta_rad * math.cos(theta_rad))
    return ScherrerSize(d, d < SIZE_VALIDITY_LIMIT_NM)


def crystallinity_index(peaks: list[GaussianPeak]) -> float:
    """Percent of total fitted peak area carried by crystalline-labeled peaks."""
    if not peaks:
        raise XrdError("no peaks supplied")
    total = sum(p.A for p in peaks)
    if total <= 0:
        raise XrdError("total peak area is zero")
    crystalline = sum(p.A for p in peaks if p.label == CRYSTALLINE)
    return 100.0 * crystalline / total


@dataclass(frozen=True)
class PeakWindow:
    lo: float
    hi: float
    label: str

    def __post_init__(self):
        if self.label not in (CRYSTALLINE, AMORPHOUS):
            raise XrdError(f"window label must be crystalline|amorphous, got {self.label!r}")
        if not (self.lo < self.hi):
            raise XrdError(f"window needs lo < hi, got [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class PeakResult:
    peak: GaussianPeak
    fwhm_deg: float
    beta_rad: float
    theta_rad: float
    size_nm: float | None  # None for amorphous peaks
    size_valid: bool


@dataclass(frozen=True)
class XrdReport:
    peaks: tuple[PeakResult, ...]
    avg_size_nm: float
    ci_percent: float
    shape_factor: float
    wavelength_nm: float

    def to_text(self) -> str:
        lines = [
            "format: xrd-report v1",
            f"shape_factor: {self.shape_factor!r}",
            f"wavelength_nm: {self.wavelength_nm!r}",
            f"peak_count: {len(self.peaks)}",
        ]
        for i, pr in enumerate(self.peaks, start=1):
            p = pr.peak
            lines += [
                f"peak{i}.label: {p.label}",
                f"peak{i}.y0: {p.y0!r}",
                f"peak{i}.x_c_deg: {p.x_c!r}",
                f"peak{i}.w_deg: {p.w!r}",
                f"peak{i}.area: {p.A!r}",
                f"peak{i}.fwhm_deg: {pr.fwhm_deg!r}",
                f"peak{i}.beta_rad: {pr.beta_rad!r}",
                f"peak{i}.theta_rad: {pr.theta_rad!r}",
            ]
            if pr.size_nm is not None:
                lines.append(f"peak{i}.size_nm: {pr.size_nm!r}")
                lines.append(f"peak{i}.size_valid: {str(pr.size_valid).lower()}")
        lines.append(f"avg_crystal_size_nm: {self.avg_size_nm!r}")
        lines.append(f"crystallinity_index_percent: {self.ci_percent!r}")
        return "\n".join(lines)

    def fragment_csv(self, crystal_size_column: str = "Average crystal size (nm)",
                     ci_column: str = "Crystallinity index (%)") -> str:
        """Row fragment that fills the two catalyst descriptor columns."""
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow([crystal_size_column, ci_column])
        w.writerow([repr(self.avg_size_nm), repr(self.ci_percent)])
        return out.getvalue()


def analyze_curve(curve: XrdCurve, windows: list[PeakWindow],
                  shape_factor: float = DEFAULT_SHAPE_FACTOR,
                  wavelength_nm: float = DEFAULT_WAVELENGTH_NM) -> XrdReport:
    """Fit every window, then derive per-peak broadening, sizes, and the
    crystallinity index.  The Bragg angle is taken as half the fitted center
    (degrees 2θ), converted to radians.  The average size runs over
    crystalline peaks.
    """
    if not windows:
        raise XrdError("no peak windows supplied")
    if not any(wd.label == CRYSTALLINE for wd in windows):
        raise XrdError("at least one crystalline window is required")
    results = []
    for wd in windows:
        peak = fit_gaussian(curve, wd.lo, wd.hi, wd.label)
        width_deg = fwhm(peak)
        beta = math.radians(width_deg)
        theta = math.radians(peak.x_c / 2.0)
        if peak.label == CRYSTALLINE:
            size = scherrer_size(beta, theta, shape_factor, wavelength_nm)
            results.append(PeakResult(peak, width_deg, beta, theta, size.nm, size.valid))
        else:
            results.append(PeakResult(peak, width_deg, beta, theta, None, False))
    crystalline_sizes = [r.size_nm for r in results if r.size_nm is not None]
    avg = float(np.mean(crystalline_sizes))
    ci = crystallinity_index([r.peak for r in results])
    return XrdReport(tuple(results), avg, ci, shape_factor, wavelength_nm)


def parse_curve(text: str) -> XrdCurve:
    """Two-column trace (2θ degrees, intensity); comma or whitespace separated."""
    xs, ys = [], []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p for p in line.replace(",", " ").split() if p]
        if len(parts) != 2:
            raise XrdError(f"line {line_no}: expected two columns, got {len(parts)}")
        try:
            xs.append(float(parts[0]))
            ys.append(float(parts[1]))
        except ValueError:
            raise XrdError(f"line {line_no}: could not parse {line!r}") from None
    if not xs:
        raise XrdError("empty curve file")
    return XrdCurve(np.array(xs), np.array(ys))


def parse_windows(text: str) -> list[PeakWindow]:
    """Window lines: '<x_lo> <x_hi> <crystalline|amorphous>'."""
    windows = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise XrdError(f"line {line_no}: expected 'lo hi label', got {line!r}")
        try:
            lo, hi = float(parts[0]), float(parts[1])
        except ValueError:
            raise XrdError(f"line {line_no}: could not parse bounds in {line!r}") from None
        windows.append(PeakWindow(lo, hi, parts[2]))
    if not windows:
        raise XrdError("empty windows file")
    return windows
