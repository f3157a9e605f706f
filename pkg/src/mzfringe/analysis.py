"""Fringe-width analysis and parameter sweeps.

Width metric: full width at half maximum of the central bright fringe of the
N-fold coincidence curve, with monotone linear interpolation between the grid
samples bracketing each half-maximum crossing.  The classical and balanced
reference widths this is judged against:

    classical N-photon absorption  sin^(2N)(phi/2):  2 pi - 4 asin(2^(-1/(2N)))
    N-photon path-entangled limit  sin^2(N phi/2):   pi / N

The narrowing fraction maps a measured width onto [0, 1] between those two
endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import SourceParams
from .detection import (
    CoincidenceCurve,
    FluxModel,
    LossModel,
    default_phase_grid,
    n_fold_curve,
    squeezing_for_pairs,
)
from . import exact

__all__ = [
    "NoFringeError",
    "WidthUndefinedError",
    "FringeMetrics",
    "fwhm",
    "classical_width",
    "noon_width",
    "narrowing_fraction",
    "scaling_exponent",
    "curve_metrics",
    "normalized_l2_distortion",
    "gamma_sweep",
    "GammaSweepPoint",
    "flux_efficiency_grid",
    "FluxGridPoint",
]

#: curves flatter than this visibility have no fringe to measure
MIN_VISIBILITY = 1e-6
#: relative tie window when locating the global maximum
PEAK_TIE_RTOL = 1e-12


class NoFringeError(ValueError):
    """Curve is flat to within the visibility floor."""


class WidthUndefinedError(ValueError):
    """Half-maximum level is never crossed inside the sampled period."""


@dataclass(frozen=True)
class FringeMetrics:
    """Summary numbers for one coincidence curve."""

    fwhm: float
    visibility: float
    peak_phase: float
    narrowing_fraction: float | None = None

    def as_dict(self) -> dict:
        return {
            "fwhm_rad": self.fwhm,
            "visibility": self.visibility,
            "peak_phase_rad": self.peak_phase,
            "narrowing_fraction": self.narrowing_fraction,
        }


def _central_peak_index(phases: np.ndarray, values: np.ndarray) -> int:
    vmax = float(np.max(values))
    candidates = np.flatnonzero(values >= vmax * (1.0 - PEAK_TIE_RTOL))
    # exact multi-peak ties (e.g. the balanced N-photon state) are broken by
    # taking the peak nearest the middle of the sampled span
    mid = 0.5 * (phases[0] + phases[-1])
    return int(candidates[np.argmin(np.abs(phases[candidates] - mid))])


def _interp_crossing(x0, y0, x1, y1, level) -> float:
    if y1 == y0:
        return float(x0)
    return float(x0 + (level - y0) * (x1 - x0) / (y1 - y0))


def fwhm(curve: CoincidenceCurve | tuple) -> float:
    """FWHM (radians) of the fringe containing the global maximum.

    Raises NoFringeError on flat curves and WidthUndefinedError when the half
    maximum is not crossed on both sides within the sampled period.
    """
    if isinstance(curve, CoincidenceCurve):
        phases, values = curve.phases, curve.values
    else:
        phases, values = np.asarray(curve[0], float), np.asarray(curve[1], float)

    vmax = float(np.max(values))
    vmin = float(np.min(values))
    if vmax <= 0 or (vmax - vmin) / (vmax + vmin) < MIN_VISIBILITY:
        raise NoFringeError("curve has no measurable fringe")

    peak = _central_peak_index(phases, values)
    half = 0.5 * vmax

    left = None
    for j in range(peak, 0, -1):
        if values[j - 1] <= half:
            left = _interp_crossing(phases[j - 1], values[j - 1], phases[j], values[j], half)
            break
    right = None
    for j in range(peak, len(values) - 1):
        if values[j + 1] <= half:
            right = _interp_crossing(phases[j], values[j], phases[j + 1], values[j + 1], half)
            break
    if left is None or right is None:
        raise WidthUndefinedError("half maximum not crossed inside the sampled period")
    return right - left


def classical_width(order_n: int) -> float:
    """FWHM of sin^(2N)(phi/2), the N-photon absorption fringe of classical light."""
    if order_n < 1:
        raise ValueError("order_n must be >= 1")
    return 2.0 * math.pi - 4.0 * math.asin(2.0 ** (-1.0 / (2.0 * order_n)))


def noon_width(order_n: int) -> float:
    """FWHM of sin^2(N phi/2), the maximally path-entangled fringe."""
    if order_n < 1:
        raise ValueError("order_n must be >= 1")
    return math.pi / order_n


def narrowing_fraction(width: float, order_n: int) -> float:
    """Position of a width between the classical (0) and entangled (1) limits."""
    if order_n < 2:
        raise ValueError("narrowing fraction needs order_n >= 2")
    if not 0.0 < width < 2.0 * math.pi:
        raise ValueError(f"width must lie in (0, 2 pi), got {width}")
    w_cl = classical_width(order_n)
    return (w_cl - width) / (w_cl - noon_width(order_n))


def scaling_exponent(widths) -> float:
    """Least-squares slope of log(width) versus log(N) over >= 3 points."""
    pts = [(int(n), float(w)) for n, w in widths]
    if len(pts) < 3:
        raise ValueError("need at least 3 (N, width) points")
    if any(w <= 0 for _, w in pts):
        raise ValueError("widths must be positive")
    log_n = np.log([n for n, _ in pts])
    log_w = np.log([w for _, w in pts])
    return float(np.polyfit(log_n, log_w, 1)[0])


def curve_metrics(curve: CoincidenceCurve) -> FringeMetrics:
    """FWHM, visibility, peak phase and (for N >= 2) the narrowing fraction."""
    width = fwhm(curve)
    vmax = float(np.max(curve.values))
    vmin = float(np.min(curve.values))
    visibility = (vmax - vmin) / (vmax + vmin)
    peak_phase = float(curve.phases[_central_peak_index(curve.phases, curve.values)])
    narrowing = narrowing_fraction(width, curve.order_N) if curve.order_N >= 2 else None
    return FringeMetrics(width, visibility, peak_phase, narrowing)


def normalized_l2_distortion(curve: CoincidenceCurve, reference: np.ndarray) -> float:
    """L2 distance between the unit-peak curve and a unit-peak reference shape.

    Both curves are normalized to peak 1 first, so the score compares shapes
    across wildly different absolute rates; the discrete integral is weighted
    by the grid spacing.
    """
    ref = np.asarray(reference, dtype=np.float64)
    if ref.shape != curve.values.shape:
        raise ValueError("reference must be sampled on the curve's phase grid")
    peak = float(np.max(curve.values))
    ref_peak = float(np.max(ref))
    if peak <= 0 or ref_peak <= 0:
        raise ValueError("cannot normalize an all-zero curve")
    diff = curve.values / peak - ref / ref_peak
    return float(math.sqrt(np.sum(diff**2 * np.gradient(curve.phases))))


@dataclass(frozen=True)
class GammaSweepPoint:
    gamma_inverse: float
    curve: CoincidenceCurve
    metrics: FringeMetrics


#: interpolation slack for the monotone-narrowing contract (grid-resolution scale)
_MONOTONE_SLACK = 1e-3


def gamma_sweep(
    base: SourceParams,
    loss: LossModel,
    order_n: int,
    gamma_inverse_values,
    phases=None,
    *,
    cutoff: int | None = None,
) -> list[GammaSweepPoint]:
    """Sweep the quantum-resource fraction at fixed coherent amplitude.

    Each gamma_inverse sets r = gamma_inverse * |alpha|^2; the coherent input
    is untouched.  The sweep contract asserts the FWHM never increases with
    gamma_inverse (monotone narrowing, up to grid-interpolation slack).
    """
    points: list[GammaSweepPoint] = []
    for g_inv in gamma_inverse_values:
        if not 0.0 <= g_inv <= 1.0:
            raise ValueError(f"gamma_inverse values must lie in [0, 1], got {g_inv}")
        source = base.with_gamma_inverse(float(g_inv))
        curve = n_fold_curve(source, loss, order_n, phases, cutoff=cutoff)
        points.append(GammaSweepPoint(float(g_inv), curve, curve_metrics(curve)))
    for prev, nxt in zip(points, points[1:]):
        if nxt.metrics.fwhm > prev.metrics.fwhm + _MONOTONE_SLACK:
            raise RuntimeError(
                "narrowing is not monotone in gamma_inverse: "
                f"fwhm({nxt.gamma_inverse}) = {nxt.metrics.fwhm:.6f} > "
                f"fwhm({prev.gamma_inverse}) = {prev.metrics.fwhm:.6f}"
            )
    return points


@dataclass(frozen=True)
class FluxGridPoint:
    eta: float
    pairs_per_pulse: float
    source: SourceParams
    curve: CoincidenceCurve
    metrics: FringeMetrics | None  # None when the fringe is too deformed to measure
    peak_rate_hz: float
    distortion: float


def flux_efficiency_grid(
    gamma_inverse: float,
    eta_values,
    pairs_per_pulse_values,
    order_n: int = 3,
    phases=None,
    *,
    theta_cs: float = math.pi / 2,
    rep_rate: float = 8.0e7,
    cutoff: int | None = None,
) -> list[FluxGridPoint]:
    """Simulate the full state over an (efficiency x flux) grid at fixed gamma.

    pairs_per_pulse fixes the squeezing via sinh^2 r, the coherent amplitude
    follows from |alpha|^2 = r / gamma_inverse.  The distortion score is the
    normalized L2 distance from the lossless low-flux fringe shape of the same
    gamma_inverse (which is the exact N-photon-slice curve).
    """
    if not 0.0 < gamma_inverse <= 1.0:
        raise ValueError("gamma_inverse must lie in (0, 1]")
    if order_n > exact.MAX_SUBSPACE_N:
        raise ValueError(f"order_n must be <= {exact.MAX_SUBSPACE_N} for the reference shape")
    phases = default_phase_grid() if phases is None else np.asarray(phases, dtype=np.float64)

    points: list[FluxGridPoint] = []
    for eta in eta_values:
        if not 0.0 < eta <= 1.0:
            raise ValueError(f"eta values must lie in (0, 1], got {eta}")
        for pairs in pairs_per_pulse_values:
            if pairs < 0:
                raise ValueError("pairs_per_pulse must be >= 0")
            r = squeezing_for_pairs(float(pairs))
            alpha_mag = math.sqrt(r / gamma_inverse) if r > 0 else 0.0
            source = SourceParams(alpha_mag=alpha_mag, theta_cs=theta_cs, r=r)
            curve = n_fold_curve(
                source, LossModel.uniform(float(eta)), order_n, phases, cutoff=cutoff
            )
            reference = exact.subspace_curve(source, order_n, phases)
            flux = FluxModel(rep_rate=rep_rate, pairs_per_pulse=float(pairs))
            try:
                metrics = curve_metrics(curve)
            except (NoFringeError, WidthUndefinedError):
                # a strongly deformed fringe has no central-peak width
                metrics = None
            points.append(
                FluxGridPoint(
                    eta=float(eta),
                    pairs_per_pulse=float(pairs),
                    source=source,
                    curve=curve,
                    metrics=metrics,
                    peak_rate_hz=float(np.max(curve.values)) * flux.rep_rate,
                    distortion=normalized_l2_distortion(curve, reference),
                )
            )
    return points
