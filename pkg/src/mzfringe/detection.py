"""Photon-number-resolving detection with binomial loss.

Loss placement: equal-efficiency loss commutes with balanced linear optics, so
states propagate unitarily and all transmission/detector inefficiency is
applied as one binomial thinning channel at the detectors.  Each photon
arriving at a detector survives independently with probability eta, so an
m-photon arrival registers n <= m clicks with binomial weight; this is what
folds higher coincidence orders into lower ones at sub-unit efficiency.

Detector naming: detector **e** is the output port whose N-fold coincidence
rate vanishes at zero interferometer phase (the super-resolving fringe lives
there), detector **f** is the complementary port.  Under the beamsplitter
convention of :mod:`mzfringe.optics` the e port is the *second* grid mode and
f the first, i.e. outcome (n_e, n_f) reads grid entry [n_f, n_e].

Detectors are modeled as ideal photon-number resolvers after loss; multiplexed
single-photon-counter combinatorics are out of scope.  An optional additive
dark-click probability per detector exists but defaults to 0 so the headline
sweeps are not silently polluted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .states import CutoffError, SourceParams, TwoModeState, default_cutoff, input_state
from .optics import beamsplitter_5050, phase_shift

__all__ = [
    "LossModel",
    "FluxModel",
    "ClickOutcome",
    "CoincidenceCurve",
    "click_probability",
    "detected_distribution",
    "n_fold_curve",
    "rate_curve",
    "squeezing_for_pairs",
]

#: grid axes of the post-interferometer state
F_AXIS = 0  # first mode: bright at phi = 0
E_AXIS = 1  # second mode: dark at phi = 0, carries the narrowed fringe

DEFAULT_REP_RATE_HZ = 8.0e7  # pulsed source repetition rate


def _check_unit_interval(name: str, value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class LossModel:
    """Lumped transmission x quantum efficiency per detector."""

    eta_e: float = 1.0
    eta_f: float = 1.0
    dark_click_e: float = 0.0
    dark_click_f: float = 0.0

    def __post_init__(self):
        for name in ("eta_e", "eta_f", "dark_click_e", "dark_click_f"):
            _check_unit_interval(name, getattr(self, name))

    @classmethod
    def uniform(cls, eta: float) -> "LossModel":
        """Single setup transmission eta feeding both detectors."""
        return cls(eta_e=eta, eta_f=eta)

    def as_dict(self) -> dict:
        return {
            "eta_e": self.eta_e,
            "eta_f": self.eta_f,
            "dark_click_e": self.dark_click_e,
            "dark_click_f": self.dark_click_f,
        }


@dataclass(frozen=True)
class FluxModel:
    """Source brightness: pulse rate and SPDC pairs per pulse (= sinh^2 r)."""

    rep_rate: float = DEFAULT_REP_RATE_HZ
    pairs_per_pulse: float = 0.0

    def __post_init__(self):
        if self.rep_rate <= 0:
            raise ValueError("rep_rate must be positive")
        if self.pairs_per_pulse < 0:
            raise ValueError("pairs_per_pulse must be >= 0")

    @property
    def pair_rate(self) -> float:
        """SPDC pair rate in Hz."""
        return self.pairs_per_pulse * self.rep_rate

    @classmethod
    def from_squeezing(cls, r: float, rep_rate: float = DEFAULT_REP_RATE_HZ) -> "FluxModel":
        return cls(rep_rate=rep_rate, pairs_per_pulse=math.sinh(r) ** 2)

    def as_dict(self) -> dict:
        return {
            "rep_rate_hz": self.rep_rate,
            "pairs_per_pulse": self.pairs_per_pulse,
            "pair_rate_hz": self.pair_rate,
        }


def squeezing_for_pairs(pairs_per_pulse: float) -> float:
    """Squeezing parameter r with sinh^2 r = pairs_per_pulse."""
    if pairs_per_pulse < 0:
        raise ValueError("pairs_per_pulse must be >= 0")
    return math.asinh(math.sqrt(pairs_per_pulse))


@dataclass(frozen=True)
class ClickOutcome:
    """Detected photon counts (n_e, n_f); an (N, 0) outcome is the N-fold event."""

    n_e: int
    n_f: int = 0

    def __post_init__(self):
        if self.n_e < 0 or self.n_f < 0:
            raise ValueError("click counts must be non-negative")


def _thinning_weights(cutoff: int, detected: int, eta: float) -> np.ndarray:
    """w[m] = P(detect exactly `detected` of m arriving photons) for m = 0..cutoff."""
    m = np.arange(cutoff + 1)
    w = np.zeros(cutoff + 1)
    sel = m >= detected
    # 0^0 = 1 conventions make eta = 0 and eta = 1 exact
    w[sel] = (
        np.array([math.comb(int(mi), detected) for mi in m[sel]], dtype=np.float64)
        * eta**detected
        * (1.0 - eta) ** (m[sel] - detected)
    )
    return w


def _thinning_matrix(cutoff: int, eta: float) -> np.ndarray:
    """T[m, d] = P(d clicks | m photons) under binomial loss with efficiency eta."""
    t = np.zeros((cutoff + 1, cutoff + 1))
    for d in range(cutoff + 1):
        t[:, d] = _thinning_weights(cutoff, d, eta)
    return t


def _dark_convolve(q: np.ndarray, p_dark_f: float, p_dark_e: float) -> np.ndarray:
    """Add an independent single dark click per detector with the given probability."""
    for axis, p in ((0, p_dark_f), (1, p_dark_e)):
        if p == 0.0:
            continue
        shifted = np.zeros_like(q)
        if axis == 0:
            shifted[1:, :] = q[:-1, :]
        else:
            shifted[:, 1:] = q[:, :-1]
        q = (1.0 - p) * q + p * shifted  # top bin mass spills off the grid
    return q


def click_probability(state: TwoModeState, outcome: ClickOutcome, loss: LossModel) -> float:
    """Probability of detecting exactly (n_e, n_f) clicks after binomial loss.

    Sums |amplitude(m_f, m_e)|^2 over all true photon numbers m_e >= n_e,
    m_f >= n_f with binomial thinning weights, which is exactly how lossy
    higher coincidence orders contaminate an N-fold event.
    """
    if outcome.n_e > state.cutoff or outcome.n_f > state.cutoff:
        raise CutoffError(
            f"outcome ({outcome.n_e}, {outcome.n_f}) exceeds the state cutoff {state.cutoff}"
        )
    if loss.dark_click_e or loss.dark_click_f:
        q = detected_distribution(state, loss)
        return float(q[outcome.n_f, outcome.n_e])
    prob = np.abs(state.amplitudes) ** 2
    w_f = _thinning_weights(state.cutoff, outcome.n_f, loss.eta_f)
    w_e = _thinning_weights(state.cutoff, outcome.n_e, loss.eta_e)
    return float(w_f @ prob @ w_e)


def detected_distribution(state: TwoModeState, loss: LossModel) -> np.ndarray:
    """Joint distribution of detected counts, indexed [d_f, d_e] like the grid.

    Entries sum to 1 - truncation_deficit (dark clicks only move mass around,
    except for the negligible spill past the grid edge).
    """
    prob = np.abs(state.amplitudes) ** 2
    t_f = _thinning_matrix(state.cutoff, loss.eta_f)
    t_e = _thinning_matrix(state.cutoff, loss.eta_e)
    q = t_f.T @ prob @ t_e
    return _dark_convolve(q, loss.dark_click_f, loss.dark_click_e)


@dataclass(frozen=True)
class CoincidenceCurve:
    """N-fold coincidence sampled on a phase grid.

    values are probabilities per pulse, or Hz after rate conversion; params
    snapshots every input that produced the curve.
    """

    phases: np.ndarray
    values: np.ndarray
    order_N: int
    units: str = "per_pulse"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        phases = np.ascontiguousarray(self.phases, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if phases.ndim != 1 or phases.shape != values.shape:
            raise ValueError("phases and values must be 1-D grids of equal length")
        if phases.size == 0:
            raise ValueError("empty phase grid")
        if np.any(np.diff(phases) <= 0):
            raise ValueError("phases must be strictly increasing")
        if np.any(values < 0):
            raise ValueError("negative curve values")
        if self.units not in ("per_pulse", "hertz"):
            raise ValueError(f"unknown units {self.units!r}")
        phases.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "values", values)


def default_phase_grid(points: int = 721, span: float = 2.0 * math.pi) -> np.ndarray:
    """Uniform grid over [0, span], endpoint included (0.5 degree steps by default)."""
    return np.linspace(0.0, span, points)


def n_fold_curve(
    source: SourceParams,
    loss: LossModel,
    order_n: int,
    phases=None,
    *,
    mirrored: bool = False,
    cutoff: int | None = None,
) -> CoincidenceCurve:
    """N-fold coincidence probability per pulse versus Mach-Zehnder phase.

    For every phase the full input state runs through the interferometer and
    the (N, 0) click probability is evaluated, (0, N) when mirrored.  The
    first beamsplitter is phase-independent so it is applied once up front;
    the result is bit-identical to calling mach_zehnder per phase.
    """
    if order_n < 1:
        raise ValueError("order_n must be >= 1")
    phases = default_phase_grid() if phases is None else np.asarray(phases, dtype=np.float64)
    if phases.size == 0:
        raise ValueError("phase grid must be non-empty")
    if cutoff is None:
        cutoff = max(default_cutoff(source.alpha_mag, source.r), order_n)
    if cutoff < order_n:
        raise CutoffError(f"cutoff {cutoff} cannot resolve a {order_n}-fold outcome")

    outcome = ClickOutcome(0, order_n) if mirrored else ClickOutcome(order_n, 0)
    state = input_state(source, cutoff)
    after_bs1 = beamsplitter_5050(state)
    values = np.empty(phases.size, dtype=np.float64)
    for i, phi in enumerate(phases):
        out = beamsplitter_5050(phase_shift(after_bs1, float(phi)))
        values[i] = click_probability(out, outcome, loss)
    params = {
        "source": source.as_dict(),
        "loss": loss.as_dict(),
        "order_N": order_n,
        "mirrored": mirrored,
        "cutoff": cutoff,
        "truncation_deficit": state.truncation_deficit,
    }
    return CoincidenceCurve(phases, values, order_n, "per_pulse", params)


def rate_curve(curve: CoincidenceCurve, flux: FluxModel) -> CoincidenceCurve:
    """Convert a per-pulse probability curve to an event rate in Hz."""
    if curve.units != "per_pulse":
        raise ValueError(f"expected per_pulse curve, got {curve.units!r}")
    params = dict(curve.params)
    params["flux"] = flux.as_dict()
    return CoincidenceCurve(
        curve.phases, curve.values * flux.rep_rate, curve.order_N, "hertz", params
    )
