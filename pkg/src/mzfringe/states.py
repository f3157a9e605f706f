"""Truncated two-mode Fock states and their physical constructors.

The simulation works on a dense complex amplitude grid indexed by the joint
photon numbers (n_a, n_b) of the two interferometer input modes.  Mode a
carries a coherent state of amplitude |alpha| e^{i theta_cs}, mode b a
single-mode squeezed vacuum (degenerate SPDC) of squeezing parameter r.
Amplitudes are assembled in log-magnitude + phase form so large photon-number
cutoffs stay finite (the squeezed-vacuum factor sqrt((2m)!)/(2^m m!) overflows
naive factorial arithmetic near n = 180).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CutoffError",
    "ModeAmplitudes",
    "TwoModeState",
    "SourceParams",
    "default_cutoff",
    "coherent_state",
    "squeezed_vacuum",
    "product_state",
    "input_state",
    "photon_number_distribution",
    "mean_photon_number",
]

#: constructors refuse cutoffs that drop more than this much probability
MAX_TRUNCATION_DEFICIT = 0.5


class CutoffError(ValueError):
    """Photon-number cutoff too small for the requested state or outcome."""


def _check_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ModeAmplitudes:
    """Single-mode Fock amplitudes up to a cutoff, plus the mass the cutoff dropped."""

    amplitudes: np.ndarray  # complex, shape (cutoff+1,)
    truncation_deficit: float

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def cutoff(self) -> int:
        return self.amplitudes.shape[0] - 1


@dataclass(frozen=True)
class TwoModeState:
    """Pure two-mode state on a (cutoff+1) x (cutoff+1) amplitude grid.

    amplitudes[n_first, n_second] is the coefficient of |n_first, n_second>.
    truncation_deficit is the probability mass dropped by the finite cutoff at
    construction time; the grid norm plus the deficit is 1 to within rounding.
    States are immutable: every operation returns a new instance.
    """

    cutoff: int
    amplitudes: np.ndarray
    truncation_deficit: float = 0.0

    def __post_init__(self):
        amps = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        n = self.cutoff + 1
        if amps.shape != (n, n):
            raise ValueError(
                f"amplitude grid shape {amps.shape} does not match cutoff {self.cutoff}"
            )
        if self.truncation_deficit < 0:
            raise ValueError("truncation_deficit must be non-negative")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def max_total_photons(self) -> int:
        """Largest n_first + n_second carrying any amplitude (0 for the zero grid)."""
        idx = np.nonzero(self.amplitudes)
        if idx[0].size == 0:
            return 0
        return int(np.max(idx[0] + idx[1]))


@dataclass(frozen=True)
class SourceParams:
    """Physical knobs of the interferometer input.

    alpha_mag: coherent amplitude |alpha| (dimensionless, >= 0).
    theta_cs:  coherent-state phase in radians.
    r:         squeezing parameter; its sign carries the SPDC phase convention
               (negative r flips the sign of every odd-pair term).
    gamma, the pair-amplitude ratio |alpha|^2 / r, is always derived from the
    stored fields so it can never drift out of sync.
    """

    alpha_mag: float
    theta_cs: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        _check_finite("alpha_mag", self.alpha_mag)
        _check_finite("theta_cs", self.theta_cs)
        _check_finite("r", self.r)
        if self.alpha_mag < 0:
            raise ValueError("alpha_mag must be >= 0")

    @property
    def gamma(self) -> float:
        """Pair-amplitude ratio |alpha|^2 / r; undefined (NaN) when r = 0."""
        if self.r == 0.0:
            return math.nan
        return self.alpha_mag**2 / abs(self.r)

    @property
    def gamma_inverse(self) -> float:
        """r / |alpha|^2, the quantum-resource fraction; NaN when alpha = 0."""
        if self.alpha_mag == 0.0:
            return math.nan
        return abs(self.r) / self.alpha_mag**2

    def with_gamma_inverse(self, gamma_inverse: float) -> "SourceParams":
        """Same coherent amplitude, SPDC strength set to r = gamma_inverse * |alpha|^2."""
        if gamma_inverse < 0:
            raise ValueError("gamma_inverse must be >= 0")
        return SourceParams(self.alpha_mag, self.theta_cs, gamma_inverse * self.alpha_mag**2)

    def as_dict(self) -> dict:
        return {
            "alpha_mag": self.alpha_mag,
            "theta_cs": self.theta_cs,
            "r": self.r,
            "gamma_inverse": None if self.alpha_mag == 0 else self.gamma_inverse,
        }


def default_cutoff(alpha_mag: float, r: float = 0.0) -> int:
    """Per-mode cutoff keeping the truncation deficit below ~1e-10 at low flux.

    Scales with the total mean photon number |alpha|^2 + sinh^2 r.
    """
    mean_n = alpha_mag**2 + math.sinh(r) ** 2
    return max(8, math.ceil(4.0 * mean_n + 12.0))


def _deficit(amps: np.ndarray) -> float:
    # clamp: the analytic tail is >= 0, only rounding can push the sum past 1
    return max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))


def coherent_state(alpha_mag: float, theta_cs: float = 0.0, cutoff: int | None = None) -> ModeAmplitudes:
    """Fock amplitudes of |alpha>, alpha = alpha_mag * e^{i theta_cs}.

    amplitude(n) = exp(-|alpha|^2/2) alpha^n / sqrt(n!).  Raises CutoffError if
    the cutoff would drop more than half the probability mass.
    """
    alpha_mag = _check_finite("alpha_mag", alpha_mag)
    theta_cs = _check_finite("theta_cs", theta_cs)
    if alpha_mag < 0:
        raise ValueError("alpha_mag must be >= 0")
    if cutoff is None:
        cutoff = default_cutoff(alpha_mag)
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")

    n = np.arange(cutoff + 1)
    if alpha_mag == 0.0:
        amps = np.zeros(cutoff + 1, dtype=np.complex128)
        amps[0] = 1.0
        return ModeAmplitudes(amps, 0.0)

    log_fact = np.cumsum(np.concatenate(([0.0], np.log(np.arange(1, cutoff + 1)))))
    log_mag = -0.5 * alpha_mag**2 + n * math.log(alpha_mag) - 0.5 * log_fact
    amps = np.exp(log_mag) * np.exp(1j * theta_cs * n)
    deficit = _deficit(amps)
    if deficit > MAX_TRUNCATION_DEFICIT:
        raise CutoffError(
            f"cutoff {cutoff} keeps only {1 - deficit:.3f} of the coherent state "
            f"with |alpha|^2 = {alpha_mag**2:.3g}"
        )
    return ModeAmplitudes(amps, deficit)


def squeezed_vacuum(r: float, cutoff: int | None = None) -> ModeAmplitudes:
    """Fock amplitudes of single-mode squeezed vacuum (degenerate SPDC).

    amplitude(2m) = (cosh r)^{-1/2} (-1)^m sqrt((2m)!)/(2^m m!) (tanh r)^m,
    odd amplitudes exactly zero.  Negative r flips the sign of every odd-m
    term, which is the phase choice that turns the pair amplitude into -|r|.
    """
    r = _check_finite("r", r)
    if cutoff is None:
        cutoff = default_cutoff(0.0, r)
    if cutoff < 0:
        raise ValueError("cutoff must be >= 0")

    amps = np.zeros(cutoff + 1, dtype=np.complex128)
    if r == 0.0:
        amps[0] = 1.0
        return ModeAmplitudes(amps, 0.0)

    t = math.tanh(r)
    log_t = math.log(abs(t))
    log_norm = -0.5 * math.log(math.cosh(r))
    sign = -1.0 if t > 0 else 1.0  # per-step sign of (-tanh r)^m
    m_max = cutoff // 2
    for m in range(m_max + 1):
        log_mag = (
            log_norm
            + 0.5 * math.lgamma(2 * m + 1)
            - m * math.log(2.0)
            - math.lgamma(m + 1)
            + m * log_t
        )
        amps[2 * m] = (sign**m) * math.exp(log_mag)
    deficit = _deficit(amps)
    if deficit > MAX_TRUNCATION_DEFICIT:
        raise CutoffError(
            f"cutoff {cutoff} keeps only {1 - deficit:.3f} of the squeezed vacuum with r = {r:.3g}"
        )
    return ModeAmplitudes(amps, deficit)


def product_state(mode_a: ModeAmplitudes, mode_b: ModeAmplitudes) -> TwoModeState:
    """Tensor product of two single-mode amplitude vectors sharing a cutoff."""
    if mode_a.cutoff != mode_b.cutoff:
        raise ValueError(
            f"cutoff mismatch: mode a has {mode_a.cutoff}, mode b has {mode_b.cutoff}"
        )
    grid = np.outer(mode_a.amplitudes, mode_b.amplitudes)
    deficit = 1.0 - (1.0 - mode_a.truncation_deficit) * (1.0 - mode_b.truncation_deficit)
    return TwoModeState(mode_a.cutoff, grid, max(0.0, deficit))


def input_state(source: SourceParams, cutoff: int | None = None) -> TwoModeState:
    """Coherent state in mode a times squeezed vacuum in mode b."""
    if cutoff is None:
        cutoff = default_cutoff(source.alpha_mag, source.r)
    a = coherent_state(source.alpha_mag, source.theta_cs, cutoff)
    b = squeezed_vacuum(source.r, cutoff)
    return product_state(a, b)


def photon_number_distribution(state: TwoModeState) -> np.ndarray:
    """Joint photon-number probabilities |amplitude(n_a, n_b)|^2."""
    return np.abs(state.amplitudes) ** 2


def mean_photon_number(mode: ModeAmplitudes) -> float:
    """Mean photon number of a single-mode amplitude vector (truncated)."""
    n = np.arange(mode.cutoff + 1)
    return float(np.sum(n * np.abs(mode.amplitudes) ** 2))
