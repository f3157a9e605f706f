"""Exact fixed-photon-number reference calculator.

Because the lossless interferometer conserves total photon number, the N-fold
coincidence at unit efficiency only sees the N-photon slice of the input.
This module evolves that (N+1)-coefficient slice through the interferometer
stage by stage using exact integer polynomial expansion of the creation
operators, deliberately sharing no transform code with the grid simulator in
:mod:`mzfringe.optics`.  Agreement between the two is therefore an actual
cross-check, not a tautology.

Capped at N <= 6; the factorial algebra is exact there and nothing in the
target scenarios measures deeper coincidences.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .states import SourceParams

__all__ = [
    "MAX_SUBSPACE_N",
    "SubspaceAmplitudes",
    "input_subspace",
    "transform_subspace",
    "detection_probability",
    "subspace_curve",
    "three_photon_closed_form",
]

MAX_SUBSPACE_N = 6

#: legal stage transitions: (stage, element) -> next stage
_STAGE_AFTER = {
    ("input", "bs"): "after_bs1",
    ("after_bs1", "ps"): "after_ps",
    ("after_ps", "bs"): "after_bs2",
}


@dataclass(frozen=True)
class SubspaceAmplitudes:
    """Coefficients of |k, N-k> for k = 0..N at one interferometer stage.

    stage is one of "input", "after_bs1", "after_ps", "after_bs2" and may only
    advance in that order.
    """

    total_n: int
    coefficients: np.ndarray
    stage: str = "input"

    def __post_init__(self):
        coeffs = np.ascontiguousarray(self.coefficients, dtype=np.complex128)
        if coeffs.shape != (self.total_n + 1,):
            raise ValueError(
                f"need {self.total_n + 1} coefficients, got shape {coeffs.shape}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.coefficients) ** 2))


def _coherent_amplitude(alpha: complex, alpha_mag: float, n: int) -> complex:
    return cmath.exp(-0.5 * alpha_mag**2) * alpha**n / math.sqrt(math.factorial(n))


def _squeezed_amplitude(r: float, n: int) -> float:
    if n % 2:
        return 0.0
    m = n // 2
    return (
        (-math.tanh(r)) ** m
        * math.sqrt(math.factorial(2 * m))
        / (2**m * math.factorial(m) * math.sqrt(math.cosh(r)))
    )


@lru_cache(maxsize=None)
def _bs_matrix(total_n: int) -> np.ndarray:
    """Beamsplitter matrix on the N-photon slice via exact polynomial expansion.

    Column n comes from expanding (x + y)^n (x - y)^(N-n), x and y standing for
    the two output creation operators; the integer coefficient of x^k y^(N-k)
    is then rescaled by the exact factorial normalization.
    """
    size = total_n + 1
    mat = np.empty((size, size), dtype=np.float64)
    for n in range(size):
        plus = [math.comb(n, j) for j in range(n + 1)]
        minus = [
            math.comb(total_n - n, i) * (-1) ** (total_n - n - i)
            for i in range(total_n - n + 1)
        ]
        # exact integer convolution; coefficient of x^k y^(N-k)
        conv = [0] * size
        for j, pj in enumerate(plus):
            for i, mi in enumerate(minus):
                conv[j + i] += pj * mi
        for k in range(size):
            scale = math.sqrt(
                math.factorial(k)
                * math.factorial(total_n - k)
                / (math.factorial(n) * math.factorial(total_n - n) * 2**total_n)
            )
            mat[k, n] = conv[k] * scale
    mat.setflags(write=False)
    return mat


def input_subspace(source: SourceParams, total_n: int) -> SubspaceAmplitudes:
    """N-photon slice of coherent(mode a) x squeezed-vacuum(mode b).

    Coefficient k multiplies |k, N-k>; entries with odd N-k vanish because the
    SPDC emits pairs.  The global state normalization is kept, so these are
    the raw product-state amplitudes, not renormalized within the slice.
    """
    if not 0 <= total_n <= MAX_SUBSPACE_N:
        raise ValueError(f"total_n must be in [0, {MAX_SUBSPACE_N}], got {total_n}")
    alpha = source.alpha_mag * cmath.exp(1j * source.theta_cs)
    coeffs = np.array(
        [
            _coherent_amplitude(alpha, source.alpha_mag, k)
            * _squeezed_amplitude(source.r, total_n - k)
            for k in range(total_n + 1)
        ],
        dtype=np.complex128,
    )
    return SubspaceAmplitudes(total_n, coeffs, "input")


def transform_subspace(
    amps: SubspaceAmplitudes, element: str, phi: float | None = None
) -> SubspaceAmplitudes:
    """Apply "bs" or "ps" to the slice, advancing the stage marker.

    Raises ValueError when the element does not fit the stage order
    input -> after_bs1 -> after_ps -> after_bs2.
    """
    try:
        next_stage = _STAGE_AFTER[(amps.stage, element)]
    except KeyError:
        raise ValueError(
            f"element {element!r} not allowed at stage {amps.stage!r}"
        ) from None
    if element == "bs":
        coeffs = _bs_matrix(amps.total_n) @ amps.coefficients
    else:
        if phi is None:
            raise ValueError("phase shifter needs phi")
        second_mode = amps.total_n - np.arange(amps.total_n + 1)
        coeffs = amps.coefficients * np.exp(1j * phi * second_mode)
    return SubspaceAmplitudes(amps.total_n, coeffs, next_stage)


def detection_probability(amps: SubspaceAmplitudes) -> float:
    """|<0, N| state>|^2: all N photons in the second output port.

    Only defined after the full interferometer (stage "after_bs2"); the phase
    is already baked in by the phase-shifter stage.
    """
    if amps.stage != "after_bs2":
        raise ValueError(f"detection needs stage 'after_bs2', got {amps.stage!r}")
    return float(abs(amps.coefficients[0]) ** 2)


def subspace_curve(source: SourceParams, total_n: int, phases) -> np.ndarray:
    """Lossless N-fold coincidence probability versus interferometer phase."""
    after_bs1 = transform_subspace(input_subspace(source, total_n), "bs")
    out = np.empty(len(phases), dtype=np.float64)
    for i, phi in enumerate(phases):
        after_ps = transform_subspace(after_bs1, "ps", float(phi))
        out[i] = detection_probability(transform_subspace(after_ps, "bs"))
    return out


def three_photon_closed_form(source: SourceParams, phi: float) -> float:
    """Closed-form 3-photon coincidence probability, exact in tanh r.

    Evaluates |alpha|^2/128 |A (1 - e^{3 i phi}) + sqrt(3) B (e^{2 i phi} -
    e^{i phi})|^2 with A = (alpha^2 - 3 rho)/sqrt(3), B = alpha^2 + rho and
    rho = tanh r, scaled by the global factor e^{-|alpha|^2}/cosh r.  At r = 0
    this reduces to |alpha|^6/6 sin^6(phi/2); at the balanced condition
    alpha^2 = -rho it reduces to |alpha|^6/6 sin^2(3 phi/2).
    """
    alpha = source.alpha_mag * cmath.exp(1j * source.theta_cs)
    rho = math.tanh(source.r)
    a_coef = (alpha**2 - 3 * rho) / math.sqrt(3)
    b_coef = alpha**2 + rho
    bracket = a_coef * (1 - cmath.exp(3j * phi)) + math.sqrt(3) * b_coef * (
        cmath.exp(2j * phi) - cmath.exp(1j * phi)
    )
    prefactor = math.exp(-source.alpha_mag**2) / math.cosh(source.r)
    return prefactor * source.alpha_mag**2 / 128.0 * abs(bracket) ** 2
