"""Linear-optical elements on two-mode Fock states.

Beamsplitter convention (fixed once, used everywhere): the 50:50 splitter maps
creation operators as

    a_dag -> (c_dag + d_dag) / sqrt(2)
    b_dag -> (c_dag - d_dag) / sqrt(2)

i.e. the real symmetric (Hadamard) convention.  The phase shifter acts on the
second mode, multiplying |n_c, n_d> by e^{i n_d phi}.  The Mach-Zehnder is the
composition  BS . PS(phi) . BS;  at phi = 0 it routes a photon entering the
first mode back out of the first mode.

Every element conserves total photon number, so each transform acts
block-diagonally on the anti-diagonals of the amplitude grid.  The per-block
matrices are real orthogonal and are built from exact integer binomial sums
with log-factorial scaling, which stays accurate far beyond the photon numbers
any target scenario reaches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .states import TwoModeState

__all__ = [
    "InterferometerConfig",
    "bs_block_matrix",
    "beamsplitter_5050",
    "phase_shift",
    "mach_zehnder",
]

BS_CONVENTION = "a_dag -> (c_dag + d_dag)/sqrt(2), b_dag -> (c_dag - d_dag)/sqrt(2)"


@lru_cache(maxsize=None)
def bs_block_matrix(total_n: int) -> np.ndarray:
    """Fock matrix of the 50:50 beamsplitter on the total_n-photon block.

    Element [k, n] is <k, total_n - k| BS |n, total_n - n>.  The integer
    binomial sum is evaluated exactly; only the factorial scaling runs through
    logs, so elements are accurate to ~1e-13 even for blocks past 100 photons.
    """
    size = total_n + 1
    mat = np.empty((size, size), dtype=np.float64)
    log_fact = [math.lgamma(i + 1) for i in range(size)]
    for n in range(size):
        m = total_n - n
        for k in range(size):
            s = 0
            for j in range(max(0, k - m), min(n, k) + 1):
                term = math.comb(n, j) * math.comb(m, k - j)
                s += -term if (m - k + j) % 2 else term
            if s == 0:
                mat[k, n] = 0.0
                continue
            log_scale = 0.5 * (
                log_fact[k] + log_fact[total_n - k] - log_fact[n] - log_fact[m]
            ) - 0.5 * total_n * math.log(2.0)
            mat[k, n] = math.copysign(math.exp(math.log(abs(s)) + log_scale), s)
    mat.setflags(write=False)
    return mat


def _embed(state: TwoModeState, cutoff: int) -> TwoModeState:
    """Zero-pad the grid to a larger per-mode cutoff (deficit unchanged)."""
    if cutoff <= state.cutoff:
        return state
    grid = np.zeros((cutoff + 1, cutoff + 1), dtype=np.complex128)
    grid[: state.cutoff + 1, : state.cutoff + 1] = state.amplitudes
    return TwoModeState(cutoff, grid, state.truncation_deficit)


def beamsplitter_5050(state: TwoModeState) -> TwoModeState:
    """Apply the 50:50 beamsplitter exactly.

    The grid is enlarged first if any populated total-photon block would spill
    past the per-mode cutoff (a block with n_a + n_b = N needs room for all
    |k, N-k>), so the transform is unitary with no extra truncation.
    """
    n_max = state.max_total_photons()
    state = _embed(state, n_max)
    out = np.zeros_like(state.amplitudes)
    for total in range(n_max + 1):
        rows = np.arange(total + 1)
        cols = total - rows
        out[rows, cols] = bs_block_matrix(total) @ state.amplitudes[rows, cols]
    return TwoModeState(state.cutoff, out, state.truncation_deficit)


def phase_shift(state: TwoModeState, phi: float) -> TwoModeState:
    """Multiply amplitude(n_c, n_d) by e^{i n_d phi} (phase on the second mode)."""
    if not math.isfinite(phi):
        raise ValueError("phi must be finite")
    phases = np.exp(1j * phi * np.arange(state.cutoff + 1))
    return TwoModeState(
        state.cutoff, state.amplitudes * phases[np.newaxis, :], state.truncation_deficit
    )


def mach_zehnder(state: TwoModeState, phi: float) -> TwoModeState:
    """Balanced Mach-Zehnder: beamsplitter, phase phi on the second arm, beamsplitter."""
    return beamsplitter_5050(phase_shift(beamsplitter_5050(state), phi))


@dataclass(frozen=True)
class InterferometerConfig:
    """Three-stage Mach-Zehnder element sequence with its phase.

    The default stage list is the balanced interferometer; a custom sequence
    of "bs" / "ps" entries may be supplied for non-standard circuits.
    """

    phi: float
    stages: tuple = ("bs", "ps", "bs")
    bs_convention: str = BS_CONVENTION

    def apply(self, state: TwoModeState) -> TwoModeState:
        for stage in self.stages:
            if stage == "bs":
                state = beamsplitter_5050(state)
            elif stage == "ps":
                state = phase_shift(state, self.phi)
            else:
                raise ValueError(f"unknown stage {stage!r}")
        return state
