"""Embedded acceptance suite.

Every check pins its tolerance here; the CLI ``verify`` subcommand and the
pytest acceptance module both run this list, so there is exactly one place
where pass/fail is decided.  Checks return results instead of raising, and a
failed precondition (for example a forced-too-small cutoff) is reported as a
failing check rather than a crash.

Two self-test hooks exist for negative controls: ``bs_perturbation`` skews the
beamsplitter matrix used in the coefficient-pattern check, and
``cutoff_override`` forces the stated cutoff everywhere a state is built.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

import numpy as np

from . import exact
from .analysis import (
    classical_width,
    curve_metrics,
    flux_efficiency_grid,
    fwhm,
    narrowing_fraction,
    noon_width,
    scaling_exponent,
)
from .detection import (
    ClickOutcome,
    LossModel,
    click_probability,
    default_phase_grid,
    detected_distribution,
    n_fold_curve,
)
from .optics import beamsplitter_5050, bs_block_matrix, mach_zehnder, phase_shift
from .states import (
    CutoffError,
    SourceParams,
    coherent_state,
    input_state,
    mean_photon_number,
    squeezed_vacuum,
)

__all__ = ["CheckResult", "run_acceptance", "DEFAULT_CALIBRATION"]

#: frozen working point for the narrowing / scaling checks; the source papers
#: behind such sweeps rarely state their loss, so the efficiency used here is
#: documented in every result and echoed by the CLI
DEFAULT_CALIBRATION = {
    "alpha_mag": 0.45,
    "theta_cs": math.pi / 2,
    "gamma_inverse": 0.1,
    "eta": 0.10,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.detail}"


def _result(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name, bool(passed), detail)


def _guard(name: str, fn) -> CheckResult:
    try:
        return fn()
    except CutoffError as err:
        return _result(name, False, f"cutoff insufficiency: {err}")
    except Exception as err:  # a broken build must still print a table
        return _result(name, False, f"{type(err).__name__}: {err}")


# --------------------------------------------------------------------------
# individual criteria


def check_classical_limit(cutoff_override=None) -> CheckResult:
    """Criterion 1: r = 0 three-fold curve is |alpha|^6/6 sin^6(phi/2)."""
    name = "classical-3fold-limit"

    def run():
        t0 = time.perf_counter()
        u = 1e-3
        phases = default_phase_grid()
        src = SourceParams(alpha_mag=math.sqrt(u), theta_cs=0.0, r=0.0)
        curve = n_fold_curve(src, LossModel.uniform(1.0), 3, phases, cutoff=cutoff_override)
        ref = u**3 / 6.0 * np.sin(phases / 2.0) ** 6
        shape_err = float(np.max(np.abs(curve.values / curve.values.max() - ref / ref.max())))
        # the exact peak carries e^{-|alpha|^2} from the always-present Poisson
        # tail, which is what the 1e-3 budget is for
        prefactor_err = abs(curve.values.max() - ref.max()) / ref.max()
        elapsed = time.perf_counter() - t0
        ok = shape_err < 1e-6 and prefactor_err < 1e-3 and elapsed < 1.0
        return _result(
            name,
            ok,
            f"shape err {shape_err:.2e} (<1e-6), prefactor err {prefactor_err:.2e} "
            f"(<1e-3 vs |a|^6/6), {elapsed:.2f}s (<1s)",
        )

    return _guard(name, run)


def check_noon_limit(cutoff_override=None) -> CheckResult:
    """Criterion 2: balanced condition gives |alpha|^6/6 sin^2(3 phi/2)."""
    name = "noon-3fold-limit"

    def run():
        t0 = time.perf_counter()
        u = 1e-3
        phases = default_phase_grid()
        src = SourceParams(alpha_mag=math.sqrt(u), theta_cs=math.pi / 2, r=1e-3)
        after_bs1 = beamsplitter_5050(input_state(src, cutoff_override))
        values = np.empty(phases.size)
        for i, phi in enumerate(phases):
            out = beamsplitter_5050(phase_shift(after_bs1, float(phi)))
            values[i] = abs(out.amplitudes[0, 3]) ** 2  # lossless post-selected
        ref = u**3 / 6.0 * np.sin(3.0 * phases / 2.0) ** 2
        shape_err = float(np.max(np.abs(values / values.max() - ref / ref.max())))
        elapsed = time.perf_counter() - t0
        ok = shape_err < 1e-6 and elapsed < 1.0
        return _result(name, ok, f"shape err {shape_err:.2e} (<1e-6), {elapsed:.2f}s (<1s)")

    return _guard(name, run)


def check_bs1_coefficients(bs_perturbation: float = 0.0) -> CheckResult:
    """Criterion 3: three-photon slice after the first splitter matches the
    (alpha/4)(alpha^2 - 3 rho)/sqrt(3) and (alpha/4)(alpha^2 + rho) pattern.

    rho = tanh r makes the pattern exact at any squeezing, with the global
    e^{-|alpha|^2/2}/sqrt(cosh r) normalization attached.
    """
    name = "bs1-coefficient-pattern"

    def run():
        rng = np.random.default_rng(414243)
        worst = 0.0
        for _ in range(20):
            src = SourceParams(
                alpha_mag=rng.uniform(0.01, 0.5),
                theta_cs=rng.uniform(0.0, 2.0 * math.pi),
                r=rng.uniform(-0.5, 0.5),
            )
            state = exact.input_subspace(src, 3)
            mat = np.asarray(exact._bs_matrix(3))
            if bs_perturbation:
                mat = mat + bs_perturbation  # negative-control hook
            got = mat @ state.coefficients
            alpha = src.alpha_mag * cmath.exp(1j * src.theta_cs)
            rho = math.tanh(src.r)
            k = math.exp(-0.5 * src.alpha_mag**2) / math.sqrt(math.cosh(src.r))
            a = k * (alpha / 4.0) * (alpha**2 - 3.0 * rho) / math.sqrt(3.0)
            b = k * (alpha / 4.0) * (alpha**2 + rho)
            expected = np.array([a, b, b, a])
            worst = max(
                worst,
                float(np.max(np.abs(got - expected)) / np.max(np.abs(expected))),
            )
        return _result(name, worst < 1e-12, f"worst relative deviation {worst:.2e} (<1e-12, 20 tuples)")

    return _guard(name, run)


def check_narrowing(cutoff_override=None) -> CheckResult:
    """Criterion 4: gamma_inverse = 0.1 three-fold fringe sits at 67 +/- 7 %
    of the way from the plain single-photon fringe (width pi) to the
    N-times-narrower entangled limit.

    Note the narrowing baseline: measured against the half-wavelength singles
    fringe, which is the stated "maximum possible narrowing" reference; the
    alternative baseline sin^6(phi/2) would cap this quantity near 0.21 for
    any loss or flux.  The efficiency used is documented in the result.
    """
    name = "narrowing-fraction-67pct"

    def run():
        cal = DEFAULT_CALIBRATION
        src = SourceParams(cal["alpha_mag"], cal["theta_cs"], 0.0).with_gamma_inverse(
            cal["gamma_inverse"]
        )
        curve = n_fold_curve(
            src, LossModel.uniform(cal["eta"]), 3, default_phase_grid(), cutoff=cutoff_override
        )
        width = fwhm(curve)
        vs_singles = (math.pi - width) / (math.pi - math.pi / 3.0)
        vs_classical_3 = narrowing_fraction(width, 3)
        ok = abs(vs_singles - 0.67) <= 0.07
        return _result(
            name,
            ok,
            f"narrowing {vs_singles:.3f} vs singles baseline (0.67+/-0.07) at eta={cal['eta']}, "
            f"|alpha|={cal['alpha_mag']}; fwhm {width:.4f} rad "
            f"(= {vs_classical_3:.3f} on the sin^6 baseline)",
        )

    return _guard(name, run)


def check_scaling_exponent(cutoff_override=None) -> CheckResult:
    """Criterion 5: width scaling over N = 2..4 fits -0.7 +/- 0.1 for the
    gamma_inverse = 0.1 mixture and -0.5 +/- 0.05 for the classical control."""
    name = "width-scaling-exponent"

    def run():
        cal = DEFAULT_CALIBRATION
        loss = LossModel.uniform(cal["eta"])
        phases = default_phase_grid()
        src_q = SourceParams(cal["alpha_mag"], cal["theta_cs"], 0.0).with_gamma_inverse(
            cal["gamma_inverse"]
        )
        src_c = SourceParams(cal["alpha_mag"], cal["theta_cs"], 0.0)
        quantum = scaling_exponent(
            [(n, fwhm(n_fold_curve(src_q, loss, n, phases, cutoff=cutoff_override))) for n in (2, 3, 4)]
        )
        control = scaling_exponent(
            [(n, fwhm(n_fold_curve(src_c, loss, n, phases, cutoff=cutoff_override))) for n in (2, 3, 4)]
        )
        ok = abs(quantum - (-0.7)) <= 0.1 and abs(control - (-0.5)) <= 0.05
        return _result(
            name,
            ok,
            f"quantum exponent {quantum:+.4f} (-0.7+/-0.1), classical control {control:+.4f} "
            f"(-0.5+/-0.05) at eta={cal['eta']}",
        )

    return _guard(name, run)


def check_flux_robustness(cutoff_override=None) -> CheckResult:
    """Criterion 6: at eta = 0.01 the balanced-condition fringe deforms at
    high flux (>= 10x the gamma_inverse = 0.1 distortion) while the
    gamma_inverse = 0.1 width moves < 5% between fluxes."""
    name = "flux-robustness"

    def run():
        phases = default_phase_grid()
        fluxes = [1e-4, 1e-1]
        noon = flux_efficiency_grid(1.0, [0.01], fluxes, 3, phases, cutoff=cutoff_override)
        mixed = flux_efficiency_grid(0.1, [0.01], fluxes, 3, phases, cutoff=cutoff_override)
        ratio = noon[1].distortion / mixed[1].distortion
        if mixed[0].metrics is None or mixed[1].metrics is None:
            return _result(name, False, "gamma_inverse=0.1 fringe unmeasurable")
        shift = abs(mixed[1].metrics.fwhm - mixed[0].metrics.fwhm) / mixed[0].metrics.fwhm
        ok = ratio >= 10.0 and shift < 0.05
        return _result(
            name,
            ok,
            f"high-flux distortion ratio {ratio:.1f} (>=10), width shift {100 * shift:.2f}% (<5%)",
        )

    return _guard(name, run)


def check_oracle_equivalence(cutoff_override=None) -> CheckResult:
    """Criterion 7: grid simulator and the exact-slice calculator agree to
    1e-10 on lossless post-selected probabilities, 100 random tuples, N <= 4."""
    name = "oracle-equivalence"

    def run():
        t0 = time.perf_counter()
        rng = np.random.default_rng(20260810)
        worst = 0.0
        for _ in range(100):
            src = SourceParams(
                alpha_mag=rng.uniform(0.02, 0.3),
                theta_cs=rng.uniform(0.0, 2.0 * math.pi),
                r=rng.uniform(-0.3, 0.3),
            )
            phi = rng.uniform(0.0, 2.0 * math.pi)
            full = mach_zehnder(input_state(src, cutoff_override), phi)
            for n in (1, 2, 3, 4):
                slice_out = exact.transform_subspace(
                    exact.transform_subspace(
                        exact.transform_subspace(exact.input_subspace(src, n), "bs"),
                        "ps",
                        phi,
                    ),
                    "bs",
                )
                p_exact = exact.detection_probability(slice_out)
                p_sim = float(abs(full.amplitudes[0, n]) ** 2)
                if p_exact > 1e-300:
                    worst = max(worst, abs(p_sim - p_exact) / p_exact)
        elapsed = time.perf_counter() - t0
        ok = worst < 1e-10 and elapsed < 10.0
        return _result(name, ok, f"worst relative error {worst:.2e} (<1e-10), {elapsed:.1f}s (<10s)")

    return _guard(name, run)


def check_invariant_unitarity(cutoff_override=None) -> CheckResult:
    """Criterion 8a: every element and composition preserves the norm to 1e-12."""
    name = "invariant-unitarity"

    def run():
        rng = np.random.default_rng(99)
        worst = 0.0
        for _ in range(10):
            cutoff = cutoff_override if cutoff_override is not None else 12
            grid = rng.normal(size=(cutoff + 1, cutoff + 1)) + 1j * rng.normal(
                size=(cutoff + 1, cutoff + 1)
            )
            grid /= np.linalg.norm(grid)
            from .states import TwoModeState

            state = TwoModeState(cutoff, grid)
            phi = rng.uniform(0.0, 2.0 * math.pi)
            for out in (
                beamsplitter_5050(state),
                phase_shift(state, phi),
                mach_zehnder(state, phi),
            ):
                worst = max(worst, abs(out.norm_squared() - state.norm_squared()))
        return _result(name, worst < 1e-12, f"worst norm change {worst:.2e} (<1e-12)")

    return _guard(name, run)


def check_invariant_normalization(cutoff_override=None) -> CheckResult:
    """Criterion 8b: norm + truncation deficit closes to 1 at 1e-12 for every constructor."""
    name = "invariant-normalization"

    def run():
        worst = 0.0
        for alpha, theta, r in ((0.3, 0.0, 0.0), (1.1, 1.2, 0.4), (2.0, math.pi / 2, -0.8)):
            for mode in (
                coherent_state(alpha, theta, cutoff_override),
                squeezed_vacuum(r, cutoff_override),
            ):
                total = float(np.sum(np.abs(mode.amplitudes) ** 2)) + mode.truncation_deficit
                worst = max(worst, abs(total - 1.0))
            state = input_state(SourceParams(alpha, theta, r), cutoff_override)
            worst = max(worst, abs(state.norm_squared() + state.truncation_deficit - 1.0))
        return _result(name, worst < 1e-12, f"worst closure error {worst:.2e} (<1e-12)")

    return _guard(name, run)


def check_invariant_block_conservation(cutoff_override=None) -> CheckResult:
    """Criterion 8c: amplitude moves only within fixed total-photon blocks."""
    name = "invariant-block-conservation"

    def run():
        cutoff = cutoff_override if cutoff_override is not None else 6
        ok = True
        detail = "single-block inputs stay in their block"
        for total in range(min(cutoff, 5) + 1):
            for n in range(total + 1):
                grid = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
                grid[n, total - n] = 1.0
                from .states import TwoModeState

                out = mach_zehnder(TwoModeState(cutoff, grid), 0.7)
                idx = np.nonzero(out.amplitudes)
                if idx[0].size and not np.all(idx[0] + idx[1] == total):
                    ok = False
                    detail = f"leak out of total-N block {total}"
        return _result(name, ok, detail)

    return _guard(name, run)


def check_invariant_completeness(cutoff_override=None) -> CheckResult:
    """Criterion 8d: detected-outcome probabilities sum to 1 - deficit at 1e-10."""
    name = "invariant-outcome-completeness"

    def run():
        worst = 0.0
        for eta_e, eta_f in ((1.0, 1.0), (0.37, 0.82), (0.1, 0.1)):
            src = SourceParams(0.9, 0.6, 0.35)
            state = mach_zehnder(input_state(src, cutoff_override), 1.1)
            q = detected_distribution(state, LossModel(eta_e=eta_e, eta_f=eta_f))
            worst = max(worst, abs(float(q.sum()) - (1.0 - state.truncation_deficit)))
        return _result(name, worst < 1e-10, f"worst completeness error {worst:.2e} (<1e-10)")

    return _guard(name, run)


def check_invariant_thinning_mc(
    cutoff_override=None, samples: int = 10**6, seed: int = 20240808
) -> CheckResult:
    """Criterion 8e: click_probability agrees with Monte-Carlo binomial
    thinning within 5 standard errors at the stated sample count."""
    name = "invariant-thinning-monte-carlo"

    def run():
        t0 = time.perf_counter()
        src = SourceParams(0.9, 0.6, 0.35)
        loss = LossModel(eta_e=0.37, eta_f=0.82)
        state = mach_zehnder(input_state(src, cutoff_override), 1.1)
        prob = np.abs(state.amplitudes) ** 2
        kept = float(prob.sum())
        rng = np.random.default_rng(seed)
        idx = rng.choice(prob.size, size=samples, p=(prob / kept).ravel())
        m_f, m_e = np.unravel_index(idx, prob.shape)
        d_f = rng.binomial(m_f, loss.eta_f)
        d_e = rng.binomial(m_e, loss.eta_e)
        worst_sigma = 0.0
        for outcome in (ClickOutcome(1, 0), ClickOutcome(2, 1), ClickOutcome(0, 2)):
            hits = int(np.sum((d_e == outcome.n_e) & (d_f == outcome.n_f)))
            p_mc = hits / samples * kept
            se = math.sqrt(max(hits, 1)) / samples * kept
            p_ex = click_probability(state, outcome, loss)
            worst_sigma = max(worst_sigma, abs(p_mc - p_ex) / se)
        elapsed = time.perf_counter() - t0
        ok = worst_sigma < 5.0 and elapsed < 30.0
        return _result(
            name, ok, f"worst deviation {worst_sigma:.2f} sigma (<5), {elapsed:.1f}s (<30s)"
        )

    return _guard(name, run)


def check_determinism() -> CheckResult:
    """Criterion 9: figure commands run twice produce byte-identical artifacts."""
    name = "artifact-determinism"

    def run():
        import tempfile
        from pathlib import Path

        from . import cli

        with tempfile.TemporaryDirectory() as tmp:
            digests = []
            for _ in range(2):
                blobs = []
                for cmd in ("fig2", "fig3", "fig4"):
                    outdir = Path(tmp) / cmd
                    cli.main([cmd, "-o", str(outdir), "--phases", "181"])
                    for f in sorted(outdir.iterdir()):
                        blobs.append((f.name, f.read_bytes()))
                digests.append(blobs)
            ok = digests[0] == digests[1]
            n_files = len(digests[0])
            return _result(name, ok, f"{n_files} files byte-identical across two runs")

    return _guard(name, run)


# --------------------------------------------------------------------------


def run_acceptance(
    *,
    bs_perturbation: float = 0.0,
    cutoff_override: int | None = None,
    mc_samples: int = 10**6,
    seed: int = 20240808,
    include_determinism: bool = True,
) -> list[CheckResult]:
    """Run every acceptance check and return the results in criterion order."""
    results = [
        check_classical_limit(cutoff_override),
        check_noon_limit(cutoff_override),
        check_bs1_coefficients(bs_perturbation),
        check_narrowing(cutoff_override),
        check_scaling_exponent(cutoff_override),
        check_flux_robustness(cutoff_override),
        check_oracle_equivalence(cutoff_override),
        check_invariant_unitarity(cutoff_override),
        check_invariant_normalization(cutoff_override),
        check_invariant_block_conservation(cutoff_override),
        check_invariant_completeness(cutoff_override),
        check_invariant_thinning_mc(cutoff_override, mc_samples, seed),
    ]
    if include_determinism:
        results.append(check_determinism())
    return results
