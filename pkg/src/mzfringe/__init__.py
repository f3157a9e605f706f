"""Two-mode Fock-space Mach-Zehnder fringe simulator.

Simulates N-photon coincidence fringes for a coherent state mixed with
squeezed vacuum (SPDC), including binomial detection loss, and quantifies the
sub-classical narrowing of the central fringe versus the quantum-resource
fraction.
"""

from .states import (
    CutoffError,
    ModeAmplitudes,
    SourceParams,
    TwoModeState,
    coherent_state,
    default_cutoff,
    input_state,
    mean_photon_number,
    photon_number_distribution,
    product_state,
    squeezed_vacuum,
)
from .optics import (
    InterferometerConfig,
    beamsplitter_5050,
    bs_block_matrix,
    mach_zehnder,
    phase_shift,
)
from .detection import (
    ClickOutcome,
    CoincidenceCurve,
    FluxModel,
    LossModel,
    click_probability,
    default_phase_grid,
    detected_distribution,
    n_fold_curve,
    rate_curve,
    squeezing_for_pairs,
)
from .analysis import (
    FringeMetrics,
    FluxGridPoint,
    GammaSweepPoint,
    NoFringeError,
    WidthUndefinedError,
    classical_width,
    curve_metrics,
    flux_efficiency_grid,
    fwhm,
    gamma_sweep,
    narrowing_fraction,
    noon_width,
    normalized_l2_distortion,
    scaling_exponent,
)
from .exact import (
    SubspaceAmplitudes,
    detection_probability,
    input_subspace,
    subspace_curve,
    three_photon_closed_form,
    transform_subspace,
)

__version__ = "0.1.0"
