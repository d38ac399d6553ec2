"""Higher-order FM synthesis with stackable operators, feedback, PM references,
Bessel-based spectrum prediction and bin-centered spectrum measurement."""

from .analysis import (
    AnalysisFrame,
    MeasuredSpectrum,
    detect_carrier_drift,
    fit_spectral_slope,
    measure_dc,
    measure_spectrum,
)
from .bessel import bessel_j, bessel_row
from .io_formats import WavSpec, write_spectrum_csv, write_wav
from .operators import (
    Block,
    InstabilityError,
    Operator,
    default_cosine_table,
    render_feedback_fm,
    render_naive_stack,
    render_stack,
)
from .pm import PMParams, render_feedback_pm, render_pm1, render_pm2
from .spectrum import (
    BudgetExceededError,
    LineSpectrum,
    TruncationPolicy,
    merge_and_fold,
    predict_first_order,
    predict_second_order,
)
from .wavetable import (
    PHASE_BITS,
    PHASE_MODULUS,
    PhaseAccumulator,
    freq_to_increment,
    make_cosine_table,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisFrame",
    "Block",
    "BudgetExceededError",
    "InstabilityError",
    "LineSpectrum",
    "MeasuredSpectrum",
    "Operator",
    "PHASE_BITS",
    "PHASE_MODULUS",
    "PMParams",
    "PhaseAccumulator",
    "TruncationPolicy",
    "WavSpec",
    "bessel_j",
    "bessel_row",
    "default_cosine_table",
    "detect_carrier_drift",
    "fit_spectral_slope",
    "freq_to_increment",
    "make_cosine_table",
    "measure_dc",
    "measure_spectrum",
    "merge_and_fold",
    "predict_first_order",
    "predict_second_order",
    "render_feedback_fm",
    "render_feedback_pm",
    "render_naive_stack",
    "render_pm1",
    "render_pm2",
    "render_stack",
    "write_spectrum_csv",
    "write_wav",
]
