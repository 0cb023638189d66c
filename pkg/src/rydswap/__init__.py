"""Two-qubit Rydberg-blockade SWAP gates from Fourier-modulated drives.

Simulate the blockade dynamics of a pair of driven atoms, score the
resulting two-qubit map against SWAP targets, re-derive drive waveforms by
numerical search, and map robustness against experimental imperfections.
"""

from ._version import __version__
from .dynamics import (
    BlockadeModel,
    GaugeError,
    IntegrationError,
    IntegratorConfig,
    Trajectory,
    gauge_transform_check,
    integrate,
    rotating_phase,
)
from .gate import (
    DecayEstimate,
    GateOutcome,
    decay_estimate,
    evaluate_gate,
    fidelity,
    target_matrix,
)
from .optimize import (
    CoefficientSlot,
    SearchResult,
    SearchSpec,
    load_search_spec,
    objective,
    refit_for_blockade,
    save_search_spec,
    search,
    write_history_csv,
)
from .presets import PresetEntry, preset_entry, preset_ids, preset_lookup
from .scan import ScanAxis, ScanResult, ScanSpec, run_scan, write_scan_csv
from .waveform import (
    FourierSeries,
    WaveformError,
    WaveformSet,
    boundary_check,
    fourier_derivative,
    fourier_eval,
    fourier_integral,
    load_waveform,
    save_waveform,
)

__all__ = [
    "BlockadeModel",
    "CoefficientSlot",
    "DecayEstimate",
    "FourierSeries",
    "GateOutcome",
    "GaugeError",
    "IntegrationError",
    "IntegratorConfig",
    "PresetEntry",
    "ScanAxis",
    "ScanResult",
    "ScanSpec",
    "SearchResult",
    "SearchSpec",
    "Trajectory",
    "WaveformError",
    "WaveformSet",
    "boundary_check",
    "decay_estimate",
    "evaluate_gate",
    "fidelity",
    "fourier_derivative",
    "fourier_eval",
    "fourier_integral",
    "gauge_transform_check",
    "integrate",
    "load_search_spec",
    "load_waveform",
    "objective",
    "preset_entry",
    "preset_ids",
    "preset_lookup",
    "refit_for_blockade",
    "rotating_phase",
    "run_scan",
    "save_search_spec",
    "save_waveform",
    "search",
    "target_matrix",
    "write_history_csv",
    "write_scan_csv",
    "__version__",
]
