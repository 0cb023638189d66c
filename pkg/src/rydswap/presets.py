"""Published waveform presets.

Each entry carries the Fourier coefficients (MHz) of the four drive
profiles, the blockade model the waveform was designed for, and which SWAP
convention it realizes.  The two conventions are:

* ``standard``:  exchanges |01> and |10>, leaves |00>, |11> alone;
* ``opposite``:  exchanges |00> and |11>, leaves |01>, |10> alone.

For ``figA2_resonant`` and ``figA3_symmetric_B100`` the convention is not
part of the published tables; the values recorded here were resolved by
scoring both candidates (see ``resolved_empirically``), and the test suite
re-derives them from scratch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import BlockadeModel
from .waveform import TAU_DEFAULT, FourierSeries, WaveformSet

PRESET_IDS = (
    "fig2_hybrid",
    "fig3_amplitude_offres",
    "fig3_variant_B125",
    "figA2_resonant",
    "figA3_symmetric_B100",
)


@dataclass(frozen=True)
class PresetEntry:
    preset_id: str
    omega0: tuple
    omega1: tuple
    delta0: tuple
    delta1: tuple
    blockade: BlockadeModel
    target: str  # "standard" | "opposite"
    resolved_empirically: bool
    notes: str


def _mhz(b_mhz: float, delta_q_mhz: float = 0.0) -> BlockadeModel:
    return BlockadeModel.finite(2 * math.pi * b_mhz, 2 * math.pi * delta_q_mhz)


_FIG2_OMEGA = (66.26, -20.40, -4.41, -12.61, -1.47, 5.76)

_PRESETS: dict[str, PresetEntry] = {}


def _register(entry: PresetEntry) -> None:
    _PRESETS[entry.preset_id] = entry


_register(
    PresetEntry(
        preset_id="fig2_hybrid",
        omega0=_FIG2_OMEGA,
        omega1=_FIG2_OMEGA,
        # With a shared Rabi profile, exchanging the two detuning series
        # relabels the qubit levels and leaves the average gate error exactly
        # unchanged, so the assignment cannot be read off the fidelity.  This
        # orientation is the one whose |00> column returns with error below
        # 1e-4; the other one parks that residue on |11> instead.
        delta0=(
            54.53,
            -9.77 - 16.65j,
            -12.84 - 11.28j,
            46.29 - 34.26j,
            -11.51 - 31.76j,
            -4.05 + 2.88j,
        ),
        delta1=(
            -13.37,
            -21.68 - 19.43j,
            -10.79 - 19.20j,
            -25.28 - 33.11j,
            -45.53 - 20.21j,
            -8.44 + 1.27j,
        ),
        blockade=BlockadeModel.ideal(),
        target="standard",
        resolved_empirically=True,
        notes="hybrid amplitude + detuning modulation, shared Rabi profile; "
        "detuning-to-tone assignment resolved by the |00> population return",
    )
)

_register(
    PresetEntry(
        preset_id="fig3_amplitude_offres",
        omega0=(199.45, -59.56, -34.98, 32.30, 6.86, -11.85, -6.17, -17.72, -8.61),
        omega1=(206.49, -55.67, -48.16, 27.76, 11.52, -3.03, -2.06, -25.43, -8.19),
        delta0=(9.05,),
        delta1=(-9.34,),
        blockade=BlockadeModel.ideal(),
        target="standard",
        resolved_empirically=False,
        notes="amplitude-only modulation at fixed opposite detunings; "
        "realizes the target up to a global phase",
    )
)

_register(
    PresetEntry(
        preset_id="fig3_variant_B125",
        omega0=(201.72, -60.68, -35.18, 33.33, 6.14, -11.66, -6.12, -18.53, -8.16),
        omega1=(208.18, -57.17, -47.92, 28.42, 11.19, -3.41, -1.91, -24.41, -8.89),
        delta0=(9.07,),
        delta1=(-9.38,),
        blockade=_mhz(125.0),
        target="standard",
        resolved_empirically=False,
        notes="fig3_amplitude_offres re-tailored to a finite pair coupling",
    )
)

_register(
    PresetEntry(
        preset_id="figA2_resonant",
        omega0=(
            250.95, -51.38, -51.18, 25.85, -32.11, -12.74, 24.64, -21.83, 11.38, -18.10,
        ),
        omega1=(
            286.47, -20.74, -13.46, -55.45, 30.51, -27.91, 12.23, -49.65, -43.50, 24.74,
        ),
        delta0=(0.0,),
        delta1=(0.0,),
        blockade=BlockadeModel.ideal(),
        target="opposite",
        resolved_empirically=True,
        notes="resonant amplitude-only drive; reproduction scores opposite at "
        "1.5e-6 vs standard at 0.80",
    )
)

_register(
    PresetEntry(
        preset_id="figA3_symmetric_B100",
        omega0=(191.04, -89.66, -18.38, 37.37, -22.13, 4.32, 4.10, -11.15),
        omega1=(191.04, -89.66, -18.38, 37.37, -22.13, 4.32, 4.10, -11.15),
        delta0=(-12.48,),
        delta1=(12.48,),
        blockade=_mhz(100.0),
        target="standard",
        resolved_empirically=True,
        notes="shared Rabi profile at opposite detunings, finite pair coupling; "
        "reproduction scores standard at 1.7e-6 vs opposite at 0.80",
    )
)


def preset_ids() -> tuple:
    return PRESET_IDS


def preset_entry(preset_id: str) -> PresetEntry:
    try:
        return _PRESETS[preset_id]
    except KeyError:
        known = ", ".join(PRESET_IDS)
        raise KeyError(f"unknown preset {preset_id!r}; known presets: {known}") from None


def preset_lookup(preset_id: str):
    """Return ``(WaveformSet, BlockadeModel, target_kind)`` for a preset id."""
    e = preset_entry(preset_id)

    def mk(coeffs):
        return FourierSeries(np.asarray(coeffs, dtype=complex), TAU_DEFAULT)

    ws = WaveformSet(
        omega0=mk(e.omega0), omega1=mk(e.omega1), delta0=mk(e.delta0), delta1=mk(e.delta1)
    )
    return ws, e.blockade, e.target
