"""Robustness maps: gate error versus drive and blockade imperfections.

A scan perturbs one or two knobs of a working waveform set on a rectangular
grid and re-scores the gate at every point.  Three knobs are supported:

* ``rabi_ratio``:  dimensionless multiplier on the Rabi profiles, applied to
  both tones or to one of them (``apply_to``);
* ``detuning_offset``:  constant shift in rad/us added to the detuning
  profiles, to both, to one, or antisymmetrically (+d on the first tone,
  -d on the second, which preserves a zero-sum detuning pair);
* ``blockade_B``:  the pair-interaction strength in rad/us, replacing the
  evaluation model (the qq admixture splitting is kept).

Points are independent; a failed integration leaves a NaN cell and the scan
carries on.  Results are written as one CSV row per grid point plus a JSON
sidecar holding the scan definition and metadata, which together are the
plot-data artifacts for the robustness figures.
"""

from __future__ import annotations

import csv
import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__
from .dynamics import BlockadeModel, IntegrationError, IntegratorConfig
from .gate import evaluate_gate
from .waveform import WaveformSet

AXIS_NAMES = ("rabi_ratio", "detuning_offset", "blockade_B")

_APPLY_CHOICES = {
    "rabi_ratio": ("both", "omega0", "omega1"),
    "detuning_offset": ("both", "delta0", "delta1", "antisym"),
    "blockade_B": ("both",),
}

#: default ranges bracketing typical experimental drifts around the
#: published operating points
DEFAULT_RANGES = {
    "rabi_ratio": (0.95, 1.05),
    "detuning_offset": (-2 * np.pi * 2.0, 2 * np.pi * 2.0),
    "blockade_B": (2 * np.pi * 50.0, 2 * np.pi * 500.0),
}


@dataclass(frozen=True)
class ScanAxis:
    name: str
    lo: float
    hi: float
    points: int
    apply_to: str = "both"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown scan axis {self.name!r}; use one of {AXIS_NAMES}")
        if self.points < 2:
            raise ValueError("a scan axis needs at least 2 points")
        if not self.lo < self.hi:
            raise ValueError("axis range must satisfy lo < hi")
        if self.apply_to not in _APPLY_CHOICES[self.name]:
            raise ValueError(
                f"apply_to {self.apply_to!r} not valid for {self.name}; "
                f"choose from {_APPLY_CHOICES[self.name]}"
            )
        if self.name == "blockade_B" and self.lo <= 0.0:
            raise ValueError("blockade strengths must be positive")

    def values(self) -> np.ndarray:
        # np.linspace pins both endpoints exactly, so placing the nominal
        # value at an endpoint makes the unperturbed point bit-identical
        return np.linspace(self.lo, self.hi, self.points)


def default_axis(name: str, points: int = 21, apply_to: str = "both") -> ScanAxis:
    lo, hi = DEFAULT_RANGES[name]
    return ScanAxis(name, lo, hi, points, apply_to)


@dataclass(frozen=True)
class ScanSpec:
    ws: WaveformSet
    blockade: BlockadeModel
    target: object  # "standard" | "opposite" | "auto" | explicit 4x4
    axes: tuple
    cfg: IntegratorConfig | None = None
    source: str = ""  # preset id or file name, recorded in the sidecar

    def __post_init__(self):
        axes = tuple(self.axes)
        object.__setattr__(self, "axes", axes)
        if not 1 <= len(axes) <= 2:
            raise ValueError("a scan takes 1 or 2 axes")
        names = [ax.name for ax in axes]
        if len(set(names)) != len(names):
            raise ValueError("scan axes must be distinct")


@dataclass(frozen=True)
class ScanResult:
    axes: tuple
    values: tuple  # one ndarray per axis
    gate_error: np.ndarray
    leakage: np.ndarray
    n_failed: int
    metadata: dict = field(repr=False)

    @property
    def shape(self) -> tuple:
        return self.gate_error.shape


def _perturbed(spec: ScanSpec, point: tuple) -> tuple:
    ws, bm = spec.ws, spec.blockade
    for ax, value in zip(spec.axes, point):
        v = float(value)
        if ax.name == "rabi_ratio":
            if ax.apply_to == "both":
                ws = ws.scaled_omegas(v)
            elif ax.apply_to == "omega0":
                ws = ws.scaled_omegas(v, 1.0)
            else:
                ws = ws.scaled_omegas(1.0, v)
        elif ax.name == "detuning_offset":
            offsets = {
                "both": (v, v),
                "delta0": (v, 0.0),
                "delta1": (0.0, v),
                "antisym": (v, -v),
            }[ax.apply_to]
            ws = ws.shifted_deltas(*offsets)
        else:  # blockade_B
            dq = bm.delta_q if bm.kind == "finite" else 0.0
            bm = BlockadeModel.finite(v, dq)
    return ws, bm


def run_scan(spec: ScanSpec, threads: int = 1) -> ScanResult:
    """Evaluate the gate over the grid; NaN cells mark failed points."""
    values = tuple(ax.values() for ax in spec.axes)
    shape = tuple(ax.points for ax in spec.axes)
    gate_error = np.full(shape, np.nan)
    leakage = np.full(shape, np.nan)
    indices = list(np.ndindex(shape))

    def point(idx):
        coords = tuple(values[k][i] for k, i in enumerate(idx))
        ws, bm = _perturbed(spec, coords)
        try:
            out = evaluate_gate(ws, bm, target=spec.target, cfg=spec.cfg)
        except IntegrationError:
            return idx, None
        return idx, out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(point, indices))
    else:
        results = [point(idx) for idx in indices]

    n_failed = 0
    for idx, out in results:  # assembled by index, not completion order
        if out is None:
            n_failed += 1
            continue
        gate_error[idx] = out.gate_error
        leakage[idx] = out.leakage

    if n_failed:
        warnings.warn(
            f"{n_failed} of {len(indices)} scan points failed integration",
            stacklevel=2,
        )

    cfg = spec.cfg if spec.cfg is not None else IntegratorConfig()
    metadata = {
        "source": spec.source,
        "target": spec.target if isinstance(spec.target, str) else "custom",
        "blockade": _blockade_dict(spec.blockade),
        "axes": [
            {"name": ax.name, "lo": ax.lo, "hi": ax.hi, "points": ax.points,
             "apply_to": ax.apply_to}
            for ax in spec.axes
        ],
        "integrator": {
            "method": cfg.method,
            "rel_tol": cfg.rel_tol,
            "abs_tol": cfg.abs_tol,
            "n_steps": cfg.n_steps,
            "n_samples": cfg.n_samples,
        },
        "version": __version__,
        "n_failed": n_failed,
    }
    return ScanResult(
        axes=spec.axes,
        values=values,
        gate_error=gate_error,
        leakage=leakage,
        n_failed=n_failed,
        metadata=metadata,
    )


def scan_rabi_ratio(spec: ScanSpec, threads: int = 1) -> ScanResult:
    _require_axis(spec, "rabi_ratio")
    return run_scan(spec, threads)


def scan_detuning_offset(spec: ScanSpec, threads: int = 1) -> ScanResult:
    _require_axis(spec, "detuning_offset")
    return run_scan(spec, threads)


def scan_blockade(spec: ScanSpec, threads: int = 1) -> ScanResult:
    _require_axis(spec, "blockade_B")
    return run_scan(spec, threads)


def _require_axis(spec: ScanSpec, name: str) -> None:
    if all(ax.name != name for ax in spec.axes):
        raise ValueError(f"scan spec has no {name!r} axis")


def _blockade_dict(bm: BlockadeModel) -> dict:
    if bm.kind == "ideal":
        return {"kind": "ideal"}
    return {"kind": "finite", "B_rad_us": bm.B, "delta_q_rad_us": bm.delta_q}


def write_scan_csv(result: ScanResult, csv_path, sidecar_path=None) -> tuple:
    """One row per grid point (axis values, gate_error, leakage), plus a
    JSON sidecar next to it carrying the scan definition."""
    csv_path = Path(csv_path)
    if sidecar_path is None:
        sidecar_path = csv_path.with_suffix(".json")
    sidecar_path = Path(sidecar_path)

    names = [ax.name for ax in result.axes]
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(names + ["gate_error", "leakage"])
        for idx in np.ndindex(result.shape):
            coords = [result.values[k][i] for k, i in enumerate(idx)]
            row = coords + [result.gate_error[idx], result.leakage[idx]]
            writer.writerow(f"{x:.17g}" for x in row)
    sidecar_path.write_text(json.dumps(result.metadata, indent=2) + "\n")
    return csv_path, sidecar_path
