"""Fourier-series laser waveforms.

Every drive and detuning profile in this package is a truncated Fourier
series on a fixed gate window ``[0, tau]``::

    f(t) = 2*pi/(2N+1) * ( a_0 + sum_{n=1..N} a_n e^{2 pi i n t/tau}
                                             + conj(a_n) e^{-2 pi i n t/tau} )

with ``a_0`` real, so ``f`` is real and ``tau``-periodic by construction.
Coefficients are stored in MHz; evaluation returns angular frequencies in
rad/us.  The ``2*pi`` MHz-to-angular conversion happens exactly once, inside
:func:`fourier_eval` (and its derivative/antiderivative siblings).  All other
modules work in rad/us and us throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

TAU_DEFAULT = 0.25
"""Gate window in microseconds shared by all published waveforms."""

_TWO_PI = 2.0 * math.pi


class WaveformError(ValueError):
    """Raised for structurally invalid series or waveform files."""


@dataclass(frozen=True, eq=False)
class FourierSeries:
    """One real-valued waveform, stored as its complex coefficients.

    Parameters
    ----------
    coeffs:
        Complex array ``[a_0, a_1, ..., a_N]`` in MHz.  ``a_0`` must be real.
    tau:
        Period / gate window in microseconds.
    """

    coeffs: np.ndarray
    tau: float = TAU_DEFAULT

    def __post_init__(self):
        arr = np.atleast_1d(np.asarray(self.coeffs, dtype=complex)).copy()
        if arr.ndim != 1 or arr.size < 1:
            raise WaveformError("coefficient array must be 1-d and non-empty")
        if arr[0].imag != 0.0:
            raise WaveformError("a_0 must be real")
        if not (self.tau > 0.0) or not math.isfinite(self.tau):
            raise WaveformError(f"tau must be positive and finite, got {self.tau!r}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)
        object.__setattr__(self, "tau", float(self.tau))

    @property
    def n_harmonics(self) -> int:
        return self.coeffs.size - 1

    def scaled(self, factor: float) -> "FourierSeries":
        return FourierSeries(self.coeffs * factor, self.tau)

    def shifted(self, offset_rad_us: float) -> "FourierSeries":
        """Add a constant ``offset_rad_us`` (rad/us) to the waveform value."""
        c = self.coeffs.copy()
        c[0] = c[0] + offset_rad_us * (2 * self.n_harmonics + 1) / _TWO_PI
        return FourierSeries(c, self.tau)


def _eval_core(series: FourierSeries, t, mode: str):
    a = series.coeffs
    n_harm = series.n_harmonics
    norm = _TWO_PI / (2 * n_harm + 1)
    t_arr = np.asarray(t, dtype=float)
    scalar = t_arr.ndim == 0
    t_arr = np.atleast_1d(t_arr)
    n = np.arange(1, n_harm + 1)
    w = _TWO_PI * n / series.tau  # harmonic angular frequencies, rad/us
    z = np.exp(1j * np.outer(t_arr, w))
    if mode == "value":
        out = norm * (a[0].real + 2.0 * (z @ a[1:]).real)
    elif mode == "slope":
        out = norm * 2.0 * (z @ (1j * w * a[1:])).real
    elif mode == "antiderivative":
        # term-wise exact integral, zero at t = 0
        out = norm * (a[0].real * t_arr + 2.0 * ((z - 1.0) @ (a[1:] / (1j * w))).real)
    else:  # pragma: no cover
        raise ValueError(mode)
    return float(out[0]) if scalar else out


def fourier_eval(series: FourierSeries, t):
    """Waveform value in rad/us at time(s) ``t`` (us)."""
    return _eval_core(series, t, "value")


def fourier_derivative(series: FourierSeries, t):
    """Time derivative in rad/us^2 at time(s) ``t``."""
    return _eval_core(series, t, "slope")


def fourier_integral(series: FourierSeries, t):
    """Antiderivative ``F(t) = int_0^t f`` in radians, exact term by term."""
    return _eval_core(series, t, "antiderivative")


@dataclass(frozen=True, eq=False)
class WaveformSet:
    """The four profiles driving one gate: two Rabi tones, two detunings."""

    omega0: FourierSeries
    omega1: FourierSeries
    delta0: FourierSeries
    delta1: FourierSeries

    def __post_init__(self):
        taus = {s.tau for s in (self.omega0, self.omega1, self.delta0, self.delta1)}
        if len(taus) != 1:
            raise WaveformError(f"all series must share one tau, got {sorted(taus)}")

    @property
    def tau(self) -> float:
        return self.omega0.tau

    def scaled_omegas(self, ratio0: float, ratio1: float | None = None) -> "WaveformSet":
        if ratio1 is None:
            ratio1 = ratio0
        return replace(
            self, omega0=self.omega0.scaled(ratio0), omega1=self.omega1.scaled(ratio1)
        )

    def shifted_deltas(self, offset0: float, offset1: float) -> "WaveformSet":
        """Add constant offsets (rad/us) to the two detuning profiles."""
        return replace(
            self, delta0=self.delta0.shifted(offset0), delta1=self.delta1.shifted(offset1)
        )

    def peak_rabi(self, n_grid: int = 20001) -> float:
        """max over t of |Omega_0|, |Omega_1| (rad/us) on a dense grid."""
        t = np.linspace(0.0, self.tau, n_grid)
        return float(
            max(
                np.max(np.abs(fourier_eval(self.omega0, t))),
                np.max(np.abs(fourier_eval(self.omega1, t))),
            )
        )


@dataclass(frozen=True)
class BoundaryReport:
    """Result of :func:`boundary_check`.

    ``ratios`` maps series name to residuals expressed as fractions of the
    series' peak value (or peak slope); ``ok`` is the overall verdict.
    """

    ratios: dict
    tol_frac: float
    ok: bool


def boundary_check(ws: WaveformSet, tol_frac: float = 1e-3, n_grid: int = 4001) -> BoundaryReport:
    """Check that both Rabi tones start and end flat at zero.

    A tone passes when its value and its slope at t = 0 and t = tau are each
    at most ``tol_frac`` of the respective peak magnitude over the window.
    Detuning profiles are exempt: they may sit anywhere at the window edges.
    This is a soft diagnostic; callers decide what to do with a failure.
    """
    t = np.linspace(0.0, ws.tau, n_grid)
    ratios: dict[str, dict[str, float]] = {}
    ok = True
    for name in ("omega0", "omega1"):
        s: FourierSeries = getattr(ws, name)
        val_scale = float(np.max(np.abs(fourier_eval(s, t))))
        slope_scale = float(np.max(np.abs(fourier_derivative(s, t))))

        def ratio(x: float, scale: float) -> float:
            return abs(x) / scale if scale > 0.0 else 0.0

        entry = {
            "value_start": ratio(fourier_eval(s, 0.0), val_scale),
            "value_end": ratio(fourier_eval(s, ws.tau), val_scale),
            "slope_start": ratio(fourier_derivative(s, 0.0), slope_scale),
            "slope_end": ratio(fourier_derivative(s, ws.tau), slope_scale),
        }
        ratios[name] = entry
        ok = ok and all(r <= tol_frac for r in entry.values())
    return BoundaryReport(ratios=ratios, tol_frac=tol_frac, ok=ok)


# ---------------------------------------------------------------------------
# JSON interchange
#
# {"tau_us": 0.25, "omega0": {"coeffs": [[re, im], ...]}, "omega1": ...,
#  "delta0": ..., "delta1": ...}   with coefficients in MHz.

_SERIES_KEYS = ("omega0", "omega1", "delta0", "delta1")


def waveform_to_dict(ws: WaveformSet) -> dict:
    out: dict = {"tau_us": ws.tau}
    for name in _SERIES_KEYS:
        c = getattr(ws, name).coeffs
        out[name] = {"coeffs": [[float(x.real), float(x.imag)] for x in c]}
    return out


def _series_from_entry(name: str, entry, tau: float) -> FourierSeries:
    if not isinstance(entry, dict) or "coeffs" not in entry:
        raise WaveformError(f"{name}: expected an object with a 'coeffs' list")
    raw = entry["coeffs"]
    if not isinstance(raw, list) or len(raw) == 0:
        raise WaveformError(f"{name}: 'coeffs' must be a non-empty list")
    try:
        pairs = np.asarray(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise WaveformError(f"{name}: coefficients must be [re, im] number pairs") from exc
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise WaveformError(f"{name}: coefficients must be [re, im] number pairs")
    if not np.all(np.isfinite(pairs)):
        raise WaveformError(f"{name}: coefficients must be finite")
    return FourierSeries(pairs[:, 0] + 1j * pairs[:, 1], tau)


def waveform_from_dict(d: dict) -> WaveformSet:
    if not isinstance(d, dict):
        raise WaveformError("waveform document must be a JSON object")
    try:
        tau = float(d["tau_us"])
    except (KeyError, TypeError, ValueError) as exc:
        raise WaveformError("missing or non-numeric 'tau_us'") from exc
    if not (tau > 0.0) or not math.isfinite(tau):
        raise WaveformError(f"'tau_us' must be positive, got {tau!r}")
    missing = [k for k in _SERIES_KEYS if k not in d]
    if missing:
        raise WaveformError(f"missing series: {', '.join(missing)}")
    return WaveformSet(**{k: _series_from_entry(k, d[k], tau) for k in _SERIES_KEYS})


def save_waveform(path, ws: WaveformSet) -> None:
    Path(path).write_text(json.dumps(waveform_to_dict(ws), indent=2) + "\n")


def load_waveform(path) -> WaveformSet:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise WaveformError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    return waveform_from_dict(doc)
