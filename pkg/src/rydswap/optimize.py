"""Derive gate waveforms by derivative-free search over Fourier coefficients.

The search space is declared per series: how many coefficients, whether
the harmonics carry imaginary parts, and a symmetric coefficient box in
MHz.  Structural constraints (tying the two Rabi tones together, forcing
the detunings antisymmetric, constant, or zero) remove parameters rather
than penalizing them.  The scalar objective is the fast fixed-step gate
error plus hinge penalties for waveforms that fail to start and end flat
or that exceed a peak-Rabi cap.

Multi-start Nelder-Mead with per-restart random streams keeps the whole
search reproducible: restart ``k`` draws from ``default_rng([seed, k])``
and never touches shared state, so execution order is immaterial.  The
final result is re-scored with the full-tolerance integrator before it
is reported.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from ._fast import DEFAULT_SEARCH_STEPS, fast_gate_error
from ._version import __version__
from .dynamics import BlockadeModel, IntegrationError, IntegratorConfig
from .gate import GateOutcome, evaluate_gate, target_matrix
from .waveform import (
    TAU_DEFAULT,
    FourierSeries,
    WaveformSet,
    boundary_check,
    waveform_from_dict,
    waveform_to_dict,
)

OBJECTIVE_SENTINEL = 1e3
RABI_CAP_DEFAULT = 2.0 * math.pi * 300.0  # rad/us

_SIMPLEX_FRAC = 0.08  # first-leg simplex edge, fraction of box width


# ---------------------------------------------------------------------------
# Search-space declaration


@dataclass(frozen=True)
class CoefficientSlot:
    """Shape and box bounds of one searched Fourier series.

    ``n_terms`` counts coefficients ``a_0 .. a_{n_terms-1}``; ``a_0`` is
    always real.  With ``complex_terms`` the harmonics contribute two
    real parameters each.  ``bound`` is a symmetric box, in MHz, applied
    to every real parameter of the slot.
    """

    n_terms: int
    bound: float
    complex_terms: bool = False

    def __post_init__(self):
        if self.n_terms < 1:
            raise ValueError("a slot needs at least the constant coefficient")
        if not (self.bound > 0.0 and math.isfinite(self.bound)):
            raise ValueError("slot bound must be positive and finite (MHz)")

    @property
    def n_dofs(self) -> int:
        per_harmonic = 2 if self.complex_terms else 1
        return 1 + (self.n_terms - 1) * per_harmonic


@dataclass(frozen=True)
class SearchSpec:
    """Everything a search needs; frozen so runs are reproducible.

    ``omega1``/``delta1`` default to the shape of their partner slot
    (independent parameters, same box).  Constraint flags remove slots:
    a tied series must not also declare its own slot.  ``center`` turns
    the parameters into displacements added to a fixed waveform, which
    is how warm refits bound their coefficient drift; ``init_waveform``
    seeds restart 0 instead of a random draw.
    """

    omega0: CoefficientSlot
    budget: int
    omega1: CoefficientSlot | None = None
    delta0: CoefficientSlot | None = None
    delta1: CoefficientSlot | None = None
    tie_omegas: bool = False
    tie_deltas_antisym: bool = False
    constant_deltas: bool = False
    resonant: bool = False
    target: object = "auto"
    blockade: BlockadeModel = field(default_factory=BlockadeModel.ideal)
    penalty_boundary: float = 1e2
    penalty_rabi: float = 1e-3
    rabi_cap: float = RABI_CAP_DEFAULT
    boundary_tol: float = 1e-3
    restarts: int = 8
    target_error: float | None = None
    rng_seed: int = 0
    tau: float = TAU_DEFAULT
    n_search_steps: int = DEFAULT_SEARCH_STEPS
    init_waveform: WaveformSet | None = None
    center: WaveformSet | None = None

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1 evaluation")
        if self.restarts < 1:
            raise ValueError("need at least one restart")
        if self.budget < self.restarts:
            raise ValueError("budget must cover at least one evaluation per restart")
        if self.resonant:
            if self.delta0 is not None or self.delta1 is not None:
                raise ValueError("resonant search has no detuning parameters; drop the slots")
            if self.tie_deltas_antisym or self.constant_deltas:
                raise ValueError("resonant already fixes the detunings; drop the other flags")
        elif self.delta0 is None:
            raise ValueError("declare a delta0 slot or set resonant=True")
        if self.tie_omegas and self.omega1 is not None:
            raise ValueError("tied tones reuse the omega0 slot; leave omega1 unset")
        if self.tie_deltas_antisym and self.delta1 is not None:
            raise ValueError("antisymmetric detunings reuse the delta0 slot; leave delta1 unset")
        if self.constant_deltas:
            for slot in (self.delta0, self.delta1):
                if slot is not None and slot.n_terms != 1:
                    raise ValueError("constant detunings need single-term delta slots")
        if not (isinstance(self.target, str) and self.target == "auto"):
            target_matrix(self.target)  # raises on anything malformed
        if not (self.tau > 0.0 and math.isfinite(self.tau)):
            raise ValueError("tau must be positive and finite (us)")
        if self.n_search_steps < 100:
            raise ValueError("n_search_steps below 100 is too coarse to trust")
        for name in ("penalty_boundary", "penalty_rabi", "rabi_cap", "boundary_tol"):
            v = getattr(self, name)
            if not (v >= 0.0 and math.isfinite(v)):
                raise ValueError(f"{name} must be finite and non-negative")
        if self.target_error is not None and not (self.target_error > 0.0):
            raise ValueError("target_error must be positive when given")
        for ws in (self.init_waveform, self.center):
            if ws is not None and ws.tau != self.tau:
                raise ValueError("init/center waveforms must share the spec's tau")
        if self.center is not None:
            self._check_center_consistency()

    def _check_center_consistency(self):
        c = self.center
        if self.tie_omegas and not np.allclose(c.omega0.coeffs, c.omega1.coeffs):
            raise ValueError("tie_omegas center must have identical Rabi tones")
        if self.tie_deltas_antisym and not np.allclose(c.delta0.coeffs, -c.delta1.coeffs):
            raise ValueError("antisymmetric-detuning center must satisfy delta1 = -delta0")
        if self.resonant and not (
            np.allclose(c.delta0.coeffs, 0.0) and np.allclose(c.delta1.coeffs, 0.0)
        ):
            raise ValueError("resonant center must carry zero detunings")


# ---------------------------------------------------------------------------
# Parameter vector layout


@dataclass(frozen=True)
class _Layout:
    """Mapping between the flat parameter vector (MHz) and WaveformSet."""

    spec: SearchSpec
    searched: tuple  # of (series_key, CoefficientSlot, start_index)
    n_dofs: int
    names: tuple
    lower: np.ndarray
    upper: np.ndarray

    def slot_slice(self, key: str) -> slice:
        for k, slot, start in self.searched:
            if k == key:
                return slice(start, start + slot.n_dofs)
        raise KeyError(key)


def _layout(spec: SearchSpec) -> _Layout:
    searched = []
    names = []
    bounds = []
    pos = 0

    def add(key: str, slot: CoefficientSlot):
        nonlocal pos
        searched.append((key, slot, pos))
        names.append(f"{key}.a0")
        bounds.append(slot.bound)
        for k in range(1, slot.n_terms):
            if slot.complex_terms:
                names.extend([f"{key}.a{k}.re", f"{key}.a{k}.im"])
                bounds.extend([slot.bound, slot.bound])
            else:
                names.append(f"{key}.a{k}")
                bounds.append(slot.bound)
        pos += slot.n_dofs

    add("omega0", spec.omega0)
    if not spec.tie_omegas:
        add("omega1", spec.omega1 or spec.omega0)
    if not spec.resonant:
        add("delta0", spec.delta0)
        if not spec.tie_deltas_antisym:
            add("delta1", spec.delta1 or spec.delta0)
    if pos == 0:
        raise ValueError("search space has no free parameters")
    b = np.asarray(bounds, dtype=float)
    return _Layout(
        spec=spec,
        searched=tuple(searched),
        n_dofs=pos,
        names=tuple(names),
        lower=-b,
        upper=b,
    )


def _slot_coeffs(slot: CoefficientSlot, x: np.ndarray) -> np.ndarray:
    c = np.zeros(slot.n_terms, dtype=complex)
    c[0] = x[0]
    if slot.n_terms > 1:
        if slot.complex_terms:
            rest = x[1:].reshape(-1, 2)
            c[1:] = rest[:, 0] + 1j * rest[:, 1]
        else:
            c[1:] = x[1:]
    return c


def _slot_encode(slot: CoefficientSlot, coeffs: np.ndarray, key: str) -> np.ndarray:
    if len(coeffs) != slot.n_terms:
        raise ValueError(
            f"{key}: waveform has {len(coeffs)} coefficients, slot wants {slot.n_terms}"
        )
    x = np.empty(slot.n_dofs)
    x[0] = coeffs[0].real
    if slot.n_terms > 1:
        if slot.complex_terms:
            x[1::2] = coeffs[1:].real
            x[2::2] = coeffs[1:].imag
        else:
            if np.max(np.abs(coeffs[1:].imag)) > 1e-9:
                raise ValueError(f"{key}: complex harmonics do not fit a real slot")
            x[1:] = coeffs[1:].real
    return x


def decode(spec: SearchSpec, x) -> WaveformSet:
    """Parameter vector (MHz) to the waveform it describes."""
    x = np.asarray(x, dtype=float)
    lay = _layout(spec)
    if x.shape != (lay.n_dofs,):
        raise ValueError(f"expected {lay.n_dofs} parameters, got shape {x.shape}")
    series = {}
    for key, slot, start in lay.searched:
        c = _slot_coeffs(slot, x[start : start + slot.n_dofs])
        if spec.center is not None:
            c = c + getattr(spec.center, key).coeffs
        series[key] = FourierSeries(c, spec.tau)
    if spec.tie_omegas:
        series["omega1"] = series["omega0"]
    if spec.resonant:
        zero = FourierSeries(np.zeros(1), spec.tau)
        series["delta0"] = series["delta1"] = zero
    elif spec.tie_deltas_antisym:
        series["delta1"] = series["delta0"].scaled(-1.0)
    return WaveformSet(**series)


def encode(spec: SearchSpec, ws: WaveformSet) -> np.ndarray:
    """Inverse of :func:`decode`; rejects waveforms outside the declared family."""
    lay = _layout(spec)
    if ws.tau != spec.tau:
        raise ValueError("waveform tau does not match the spec")
    if spec.tie_omegas and not np.allclose(ws.omega0.coeffs, ws.omega1.coeffs):
        raise ValueError("tie_omegas requires identical Rabi tones")
    if spec.tie_deltas_antisym and not np.allclose(ws.delta0.coeffs, -ws.delta1.coeffs):
        raise ValueError("tie_deltas_antisym requires delta1 = -delta0")
    if spec.resonant and not (
        np.allclose(ws.delta0.coeffs, 0.0) and np.allclose(ws.delta1.coeffs, 0.0)
    ):
        raise ValueError("resonant requires zero detunings")
    x = np.empty(lay.n_dofs)
    for key, slot, start in lay.searched:
        c = np.array(getattr(ws, key).coeffs)
        if spec.center is not None:
            cc = getattr(spec.center, key).coeffs
            if len(cc) != len(c):
                raise ValueError(f"{key}: waveform and center disagree on term count")
            c = c - cc
        x[start : start + slot.n_dofs] = _slot_encode(slot, c, key)
    return x


def parameter_names(spec: SearchSpec) -> tuple:
    return _layout(spec).names


def parameter_bounds(spec: SearchSpec) -> np.ndarray:
    """(n_dofs, 2) box in MHz."""
    lay = _layout(spec)
    return np.column_stack([lay.lower, lay.upper])


# ---------------------------------------------------------------------------
# Objective


def _flat_start_projection(lay: _Layout, x: np.ndarray) -> np.ndarray:
    """Adjust each Rabi tone's a_0 so the tone vanishes at t = 0 and t = tau.

    The series value at the window edges is proportional to
    ``a_0 + 2 sum Re(a_k)``, so the constant term absorbs the harmonics.
    When the needed a_0 falls outside the box, the harmonics are shrunk
    until it fits: a start that merely clips a_0 would leave the tone's
    edge value at its own peak, where the boundary penalty plateaus and
    gives the simplex nothing to follow.
    """
    spec = lay.spec
    x = x.copy()
    for key, slot, start in lay.searched:
        if key not in ("omega0", "omega1"):
            continue
        sl = slice(start, start + slot.n_dofs)
        center = getattr(spec.center, key).coeffs if spec.center is not None else None
        for _ in range(40):
            c = _slot_coeffs(slot, x[sl])
            if center is not None:
                c = c + center
            a0_total = -2.0 * float(np.sum(c[1:].real))
            a0 = a0_total - (center[0].real if center is not None else 0.0)
            if lay.lower[start] <= a0 <= lay.upper[start]:
                x[start] = a0
                break
            x[sl.start + 1 : sl.stop] *= 0.8
            x[start] = min(max(a0, lay.lower[start]), lay.upper[start])
    return x


class _Objective:
    """Callable scalar objective bound to one spec; stateless between calls."""

    def __init__(self, spec: SearchSpec):
        self.spec = spec
        self.lay = _layout(spec)
        if isinstance(spec.target, str) and spec.target == "auto":
            self.target = "auto"
        else:
            self.target, _ = target_matrix(spec.target)

    def __call__(self, x: np.ndarray) -> float:
        spec = self.spec
        ws = decode(spec, x)
        try:
            err = fast_gate_error(ws, spec.blockade, self.target, n_steps=spec.n_search_steps)
        except IntegrationError:
            return OBJECTIVE_SENTINEL
        if not math.isfinite(err):
            return OBJECTIVE_SENTINEL
        # Coarse grids: these feed penalties, not reported numbers.
        rep = boundary_check(ws, tol_frac=spec.boundary_tol, n_grid=1001)
        excess = 0.0
        for entry in rep.ratios.values():
            for r in entry.values():
                excess += max(0.0, r - spec.boundary_tol)
        pen = spec.penalty_boundary * excess
        peak = ws.peak_rabi(n_grid=2001)
        pen += spec.penalty_rabi * max(0.0, peak - spec.rabi_cap)
        return err + pen


def objective(candidate, spec: SearchSpec) -> float:
    """Scalar search objective for one coefficient vector (MHz).

    Gate error on the fast integration path, plus hinge penalties for
    boundary residuals beyond ``boundary_tol`` (weighted by
    ``penalty_boundary``) and for peak Rabi frequency above ``rabi_cap``
    (weighted by ``penalty_rabi`` per rad/us).  Integration failure maps
    to the sentinel value ``OBJECTIVE_SENTINEL`` instead of raising.
    """
    return _Objective(spec)(np.asarray(candidate, dtype=float))


# ---------------------------------------------------------------------------
# Search driver


@dataclass(frozen=True)
class RestartRecord:
    """What one restart did: its budget use and its own best point."""

    index: int
    evaluations: int
    best_objective: float
    best_x: tuple
    reached_target: bool


@dataclass(frozen=True)
class SearchResult:
    best_waveform: WaveformSet
    best_error: float  # re-scored with the full-tolerance integrator
    best_objective: float  # search-side value at the same point
    resolved_target: str
    evaluations_used: int
    budget_exhausted: bool
    best_restart: int
    records: tuple
    history: np.ndarray = field(repr=False)  # best objective after each evaluation
    best_outcome: GateOutcome = field(repr=False, default=None)


class _StopRestart(Exception):
    pass


class _TargetReached(Exception):
    pass


class _RestartState:
    def __init__(self, fun: _Objective, allotment: int, target_error: float | None):
        self.fun = fun
        self.allotment = allotment
        self.target_error = target_error
        self.used = 0
        self.values = []
        self.best_val = math.inf
        self.best_x = None

    def __call__(self, x):
        if self.used >= self.allotment:
            raise _StopRestart
        val = self.fun(x)
        self.used += 1
        self.values.append(val)
        if val < self.best_val:
            self.best_val = val
            self.best_x = np.array(x)
        if self.target_error is not None and self.best_val <= self.target_error:
            raise _TargetReached
        return val


def _initial_simplex(lay: _Layout, x0: np.ndarray, frac: float) -> np.ndarray:
    width = lay.upper - lay.lower
    mid = 0.5 * (lay.upper + lay.lower)
    simplex = np.tile(x0, (lay.n_dofs + 1, 1))
    for i in range(lay.n_dofs):
        step = frac * width[i]
        simplex[i + 1, i] += step if x0[i] <= mid[i] else -step
    return np.clip(simplex, lay.lower, lay.upper)


def _random_start(lay: _Layout, rng: np.random.Generator) -> np.ndarray:
    return _flat_start_projection(lay, rng.uniform(lay.lower, lay.upper))


def _run_restart(spec: SearchSpec, fun: _Objective, index: int, allotment: int):
    """One seeded restart: Nelder-Mead legs with an annealed simplex scale.

    A single simplex run in this many dimensions collapses long before it
    is done, so the leg length is capped and each new leg re-expands a
    fresh simplex around the best point: smaller after progress, larger
    (plus a random kick) after a stall.  Everything is drawn from the
    restart's own stream, so the trajectory depends only on
    ``(rng_seed, index)`` and the allotment.
    """
    lay = fun.lay
    rng = np.random.default_rng([spec.rng_seed, index])
    if index == 0 and spec.init_waveform is not None:
        x0 = np.clip(encode(spec, spec.init_waveform), lay.lower, lay.upper)
    else:
        x0 = _random_start(lay, rng)
    state = _RestartState(fun, allotment, spec.target_error)
    bounds = list(zip(lay.lower, lay.upper))
    leg_cap = 250 * lay.n_dofs
    frac = _SIMPLEX_FRAC
    prev_best = math.inf
    hit = False
    try:
        while state.used < allotment:
            minimize(
                state,
                x0,
                method="Nelder-Mead",
                bounds=bounds,
                options={
                    "maxfev": min(allotment - state.used, leg_cap),
                    "maxiter": 10**9,
                    "xatol": 1e-10,
                    "fatol": 1e-14,
                    "adaptive": True,  # dimension-scaled simplex moves
                    "initial_simplex": _initial_simplex(lay, x0, frac),
                },
            )
            if state.used >= allotment:
                break
            if state.best_val < 0.97 * prev_best:
                frac = max(0.5 * frac, 0.002)
                x0 = state.best_x
            else:
                frac = min(2.0 * frac, 2.0 * _SIMPLEX_FRAC)
                kick = rng.uniform(-1.0, 1.0, lay.n_dofs) * frac * (lay.upper - lay.lower)
                x0 = _flat_start_projection(
                    lay, np.clip(state.best_x + kick, lay.lower, lay.upper)
                )
            prev_best = state.best_val
    except _StopRestart:
        pass
    except _TargetReached:
        hit = True
    record = RestartRecord(
        index=index,
        evaluations=state.used,
        best_objective=state.best_val,
        best_x=tuple(float(v) for v in state.best_x) if state.best_x is not None else (),
        reached_target=hit,
    )
    return record, state.values


def search(spec: SearchSpec) -> SearchResult:
    """Multi-start Nelder-Mead over the spec's coefficient box.

    Restarts run in index order, each on its own random stream and its
    own slice of the evaluation budget, so a run is bitwise reproducible
    from ``rng_seed``.  When ``target_error`` is set, the first restart
    to reach it ends the whole search; remaining restarts are skipped
    and do not appear in ``records``.
    """
    fun = _Objective(spec)
    base, extra = divmod(spec.budget, spec.restarts)
    records = []
    chunks = []
    for k in range(spec.restarts):
        allotment = base + (1 if k < extra else 0)
        record, values = _run_restart(spec, fun, k, allotment)
        records.append(record)
        chunks.append(values)
        if record.reached_target:
            break

    done = [r for r in records if r.best_x]
    if not done:
        raise RuntimeError("no restart produced an evaluation")  # budget >= restarts forbids this
    best = min(done, key=lambda r: (r.best_objective, r.index))
    best_x = np.asarray(best.best_x)
    best_ws = decode(spec, best_x)
    outcome = evaluate_gate(best_ws, spec.blockade, target=spec.target, cfg=IntegratorConfig())
    history = np.minimum.accumulate(np.concatenate([np.asarray(c) for c in chunks]))
    evaluations = int(sum(r.evaluations for r in records))
    return SearchResult(
        best_waveform=best_ws,
        best_error=outcome.gate_error,
        best_objective=best.best_objective,
        resolved_target=outcome.target_kind,
        evaluations_used=evaluations,
        budget_exhausted=evaluations >= spec.budget,
        best_restart=best.index,
        records=tuple(records),
        history=history,
        best_outcome=outcome,
    )


def refit_for_blockade(
    base: WaveformSet,
    bm_target: BlockadeModel,
    margin_mhz: float = 4.0,
    budget: int = 20000,
    restarts: int = 2,
    rng_seed: int = 0,
    target="auto",
    target_error: float | None = None,
    n_search_steps: int = DEFAULT_SEARCH_STEPS,
) -> SearchResult:
    """Warm-restart a known waveform toward a different blockade model.

    Parameters are displacements from ``base`` inside a ±``margin_mhz``
    box, which caps the coefficient drift by construction; restart 0
    starts at zero displacement.  ``base`` must already be a working
    gate under ideal blockade (error below 0.1), otherwise there is
    nothing worth refitting from.
    """
    ideal_err = evaluate_gate(base, BlockadeModel.ideal(), target=target).gate_error
    if not ideal_err < 0.1:
        raise ValueError(
            f"base waveform has error {ideal_err:.3g} under ideal blockade; refit needs < 0.1"
        )

    def slot_for(series) -> CoefficientSlot:
        c = np.asarray(series.coeffs)
        has_imag = c.size > 1 and np.max(np.abs(c[1:].imag)) > 0.0
        return CoefficientSlot(n_terms=c.size, bound=margin_mhz, complex_terms=bool(has_imag))

    spec = SearchSpec(
        omega0=slot_for(base.omega0),
        omega1=slot_for(base.omega1),
        delta0=slot_for(base.delta0),
        delta1=slot_for(base.delta1),
        budget=budget,
        restarts=restarts,
        rng_seed=rng_seed,
        target=target,
        blockade=bm_target,
        target_error=target_error,
        tau=base.tau,
        n_search_steps=n_search_steps,
        init_waveform=base,
        center=base,
    )
    return search(spec)


# ---------------------------------------------------------------------------
# Serialization: spec JSON and history CSV


def _slot_to_dict(slot: CoefficientSlot | None):
    if slot is None:
        return None
    return {"n_terms": slot.n_terms, "bound_mhz": slot.bound, "complex_terms": slot.complex_terms}


def _slot_from_dict(d) -> CoefficientSlot | None:
    if d is None:
        return None
    return CoefficientSlot(
        n_terms=int(d["n_terms"]),
        bound=float(d["bound_mhz"]),
        complex_terms=bool(d.get("complex_terms", False)),
    )


def _blockade_to_dict(bm: BlockadeModel) -> dict:
    if bm.kind == "ideal":
        return {"kind": "ideal"}
    return {"kind": "finite", "b_rad_us": bm.B, "delta_q_rad_us": bm.delta_q}


def _blockade_from_dict(d: dict) -> BlockadeModel:
    if d["kind"] == "ideal":
        return BlockadeModel.ideal()
    return BlockadeModel.finite(float(d["b_rad_us"]), float(d.get("delta_q_rad_us", 0.0)))


def searchspec_to_dict(spec: SearchSpec) -> dict:
    if isinstance(spec.target, str):
        target = spec.target
    else:
        mat, _ = target_matrix(spec.target)
        target = [[[z.real, z.imag] for z in row] for row in mat]
    return {
        "omega0": _slot_to_dict(spec.omega0),
        "omega1": _slot_to_dict(spec.omega1),
        "delta0": _slot_to_dict(spec.delta0),
        "delta1": _slot_to_dict(spec.delta1),
        "tie_omegas": spec.tie_omegas,
        "tie_deltas_antisym": spec.tie_deltas_antisym,
        "constant_deltas": spec.constant_deltas,
        "resonant": spec.resonant,
        "target": target,
        "blockade": _blockade_to_dict(spec.blockade),
        "penalty_boundary": spec.penalty_boundary,
        "penalty_rabi": spec.penalty_rabi,
        "rabi_cap_rad_us": spec.rabi_cap,
        "boundary_tol": spec.boundary_tol,
        "budget": spec.budget,
        "restarts": spec.restarts,
        "target_error": spec.target_error,
        "rng_seed": spec.rng_seed,
        "tau_us": spec.tau,
        "n_search_steps": spec.n_search_steps,
        "init_waveform": None if spec.init_waveform is None else waveform_to_dict(spec.init_waveform),
        "center": None if spec.center is None else waveform_to_dict(spec.center),
        "version": __version__,
    }


def searchspec_from_dict(d: dict) -> SearchSpec:
    target = d.get("target", "auto")
    if not isinstance(target, str):
        target = np.array([[complex(re, im) for re, im in row] for row in target])
    return SearchSpec(
        omega0=_slot_from_dict(d["omega0"]),
        omega1=_slot_from_dict(d.get("omega1")),
        delta0=_slot_from_dict(d.get("delta0")),
        delta1=_slot_from_dict(d.get("delta1")),
        tie_omegas=bool(d.get("tie_omegas", False)),
        tie_deltas_antisym=bool(d.get("tie_deltas_antisym", False)),
        constant_deltas=bool(d.get("constant_deltas", False)),
        resonant=bool(d.get("resonant", False)),
        target=target,
        blockade=_blockade_from_dict(d.get("blockade", {"kind": "ideal"})),
        penalty_boundary=float(d.get("penalty_boundary", 1e2)),
        penalty_rabi=float(d.get("penalty_rabi", 1e-3)),
        rabi_cap=float(d.get("rabi_cap_rad_us", RABI_CAP_DEFAULT)),
        boundary_tol=float(d.get("boundary_tol", 1e-3)),
        budget=int(d["budget"]),
        restarts=int(d.get("restarts", 8)),
        target_error=None if d.get("target_error") is None else float(d["target_error"]),
        rng_seed=int(d.get("rng_seed", 0)),
        tau=float(d.get("tau_us", TAU_DEFAULT)),
        n_search_steps=int(d.get("n_search_steps", DEFAULT_SEARCH_STEPS)),
        init_waveform=(
            None if d.get("init_waveform") is None else waveform_from_dict(d["init_waveform"])
        ),
        center=None if d.get("center") is None else waveform_from_dict(d["center"]),
    )


def save_search_spec(path, spec: SearchSpec) -> None:
    Path(path).write_text(json.dumps(searchspec_to_dict(spec), indent=2) + "\n")


def load_search_spec(path) -> SearchSpec:
    return searchspec_from_dict(json.loads(Path(path).read_text()))


def write_history_csv(result: SearchResult, path) -> None:
    """One row per objective evaluation: evaluation, restart, best_error.

    ``best_error`` is the running best objective over the whole search,
    so the column is monotone non-increasing.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["evaluation", "restart", "best_error"])
        i = 0
        for rec in result.records:
            for _ in range(rec.evaluations):
                w.writerow([i + 1, rec.index, f"{result.history[i]:.17g}"])
                i += 1
