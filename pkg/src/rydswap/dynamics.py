"""Two-atom blockade dynamics, organized by exchange symmetry.

Uniform driving never mixes the antisymmetric and symmetric combinations of
the two atoms, so the pair problem splits into independent channels:

* singlet (3 levels):  ``c1m=(|01>-|10>)/sqrt2``, plus the two antisymmetric
  single-Rydberg combinations ``c0r``, ``c1r``;
* triplet (7 levels):  ``c0=|00>``, ``c1p=(|01>+|10>)/sqrt2``, ``c2=|11>``,
  the symmetric single-Rydberg combinations ``cr0``, ``cr1``, the double
  excitation ``crr=|rr>``, and the pair state ``cqq`` it hybridizes with.

The triplet Hamiltonian is written in the frame where the computational
states carry no rotating phases, each single-Rydberg state sits at its own
drive detuning, and the leftover cross couplings oscillate with the
inter-tone phase

    Phi(t) = (Delta_0(t) - Delta_1(t)) * t.

For constant detunings that product is the familiar accumulated phase; for
modulated detunings it is a definition, and it is the one the published
waveforms were designed against (the integral form scrambles the hybrid
preset completely).  Phi is closed-form, so no auxiliary phase variable is
integrated.  ``h_triplet_diagonal`` is the same evolution in a static gauge
with every phase absorbed into the diagonal; the amplitudes wind by
``GAUGE_WINDING * Phi``, which :func:`gauge_transform_check` verifies.

``h_full`` rotates blockdiag(h_singlet, h_triplet) back to the product
basis: the unique pair Hamiltonian whose channel reductions are exactly the
two channel matrices.  For constant detunings it coincides with the
Hamiltonian assembled atom-by-atom from the drive, and the test suite holds
it to that; for modulated detunings the two channel frames are genuinely
independent, so the channel matrices themselves are the ground truth.

An ideal blockade drops ``crr``/``cqq`` (and ``rr``/``qq``) entirely; a
finite model keeps them with pair coupling ``B`` and pair-state penalty
``delta_q`` (both rad/us).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import block_diag

from .waveform import WaveformSet, fourier_derivative, fourier_eval

_R2 = math.sqrt(2.0)

# Channel state contents, written in the product basis:
#   c1m  = (|01> - |10>)/sqrt2     cr1m = (|r1> - |1r>)/sqrt2
#   cr0m = (|0r> - |r0>)/sqrt2
#   c0   = |00>     c1p = (|01> + |10>)/sqrt2     c2 = |11>
#   cr0  = (|0r> + |r0>)/sqrt2     cr1 = (|1r> + |r1>)/sqrt2
# Detuning bookkeeping follows the exciting tone, not the spectator atom:
# cr1m sits at Delta0 (tone 0 drove the |0> component of c1m up, the partner
# stays in |1>) and cr0m at Delta1, while in the triplet sector cr0 sits at
# Delta0 and cr1 at Delta1.
SINGLET_LABELS = ("c1m", "cr1m", "cr0m")
TRIPLET_LABELS = ("c0", "c1p", "c2", "cr0", "cr1", "crr", "cqq")
FULL_LABELS = ("00", "01", "10", "11", "0r", "r0", "1r", "r1", "rr", "qq")

#: amplitude winding exponents k such that b = exp(i k Phi) c maps the
#: explicit-phase triplet gauge onto the diagonal-detuning gauge
GAUGE_WINDING = np.array([1, 0, -1, 1, -1, 0, 0])


def rotating_phase(ws: WaveformSet, t):
    """Inter-tone rotating phase Phi(t) = (Delta_0(t) - Delta_1(t)) * t."""
    return (fourier_eval(ws.delta0, t) - fourier_eval(ws.delta1, t)) * t


def rotating_phase_rate(ws: WaveformSet, t):
    """d(Phi)/dt, needed by the diagonal gauge when detunings are modulated."""
    d = fourier_eval(ws.delta0, t) - fourier_eval(ws.delta1, t)
    dd = fourier_derivative(ws.delta0, t) - fourier_derivative(ws.delta1, t)
    return d + dd * t


class IntegrationError(RuntimeError):
    """Adaptive stepping failed; ``t_fail`` is the last time reached."""

    def __init__(self, message: str, t_fail: float | None = None):
        super().__init__(message)
        self.t_fail = t_fail


class GaugeError(RuntimeError):
    """The two triplet gauges disagreed beyond tolerance."""


@dataclass(frozen=True)
class BlockadeModel:
    """Rydberg-pair interaction model: ``ideal`` (infinite) or ``finite``."""

    kind: str
    B: float = math.inf
    delta_q: float = 0.0

    def __post_init__(self):
        if self.kind not in ("ideal", "finite"):
            raise ValueError(f"unknown blockade kind {self.kind!r}")
        if self.kind == "finite":
            if not (self.B > 0.0 and math.isfinite(self.B)):
                raise ValueError("finite blockade requires B > 0 (rad/us)")
            if not math.isfinite(self.delta_q):
                raise ValueError("delta_q must be finite")

    @classmethod
    def ideal(cls) -> "BlockadeModel":
        return cls("ideal", math.inf, 0.0)

    @classmethod
    def finite(cls, B: float, delta_q: float = 0.0) -> "BlockadeModel":
        return cls("finite", float(B), float(delta_q))


@dataclass(frozen=True)
class IntegratorConfig:
    """Time-stepping knobs.

    ``adaptive_rk`` is an embedded Runge-Kutta 5(4) pair with per-step error
    control; ``fixed_rk4`` is a classical fixed-step integrator kept as an
    independent alternative.
    """

    method: str = "adaptive_rk"
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    n_steps: int = 4000
    n_samples: int = 501

    def __post_init__(self):
        if self.method not in ("adaptive_rk", "fixed_rk4"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.rel_tol < 1e-13:
            raise ValueError("rel_tol below 1e-13 is not honored by the stepper")
        if not (self.abs_tol > 0.0):
            raise ValueError("abs_tol must be positive")
        if self.n_steps < 1000:
            raise ValueError("fixed stepping needs n_steps >= 1000")
        if self.n_samples < 2:
            raise ValueError("need at least the two endpoint samples")


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (n_samples, dim) or (n_samples, dim, n_columns)
    phases: np.ndarray | None  # Phi(t) at the samples, where the frame uses it
    labels: tuple
    norm_drift: float


# ---------------------------------------------------------------------------
# Hamiltonian builders (all values rad/us; matrices include the 1/2 factor)


def h_singlet(ws: WaveformSet, t: float) -> np.ndarray:
    """Antisymmetric channel: a three-level V system, no blockade terms."""
    o0 = fourier_eval(ws.omega0, t)
    o1 = fourier_eval(ws.omega1, t)
    H = np.zeros((3, 3), dtype=complex)
    H[0, 1] = o0
    H[0, 2] = o1
    H[1, 0] = np.conj(o0)
    H[2, 0] = np.conj(o1)
    H[1, 1] = 2.0 * fourier_eval(ws.delta0, t)
    H[2, 2] = 2.0 * fourier_eval(ws.delta1, t)
    return 0.5 * H


def h_triplet(ws: WaveformSet, bm: BlockadeModel, t: float, phase: float) -> np.ndarray:
    """Symmetric channel in the explicit-phase gauge.

    ``phase`` is the inter-tone phase Phi(t); the caller (usually the
    integrator) supplies it.
    """
    o0 = fourier_eval(ws.omega0, t)
    o1 = fourier_eval(ws.omega1, t)
    d0 = fourier_eval(ws.delta0, t)
    d1 = fourier_eval(ws.delta1, t)
    e = np.exp(1j * phase)
    ec = np.conj(e)
    dim = 7 if bm.kind == "finite" else 5
    U = np.zeros((dim, dim), dtype=complex)
    U[0, 3] = _R2 * o0
    U[1, 3] = o1 * e
    U[1, 4] = o0 * ec
    U[2, 4] = _R2 * o1
    diag = np.zeros(dim)
    diag[3] = 2.0 * d0
    diag[4] = 2.0 * d1
    if bm.kind == "finite":
        U[3, 5] = _R2 * o0 * ec
        U[4, 5] = _R2 * o1 * e
        U[5, 6] = 2.0 * bm.B
        diag[5] = 2.0 * (d0 + d1)
        diag[6] = 2.0 * (d0 + d1 + bm.delta_q)
    return 0.5 * (U + U.conj().T + np.diag(diag))


def h_triplet_diagonal(ws: WaveformSet, bm: BlockadeModel, t: float) -> np.ndarray:
    """Symmetric channel in the static gauge: couplings phase-free, the
    frame rotation folded into the diagonal via d(Phi)/dt."""
    o0 = fourier_eval(ws.omega0, t)
    o1 = fourier_eval(ws.omega1, t)
    d0 = fourier_eval(ws.delta0, t)
    d1 = fourier_eval(ws.delta1, t)
    rate = rotating_phase_rate(ws, t)
    dim = 7 if bm.kind == "finite" else 5
    U = np.zeros((dim, dim), dtype=complex)
    U[0, 3] = _R2 * o0
    U[1, 3] = o1
    U[1, 4] = o0
    U[2, 4] = _R2 * o1
    diag = np.zeros(dim)
    diag[0] = -2.0 * rate
    diag[2] = 2.0 * rate
    diag[3] = 2.0 * d0 - 2.0 * rate
    diag[4] = 2.0 * d1 + 2.0 * rate
    if bm.kind == "finite":
        U[3, 5] = _R2 * o0
        U[4, 5] = _R2 * o1
        U[5, 6] = 2.0 * bm.B
        diag[5] = 2.0 * (d0 + d1)
        diag[6] = 2.0 * (d0 + d1 + bm.delta_q)
    return 0.5 * (U + U.conj().T + np.diag(diag))


def channel_basis_matrix(bm: BlockadeModel) -> np.ndarray:
    """Orthogonal change of basis from the product basis to
    [singlet states, triplet states]."""
    dim = 10 if bm.kind == "finite" else 8
    V = np.zeros((dim, dim))
    s = 1.0 / _R2
    idx = {lbl: i for i, lbl in enumerate(FULL_LABELS)}
    cols = [
        {("01"): s, ("10"): -s},  # c1m
        {("r1"): s, ("1r"): -s},  # cr1m
        {("0r"): s, ("r0"): -s},  # cr0m
        {("00"): 1.0},  # c0
        {("01"): s, ("10"): s},  # c1p
        {("11"): 1.0},  # c2
        {("0r"): s, ("r0"): s},  # cr0
        {("r1"): s, ("1r"): s},  # cr1
    ]
    if bm.kind == "finite":
        cols += [{("rr"): 1.0}, {("qq"): 1.0}]
    for j, col in enumerate(cols):
        for lbl, v in col.items():
            V[idx[lbl], j] = v
    return V


def h_full(ws: WaveformSet, bm: BlockadeModel, t: float, phase: float) -> np.ndarray:
    """Product-basis pair Hamiltonian whose channel reductions are exactly
    ``h_singlet`` and ``h_triplet``: the block pair rotated back through
    :func:`channel_basis_matrix`.  ``phase`` is Phi(t), as for h_triplet.
    Ideal blockade truncates to the first eight states.
    """
    V = channel_basis_matrix(bm)
    blocks = block_diag(h_singlet(ws, t), h_triplet(ws, bm, t, phase))
    return V @ blocks @ V.T


# ---------------------------------------------------------------------------
# Channel descriptors consumed by integrate()


class _Singlet:
    name = "singlet"
    uses_phase = False

    def dim(self, bm):
        return 3

    def labels(self, bm):
        return SINGLET_LABELS

    def hamiltonian(self, ws, bm, t):
        return h_singlet(ws, t)


class _Triplet:
    name = "triplet"
    uses_phase = True

    def dim(self, bm):
        return 7 if bm.kind == "finite" else 5

    def labels(self, bm):
        return TRIPLET_LABELS[: self.dim(bm)]

    def hamiltonian(self, ws, bm, t):
        return h_triplet(ws, bm, t, rotating_phase(ws, t))


class _TripletDiagonal:
    name = "triplet_diagonal"
    uses_phase = False

    def dim(self, bm):
        return 7 if bm.kind == "finite" else 5

    def labels(self, bm):
        return TRIPLET_LABELS[: self.dim(bm)]

    def hamiltonian(self, ws, bm, t):
        return h_triplet_diagonal(ws, bm, t)


class _Full:
    name = "full"
    uses_phase = True

    def dim(self, bm):
        return 10 if bm.kind == "finite" else 8

    def labels(self, bm):
        return FULL_LABELS[: self.dim(bm)]

    def hamiltonian(self, ws, bm, t):
        return h_full(ws, bm, t, rotating_phase(ws, t))


SINGLET_SYSTEM = _Singlet()
TRIPLET_SYSTEM = _Triplet()
TRIPLET_DIAGONAL_SYSTEM = _TripletDiagonal()
FULL_SYSTEM = _Full()


def integrate(
    system,
    psi0: np.ndarray,
    ws: WaveformSet,
    bm: BlockadeModel,
    cfg: IntegratorConfig | None = None,
    t_eval: np.ndarray | None = None,
) -> Trajectory:
    """Evolve ``psi0`` (one state or a stack of columns) over [0, tau].

    Returns amplitudes sampled at ``t_eval`` (default: ``n_samples`` evenly
    spaced points including both endpoints).  Deterministic for fixed inputs.
    """
    cfg = cfg or IntegratorConfig()
    dim = system.dim(bm)
    psi0 = np.asarray(psi0, dtype=complex)
    single = psi0.ndim == 1
    if psi0.shape[0] != dim:
        raise ValueError(f"initial state has shape {psi0.shape}, channel needs dim {dim}")
    cols = psi0.reshape(dim, -1)
    n_cols = cols.shape[1]
    if not np.all(np.isfinite(cols)):
        raise ValueError("initial state contains non-finite amplitudes")
    # a non-finite coefficient poisons the series at every t, and NaN in the
    # right-hand side can wedge the adaptive stepper; fail loudly instead
    if not np.all(np.isfinite(system.hamiltonian(ws, bm, 0.0))):
        raise IntegrationError("Hamiltonian is not finite at t = 0", 0.0)
    if t_eval is None:
        t_eval = np.linspace(0.0, ws.tau, cfg.n_samples)

    last_t = 0.0

    def rhs(t, y):
        nonlocal last_t
        last_t = t
        H = system.hamiltonian(ws, bm, t)
        return (-1j * (H @ y.reshape(dim, n_cols))).reshape(-1)

    if cfg.method == "adaptive_rk":
        try:
            sol = solve_ivp(
                rhs,
                (0.0, ws.tau),
                cols.reshape(-1),
                method="RK45",
                rtol=cfg.rel_tol,
                atol=cfg.abs_tol,
                t_eval=t_eval,
                dense_output=False,
            )
        except (ValueError, FloatingPointError) as exc:
            raise IntegrationError(f"stepper failed near t = {last_t:.6g} us: {exc}", last_t) from exc
        if not sol.success:
            raise IntegrationError(
                f"stepper gave up near t = {last_t:.6g} us: {sol.message}", last_t
            )
        ys = sol.y.T
    else:
        ys = _fixed_rk4(rhs, cols.reshape(-1), t_eval, cfg.n_steps)

    bad = ~np.isfinite(ys)
    if bad.any():
        k = int(np.argmax(bad.any(axis=1)))
        t_bad = float(np.asarray(t_eval, dtype=float)[k])
        raise IntegrationError(f"non-finite amplitudes at t = {t_bad:.6g} us", t_bad)

    states = ys.reshape(-1, dim, n_cols)
    norms0 = np.linalg.norm(cols, axis=0)
    norms1 = np.linalg.norm(states[-1], axis=0)
    drift = float(np.max(np.abs(norms1 - norms0)))
    if single:
        states = states[:, :, 0]
    t_eval = np.asarray(t_eval, dtype=float)
    return Trajectory(
        times=t_eval,
        states=states,
        phases=rotating_phase(ws, t_eval) if system.uses_phase else None,
        labels=system.labels(bm),
        norm_drift=drift,
    )


def _fixed_rk4(rhs, y0, t_eval, n_steps):
    n_int = len(t_eval) - 1
    sub = max(1, -(-n_steps // n_int))  # substeps per sampling interval
    out = np.empty((len(t_eval), y0.size), dtype=complex)
    out[0] = y0
    y = y0.copy()
    for i in range(n_int):
        h = (t_eval[i + 1] - t_eval[i]) / sub
        t = t_eval[i]
        for _ in range(sub):
            k1 = rhs(t, y)
            k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
            k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
            k4 = rhs(t + h, y + h * k3)
            y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            t += h
        out[i + 1] = y
    return out


@dataclass(frozen=True)
class GaugeReport:
    max_mismatch_computational: float
    max_mismatch_all: float
    phase_final: float
    ok: bool


def gauge_transform_check(
    ws: WaveformSet,
    bm: BlockadeModel,
    cfg: IntegratorConfig | None = None,
    tol: float = 1e-8,
) -> GaugeReport:
    """Integrate the triplet channel in both gauges and compare.

    The three computational columns are evolved under the explicit-phase
    Hamiltonian and under the static diagonal one; the static result is
    wound back with ``exp(-i * GAUGE_WINDING * Phi(tau))`` and the final
    amplitudes must coincide.  ``c1p`` carries no winding at all, and the
    two gauges are the same matrix whenever both detunings are equal.
    Raises :class:`GaugeError` when the computational rows disagree by more
    than ``tol``.
    """
    cfg = cfg or IntegratorConfig()
    dim = TRIPLET_SYSTEM.dim(bm)
    cols = np.zeros((dim, 3), dtype=complex)
    cols[0, 0] = cols[1, 1] = cols[2, 2] = 1.0

    tr_a = integrate(TRIPLET_SYSTEM, cols, ws, bm, cfg)
    tr_b = integrate(TRIPLET_DIAGONAL_SYSTEM, cols, ws, bm, cfg)

    phi_tau = float(rotating_phase(ws, ws.tau))
    winding = GAUGE_WINDING[:dim]
    unwound = np.exp(-1j * winding * phi_tau)[:, None] * tr_b.states[-1]
    diff = np.abs(tr_a.states[-1] - unwound)

    report = GaugeReport(
        max_mismatch_computational=float(diff[:3].max()),
        max_mismatch_all=float(diff.max()),
        phase_final=phi_tau,
        ok=bool(diff[:3].max() <= tol),
    )
    if not report.ok:
        raise GaugeError(
            f"gauges disagree on computational amplitudes by "
            f"{report.max_mismatch_computational:.3e} (tol {tol:.1e})"
        )
    return report
