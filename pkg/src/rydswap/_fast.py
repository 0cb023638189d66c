"""Fixed-step channel propagation for the optimizer's inner loop.

The adaptive integrator in :mod:`rydswap.dynamics` stays the reference;
this path trades its per-step error control for raw speed.  Hamiltonians
are sampled once on a uniform grid (vectorized over time), then a single
compiled RK4 sweep propagates all columns.  Accuracy against the
reference is pinned by the optimizer tests; at the default step count
the disagreement sits orders of magnitude below any search target.
"""

from __future__ import annotations

import math

import numpy as np

from .dynamics import BlockadeModel, IntegrationError, rotating_phase
from .gate import OPPOSITE_SWAP, STANDARD_SWAP, assemble_gate_matrix, fidelity, target_matrix
from .waveform import WaveformSet, fourier_eval

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(f):
            return f

        if args and callable(args[0]):
            return args[0]
        return wrap


_R2 = math.sqrt(2.0)

DEFAULT_SEARCH_STEPS = 1500


@njit(cache=True)
def _rk4_apply(Hs, y, h):
    """Propagate columns ``y`` through the sampled Hamiltonian stack.

    ``Hs`` holds 2n+1 Hamiltonians at the step endpoints and midpoints;
    classical RK4 reads the midpoint matrix for both interior stages.
    """
    n = (Hs.shape[0] - 1) // 2
    out = y.copy()
    for k in range(n):
        H1 = Hs[2 * k]
        H2 = Hs[2 * k + 1]
        H3 = Hs[2 * k + 2]
        k1 = -1j * (H1 @ out)
        k2 = -1j * (H2 @ (out + (0.5 * h) * k1))
        k3 = -1j * (H2 @ (out + (0.5 * h) * k2))
        k4 = -1j * (H3 @ (out + h * k3))
        out = out + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out


def hamiltonian_stacks(ws: WaveformSet, bm: BlockadeModel, n_steps: int):
    """Sample both channel Hamiltonians on a uniform grid.

    Returns ``(S, T, h)``: singlet and triplet stacks of shape
    ``(2 n_steps + 1, dim, dim)`` and the step size.  Entry layout matches
    ``h_singlet`` / ``h_triplet`` in :mod:`rydswap.dynamics` exactly.
    """
    nodes = np.linspace(0.0, ws.tau, 2 * n_steps + 1)
    m = nodes.size
    o0 = fourier_eval(ws.omega0, nodes)
    o1 = fourier_eval(ws.omega1, nodes)
    d0 = fourier_eval(ws.delta0, nodes)
    d1 = fourier_eval(ws.delta1, nodes)
    e = np.exp(1j * rotating_phase(ws, nodes))
    ec = np.conj(e)

    dim = 7 if bm.kind == "finite" else 5
    T = np.zeros((m, dim, dim), dtype=np.complex128)
    T[:, 0, 3] = _R2 * o0
    T[:, 1, 3] = o1 * e
    T[:, 1, 4] = o0 * ec
    T[:, 2, 4] = _R2 * o1
    T[:, 3, 3] = 2.0 * d0
    T[:, 4, 4] = 2.0 * d1
    if bm.kind == "finite":
        T[:, 3, 5] = _R2 * o0 * ec
        T[:, 4, 5] = _R2 * o1 * e
        T[:, 5, 5] = 2.0 * (d0 + d1)
        T[:, 5, 6] = 2.0 * bm.B
        T[:, 6, 6] = 2.0 * (d0 + d1 + bm.delta_q)
    lower = np.conj(np.swapaxes(T, 1, 2)).copy()
    idx = np.arange(dim)
    lower[:, idx, idx] = 0.0
    T = 0.5 * (T + lower)

    S = np.zeros((m, 3, 3), dtype=np.complex128)
    S[:, 0, 1] = 0.5 * o0
    S[:, 1, 0] = 0.5 * o0
    S[:, 0, 2] = 0.5 * o1
    S[:, 2, 0] = 0.5 * o1
    S[:, 1, 1] = d0
    S[:, 2, 2] = d1
    return S, T, ws.tau / n_steps


def channel_finals(ws: WaveformSet, bm: BlockadeModel, n_steps: int = DEFAULT_SEARCH_STEPS):
    """Final singlet amplitude and 3x3 computational triplet block.

    Raises :class:`IntegrationError` when the propagated amplitudes are
    not finite (the fixed stepper has no step-size failure mode, so this
    is the only way a pathological waveform shows up here).
    """
    S, T, h = hamiltonian_stacks(ws, bm, n_steps)
    if not (np.all(np.isfinite(S)) and np.all(np.isfinite(T))):
        raise IntegrationError("Hamiltonian samples are not finite", 0.0)
    dim = T.shape[1]
    y0t = np.zeros((dim, 3), dtype=np.complex128)
    y0t[0, 0] = y0t[1, 1] = y0t[2, 2] = 1.0
    y0s = np.zeros((3, 1), dtype=np.complex128)
    y0s[0, 0] = 1.0
    s_final = _rk4_apply(S, y0s, h)
    t_final = _rk4_apply(T, y0t, h)
    if not (np.all(np.isfinite(s_final)) and np.all(np.isfinite(t_final))):
        raise IntegrationError("propagated amplitudes are not finite", ws.tau)
    return complex(s_final[0, 0]), t_final[:3, :]


def fast_gate_error(
    ws: WaveformSet,
    bm: BlockadeModel,
    target="standard",
    n_steps: int = DEFAULT_SEARCH_STEPS,
) -> float:
    """Gate error on the fixed-step path; ``target`` as in ``evaluate_gate``."""
    s_amp, block = channel_finals(ws, bm, n_steps)
    U = assemble_gate_matrix(s_amp, block)
    if isinstance(target, str) and target == "auto":
        fid = max(fidelity(U, STANDARD_SWAP), fidelity(U, OPPOSITE_SWAP))
    else:
        G, _ = target_matrix(target)
        fid = fidelity(U, G)
    return 1.0 - fid
