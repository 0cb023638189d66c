"""End-to-end acceptance checks, one test per shipping criterion.

Each test prints a single PASS/FAIL line with the measured numbers
(bypassing capture so the line is visible in a normal ``pytest -v`` run)
and then asserts.  These are deliberately coarse-grained: they exercise
the package the way a user would, presets in, numbers out.
"""

import math
import time
from dataclasses import replace

import numpy as np

from rydswap.dynamics import (
    FULL_SYSTEM,
    SINGLET_SYSTEM,
    BlockadeModel,
    GaugeError,
    IntegratorConfig,
    gauge_transform_check,
    integrate,
)
from rydswap.gate import decay_estimate, evaluate_gate, fidelity, target_matrix
from rydswap.optimize import CoefficientSlot, SearchSpec, encode, refit_for_blockade, search
from rydswap.presets import PRESET_IDS, preset_lookup
from rydswap.scan import ScanAxis, ScanSpec, run_scan
from rydswap.waveform import FourierSeries, WaveformSet, boundary_check

TAU = 0.25
TWO_PI = 2.0 * math.pi


def report(capsys, num, ok, detail):
    with capsys.disabled():
        print(f"\n[criterion {num:2d}] {'PASS' if ok else 'FAIL'} {detail}")


def const_series(value_rad_us):
    # single-term series: evaluates to 2*pi*a0, so divide the 2*pi back out
    return FourierSeries(np.array([value_rad_us / TWO_PI], dtype=complex), TAU)


def random_waveform_set(rng):
    def tone(scale, cplx):
        c = rng.normal(scale=scale, size=4).astype(complex)
        if cplx:
            c[1:] += 1j * rng.normal(scale=scale, size=3)
        return FourierSeries(c, TAU)

    return WaveformSet(
        omega0=tone(12.0, False),
        omega1=tone(12.0, False),
        delta0=tone(6.0, True),
        delta1=tone(6.0, True),
    )


def coefficient_displacement_mhz(a: WaveformSet, b: WaveformSet) -> float:
    worst = 0.0
    for tone in ("omega0", "omega1", "delta0", "delta1"):
        ca = np.asarray(getattr(a, tone).coeffs)
        cb = np.asarray(getattr(b, tone).coeffs)
        worst = max(worst, float(np.max(np.abs(ca - cb))))
    return worst


def test_criterion_01_preset_reproduction(capsys):
    errors, walls = {}, {}
    for pid in PRESET_IDS:
        ws, bm, target = preset_lookup(pid)
        t0 = time.perf_counter()
        out = evaluate_gate(ws, bm, target=target)
        walls[pid] = time.perf_counter() - t0
        errors[pid] = out.gate_error
    ok = all(e < 5e-4 for e in errors.values()) and all(w < 5.0 for w in walls.values())
    report(
        capsys,
        1,
        ok,
        f"preset gate errors max {max(errors.values()):.2e} < 5e-4, "
        f"slowest evaluation {max(walls.values()):.2f} s < 5 s",
    )
    for pid in PRESET_IDS:
        assert errors[pid] < 5e-4, f"{pid}: gate error {errors[pid]:.3e}"
        assert walls[pid] < 5.0, f"{pid}: evaluation took {walls[pid]:.2f} s"


def test_criterion_02_decomposition_oracle(capsys):
    cases = []
    for pid in PRESET_IDS:
        ws, bm, _ = preset_lookup(pid)
        cases.append((pid, ws, bm))
    rng = np.random.default_rng(20250816)
    models = (
        BlockadeModel.ideal(),
        BlockadeModel.finite(TWO_PI * 80.0),
        BlockadeModel.finite(TWO_PI * 150.0, TWO_PI * 5.0),
        BlockadeModel.finite(TWO_PI * 300.0),
    )
    for k in range(20):
        cases.append((f"random{k}", random_waveform_set(rng), models[k % 4]))

    worst = 0.0
    for name, ws, bm in cases:
        assembled = np.asarray(evaluate_gate(ws, bm, target="standard").actual_map)
        dim = FULL_SYSTEM.dim(bm)
        cols = np.zeros((dim, 4), dtype=complex)
        for i in range(4):
            cols[i, i] = 1.0
        brute = integrate(FULL_SYSTEM, cols, ws, bm).states[-1][:4, :]
        diff = float(np.max(np.abs(assembled - brute)))
        worst = max(worst, diff)
        assert diff <= 1e-8, f"{name}: assembled map off by {diff:.2e}"
    report(
        capsys,
        2,
        worst <= 1e-8,
        f"channel-assembled map vs full product-basis evolution: "
        f"worst entry mismatch {worst:.2e} <= 1e-8 over {len(cases)} waveform sets",
    )


def test_criterion_03_gauge_equivalence(capsys):
    worst, failures = 0.0, []
    for pid in PRESET_IDS:
        ws, bm, _ = preset_lookup(pid)
        try:
            rep = gauge_transform_check(ws, bm, tol=1e-8)
            worst = max(worst, rep.max_mismatch_computational)
        except GaugeError as exc:
            failures.append(f"{pid}: {exc}")
    report(
        capsys,
        3,
        not failures and worst <= 1e-8,
        "explicit-phase vs diagonal-detuning gauges: "
        + (
            f"worst computational mismatch {worst:.2e} <= 1e-8"
            if not failures
            else "; ".join(failures)
        ),
    )
    assert not failures
    assert worst <= 1e-8


def test_criterion_04_numerical_hygiene(capsys):
    halved = IntegratorConfig(rel_tol=5e-11, abs_tol=5e-13)
    max_drift, max_shift = 0.0, 0.0
    for pid in PRESET_IDS:
        ws, bm, target = preset_lookup(pid)
        out = evaluate_gate(ws, bm, target=target)
        out2 = evaluate_gate(ws, bm, target=target, cfg=halved)
        max_drift = max(max_drift, out.norm_drift)
        max_shift = max(max_shift, abs(out.gate_error - out2.gate_error))

    om = TWO_PI * 8.0
    ws = WaveformSet(
        omega0=const_series(om),
        omega1=const_series(0.0),
        delta0=const_series(0.0),
        delta1=const_series(0.0),
    )
    traj = integrate(SINGLET_SYSTEM, np.array([1, 0, 0], dtype=complex), ws, BlockadeModel.ideal())
    rabi_dev = max(
        float(np.max(np.abs(traj.states[:, 0].real - np.cos(om * traj.times / 2)))),
        float(np.max(np.abs(traj.states[:, 0].imag))),
    )

    ok = max_drift < 1e-9 and max_shift < 1e-7 and rabi_dev <= 1e-9
    report(
        capsys,
        4,
        ok,
        f"norm drift {max_drift:.1e} < 1e-9, tolerance-halving shift {max_shift:.1e} < 1e-7, "
        f"analytic Rabi deviation {rabi_dev:.1e} <= 1e-9",
    )
    assert max_drift < 1e-9
    assert max_shift < 1e-7
    assert rabi_dev <= 1e-9


def test_criterion_05_boundary_conditions(capsys):
    worst = 0.0
    for pid in PRESET_IDS:
        ws, _, _ = preset_lookup(pid)
        rep = boundary_check(ws, tol_frac=1e-3)
        for tone in ("omega0", "omega1"):
            worst = max(worst, max(rep.ratios[tone].values()))
    report(
        capsys,
        5,
        worst <= 1e-3,
        f"drive value/slope at the window edges: worst ratio {worst:.1e} <= 1e-3 of peak",
    )
    assert worst <= 1e-3


def test_criterion_06_robustness_shape(capsys):
    cfg = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)
    fig2, bm2, t2 = preset_lookup("fig2_hybrid")

    def scan_err(ws, bm, target, axis):
        spec = ScanSpec(ws=ws, blockade=bm, target=target, axes=(axis,), cfg=cfg)
        return run_scan(spec).gate_error

    notes, ok = [], True
    for axis, nominal_idx in (
        (ScanAxis("rabi_ratio", 0.99, 1.01, 21, apply_to="both"), 10),
        (ScanAxis("detuning_offset", -TWO_PI, TWO_PI, 21, apply_to="both"), 10),
    ):
        err = scan_err(fig2, bm2, t2, axis)
        k = int(np.argmin(err))
        part = (
            abs(k - nominal_idx) <= 1 and err[0] > err[k] and err[-1] > err[k]
        )
        ok = ok and part
        notes.append(f"{axis.name} min@{k} (nominal {nominal_idx}), edges rise: {part}")
        assert abs(k - nominal_idx) <= 1, f"{axis.name}: minimum at index {k}"
        assert err[0] > err[k] and err[-1] > err[k], f"{axis.name}: error flat at endpoints"

    var, bmv, tv = preset_lookup("fig3_variant_B125")
    err = scan_err(var, bmv, tv, ScanAxis("blockade_B", TWO_PI * 75, TWO_PI * 175, 41))
    k = int(np.argmin(err))
    part = abs(k - 20) <= 1
    ok = ok and part
    notes.append(f"blockade_B min@{k} (nominal 20)")
    assert part, f"blockade_B: minimum at index {k}, expected within 1 of 20"

    fig3, _, t3 = preset_lookup("fig3_amplitude_offres")
    b125 = BlockadeModel.finite(TWO_PI * 125.0)
    e_plain = evaluate_gate(fig3, b125, target=t3).gate_error
    e_tailored = evaluate_gate(var, b125, target=tv).gate_error
    part = e_plain > e_tailored
    ok = ok and part
    notes.append(f"ideal-B design {e_plain:.1e} > tailored {e_tailored:.1e} at that coupling")
    report(capsys, 6, ok, "; ".join(notes))
    assert e_plain > e_tailored


def test_criterion_07_ideal_limit_consistency(capsys):
    big = BlockadeModel.finite(TWO_PI * 1e4)
    worst = 0.0
    for pid in PRESET_IDS:
        ws, _, target = preset_lookup(pid)
        e_ideal = evaluate_gate(ws, BlockadeModel.ideal(), target=target).gate_error
        e_big = evaluate_gate(ws, big, target=target).gate_error
        worst = max(worst, abs(e_ideal - e_big))
        assert abs(e_ideal - e_big) < 1e-4, f"{pid}: ideal vs B=2pi*1e4 differ by {worst:.2e}"
    report(
        capsys,
        7,
        worst < 1e-4,
        f"finite B = 2pi*1e4 MHz vs ideal blockade: worst gate-error gap {worst:.1e} < 1e-4",
    )


def test_criterion_08_optimizer_rederivation(capsys):
    spec = SearchSpec(
        omega0=CoefficientSlot(9, bound=260.0),
        delta0=CoefficientSlot(1, bound=25.0),
        constant_deltas=True,
        budget=200_000,
        restarts=8,
        target="standard",
        target_error=1e-3,
        rng_seed=0,
        n_search_steps=1500,
    )
    t0 = time.perf_counter()
    res = search(spec)
    wall = time.perf_counter() - t0

    # independent single-restart run; together with the main winner this
    # shows the solution set is not unique
    res2 = search(replace(spec, budget=25_000, restarts=1, rng_seed=2))
    gap = float(
        np.max(np.abs(encode(spec, res.best_waveform) - encode(spec, res2.best_waveform)))
    )

    fig3, _, _ = preset_lookup("fig3_amplitude_offres")
    b125 = BlockadeModel.finite(TWO_PI * 125.0)
    refit = refit_for_blockade(
        fig3,
        b125,
        margin_mhz=4.0,
        budget=20_000,
        restarts=2,
        rng_seed=0,
        target="standard",
        target_error=1e-3,
    )
    disp = coefficient_displacement_mhz(fig3, refit.best_waveform)

    ok = (
        res.best_error < 1e-3
        and wall < 1800.0
        and res.evaluations_used <= 200_000
        and res2.best_error < 1e-3
        and gap > 1.0
        and refit.best_error < 1e-3
        and disp < 5.0
    )
    report(
        capsys,
        8,
        ok,
        f"cold search {res.best_error:.2e} < 1e-3 in {res.evaluations_used} evals / "
        f"{wall:.0f} s; independent run {res2.best_error:.2e}, coefficient gap "
        f"{gap:.1f} MHz > 1; warm refit {refit.best_error:.2e} < 1e-3 with "
        f"displacement {disp:.2f} MHz < 5",
    )
    assert res.best_error < 1e-3
    assert wall < 1800.0
    assert res.evaluations_used <= 200_000
    assert res2.best_error < 1e-3
    assert gap > 1.0
    assert refit.best_error < 1e-3
    assert disp < 5.0


def test_criterion_09_fidelity_unit_contract(capsys):
    swap, _ = target_matrix("standard")
    exact_one = fidelity(swap, swap)
    exact_zero = fidelity(np.zeros((4, 4)), swap)
    fifth = fidelity(np.diag([1.0, 1.0, 1.0, -1.0]), swap)

    rng = np.random.default_rng(99)
    worst_phase = 0.0
    for _ in range(20):
        m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        phase = np.exp(1j * rng.uniform(0, TWO_PI))
        for tgt in (swap, target_matrix("opposite")[0]):
            worst_phase = max(worst_phase, abs(fidelity(phase * m, tgt) - fidelity(m, tgt)))

    ok = (
        exact_one == 1.0
        and exact_zero == 0.0
        and abs(fifth - 0.2) <= 1e-15
        and worst_phase <= 1e-12
    )
    report(
        capsys,
        9,
        ok,
        f"F(target,target)={exact_one}, F(0,target)={exact_zero}, "
        f"F(diag(1,1,1,-1),swap)={fifth}, global-phase wobble {worst_phase:.1e} <= 1e-12",
    )
    assert exact_one == 1.0
    assert exact_zero == 0.0
    assert abs(fifth - 0.2) <= 1e-15
    assert worst_phase <= 1e-12


def test_criterion_10_decay_estimates(capsys):
    gamma = 1.0 / 540.0  # a typical Rydberg lifetime of ~540 us
    ok = True
    coarse = gamma * TAU / 2.0
    for pid in PRESET_IDS:
        ws, bm, target = preset_lookup(pid)
        est = decay_estimate(evaluate_gate(ws, bm, target=target), gamma)
        ok = ok and est.coarse == 0.5 * gamma * TAU and 0.0 <= est.integrated <= gamma * TAU
        assert est.coarse == 0.5 * gamma * TAU
        assert 0.0 <= est.integrated <= gamma * TAU
    report(
        capsys,
        10,
        ok,
        f"coarse decay loss = 0.5*gamma*tau = {coarse:.2e} exactly; "
        f"integrated estimate within [0, gamma*tau] for all presets",
    )
