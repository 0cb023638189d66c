"""Command-line front end: presets, simulation, fidelity, scans, searches.

Frequency-like inputs on the command line are plain MHz (blockade
strength, detuning offsets); the factor 2*pi is applied here, once, on
the way in.  Every file the commands produce either embeds a run
manifest (JSON outputs) or gets a ``<name>.manifest.json`` sidecar (CSV
outputs), so a result can always be traced to the exact invocation.

Exit codes: 0 on success, 2 for usage or input errors, 3 when the
numerics fail (integration errors).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from ._version import __version__
from .dynamics import (
    FULL_SYSTEM,
    SINGLET_SYSTEM,
    TRIPLET_SYSTEM,
    BlockadeModel,
    GaugeError,
    IntegrationError,
    IntegratorConfig,
    integrate,
)
from .gate import evaluate_gate
from .optimize import search, searchspec_from_dict, write_history_csv
from .presets import preset_entry, preset_ids, preset_lookup
from .scan import ScanAxis, ScanSpec, run_scan, write_scan_csv
from .waveform import WaveformError, waveform_from_dict, waveform_to_dict

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICS = 3

_TWO_PI = 2.0 * math.pi


class CLIError(Exception):
    """Input-level failure with the exit code it should map to."""

    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# Run manifests


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    config: dict
    input_hashes: dict
    version: str
    seed: int | None
    wall_time_s: float

    def to_dict(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "config": self.config,
            "input_hashes": self.input_hashes,
            "version": self.version,
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
        }


def _sha256_of(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _build_manifest(args, input_paths, seed=None) -> RunManifest:
    config = {}
    for key, val in vars(args).items():
        if key.startswith("_") or key == "func":
            continue
        config[key] = str(val) if isinstance(val, Path) else val
    return RunManifest(
        subcommand=args.subcommand,
        config=config,
        input_hashes={str(p): _sha256_of(p) for p in input_paths},
        version=__version__,
        seed=seed,
        wall_time_s=time.perf_counter() - args._start,
    )


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


# ---------------------------------------------------------------------------
# Shared argument plumbing


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _parse_blockade(text: str) -> BlockadeModel:
    """``ideal``, ``<B_MHz>``, or ``<B_MHz>,<delta_q_MHz>``."""
    if text == "ideal":
        return BlockadeModel.ideal()
    parts = text.split(",")
    if len(parts) > 2:
        raise CLIError(f"blockade spec {text!r} has too many fields")
    try:
        b = float(parts[0])
        dq = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError:
        raise CLIError(f"cannot parse blockade spec {text!r}") from None
    try:
        return BlockadeModel.finite(_TWO_PI * b, _TWO_PI * dq)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc


def _parse_range(text: str):
    """``lo:hi:points`` with lo < hi and integer points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise CLIError(f"range spec {text!r} is not lo:hi:points")
    try:
        return float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CLIError(f"cannot parse range spec {text!r}") from None


def _resolve_waveform(args):
    """Waveform plus context from --preset or --waveform.

    Returns ``(ws, blockade, source, input_paths)``; the blockade honors
    an explicit --blockade, falling back to the preset's own model or to
    ideal for file input.
    """
    inputs = []
    if args.preset is not None:
        try:
            ws, bm, _ = preset_lookup(args.preset)
        except KeyError as exc:
            raise CLIError(exc.args[0]) from exc
        source = args.preset
    else:
        d = _read_json(args.waveform)
        try:
            ws = waveform_from_dict(d)
        except (WaveformError, ValueError, KeyError, TypeError) as exc:
            raise CLIError(f"{args.waveform}: {exc}") from exc
        bm = BlockadeModel.ideal()
        source = str(args.waveform)
        inputs.append(args.waveform)
    if args.blockade is not None:
        bm = _parse_blockade(args.blockade)
    return ws, bm, source, inputs


def _integrator_config(args, **overrides) -> IntegratorConfig:
    try:
        return IntegratorConfig(rel_tol=args.tol_rel, abs_tol=args.tol_abs, **overrides)
    except ValueError as exc:
        raise CLIError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Subcommands


def cmd_presets(args) -> int:
    if args.action == "list":
        for pid in preset_ids():
            e = preset_entry(pid)
            bm = e.blockade
            desc = "ideal" if bm.kind == "ideal" else f"B=2pi*{bm.B / _TWO_PI:g}MHz"
            print(f"{pid:24s} {e.target:9s} {desc}")
        return EXIT_OK
    try:
        ws, _, _ = preset_lookup(args.preset_id)
    except KeyError as exc:
        raise CLIError(exc.args[0]) from exc
    payload = waveform_to_dict(ws)
    payload["preset"] = args.preset_id
    payload["manifest"] = _build_manifest(args, []).to_dict()
    out = args.out or Path(f"{args.preset_id}.json")
    _write_json(out, payload)
    print(out)
    return EXIT_OK


_COMPUTATIONAL = ("00", "01", "10", "11")


def cmd_simulate(args) -> int:
    ws, bm, _, inputs = _resolve_waveform(args)
    cfg = _integrator_config(args, n_samples=args.samples)

    if args.initial in _COMPUTATIONAL:
        system = FULL_SYSTEM
        dim = system.dim(bm)
        psi0 = np.zeros(dim, dtype=complex)
        psi0[_COMPUTATIONAL.index(args.initial)] = 1.0
    elif args.initial == "singlet":
        system = SINGLET_SYSTEM
        psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
    elif args.initial.startswith("triplet:"):
        system = TRIPLET_SYSTEM
        dim = system.dim(bm)
        try:
            k = int(args.initial.split(":", 1)[1])
        except ValueError:
            raise CLIError(f"bad initial state {args.initial!r}") from None
        if not 0 <= k < dim:
            raise CLIError(f"triplet index {k} out of range for a {dim}-level channel")
        psi0 = np.zeros(dim, dtype=complex)
        psi0[k] = 1.0
    else:
        raise CLIError(
            f"unknown initial state {args.initial!r} "
            "(use 00, 01, 10, 11, singlet, or triplet:<k>)"
        )

    traj = integrate(system, psi0, ws, bm, cfg)
    labels = traj.labels
    with open(args.out, "w") as fh:
        fh.write(
            ",".join(
                ["t_us"]
                + [f"pop_{lb}" for lb in labels]
                + [f"phase_{lb}" for lb in labels]
            )
            + "\n"
        )
        pops = np.abs(traj.states) ** 2
        phases = np.angle(traj.states)
        for i, t in enumerate(traj.times):
            row = [f"{t:.17g}"]
            row += [f"{p:.17g}" for p in pops[i]]
            row += [f"{p:.17g}" for p in phases[i]]
            fh.write(",".join(row) + "\n")
    manifest_path = Path(args.out).with_suffix(".manifest.json")
    _write_json(manifest_path, _build_manifest(args, inputs).to_dict())
    print(args.out)
    return EXIT_OK


def cmd_fidelity(args) -> int:
    ws, bm, _, inputs = _resolve_waveform(args)
    cfg = _integrator_config(args)
    outcome = evaluate_gate(ws, bm, target=args.target, cfg=cfg)
    payload = outcome.to_dict()
    print(json.dumps(payload, indent=2))
    if args.out is not None:
        payload["manifest"] = _build_manifest(args, inputs).to_dict()
        _write_json(args.out, payload)
    return EXIT_OK


_AXIS_ALIASES = {
    "rabi": "rabi_ratio",
    "rabi_ratio": "rabi_ratio",
    "detuning": "detuning_offset",
    "detuning_offset": "detuning_offset",
    "B": "blockade_B",
    "blockade_B": "blockade_B",
}


def cmd_scan(args) -> int:
    ws, bm, source, inputs = _resolve_waveform(args)
    cfg = _integrator_config(args)
    try:
        name = _AXIS_ALIASES[args.axis]
    except KeyError:
        raise CLIError(f"unknown axis {args.axis!r} (use rabi, detuning, or B)") from None
    lo, hi, points = _parse_range(args.range)
    if name != "rabi_ratio":  # frequency-like axes come in as MHz
        lo, hi = _TWO_PI * lo, _TWO_PI * hi
    try:
        axis = ScanAxis(name=name, lo=lo, hi=hi, points=points, apply_to=args.apply_to)
        spec = ScanSpec(
            ws=ws, blockade=bm, target=args.target, axes=(axis,), cfg=cfg, source=source
        )
    except ValueError as exc:
        raise CLIError(str(exc)) from exc
    result = run_scan(spec, threads=args.threads)
    csv_path, sidecar = write_scan_csv(result, args.out)
    manifest_path = Path(args.out).with_suffix(".manifest.json")
    _write_json(manifest_path, _build_manifest(args, inputs).to_dict())
    print(csv_path)
    print(sidecar)
    return EXIT_OK


def cmd_optimize(args) -> int:
    try:
        spec = searchspec_from_dict(_read_json(args.spec))
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, CLIError):
            raise
        raise CLIError(f"{args.spec}: {exc}") from exc
    if args.seed is not None:
        spec = replace(spec, rng_seed=args.seed)
    result = search(spec)
    manifest = _build_manifest(args, [args.spec], seed=spec.rng_seed).to_dict()
    payload = {
        "waveform": waveform_to_dict(result.best_waveform),
        "gate_error": result.best_error,
        "best_objective": result.best_objective,
        "resolved_target": result.resolved_target,
        "evaluations_used": result.evaluations_used,
        "budget_exhausted": result.budget_exhausted,
        "best_restart": result.best_restart,
        "restarts": [
            {
                "index": rec.index,
                "evaluations": rec.evaluations,
                "best_objective": rec.best_objective,
                "reached_target": rec.reached_target,
            }
            for rec in result.records
        ],
        "outcome": result.best_outcome.to_dict(),
        "manifest": manifest,
    }
    _write_json(args.out, payload)
    if args.log is not None:
        write_history_csv(result, args.log)
        _write_json(Path(args.log).with_suffix(".manifest.json"), manifest)
    print(
        f"best gate error {result.best_error:.3e} ({result.resolved_target}) "
        f"after {result.evaluations_used} evaluations -> {args.out}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser


def _add_waveform_source(p: argparse.ArgumentParser):
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--preset", help="built-in waveform id (see `presets list`)")
    group.add_argument("--waveform", type=Path, help="waveform JSON file (MHz coefficients)")
    p.add_argument(
        "--blockade",
        default=None,
        help="'ideal' or B_MHz[,delta_q_MHz]; default: the preset's model, or ideal for files",
    )


def _add_tolerances(p: argparse.ArgumentParser):
    p.add_argument("--tol-rel", type=float, default=1e-10, dest="tol_rel")
    p.add_argument("--tol-abs", type=float, default=1e-12, dest="tol_abs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rydswap",
        description="Two-qubit Rydberg SWAP gates from Fourier-modulated waveforms.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("presets", help="list built-in waveforms or dump one to JSON")
    psub = p.add_subparsers(dest="action", required=True)
    psub.add_parser("list", help="print the known preset ids")
    pd = psub.add_parser("dump", help="write a preset's waveform JSON")
    pd.add_argument("preset_id")
    pd.add_argument("--out", type=Path, default=None, help="default: <id>.json")
    p.set_defaults(func=cmd_presets)

    p = sub.add_parser("simulate", help="evolve one initial state, write a trajectory CSV")
    _add_waveform_source(p)
    p.add_argument(
        "--initial",
        required=True,
        help="00, 01, 10, 11 (product basis), singlet, or triplet:<k>",
    )
    p.add_argument("--samples", type=int, default=501)
    p.add_argument("--out", type=Path, required=True)
    _add_tolerances(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fidelity", help="score a waveform as a SWAP gate")
    _add_waveform_source(p)
    p.add_argument("--target", default="auto", choices=["standard", "opposite", "auto"])
    p.add_argument("--out", type=Path, default=None, help="also write the report as JSON")
    _add_tolerances(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("scan", help="map gate error against one imperfection axis")
    _add_waveform_source(p)
    p.add_argument("--axis", required=True, help="rabi, detuning, or B")
    p.add_argument(
        "--range",
        required=True,
        help="lo:hi:points; MHz for detuning and B, a plain ratio for rabi",
    )
    p.add_argument("--apply-to", default="both", dest="apply_to")
    p.add_argument("--target", default="auto")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)
    _add_tolerances(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="run a waveform search from a spec JSON")
    p.add_argument("--spec", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--log", type=Path, default=None, help="per-evaluation history CSV")
    p.add_argument(
        "--seed", type=int, default=None, help="override the spec's rng_seed (default: keep it)"
    )
    p.set_defaults(func=cmd_optimize)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code or 0)
    args._start = time.perf_counter()
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (IntegrationError, GaugeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICS
    except (WaveformError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
