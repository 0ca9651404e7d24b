"""Command-line front end.

    pathspin pan-home --gamma 0 --gamma 0.5 --theta 0.3927
    pathspin compare --vartheta 0.7854 --theta 0 --theta 0.3927 --format markdown
    pathspin feasibility --gamma 1 --gamma 0.70710678118654757 --theta 1.1781 --theta 0.3927
    pathspin chsh --grid-density 64
    pathspin hv-check --vartheta 0.7854 --theta 0.3927 --samples 1000000 --seed 7

A ``--config`` JSON file holds a flat object keyed by flag names (``"gamma": [0.6]``,
``"grid-density": 64``); flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import experiments, noncontextual
from .elements import BeamSplitterParams, SpinSetting
from .errors import InvariantViolation, SolverStall
from .experiments import SweepGrid
from .qcore import TOL, PathSpinState, SpinState

COMMANDS = ("pan-home", "de-zela", "compare", "chsh", "hv-check", "feasibility")
FORMATS = ("csv", "json", "markdown")
STATES = ("pan-home", "product")

SQRT_HALF = 1 / math.sqrt(2)
COMMON_DEFAULTS: dict[str, Any] = {
    "gamma": [0.0, 0.5, SQRT_HALF, 1.0],
    "theta": [math.pi / 8],
    "vartheta": [math.pi / 4],
    "samples": 100_000,
    "seed": 0,
    "format": "csv",
    "out": None,
    "degrees": False,
    "grid-density": 32,
    "state": "pan-home",
}
COMMAND_DEFAULTS: dict[str, dict[str, Any]] = {
    "feasibility": {"gamma": [1.0, SQRT_HALF], "theta": [3 * math.pi / 8, math.pi / 8]},
}

COLUMNS = {
    "pan-home": ["gamma", "delta", "theta", "p3", "p4", "cond_mean_sg1", "cond_mean_sg2",
                 "weighted_mean_sg1", "weighted_mean_sg2", "total_expectation", "correlator"],
    "compare": ["vartheta", "theta", "dz_ch1", "dz_ch2", "ph_sg1_mapped", "ph_sg2_mapped",
                "residual_ch1", "residual_ch2"],
    "chsh": ["state", "gamma1", "delta1", "gamma2", "delta2", "theta1", "theta2", "chsh_value",
             "tsirelson_gap"],
    "hv-check": ["vartheta", "theta", "channel", "bloch_x", "bloch_y", "bloch_z", "quantum_mean",
                 "mc_mean", "abs_error", "tolerance", "pass"],
    "feasibility": ["state", "verdict", "n_path", "n_spin", "max_residual", "witness_value",
                    "witness_path_indices", "witness_spin_indices", "iterations"],
}
COLUMNS["de-zela"] = COLUMNS["pan-home"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    grid: SweepGrid
    samples: int = 100_000
    seed: int = 0
    output_format: str = "csv"
    output_path: Path | None = None
    grid_density: int = 32
    state: str = "pan-home"
    path_gammas: list[float] = field(default_factory=list)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--gamma", type=float, action="append",
                        help="BS2 amplitude in [0, 1], repeatable (default 0, 0.5, 1/sqrt2, 1; "
                             "feasibility: 1, 1/sqrt2)")
    common.add_argument("--theta", type=float, action="append",
                        help="analyzer angle, repeatable (default pi/8; feasibility: 3pi/8, pi/8)")
    common.add_argument("--vartheta", type=float, action="append",
                        help="De Zela input polarization angle, repeatable (default pi/4)")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per channel (default 100000)")
    common.add_argument("--seed", type=int, help="root seed (default 0)")
    common.add_argument("--format", choices=FORMATS, help="report format (default csv)")
    common.add_argument("--out", type=Path, help="write report here instead of stdout")
    common.add_argument("--config", type=Path, help="flat JSON object keyed by flag names")
    common.add_argument("--degrees", action="store_true", default=None,
                        help="read --theta/--vartheta in degrees")
    common.add_argument("--grid-density", type=int, help="chsh coarse grid points per axis (default 32)")
    common.add_argument("--state", choices=STATES,
                        help="state for chsh/feasibility: the prepared entangled state or |psi1>|up> "
                             "(default pan-home)")

    parser = _Parser(prog="pathspin", description="Path-spin interferometer simulator")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _load_config(path: Path) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("--config: expected a flat JSON object")
    unknown = set(data) - set(COMMON_DEFAULTS)
    if unknown:
        raise UsageError(f"--config: unknown key(s) {', '.join(sorted(unknown))}")
    for key in ("gamma", "theta", "vartheta"):
        if key in data and not isinstance(data[key], list):
            data[key] = [data[key]]
    return data


def parse_config(argv: list[str], config_file: Path | None = None) -> RunConfig:
    ns = vars(build_parser().parse_args(argv))
    command = ns.pop("command")
    config_path = ns.pop("config") or config_file
    values = dict(COMMON_DEFAULTS)
    values.update(COMMAND_DEFAULTS.get(command, {}))
    if config_path is not None:
        values.update(_load_config(config_path))
    values.update({k.replace("_", "-"): v for k, v in ns.items() if v is not None})

    try:
        gammas = [float(g) for g in values["gamma"]]
        thetas = [float(t) for t in values["theta"]]
        varthetas = [float(v) for v in values["vartheta"]]
        samples, seed, density = int(values["samples"]), int(values["seed"]), int(values["grid-density"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"malformed value: {exc}") from exc
    if bool(values["degrees"]):
        thetas = [math.radians(t) for t in thetas]
        varthetas = [math.radians(v) for v in varthetas]

    for g in gammas:
        if not 0.0 <= g <= 1.0:
            raise UsageError(f"--gamma {g!r} outside [0, 1]")
    for flag, vals in (("--theta", thetas), ("--vartheta", varthetas)):
        if not vals or not all(math.isfinite(v) for v in vals):
            raise UsageError(f"{flag} needs finite values")
    if samples < 1:
        raise UsageError("--samples must be >= 1")
    if command == "hv-check" and samples < noncontextual.MIN_CHANNEL_SAMPLES:
        raise UsageError(f"--samples must be >= {noncontextual.MIN_CHANNEL_SAMPLES} for hv-check")
    if density < 8:
        raise UsageError("--grid-density must be >= 8")
    if values["format"] not in FORMATS:
        raise UsageError(f"--format must be one of {', '.join(FORMATS)}")
    if values["state"] not in STATES:
        raise UsageError(f"--state must be one of {', '.join(STATES)}")
    if command == "feasibility" and len(gammas) + len(thetas) > noncontextual.MAX_SETTINGS:
        raise UsageError(f"--gamma/--theta: more than {noncontextual.MAX_SETTINGS} settings")

    return RunConfig(
        command=command,
        grid=SweepGrid(gammas, thetas, varthetas),
        samples=samples,
        seed=seed,
        output_format=values["format"],
        output_path=Path(values["out"]) if values["out"] else None,
        grid_density=density,
        state=values["state"],
        path_gammas=gammas,
    )


# --- rows -------------------------------------------------------------------------------

def _state(name: str) -> PathSpinState:
    if name == "product":
        return PathSpinState.product([1, 0], SpinState.up())
    return experiments.prepare_pan_home()


def _report_row(r: experiments.SubensembleReport) -> dict[str, Any]:
    r.validate()
    return {
        "gamma": r.gamma, "delta": r.delta, "theta": r.theta, "p3": r.p3, "p4": r.p4,
        "cond_mean_sg1": r.cond_mean3, "cond_mean_sg2": r.cond_mean4,
        "weighted_mean_sg1": r.weighted_mean3, "weighted_mean_sg2": r.weighted_mean4,
        "total_expectation": r.total_expectation, "correlator": r.correlator,
    }


def _compare_rows(cfg: RunConfig):
    for v in cfg.grid.vartheta_values:
        for t in cfg.grid.theta_values:
            c = experiments.compare_de_zela(v, t)
            if max(c.residual_ch1, c.residual_ch2) >= TOL:
                raise InvariantViolation(
                    f"de-zela/pan-home equivalence residual {max(c.residual_ch1, c.residual_ch2)!r} "
                    f"at vartheta={v!r}, theta={t!r}")
            yield {
                "vartheta": c.vartheta, "theta": c.theta, "dz_ch1": c.dz_ch1, "dz_ch2": c.dz_ch2,
                "ph_sg1_mapped": c.ph_sg1_mapped, "ph_sg2_mapped": c.ph_sg2_mapped,
                "residual_ch1": c.residual_ch1, "residual_ch2": c.residual_ch2,
            }


def _chsh_rows(cfg: RunConfig):
    res = noncontextual.chsh_search(_state(cfg.state), cfg.grid_density)
    if res.value > 2 * math.sqrt(2) + 1e-9:
        raise InvariantViolation(f"CHSH value {res.value!r} exceeds the Tsirelson bound")
    (p1, p2), (s1, s2) = res.path_settings, res.spin_settings
    yield {
        "state": cfg.state, "gamma1": p1.gamma, "delta1": p1.delta, "gamma2": p2.gamma,
        "delta2": p2.delta, "theta1": s1.theta, "theta2": s2.theta, "chsh_value": res.value,
        "tsirelson_gap": 2 * math.sqrt(2) - res.value,
    }


def _hv_rows(cfg: RunConfig):
    for i, v in enumerate(cfg.grid.vartheta_values):
        for j, t in enumerate(cfg.grid.theta_values):
            for chk in noncontextual.reproduce_de_zela_channels(v, t, cfg.samples, cfg.seed, stream=(i, j)):
                yield {
                    "vartheta": v, "theta": SpinSetting(t).theta, "channel": chk.channel,
                    "bloch_x": chk.bloch[0], "bloch_y": chk.bloch[1], "bloch_z": chk.bloch[2],
                    "quantum_mean": chk.quantum_mean, "mc_mean": chk.mc_mean,
                    "abs_error": chk.abs_error, "tolerance": chk.tolerance, "pass": chk.passed,
                }


def _feasibility_rows(cfg: RunConfig):
    state = _state(cfg.state)
    paths = [BeamSplitterParams.from_gamma(g) for g in cfg.path_gammas]
    spins = [SpinSetting(t) for t in cfg.grid.theta_values]
    row = {"state": cfg.state, "n_path": len(paths), "n_spin": len(spins), "witness_value": None,
           "witness_path_indices": None, "witness_spin_indices": None}
    try:
        res = noncontextual.feasibility_lp(paths, spins, state)
    except SolverStall:
        row.update(verdict="INDETERMINATE", max_residual=None, iterations=None)
        yield row
        return
    if res.feasible:
        moments = noncontextual.quantum_moments(state, paths, spins)
        check = np.max(np.abs(noncontextual.vertex_matrix(len(paths), len(spins)) @ res.weights - moments))
        if check >= noncontextual.MOMENT_TOL or np.any(res.weights < 0):
            raise InvariantViolation(f"feasible weights miss the moments by {check!r}")
    elif res.witness is not None:
        if res.witness.value <= 2 + noncontextual.WITNESS_MARGIN:
            raise InvariantViolation("infeasibility witness does not exceed 2")
        row.update(witness_value=res.witness.value,
                   witness_path_indices=" ".join(map(str, res.witness.path_indices)),
                   witness_spin_indices=" ".join(map(str, res.witness.spin_indices)))
    row.update(verdict=res.verdict, max_residual=res.max_residual, iterations=res.iterations)
    yield row


def build_rows(cfg: RunConfig) -> list[dict[str, Any]]:
    if cfg.command == "pan-home":
        return [_report_row(r) for r in experiments.sweep(cfg.grid, "pan-home")]
    if cfg.command == "de-zela":
        return [_report_row(r) for r in experiments.sweep(cfg.grid, "de-zela")]
    producers = {"compare": _compare_rows, "chsh": _chsh_rows, "hv-check": _hv_rows,
                 "feasibility": _feasibility_rows}
    return list(producers[cfg.command](cfg))


# --- serialization ----------------------------------------------------------------------

def format_value(value: Any) -> str:
    """Shortest round-trip text; floats never exceed 17 significant digits."""
    if value is None:
        return "undefined"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value) + 0.0)
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return float(value) + 0.0
    if isinstance(value, np.integer):
        return int(value)
    return value


def render(command: str, rows: list[dict[str, Any]], fmt: str) -> str:
    columns = COLUMNS[command]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(row[c]) for c in columns])
        return buf.getvalue()
    if fmt == "json":
        payload = {"command": command, "columns": columns,
                   "rows": [{c: _json_value(row[c]) for c in columns} for row in rows]}
        return json.dumps(payload, indent=2) + "\n"
    lines = ["| " + " | ".join(columns) + " |", "|" + "---|" * len(columns)]
    for row in rows:
        lines.append("| " + " | ".join(format_value(row[c]) for c in columns) + " |")
    return "\n".join(lines) + "\n"


def execute(cfg: RunConfig) -> tuple[int, str]:
    try:
        text = render(cfg.command, build_rows(cfg), cfg.output_format)
    except InvariantViolation as exc:
        print(f"pathspin: invariant violated: {exc}", file=sys.stderr)
        return 1, ""
    if cfg.output_path is not None:
        cfg.output_path.write_bytes(text.encode("utf-8"))
    else:
        sys.stdout.write(text)
    return 0, text


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"pathspin: usage error: {exc}", file=sys.stderr)
        return 2
    code, _ = execute(cfg)
    return code


if __name__ == "__main__":
    sys.exit(main())
