"""Command-line front end: load a device config, run named experiments or
compilations, emit CSV/JSON artifacts with reproducibility sidecars and
optional SVG plots.

Exit codes: 0 success, 2 config error, 3 numerical failure, 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import qubit as qb
from .calibration import CalibratedPulse, CalibrationError, calibrate_pulse, pulse_drive
from .compiler import CompileError, Gate, Program, schedule, parallelism_stats
from .demux import Resonator, demux, matched_channel
from .experiments import ExperimentError, chevron, run_experiment
from .mixer import BitTimeline, MixerConfig, MixerError, baseband_output, output_spectrum
from .qubit import FitError, FitModel, QubitParams, StepSizeError, fit_curve
from .resources import ResourceError, resource_report
from .signals import CycleSpec, Envelope, MultiToneLo, SignalError, Tone, make_if_program
from .svgplot import PlotError, emit_plot

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_USAGE = 64


class ConfigError(ValueError):
    """Config file missing, unparsable, or inconsistent."""


@dataclass
class DeviceConfig:
    lo: MultiToneLo
    resonators: list[Resonator]
    mixers: list[MixerConfig]
    qubits: list[QubitParams]
    f_if_hz: float
    cycle_period_s: float
    raw: dict

    @property
    def n_qubits(self) -> int:
        return len(self.qubits)


DEFAULT_CONFIG = {
    "lo_tones": [{"freq_hz": 8.0e9, "amp_phi0": 0.5, "phase_rad": 0.0}],
    "resonators": [{"f_r_hz": 8.0e9, "q": 1.0e4}],
    "mixers": [
        {
            "gain_hz_per_unit": 4.0e7,
            "on_off_ratio_db": 28.5,
            "nonlinearity": "sine_saturating",
            "bpf_stopband_db": 60.0,
        }
    ],
    "qubits": [{"f_qubit_hz": 4.53202e9, "t1_s": 2.53e-5, "t2_s": 1.70e-5}],
    "if_defaults": {"f_if_hz": 3.46798e9, "cycle_period_s": 1.5e-8},
}


def _qubit_from_dict(d: dict) -> QubitParams:
    f = d["f_qubit_hz"]
    t1 = d.get("t1_s", math.inf)
    if "t2_s" in d:
        return QubitParams.from_t2(f, t1, d["t2_s"])
    return QubitParams(f, t1, d.get("tphi_s", math.inf))


def load_config(path: str | None) -> DeviceConfig:
    """Parse and cross-validate the device description."""
    if path is None:
        raw = DEFAULT_CONFIG
    else:
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = json.loads(p.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        lo = MultiToneLo(
            tuple(
                Tone(t["freq_hz"], t.get("amp_phi0", 0.5), t.get("phase_rad", 0.0))
                for t in raw["lo_tones"]
            )
        )
        resonators = [Resonator(r["f_r_hz"], r["q"]) for r in raw["resonators"]]
        qubits = [_qubit_from_dict(d) for d in raw["qubits"]]
        mixers = []
        for k, m in enumerate(raw["mixers"]):
            mixers.append(
                MixerConfig(
                    channel=matched_channel(resonators, lo, k),
                    gain_hz_per_unit=m["gain_hz_per_unit"],
                    on_off_ratio_db=m.get("on_off_ratio_db", 28.5),
                    nonlinearity=m.get("nonlinearity", "sine_saturating"),
                    bpf_stopband_db=m.get("bpf_stopband_db", 60.0),
                )
            )
        defaults = raw.get("if_defaults", {})
        cfg = DeviceConfig(
            lo=lo,
            resonators=resonators,
            mixers=mixers,
            qubits=qubits,
            f_if_hz=defaults.get("f_if_hz", 3.5e9),
            cycle_period_s=defaults.get("cycle_period_s", 1.5e-8),
            raw=raw,
        )
    except (KeyError, TypeError, SignalError, MixerError, qb.QubitError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    if not (len(cfg.resonators) == len(cfg.mixers) == len(cfg.qubits)):
        raise ConfigError(
            f"counts disagree: {len(cfg.resonators)} resonators, "
            f"{len(cfg.mixers)} mixers, {len(cfg.qubits)} qubits"
        )
    if cfg.f_if_hz <= 0 or cfg.cycle_period_s <= 0:
        raise ConfigError("IF defaults must be positive")
    return cfg


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(f"{v:.12g}" if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _write_sidecar(path: Path, command: str, args: argparse.Namespace, cfg: DeviceConfig) -> None:
    meta = {
        "command": command,
        "seed": getattr(args, "seed", 0),
        "args": {k: v for k, v in vars(args).items() if k != "func"},
        "config": cfg.raw,
    }
    Path(str(path) + ".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _outdir(args) -> Path:
    out = args.out or os.environ.get("QCVZ_OUT_DIR") or "."
    p = Path(out)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _get_pulses(
    cfg: DeviceConfig, k: int, tau_s: float | None, pulses_path: str | None
) -> tuple[CalibratedPulse, CalibratedPulse]:
    """Load persisted pulses or calibrate x90/x180 on the closed-system twin."""
    if pulses_path:
        d = json.loads(Path(pulses_path).read_text())
        return CalibratedPulse.from_dict(d["x90"]), CalibratedPulse.from_dict(d["x180"])
    tau = tau_s or cfg.cycle_period_s
    q = cfg.qubits[k].closed()
    f_lo = cfg.mixers[k].channel.freq_hz
    x90 = calibrate_pulse(q, cfg.mixers[k], 0.5 * math.pi, tau, f_lo)
    x180 = calibrate_pulse(q, cfg.mixers[k], math.pi, tau, f_lo)
    return x90, x180


def cmd_chevron(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    k = args.qubit
    q = cfg.qubits[k]
    f_lo = cfg.mixers[k].channel.freq_hz
    center = f_lo - q.f_qubit_hz
    f_grid = center + np.arange(-args.span_hz / 2, args.span_hz / 2 + args.step_hz / 2, args.step_hz)
    tau_grid = np.linspace(args.tau_max_s / args.tau_points, args.tau_max_s, args.tau_points)
    p1 = chevron(q, cfg.mixers[k], f_lo, f_grid, tau_grid, mixer_on=not args.off, a_if=args.a_if)
    path = out / "chevron.csv"
    rows = [
        (float(f), float(t), float(p1[i, j]))
        for i, f in enumerate(f_grid)
        for j, t in enumerate(tau_grid)
    ]
    _write_csv(path, ["f_if_hz", "tau_s", "p1"], rows)
    _write_sidecar(path, "chevron", args, cfg)
    if args.plot:
        emit_plot(path, "heatmap")


def cmd_rabi(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    k = args.qubit
    q = cfg.qubits[k]
    f_lo = cfg.mixers[k].channel.freq_hz
    f_if = f_lo - q.f_qubit_hz
    pulse = CalibratedPulse(f_lo, f_if, args.a_if, args.tau_max_s, math.pi)
    drive = pulse_drive(cfg.mixers[k], pulse, on=not args.off)
    dt = 1.0 / (100.0 * max(drive.peak_hz, 1.0 / args.tau_max_s))
    traj = qb.evolve(q, drive, qb.ground_state(), dt)
    path = out / "rabi.csv"
    _write_csv(path, ["t_s", "p1"], zip(traj.times_s.tolist(), traj.p1.tolist()))
    _write_sidecar(path, "rabi", args, cfg)
    if args.plot:
        emit_plot(path, "line")


def _coherence_cmd(kind: str, model: FitModel):
    def run(cfg: DeviceConfig, args) -> None:
        out = _outdir(args)
        k = args.qubit
        x90, x180 = _get_pulses(cfg, k, args.tau_s, args.pulses)
        delays = np.linspace(0.0, args.max_delay_s, args.points)
        traj = run_experiment(
            kind,
            cfg.qubits[k],
            cfg.mixers[k],
            x90,
            x180,
            delays_s=delays,
            detuning_hz=getattr(args, "detuning_hz", 0.0),
        )
        path = out / f"{kind}.csv"
        _write_csv(path, ["t_s", "p1"], zip(traj.times_s.tolist(), traj.p1.tolist()))
        _write_sidecar(path, kind, args, cfg)
        fit = fit_curve(model, traj.times_s, traj.p1)
        (out / f"{kind}_fit.json").write_text(
            json.dumps(
                {"model": fit.model.value, "params": fit.params, "sigma": fit.sigma,
                 "residual": fit.residual},
                indent=2,
                sort_keys=True,
            )
            + "\n"
        )
        if args.plot:
            emit_plot(path, "line")

    return run


def cmd_vz_ramsey(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    k = args.qubit
    x90, _ = _get_pulses(cfg, k, args.tau_s, args.pulses)
    thetas = np.arange(args.points) * (360.0 / args.points)
    _, p1 = run_experiment(
        "vz_ramsey", cfg.qubits[k], cfg.mixers[k], x90, dtheta_deg=thetas
    )
    path = out / "vz_ramsey.csv"
    _write_csv(path, ["theta_deg", "p1"], zip(thetas.tolist(), p1.tolist()))
    _write_sidecar(path, "vz-ramsey", args, cfg)
    if args.plot:
        emit_plot(path, "line")


def cmd_calibrate(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    x90, x180 = _get_pulses(cfg, args.qubit, args.tau_s, None)
    path = out / "pulses.json"
    path.write_text(
        json.dumps({"x90": x90.to_dict(), "x180": x180.to_dict()}, indent=2, sort_keys=True) + "\n"
    )
    _write_sidecar(path, "calibrate", args, cfg)


def cmd_spectrum(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    k = args.qubit
    mix = cfg.mixers[k]
    env = Envelope("flat", cfg.cycle_period_s, 1.0)
    prog = make_if_program(cfg.f_if_hz, cfg.cycle_period_s, [CycleSpec(0.0, env)])
    rate = 4.0 * (mix.channel.freq_hz + cfg.f_if_hz)
    tones = output_spectrum(mix, prog, BitTimeline((0 if args.off else 1,)), rate)
    path = out / "spectrum.csv"
    _write_csv(path, ["freq_hz", "power_db"], [(float(f), float(p)) for f, p in tones])
    _write_sidecar(path, "spectrum", args, cfg)
    _, xtalk = demux(cfg.resonators, cfg.lo)
    xpath = out / "crosstalk.csv"
    _write_csv(
        xpath,
        ["resonator"] + [f"tone{j}_db" for j in range(xtalk.shape[1])],
        [(i, *[float(v) for v in row]) for i, row in enumerate(xtalk)],
    )
    _write_sidecar(xpath, "spectrum", args, cfg)


def cmd_compile(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    try:
        prog_raw = json.loads(Path(args.program).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read program {args.program}: {exc}") from exc
    program = Program(
        tuple(tuple(Gate.parse(name) for name in gates) for gates in prog_raw["qubits"])
    )
    sched = schedule(program, args.mode)
    stats = parallelism_stats(sched)
    path = out / "schedule.json"
    path.write_text(json.dumps(sched.to_dict(), indent=2, sort_keys=True) + "\n")
    _write_sidecar(path, "compile", args, cfg)
    csv_path = out / "schedule.csv"
    _write_csv(
        csv_path,
        ["cycle", "slot", "theta_if_deg", "n_fired"],
        [(i, c.slot, float(c.theta_if_deg), len(c.fired)) for i, c in enumerate(sched.cycles)],
    )
    (out / "schedule_stats.json").write_text(
        json.dumps(
            {
                "cycles": stats.cycles,
                "mean_fired": stats.mean_fired,
                "max_fired": stats.max_fired,
                "min_nonzero_fired": stats.min_nonzero_fired,
            },
            indent=2,
            sort_keys=True,
        )
        + "\n"
    )


def cmd_resources(cfg: DeviceConfig, args) -> None:
    out = _outdir(args)
    rep = resource_report(
        args.n, q=args.q_factor, bandwidth_hz=args.bandwidth_hz, ref_freq_hz=args.ref_freq_hz
    )
    path = out / "resources.json"
    path.write_text(json.dumps(rep.to_dict(), indent=2, sort_keys=True) + "\n")
    _write_sidecar(path, "resources", args, cfg)
    (out / "resources.txt").write_text(rep.table() + "\n")


def cmd_plot(cfg: DeviceConfig, args) -> None:
    emit_plot(args.csv, args.kind, args.svg)


COMMANDS = {
    "chevron": cmd_chevron,
    "rabi": cmd_rabi,
    "t1": _coherence_cmd("t1", FitModel.EXP_DECAY),
    "ramsey": _coherence_cmd("ramsey", FitModel.DAMPED_COSINE),
    "echo": _coherence_cmd("echo", FitModel.EXP_DECAY),
    "vz-ramsey": cmd_vz_ramsey,
    "calibrate": cmd_calibrate,
    "spectrum": cmd_spectrum,
    "compile": cmd_compile,
    "resources": cmd_resources,
    "plot": cmd_plot,
}


def _build_parser(cmd: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=f"qcvz {cmd}")
    p.add_argument("--config", default=None, help="device config JSON")
    p.add_argument("--out", default=None, help="output directory (or QCVZ_OUT_DIR)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plot", action="store_true", help="also emit SVG plots")
    if cmd in ("chevron", "rabi", "t1", "ramsey", "echo", "vz-ramsey", "calibrate", "spectrum"):
        p.add_argument("--qubit", type=int, default=0)
    if cmd == "chevron":
        p.add_argument("--span-hz", type=float, default=8.0e6)
        p.add_argument("--step-hz", type=float, default=2.0e5)
        p.add_argument("--tau-max-s", type=float, default=2.5e-6)
        p.add_argument("--tau-points", type=int, default=26)
        p.add_argument("--a-if", type=float, default=0.05)
        p.add_argument("--off", action="store_true")
    if cmd == "rabi":
        p.add_argument("--a-if", type=float, default=1.0)
        p.add_argument("--tau-max-s", type=float, default=5.0e-7)
        p.add_argument("--off", action="store_true")
    if cmd in ("t1", "ramsey", "echo"):
        p.add_argument("--max-delay-s", type=float, default=8.0e-5)
        p.add_argument("--points", type=int, default=41)
        p.add_argument("--tau-s", type=float, default=None, help="pulse duration for calibration")
        p.add_argument("--pulses", default=None, help="persisted pulses.json")
    if cmd == "ramsey":
        p.add_argument("--detuning-hz", type=float, default=3.4e5)
    if cmd == "vz-ramsey":
        p.add_argument("--points", type=int, default=36)
        p.add_argument("--tau-s", type=float, default=None)
        p.add_argument("--pulses", default=None)
    if cmd == "calibrate":
        p.add_argument("--tau-s", type=float, default=None)
    if cmd == "spectrum":
        p.add_argument("--off", action="store_true")
    if cmd == "compile":
        p.add_argument("--program", required=True)
        p.add_argument("--mode", choices=["quantized45", "free"], default="quantized45")
    if cmd == "resources":
        p.add_argument("-n", type=int, required=True)
        p.add_argument("--q-factor", type=float, default=1.0e4)
        p.add_argument("--bandwidth-hz", type=float, default=2.0e9)
        p.add_argument("--ref-freq-hz", type=float, default=5.0e9)
    if cmd == "plot":
        p.add_argument("--csv", required=True)
        p.add_argument("--kind", choices=["line", "heatmap"], required=True)
        p.add_argument("--svg", default=None)
    return p


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print("usage: qcvz <command> [options]\ncommands: " + ", ".join(sorted(COMMANDS)))
        return EXIT_OK
    cmd = argv[0]
    if cmd not in COMMANDS:
        print(f"qcvz: unknown command {cmd!r}", file=sys.stderr)
        return EXIT_USAGE
    parser = _build_parser(cmd)
    try:
        args = parser.parse_args(argv[1:])
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"qcvz: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        COMMANDS[cmd](cfg, args)
    except ConfigError as exc:
        print(f"qcvz: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FitError, CalibrationError, ExperimentError, StepSizeError, PlotError,
            CompileError, MixerError, SignalError, ResourceError, qb.QubitError) as exc:
        print(f"qcvz: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
