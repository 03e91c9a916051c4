"""Single-qubit gate programs lowered to pi/2 pulses with virtual-Z frames,
plus the TDM scheduler that packs pulses into shared-phase control cycles.

Sign convention (asserted by tests, not assumed): a frame F accumulates Z
angles; an X90 emitted at frame F is driven at theta_if = F, i.e. with
physical pulse phase -F, so the realized rotation axis in the equatorial
plane is phi = -F. Under this choice [X90, Z(pi/4), X90] lowers to pulse
phases [0, 45] degrees and matches the ideal unitary.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

TWO_PI = 2.0 * math.pi
QUARTER = 0.25 * math.pi


class CompileError(ValueError):
    """Invalid gate program or mode violation."""


class GateKind(str, Enum):
    X90 = "x90"
    X180 = "x180"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    Z = "z"


def _norm_angle(phi: float) -> float:
    """Normalize to (-pi, pi]."""
    phi = math.fmod(phi, TWO_PI)
    if phi > math.pi:
        phi -= TWO_PI
    elif phi <= -math.pi:
        phi += TWO_PI
    return phi


@dataclass(frozen=True)
class Gate:
    kind: GateKind
    angle_rad: float = 0.0  # meaningful for Z only

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        if self.kind is GateKind.Z:
            object.__setattr__(self, "angle_rad", _norm_angle(self.angle_rad))

    @classmethod
    def z(cls, angle_rad: float) -> "Gate":
        return cls(GateKind.Z, angle_rad)

    @classmethod
    def parse(cls, name: str) -> "Gate":
        """Gate from its program-file name: x90, x180, h, s, sdg, t, tdg,
        z45/z90/.../z315 (degrees) or z:<radians>."""
        name = name.strip().lower()
        if name.startswith("z:"):
            return cls.z(float(name[2:]))
        if name.startswith("z") and name[1:].replace(".", "", 1).isdigit():
            return cls.z(math.radians(float(name[1:])))
        try:
            return cls(GateKind(name))
        except ValueError:
            raise CompileError(f"unknown gate name {name!r}") from None


@dataclass(frozen=True)
class Program:
    """Per-qubit ordered gate lists."""

    gates: tuple[tuple[Gate, ...], ...]

    def __post_init__(self):
        if len(self.gates) < 1:
            raise CompileError("program needs at least one qubit")
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))

    @property
    def n_qubits(self) -> int:
        return len(self.gates)


@dataclass(frozen=True)
class LoweredQubit:
    """Pulse phase list plus the residual virtual-Z frame after the last pulse."""

    thetas_deg: tuple[float, ...]
    final_frame_rad: float


# Z rotation contributed by each composite gate; X90 emits a pulse.
_Z_ANGLE = {
    GateKind.S: 0.5 * math.pi,
    GateKind.SDG: -0.5 * math.pi,
    GateKind.T: QUARTER,
    GateKind.TDG: -QUARTER,
}


def _expand(gate: Gate) -> list[Gate]:
    if gate.kind is GateKind.H:
        # H = S . X90 . S up to global phase.
        return [Gate(GateKind.S), Gate(GateKind.X90), Gate(GateKind.S)]
    if gate.kind is GateKind.X180:
        return [Gate(GateKind.X90), Gate(GateKind.X90)]
    return [gate]


def lower(gates, quantized: bool = True) -> LoweredQubit:
    """Lower a gate list to X90 pulses with frame-tracked theta_if values."""
    frame = 0.0
    thetas: list[float] = []
    for gate in gates:
        for g in _expand(gate):
            if g.kind is GateKind.X90:
                theta = math.degrees(frame) % 360.0
                if quantized:
                    snapped = round(theta / 45.0) * 45.0
                    if abs(theta - snapped) > 1e-6:
                        raise CompileError(
                            f"frame {theta} deg off the 45-degree grid in quantized mode"
                        )
                    theta = snapped % 360.0
                thetas.append(theta)
            else:
                ang = _Z_ANGLE.get(g.kind, g.angle_rad)
                if quantized and abs(ang / QUARTER - round(ang / QUARTER)) > 1e-9:
                    raise CompileError(
                        f"Z angle {ang} rad is not a multiple of pi/4 in quantized mode"
                    )
                frame += ang
    return LoweredQubit(tuple(thetas), frame % TWO_PI)


# Ideal gate matrices (global phase irrelevant to equivalence checks).
_X90 = np.array([[1.0, -1.0j], [-1.0j, 1.0]], dtype=complex) / math.sqrt(2.0)
_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def _gate_matrix(g: Gate) -> np.ndarray:
    if g.kind is GateKind.X90:
        return _X90
    if g.kind is GateKind.X180:
        return _X90 @ _X90
    if g.kind is GateKind.H:
        return _H
    if g.kind is GateKind.Z:
        return np.array([[1.0, 0.0], [0.0, np.exp(1j * g.angle_rad)]], dtype=complex)
    return np.array([[1.0, 0.0], [0.0, np.exp(1j * _Z_ANGLE[g.kind])]], dtype=complex)


def ideal_unitary(gates) -> np.ndarray:
    """Matrix product of the standard gate definitions, first gate applied first."""
    u = np.eye(2, dtype=complex)
    for g in gates:
        u = _gate_matrix(g) @ u
    return u


def pulse_unitary(phi_rad: float) -> np.ndarray:
    """R_phi(pi/2) = exp(-i (pi/4)(cos phi sigma_x + sin phi sigma_y))."""
    c = math.cos(QUARTER)
    s = math.sin(QUARTER)
    return np.array(
        [
            [c, -1j * s * np.exp(-1j * phi_rad)],
            [-1j * s * np.exp(1j * phi_rad), c],
        ],
        dtype=complex,
    )


def lowered_unitary(lq: LoweredQubit) -> np.ndarray:
    """Unitary realized by the pulse list followed by the residual frame Z."""
    u = np.eye(2, dtype=complex)
    for theta in lq.thetas_deg:
        u = pulse_unitary(-math.radians(theta)) @ u
    zf = np.array([[1.0, 0.0], [0.0, np.exp(1j * lq.final_frame_rad)]], dtype=complex)
    return zf @ u


def phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """min over alpha of ||u - e^{i alpha} v||_F."""
    tr = np.trace(v.conj().T @ u)
    alpha = np.angle(tr) if tr != 0 else 0.0
    return float(np.linalg.norm(u - np.exp(1j * alpha) * v))


def equivalent(u: np.ndarray, v: np.ndarray, tol: float = 1e-9) -> bool:
    return phase_distance(u, v) < tol


class ScheduleMode(str, Enum):
    QUANTIZED45 = "quantized45"
    FREE = "free"


@dataclass(frozen=True)
class Cycle:
    """One emitted control cycle: global IF phase, fired qubits, rolling slot.

    ``slot`` is the position in the unskipped 45-degree rolling sequence
    (quantized mode); in free mode it equals the cycle index.
    """

    theta_if_deg: float
    fired: tuple[int, ...]
    slot: int


@dataclass(frozen=True)
class Schedule:
    cycles: tuple[Cycle, ...]
    mode: ScheduleMode
    n_qubits: int

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "n_qubits": self.n_qubits,
            "cycles": [
                {"theta_if": c.theta_if_deg, "fired": list(c.fired), "slot": c.slot}
                for c in self.cycles
            ],
        }


def schedule(program: Program, mode: ScheduleMode | str = ScheduleMode.QUANTIZED45) -> Schedule:
    """Pack each qubit's lowered pulses into shared-phase control cycles.

    quantized45: the candidate phase rolls 0, 45, ..., 315, ...; every qubit
    whose next pulse matches the candidate fires; empty candidates are
    skipped (their rolling slot is still counted). free: each cycle takes
    the phase demanded by the largest set of ready pulses.
    """
    mode = ScheduleMode(mode)
    lowered = [lower(g, quantized=(mode is ScheduleMode.QUANTIZED45)) for g in program.gates]
    n = len(lowered)
    maxlen = max((len(lq.thetas_deg) for lq in lowered), default=0)
    if maxlen == 0:
        return Schedule((), mode, n)
    # Pad per-qubit phase sequences into one array for vectorized matching.
    thetas = np.full((n, maxlen), -1.0)
    lens = np.array([len(lq.thetas_deg) for lq in lowered])
    for i, lq in enumerate(lowered):
        thetas[i, : lens[i]] = lq.thetas_deg
    ptr = np.zeros(n, dtype=int)
    cycles: list[Cycle] = []
    slot = 0
    idx = np.arange(n)
    while np.any(ptr < lens):
        ready = ptr < lens
        nxt = np.where(ready, thetas[idx, np.minimum(ptr, maxlen - 1)], np.nan)
        if mode is ScheduleMode.QUANTIZED45:
            phase = float((slot % 8) * 45)
        else:
            vals, counts = np.unique(nxt[ready], return_counts=True)
            phase = float(vals[np.argmax(counts)])
        fire = ready & (np.abs(nxt - phase) < 1e-6)
        if np.any(fire):
            cycles.append(Cycle(phase, tuple(int(i) for i in idx[fire]), slot))
            ptr[fire] += 1
        slot += 1
    return Schedule(tuple(cycles), mode, n)


@dataclass(frozen=True)
class ParallelismStats:
    cycles: int
    mean_fired: float
    max_fired: int
    min_nonzero_fired: int


def parallelism_stats(s: Schedule) -> ParallelismStats:
    counts = [len(c.fired) for c in s.cycles]
    if not counts:
        return ParallelismStats(0, 0.0, 0, 0)
    return ParallelismStats(
        cycles=len(counts),
        mean_fired=float(np.mean(counts)),
        max_fired=int(max(counts)),
        min_nonzero_fired=int(min(c for c in counts if c > 0)),
    )
