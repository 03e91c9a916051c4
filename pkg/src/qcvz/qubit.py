"""Two-level transmon dynamics in the drive rotating frame.

The density matrix evolves under
    drho/dt = -i[H, rho] + (1/T1) D[sigma-] rho + (1/(2 Tphi)) D[sigma_z] rho
with H = (delta/2) sigma_z + (Omega_re sigma_x + Omega_im sigma_y)/2,
Omega(t) = 2 pi * envelope(t) and delta = 2 pi (carrier - f_qubit).
Integration is fixed-step RK4 with an explicit step-size precondition so
runs are deterministic. Basis: index 0 = ground, index 1 = excited;
p1 = rho[1, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import curve_fit

from .mixer import DriveEnvelope

TWO_PI = 2.0 * math.pi

SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SM = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)  # |0><1|, decay operator
I2 = np.eye(2, dtype=complex)


class QubitError(ValueError):
    """Invalid qubit parameters or state."""


class StepSizeError(QubitError):
    """RK4 step too coarse for the requested dynamics."""


class FitError(RuntimeError):
    """Curve fit did not converge."""


@dataclass(frozen=True)
class QubitParams:
    """Transmon frequency plus T1 and pure-dephasing time Tphi.

    ``math.inf`` for either time is the closed-system sentinel.
    T2 = 1 / (1/(2 T1) + 1/Tphi).
    """

    f_qubit_hz: float
    t1_s: float = math.inf
    tphi_s: float = math.inf

    def __post_init__(self):
        if self.f_qubit_hz <= 0:
            raise QubitError(f"qubit frequency must be positive, got {self.f_qubit_hz}")
        if self.t1_s <= 0 or self.tphi_s <= 0:
            raise QubitError("T1 and Tphi must be positive (inf allowed)")

    @property
    def t2_s(self) -> float:
        rate = 0.5 / self.t1_s + 1.0 / self.tphi_s
        return math.inf if rate == 0.0 else 1.0 / rate

    @classmethod
    def from_t2(cls, f_qubit_hz: float, t1_s: float, t2_s: float) -> "QubitParams":
        """Build params from a (T1, T2) pair by solving for Tphi."""
        rphi = 1.0 / t2_s - 0.5 / t1_s
        if rphi < 0:
            raise QubitError(f"T2={t2_s} exceeds the 2*T1={2 * t1_s} limit")
        return cls(f_qubit_hz, t1_s, math.inf if rphi == 0.0 else 1.0 / rphi)

    def closed(self) -> "QubitParams":
        """Decoherence-free twin (used for calibration)."""
        return QubitParams(self.f_qubit_hz, math.inf, math.inf)


def ground_state() -> np.ndarray:
    return np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)


def excited_state() -> np.ndarray:
    return np.array([[0.0, 0.0], [0.0, 1.0]], dtype=complex)


def validate_density_matrix(rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise QubitError(f"density matrix must be 2x2, got shape {rho.shape}")
    if abs(np.trace(rho) - 1.0) > max(tol, 1e-12):
        raise QubitError(f"trace {np.trace(rho)} != 1")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise QubitError("density matrix is not Hermitian")
    if np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))) < -tol:
        raise QubitError("density matrix is not positive semidefinite")
    return rho


@dataclass
class Trajectory:
    """Sampled excited-state population along one evolution."""

    times_s: np.ndarray
    p1: np.ndarray
    rho_final: np.ndarray | None = None

    def __post_init__(self):
        self.times_s = np.asarray(self.times_s, dtype=float)
        self.p1 = np.asarray(self.p1, dtype=float)
        if np.any(np.diff(self.times_s) < 0):
            raise QubitError("trajectory times must be monotone")
        if np.any(self.p1 < -1e-9) or np.any(self.p1 > 1.0 + 1e-9):
            raise QubitError("populations out of [0, 1]")


def rabi_analytic(omega_rad: float, delta_rad: float, t_s) -> np.ndarray | float:
    """Closed-form Rabi population from the ground state under a flat drive.

    p1 = (Omega^2 / (Omega^2 + delta^2)) sin^2(sqrt(Omega^2 + delta^2) t / 2)
    """
    t = np.asarray(t_s, dtype=float)
    w2 = omega_rad**2 + delta_rad**2
    if w2 == 0.0:
        out = np.zeros_like(t)
    else:
        out = (omega_rad**2 / w2) * np.sin(0.5 * math.sqrt(w2) * t) ** 2
    return float(out) if np.isscalar(t_s) else out


def _dissipator(lop: np.ndarray, rate: float) -> np.ndarray:
    ldl = lop.conj().T @ lop
    return rate * (
        np.kron(lop, lop.conj())
        - 0.5 * (np.kron(ldl, I2) + np.kron(I2, ldl.T))
    )


def _hamiltonian_super(h: np.ndarray) -> np.ndarray:
    return -1j * (np.kron(h, I2) - np.kron(I2, h.T))


def liouvillian_parts(q: QubitParams, delta_rad: float):
    """Constant part plus the two drive-quadrature generators (vec row-major)."""
    l0 = _hamiltonian_super(0.5 * delta_rad * SZ)
    if math.isfinite(q.t1_s):
        l0 = l0 + _dissipator(SM, 1.0 / q.t1_s)
    if math.isfinite(q.tphi_s):
        l0 = l0 + _dissipator(SZ, 0.5 / q.tphi_s)
    lx = _hamiltonian_super(0.5 * SX)
    ly = _hamiltonian_super(0.5 * SY)
    return l0, lx, ly


def evolve(
    q: QubitParams,
    drive: DriveEnvelope,
    rho0: np.ndarray,
    dt_s: float,
) -> Trajectory:
    """Fixed-step RK4 Lindblad integration over the drive duration.

    Precondition: at least 50 steps per period of the fastest rate present,
    dt <= 1 / (50 max(|Omega|, |delta|) / 2 pi).
    p1 is sampled at every step (including t = 0).
    """
    rho0 = validate_density_matrix(rho0)
    delta = TWO_PI * (drive.carrier_hz - q.f_qubit_hz)
    omega_max = TWO_PI * drive.peak_hz
    bound = max(abs(delta), omega_max) / TWO_PI
    if bound > 0 and dt_s > 1.0 / (50.0 * bound):
        raise StepSizeError(
            f"dt={dt_s} too coarse; need dt <= {1.0 / (50.0 * bound):.3e}"
        )
    duration = drive.duration_s
    n = max(1, int(round(duration / dt_s)))
    dt = duration / n

    l0, lx, ly = liouvillian_parts(q, delta)
    ts = np.arange(n + 1) * dt
    # Envelope quadratures at step and half-step points, in angular units.
    half_ts = np.arange(2 * n + 1) * (0.5 * dt)
    env = TWO_PI * drive.value(drive.t0_s + half_ts)
    a, b = env.real, env.imag

    v = rho0.reshape(4).astype(complex)
    p1 = np.empty(n + 1)
    p1[0] = v[3].real
    for k in range(n):
        la = l0 + a[2 * k] * lx + b[2 * k] * ly
        lm = l0 + a[2 * k + 1] * lx + b[2 * k + 1] * ly
        lb = l0 + a[2 * k + 2] * lx + b[2 * k + 2] * ly
        k1 = la @ v
        k2 = lm @ (v + 0.5 * dt * k1)
        k3 = lm @ (v + 0.5 * dt * k2)
        k4 = lb @ (v + dt * k3)
        v = v + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        p1[k + 1] = v[3].real
    rho = v.reshape(2, 2)
    return Trajectory(ts, np.clip(p1, 0.0, 1.0), rho)


def free_evolve(q: QubitParams, rho: np.ndarray, t_s: float, delta_rad: float = 0.0) -> np.ndarray:
    """Exact drive-free Lindblad propagation (diagonal Hamiltonian).

    Populations relax toward the ground state at 1/T1; the coherence decays
    at 1/T2 while rotating at the detuning.
    """
    if t_s < 0:
        raise QubitError("negative delay")
    rho = np.asarray(rho, dtype=complex)
    g1 = math.exp(-t_s / q.t1_s) if math.isfinite(q.t1_s) else 1.0
    g2 = math.exp(-t_s / q.t2_s) if math.isfinite(q.t2_s) else 1.0
    p1 = rho[1, 1].real * g1
    c = rho[0, 1] * g2 * np.exp(-1j * delta_rad * t_s)
    return np.array([[1.0 - p1, c], [c.conjugate(), p1]], dtype=complex)


class FitModel(str, Enum):
    EXP_DECAY = "exp_decay"
    DAMPED_COSINE = "damped_cosine"
    RABI_SINUSOID = "rabi_sinusoid"


@dataclass
class FitResult:
    model: FitModel
    params: dict[str, float]
    sigma: dict[str, float]
    residual: float


def _guess_freq(t: np.ndarray, y: np.ndarray) -> float:
    yc = y - np.mean(y)
    n = len(t)
    freqs = np.fft.rfftfreq(n, d=(t[-1] - t[0]) / (n - 1))
    mag = np.abs(np.fft.rfft(yc))
    k = int(np.argmax(mag[1:])) + 1
    return max(freqs[k], 1.0 / (t[-1] - t[0]))


def fit_curve(model: FitModel | str, times_s, values) -> FitResult:
    """Least-squares fit of a decay/oscillation model to sampled data.

    Models: exp_decay  a*exp(-t/tau) + c
            damped_cosine  a*exp(-t/tau)*cos(2 pi f t + phi) + c
            rabi_sinusoid  a*cos(2 pi f t + phi) + c
    """
    model = FitModel(model)
    t = np.asarray(times_s, dtype=float)
    y = np.asarray(values, dtype=float)
    if model is FitModel.EXP_DECAY:
        names = ("a", "tau", "c")
        n_free = 3

        def f(t, a, tau, c):
            return a * np.exp(-t / tau) + c

        span = max(t[-1] - t[0], np.finfo(float).tiny)
        p0 = (y[0] - y[-1], span / 2.0, y[-1])
    elif model is FitModel.DAMPED_COSINE:
        names = ("a", "tau", "f", "phi", "c")
        n_free = 5

        def f(t, a, tau, f0, phi, c):
            return a * np.exp(-t / tau) * np.cos(TWO_PI * f0 * t + phi) + c

        p0 = (0.5 * (y.max() - y.min()), (t[-1] - t[0]), _guess_freq(t, y), 0.0, y.mean())
    else:
        names = ("a", "f", "phi", "c")
        n_free = 4

        def f(t, a, f0, phi, c):
            return a * np.cos(TWO_PI * f0 * t + phi) + c

        p0 = (0.5 * (y.max() - y.min()), _guess_freq(t, y), 0.0, y.mean())

    if len(t) < 4 * n_free:
        raise FitError(f"need at least {4 * n_free} points for {model.value}, got {len(t)}")
    try:
        popt, pcov = curve_fit(f, t, y, p0=p0, maxfev=20000)
    except RuntimeError as exc:
        raise FitError(f"{model.value} fit did not converge: {exc}") from exc
    resid = float(np.linalg.norm(f(t, *popt) - y))
    params = dict(zip(names, (float(v) for v in popt)))
    # Report rates/frequencies as positive magnitudes.
    for key in ("tau", "f"):
        if key in params:
            params[key] = abs(params[key])
    with np.errstate(invalid="ignore"):
        sig = np.sqrt(np.abs(np.diag(pcov)))
    sigma = dict(zip(names, (float(v) for v in sig)))
    return FitResult(model, params, sigma, resid)
