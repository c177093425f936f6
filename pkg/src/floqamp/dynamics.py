"""Time-domain mean-field dynamics and its Green's-function counterpart.

Noise operators have zero mean, so first moments obey deterministic linear
ODEs. The one-mode model is

    d alpha/dt = -i omega0(t) alpha + (P - gamma - kappa(t))/2 alpha
                 - sqrt(gamma) alpha_d exp(-i omega_d t)

and the three-mode model replaces ``kappa(t)`` and ``P`` by a beam-splitter
coupling ``g_b(t) = g_b0 cos(Omega t / 2)`` to a lossy mode ``b`` and a
two-mode-squeezing coupling ``g_c`` to a lossy mode ``c`` (tracked through
``conj(alpha_c)``).
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import kernels
from .errors import DivergenceError, ParameterError
from .green import green_function
from .model import DriveSpec, validate
from .response import dirac_harmonic

DEFAULT_RTOL = 1e-9
DEFAULT_ATOL = 1e-12
DEFAULT_SAMPLES_PER_PERIOD = 64
MIN_TRANSIENT_PERIODS = 20
ADIABATIC_RATIO = 10.0
PHOTON_CAP = 1e250


@dataclass(frozen=True)
class Trajectory:
    """Sampled mean fields; ``amplitudes`` has one column per mode."""

    times: np.ndarray
    amplitudes: np.ndarray

    @property
    def alpha(self):
        return self.amplitudes[:, 0]

    @property
    def n_modes(self):
        return self.amplitudes.shape[1]


@dataclass(frozen=True)
class MicroParams:
    """Three-mode model whose adiabatic limit is ``base``.

    Rates are absolute (same time unit as ``base.omega_mod``).
    """

    base: object
    kappa_b: float
    kappa_c: float
    g_b0: float
    g_c: float

    @classmethod
    def from_effective(cls, base, kappa_b, kappa_c):
        """Couplings from ``kappa(t) = 4 g_b(t)^2 / kappa_b`` and ``P = 4 g_c^2 / kappa_c``."""
        validate(base)
        if kappa_b <= 0 or kappa_c <= 0:
            raise ParameterError("auxiliary decay rates must be positive")
        g_b0 = math.sqrt(0.5 * base.eta_kappa * base.omega_mod * kappa_b)
        g_c = math.sqrt(0.25 * base.eta_p * base.omega_mod * kappa_c)
        return cls(base, float(kappa_b), float(kappa_c), g_b0, g_c)

    def effective_kappa(self, t):
        return 4 * (self.g_b0 * np.cos(0.5 * self.base.omega_mod * np.asarray(t))) ** 2 / self.kappa_b

    @property
    def effective_pump(self):
        return 4 * self.g_c**2 / self.kappa_c

    def adiabatic_warnings(self):
        om = self.base.omega_mod
        out = []
        for name, rate in (("kappa_b", self.kappa_b), ("kappa_c", self.kappa_c)):
            if rate / om < ADIABATIC_RATIO:
                out.append(f"{name}/Omega = {rate / om:.3g} < {ADIABATIC_RATIO:g}: adiabatic limit questionable")
        return out


def _pack(params, drive, micro=None):
    p = np.zeros(kernels.N_PARAMS)
    om = params.omega_mod
    p[kernels.P_OMEGA] = om
    p[kernels.P_W0] = 2 * params.eta_omega * om
    p[kernels.P_PHI] = params.phi
    p[kernels.P_GAMMA] = params.gamma
    p[kernels.P_PUMP] = params.pump
    p[kernels.P_KAPPA] = 2 * params.eta_kappa * om
    drive_amp = math.sqrt(params.gamma) * complex(drive.amplitude)
    p[kernels.P_DRIVE_RE] = drive_amp.real
    p[kernels.P_DRIVE_IM] = drive_amp.imag
    p[kernels.P_OMEGA_D] = drive.frequency(om)
    if micro is not None:
        p[kernels.P_GB0] = micro.g_b0
        p[kernels.P_GC] = micro.g_c
        p[kernels.P_KAPPA_B] = micro.kappa_b
        p[kernels.P_KAPPA_C] = micro.kappa_c
    return p


def sample_times(params, t_span, samples_per_period=DEFAULT_SAMPLES_PER_PERIOD):
    t0, t1 = t_span
    if not t1 > t0:
        raise ParameterError(f"t_span must be increasing, got {t_span}")
    count = max(2, int(math.ceil((t1 - t0) / params.period * samples_per_period)) + 1)
    return np.linspace(t0, t1, count)


def _run(p, y0, t_eval, rtol, atol, backend):
    status, filled, _, out = kernels.integrate_meanfield(p, y0, t_eval, rtol, atol, backend=backend)
    if status != kernels.STATUS_OK:
        partial = Trajectory(t_eval[:filled], out[:filled])
        t_last = float(t_eval[filled - 1]) if filled else float(t_eval[0])
        reason = {
            kernels.STATUS_UNDERFLOW: "step size underflow",
            kernels.STATUS_BLOWUP: "amplitude blow-up",
            kernels.STATUS_MAXSTEPS: "step budget exhausted",
        }.get(status, "integration failure")
        raise DivergenceError(f"{reason}; last valid sample at t={t_last:.6g}", t_last, partial)
    return Trajectory(t_eval, out)


def integrate_one_mode(
    params,
    drive,
    t_span,
    tol=DEFAULT_RTOL,
    atol=DEFAULT_ATOL,
    t_eval=None,
    alpha0=0.0,
    samples_per_period=DEFAULT_SAMPLES_PER_PERIOD,
    backend=None,
):
    """Integrate the one-mode mean-field equation from ``alpha(t0) = alpha0``."""
    validate(params)
    drive.check(params.omega_mod)
    if t_eval is None:
        t_eval = sample_times(params, t_span, samples_per_period)
    p = _pack(params, drive)
    return _run(p, np.array([alpha0], dtype=complex), np.asarray(t_eval, float), tol, atol, backend)


def integrate_three_mode(
    micro,
    drive,
    t_span,
    tol=DEFAULT_RTOL,
    atol=DEFAULT_ATOL,
    t_eval=None,
    y0=None,
    samples_per_period=DEFAULT_SAMPLES_PER_PERIOD,
    backend=None,
):
    """Integrate ``(alpha, alpha_b, conj(alpha_c))`` of the microscopic model.

    Only ``eta_omega``, ``eta_gamma`` and ``phi`` of ``micro.base`` enter
    directly; the modulated decay and pump come from the auxiliary modes.
    """
    base = micro.base
    validate(base)
    drive.check(base.omega_mod)
    for msg in micro.adiabatic_warnings():
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    if t_eval is None:
        t_eval = sample_times(base, t_span, samples_per_period)
    p = _pack(base, drive, micro)
    y0 = np.zeros(3, dtype=complex) if y0 is None else np.asarray(y0, dtype=complex)
    return _run(p, y0, np.asarray(t_eval, float), tol, atol, backend)


def reconstruct_steady_state(sambe, params, drive):
    """Floquet steady state assembled from one Green's-function column.

    Returns a vectorised function of ``t``:
    ``alpha_G(t) = -i sqrt(gamma) alpha_d sum_n G[n, n_d] exp(-i (omega_bar_d + n Omega) t)``.
    """
    drive.check(params.omega_mod, sambe.n_trunc)
    g = green_function(sambe, drive.omega_bar_d)
    coeff = -1j * math.sqrt(params.gamma) * complex(drive.amplitude) * g.entries[:, sambe.index(drive.n_d)]
    freqs = drive.omega_bar_d + sambe.harmonics * params.omega_mod

    def alpha_g(t):
        t = np.asarray(t, dtype=float)
        vals = np.exp(-1j * np.multiply.outer(t, freqs)) @ coeff
        return vals

    return alpha_g


def transient_time(params):
    """``10 / ((1 - beta) eta_kappa Omega)``, at least 20 modulation periods."""
    if not params.stable:
        return math.inf
    floor = MIN_TRANSIENT_PERIODS * params.period
    if params.eta_kappa == 0:
        return floor
    return max(10.0 / ((1.0 - params.beta) * params.eta_kappa * params.omega_mod), floor)


def relative_sup_error(reference, other):
    reference = np.asarray(reference)
    scale = np.abs(reference).max()
    if scale == 0:
        return float(np.abs(np.asarray(other)).max())
    return float(np.abs(np.asarray(other) - reference).max() / scale)


def steady_state_discrepancy(params, drive, sambe, window_periods=5, **kwargs):
    """Integrate through the transient and compare with the Green reconstruction.

    Returns ``(trajectory, reconstruction, relative sup error after the transient)``.
    """
    t_tr = transient_time(params)
    if not math.isfinite(t_tr):
        raise ParameterError("no steady state in the unstable regime (beta >= 1)")
    t_end = t_tr + window_periods * params.period
    traj = integrate_one_mode(params, drive, (0.0, t_end), **kwargs)
    recon = reconstruct_steady_state(sambe, params, drive)(traj.times)
    late = traj.times >= t_tr
    return traj, recon, relative_sup_error(recon[late], traj.alpha[late])


@dataclass(frozen=True)
class PhotonNumberResult:
    times: np.ndarray
    values: np.ndarray
    growth_rate: float
    stable: bool
    diverged: bool


def photon_number_ode(params, n_init=0.0, t_span=None, tol=DEFAULT_RTOL, samples_per_period=32):
    """Integrate ``dN/dt = Omega [eta_kappa (beta - 1 - cos Omega t) N + eta_p]``.

    ``growth_rate`` is the least-squares slope, over the second half of the
    sampled periods, of the log of the homogeneous solution sampled once per
    period. Integration stops (``diverged=True``) when ``N`` passes
    ``PHOTON_CAP``.
    """
    validate(params)
    if n_init < 0:
        raise ParameterError(f"n_init must be >= 0, got {n_init}")
    om = params.omega_mod
    ek = params.eta_kappa
    b = params.beta
    if t_span is None:
        t_span = (0.0, 20 * params.period)
    t_eval = sample_times(params, t_span, samples_per_period)

    def rate(t):
        return om * ek * (b - 1.0 - math.cos(om * t))

    def rhs(t, y):
        # y[0]: N(t); y[1]: log of the homogeneous solution
        r = rate(t)
        return [r * y[0] + om * params.eta_p, r]

    def cap(t, y):
        return PHOTON_CAP - y[0]

    cap.terminal = True
    sol = solve_ivp(
        rhs, t_span, [float(n_init), 0.0], method="DOP853", t_eval=t_eval, rtol=tol, atol=DEFAULT_ATOL,
        events=cap,
    )
    times, (values, log_h) = sol.t, sol.y
    diverged = sol.status == 1
    growth = _period_slope(times, log_h, params.period, t_span[0])
    return PhotonNumberResult(times, values, growth, params.stable, diverged)


def _period_slope(times, log_values, period, t0):
    k = np.round((times - t0) / period)
    on_grid = np.isclose(times - t0, k * period, rtol=0, atol=1e-9 * period)
    t, y = times[on_grid], log_values[on_grid]
    if t.size < 2:
        return math.nan
    half = t.size // 2 if t.size >= 4 else 0
    slope, _ = np.polyfit(t[half:], y[half:], 1)
    return float(slope)


def default_drive(params):
    """Unit tone at ``omega_bar_d = 0`` on the left-soliton harmonic ``-round(n0)``."""
    return DriveSpec(1.0, dirac_harmonic(params), 0.0)
