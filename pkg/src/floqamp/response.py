"""Cyclostationary signal and pump-noise photon fluxes at the static port."""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NoTopologyError, ParameterError, QuadratureError
from .green import green_function
from .jackiw import dirac_points
from .model import DriveSpec, validate
from .sambe import build_sambe, default_truncation
from .scattering import scattering_matrices

DEFAULT_QUAD_POINTS = 128
DEFAULT_SAMPLES = 256
MIN_QUAD_POINTS = 32
REFINE_TOL = 0.01


@dataclass(frozen=True)
class SnrResult:
    eta_p: float
    beta: float
    snr_max: float
    t_star: float
    times: np.ndarray
    signal_series: np.ndarray
    noise_series: np.ndarray
    drive: DriveSpec
    stable: bool


def period_times(omega_mod, samples=DEFAULT_SAMPLES):
    return (2 * math.pi / omega_mod) * np.arange(samples) / samples


def _phases(harmonics, omega_mod, t):
    # e^{-i n Omega t}, shape (len(t), len(harmonics))
    return np.exp(-1j * omega_mod * np.outer(np.atleast_1d(t), harmonics))


def signal_out(scat, drive, t, omega_mod):
    """Coherent output flux ``|alpha_d sum_n e^{-i n Omega t} R[n, n_d]|^2``.

    ``scat`` must be evaluated at ``drive.omega_bar_d``.
    """
    col = drive.amplitude * scat.column(drive.n_d)
    flux = np.abs(_phases(scat.harmonics, omega_mod, t) @ col) ** 2
    return flux if np.ndim(t) else float(flux[0])


def noise_correlation(params, n_trunc, quad_points=DEFAULT_QUAD_POINTS, sambe=None):
    """``C[n, m] = sum_l int_0^Omega conj(P[n, l]) P[m, l] d omega_bar``.

    Composite midpoint rule with ``quad_points`` nodes; one Green solve per
    node.
    """
    if quad_points < MIN_QUAD_POINTS // 2:
        raise ParameterError(f"quad_points must be >= {MIN_QUAD_POINTS}, got {quad_points}")
    if sambe is None:
        sambe = build_sambe(params, n_trunc)
    om = params.omega_mod
    corr = np.zeros((sambe.dim, sambe.dim), dtype=complex)
    if params.eta_p == 0 or params.eta_gamma == 0:
        return corr
    weight = om / quad_points
    for k in range(quad_points):
        wbar = (k + 0.5) * weight
        p = scattering_matrices(sambe, params, wbar).p
        corr += p.conj() @ p.T
    return corr * weight


def noise_series(corr, omega_mod, t):
    """``N(t) = (1/2pi) sum_{n,m} e^{i(n-m) Omega t} C[n, m]``."""
    n_trunc = (corr.shape[0] - 1) // 2
    harm = np.arange(-n_trunc, n_trunc + 1)
    f = np.conj(_phases(harm, omega_mod, t))
    vals = np.einsum("tn,nm,tm->t", f, corr, f.conj()) / (2 * math.pi)
    scale = max(np.abs(vals.real).max(initial=0.0), 1e-300)
    if np.abs(vals.imag).max(initial=0.0) > 1e-10 * scale:
        raise ArithmeticError("noise flux has a non-negligible imaginary part")
    return vals.real


def noise_out(params, n_trunc, quad_points, t, check=True):
    """Pump-noise output flux at time(s) ``t``.

    With ``check=True`` the quadrature is repeated with half the nodes and
    a relative change of the period-averaged flux above 1% raises
    :class:`QuadratureError`.
    """
    validate(params)
    if quad_points < MIN_QUAD_POINTS:
        raise ParameterError(f"quad_points must be >= {MIN_QUAD_POINTS}, got {quad_points}")
    sambe = build_sambe(params, n_trunc)
    corr = noise_correlation(params, n_trunc, quad_points, sambe)
    if check:
        _check_refinement(params, n_trunc, quad_points, sambe, corr)
    vals = noise_series(corr, params.omega_mod, t)
    return vals if np.ndim(t) else float(vals[0])


def _check_refinement(params, n_trunc, quad_points, sambe, corr):
    coarse = noise_correlation(params, n_trunc, quad_points // 2, sambe)
    fine_avg = np.trace(corr).real
    coarse_avg = np.trace(coarse).real
    if fine_avg > 0 and abs(fine_avg - coarse_avg) > REFINE_TOL * fine_avg:
        raise QuadratureError(
            f"noise quadrature unconverged: {coarse_avg:.6g} ({quad_points // 2} nodes) vs "
            f"{fine_avg:.6g} ({quad_points} nodes)"
        )


def dirac_harmonic(params):
    """``-round(n0)``, the input harmonic at the left soliton; 0 without a window."""
    try:
        _, n0 = dirac_points(params)
    except NoTopologyError:
        return 0
    return -int(round(n0))


def snr_point(
    params,
    drive=None,
    n_trunc=None,
    quad_points=DEFAULT_QUAD_POINTS,
    samples=DEFAULT_SAMPLES,
    harmonic="optimal",
    check=True,
):
    """Maximum over one period of ``S_out(t) / N_out(t)``.

    Without an explicit ``drive`` a unit tone at ``omega_bar_d = 0`` is used,
    on the harmonic chosen by ``harmonic``: ``"optimal"`` scans every
    harmonic in the truncation and keeps the one with the largest SNR,
    ``"dirac"`` uses ``-round(n0)``.
    """
    validate(params)
    if n_trunc is None:
        n_trunc = default_truncation(params)
    sambe = build_sambe(params, n_trunc)
    om = params.omega_mod
    times = period_times(om, samples)
    corr = noise_correlation(params, n_trunc, quad_points, sambe)
    if check:
        _check_refinement(params, n_trunc, quad_points, sambe, corr)
    noise = noise_series(corr, om, times)

    if drive is None:
        wbar = 0.0
        scat = scattering_matrices(sambe, params, wbar, green_function(sambe, wbar))
        if harmonic == "optimal":
            fluxes = np.abs(_phases(scat.harmonics, om, times) @ scat.r) ** 2
            ratio = _ratio(fluxes, noise[:, None])
            n_d = int(scat.harmonics[np.argmax(ratio.max(axis=0))])
        elif harmonic == "dirac":
            n_d = dirac_harmonic(params)
        else:
            raise ParameterError(f"unknown harmonic rule {harmonic!r}")
        drive = DriveSpec(1.0, n_d, wbar)
    else:
        drive.check(om, n_trunc)
        scat = scattering_matrices(sambe, params, drive.omega_bar_d)
    signal = signal_out(scat, drive, times, om)
    ratio = _ratio(signal, noise)
    j = int(np.argmax(ratio))
    return SnrResult(
        eta_p=params.eta_p,
        beta=params.beta,
        snr_max=float(ratio[j]),
        t_star=float(times[j]),
        times=times,
        signal_series=signal,
        noise_series=noise,
        drive=drive,
        stable=params.stable,
    )


def _ratio(signal, noise):
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(noise > 0, signal / np.where(noise > 0, noise, 1.0), np.inf)
    return np.where((noise <= 0) & (signal <= 0), 0.0, out)


def sweep_point(params, drive=None, n_trunc=None, quad_points=DEFAULT_QUAD_POINTS,
                samples=DEFAULT_SAMPLES, harmonic="optimal"):
    """:func:`snr_point` for use inside sweeps.

    An unstable point whose noise quadrature does not converge (at
    ``beta = 1`` the noise integral diverges) gives a NaN SNR with
    ``drive=None`` instead of raising; stable points still raise.
    """
    try:
        return snr_point(params, drive, n_trunc, quad_points, samples, harmonic)
    except QuadratureError:
        if params.stable:
            raise
        empty = np.empty(0)
        return SnrResult(params.eta_p, params.beta, math.nan, math.nan, empty, empty, empty, None, False)


def snr_sweep(
    params,
    eta_p_values,
    drive=None,
    n_trunc=None,
    quad_points=DEFAULT_QUAD_POINTS,
    samples=DEFAULT_SAMPLES,
    harmonic="optimal",
    threads=1,
):
    """:func:`sweep_point` along ``eta_p``; points with ``beta >= 1`` carry ``stable=False``."""
    points = [params.replace(eta_p=float(ep)) for ep in eta_p_values]

    def one(p):
        return sweep_point(p, drive, n_trunc, quad_points, samples, harmonic)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]
