"""Continuum (Jackiw-Rebbi) description of the zero singular mode.

Near the two Dirac points ``(+k0, -n0)`` and ``(-k0, +n0)`` the doubled
Bloch Hamiltonian linearises to a Dirac operator whose mass changes sign at
``n = -+ n0``. The bound zero modes are Gaussians with a real width
``sigma_r`` and a phase curvature ``sigma_i`` set by the two cone velocities
``A = 2 eta_omega (beta - 1)`` and ``B = (eta_kappa / 2) sqrt(beta (2 - beta))``.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import NoTopologyError, ParameterError
from .model import beta as _beta

LEFT, RIGHT = "left", "right"


@dataclass(frozen=True)
class SolitonPrediction:
    side: str
    k0: float
    n0: float
    a_velocity: float
    b_velocity: float
    sigma_r_sq: float
    # signed, +-inf at beta = 1 (no phase curvature)
    sigma_i_sq: float

    @property
    def center(self):
        return -self.n0 if self.side == LEFT else self.n0

    @property
    def sigma_r(self):
        return math.sqrt(self.sigma_r_sq)

    @property
    def inv_sigma_i_sq(self):
        return 0.0 if math.isinf(self.sigma_i_sq) else 1.0 / self.sigma_i_sq


def _topological_beta(params):
    b = _beta(params)
    if not 0.0 < b < 2.0:
        raise NoTopologyError(f"beta={b:.6g} outside (0, 2): no Dirac points")
    return b


def dirac_points(params):
    """Return ``(k0, n0)`` with ``cos k0 = beta - 1`` and ``n0 = |2 eta_omega sin k0|``."""
    b = _topological_beta(params)
    k0 = abs(math.acos(b - 1.0))
    n0 = abs(2.0 * params.eta_omega * math.sqrt(1.0 - (b - 1.0) ** 2))
    return k0, n0


def cone_velocities(params):
    b = _topological_beta(params)
    a = 2.0 * params.eta_omega * (b - 1.0)
    bv = 0.5 * params.eta_kappa * math.sqrt(b * (2.0 - b))
    return a, bv


def soliton_prediction(params, side=RIGHT):
    if side not in (LEFT, RIGHT):
        raise ParameterError(f"side must be {LEFT!r} or {RIGHT!r}, got {side!r}")
    k0, n0 = dirac_points(params)
    a, b = cone_velocities(params)
    if b == 0.0:
        raise NoTopologyError("vanishing cone velocity B: soliton is not normalisable")
    num = a * a + b * b
    sigma_r_sq = num / abs(b)
    sigma_i_sq = math.inf if a == 0.0 else num / a
    return SolitonPrediction(side, k0, n0, a, b, sigma_r_sq, sigma_i_sq)


def widths_from_ratio(beta_value, ratio, eta_omega):
    """``(1/sigma_r^2, 1/sigma_i^2)`` written in ``r = eta_kappa / eta_omega``."""
    bb = beta_value * (2.0 - beta_value)
    denom = 4.0 * (beta_value - 1.0) ** 2 + 0.25 * ratio * ratio * bb
    inv_r = ratio / (2.0 * eta_omega) * math.sqrt(bb) / denom
    inv_i = 2.0 * (beta_value - 1.0) / (eta_omega * denom)
    return inv_r, inv_i


def soliton_profile(params, side, n_grid, bloch=False):
    """Unit-norm Gaussian zero mode sampled on the harmonics ``n_grid``.

    The left mode (input side, ``u``) sits at ``-n0``; the right mode
    (output side, ``v``) at ``+n0``. ``bloch=True`` multiplies in the fast
    factor ``exp(+i k0 n)`` (left) or ``exp(-i k0 n)`` (right).
    """
    pred = soliton_prediction(params, side)
    n = np.asarray(n_grid, dtype=float)
    x = n - pred.center
    psi = np.exp(-(x**2) / (2.0 * pred.sigma_r_sq)) * np.exp(-0.5j * x**2 * pred.inv_sigma_i_sq)
    if bloch:
        sign = 1.0 if side == LEFT else -1.0
        psi = psi * np.exp(1j * sign * pred.k0 * n)
    norm = np.linalg.norm(psi)
    if norm == 0.0:
        raise ParameterError("soliton has no weight on the requested grid")
    return psi / norm


def fidelity(numeric, analytic, n_grid=None, k0=None):
    """Overlap ``|<numeric, analytic>|^2`` of two unit vectors.

    The global phase drops out of the modulus. When ``k0`` is given (with
    ``n_grid``), the overlap is also tried with ``analytic`` multiplied by
    ``exp(+-i k0 n)`` and the best value is returned, so the result does not
    depend on whether either vector carries the Bloch factor.
    """
    numeric = np.asarray(numeric, dtype=complex)
    analytic = np.asarray(analytic, dtype=complex)
    if numeric.shape != analytic.shape:
        raise ParameterError(f"length mismatch: {numeric.shape} vs {analytic.shape}")
    candidates = [analytic]
    if k0 is not None:
        if n_grid is None:
            raise ParameterError("n_grid is required when k0 is given")
        n = np.asarray(n_grid, dtype=float)
        candidates += [analytic * np.exp(1j * k0 * n), analytic * np.exp(-1j * k0 * n)]
    best = 0.0
    for cand in candidates:
        value = abs(np.vdot(cand, numeric)) ** 2 / (
            np.vdot(cand, cand).real * np.vdot(numeric, numeric).real
        )
        best = max(best, float(value))
    return min(best, 1.0)
