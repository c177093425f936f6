"""Truncated Floquet-Sambe dynamical matrix and its local Bloch symbol."""
import math
from dataclasses import dataclass

import numpy as np

from . import jackiw
from .errors import NoTopologyError, ParameterError
from .model import validate

# hard cap on the automatic truncation; users may still pass larger N
MAX_AUTO_TRUNC = 400


@dataclass(frozen=True)
class SambeMatrix:
    """Tridiagonal matrix ``H_nm`` on harmonics ``n, m in [-N, N]``.

    Row/column index ``i`` corresponds to harmonic ``n = i - N``.
    """

    n_trunc: int
    entries: np.ndarray
    omega_mod: float

    @property
    def dim(self):
        return 2 * self.n_trunc + 1

    @property
    def harmonics(self):
        return np.arange(-self.n_trunc, self.n_trunc + 1)

    def index(self, n):
        if abs(n) > self.n_trunc:
            raise ParameterError(f"harmonic {n} outside |n| <= {self.n_trunc}")
        return int(n) + self.n_trunc

    def bands(self):
        """``(lower, diag, upper)`` bands of the matrix."""
        e = self.entries
        return np.diagonal(e, -1).copy(), np.diagonal(e).copy(), np.diagonal(e, 1).copy()

    def restrict(self, n_prime):
        if not 1 <= n_prime <= self.n_trunc:
            raise ParameterError(f"cannot restrict N={self.n_trunc} to {n_prime}")
        lo = self.n_trunc - n_prime
        hi = lo + 2 * n_prime + 1
        return SambeMatrix(n_prime, self.entries[lo:hi, lo:hi].copy(), self.omega_mod)

    def nonzero_records(self):
        """Rows ``(n, m, re, im)`` for every nonzero entry, row-major."""
        rows = []
        harm = self.harmonics
        for i, j in zip(*np.nonzero(self.entries)):
            z = self.entries[i, j]
            rows.append((int(harm[i]), int(harm[j]), float(z.real), float(z.imag)))
        return rows


def hopping(params):
    """``(upper, lower)`` couplings: ``H_{n,n+1}`` and ``H_{n+1,n}``."""
    om = params.omega_mod
    upper = om * (params.eta_omega * np.exp(1j * params.phi) - 0.25j * params.eta_kappa)
    lower = om * (params.eta_omega * np.exp(-1j * params.phi) - 0.25j * params.eta_kappa)
    return upper, lower


def build_sambe(params, n_trunc):
    """Open-boundary Sambe matrix with ``2 n_trunc + 1`` harmonics."""
    validate(params)
    if int(n_trunc) != n_trunc or n_trunc < 1:
        raise ParameterError(f"n_trunc must be an integer >= 1, got {n_trunc}")
    n_trunc = int(n_trunc)
    om = params.omega_mod
    n = np.arange(-n_trunc, n_trunc + 1)
    damping = 0.5 * (params.eta_p - params.eta_gamma - params.eta_kappa)
    upper, lower = hopping(params)
    mat = np.diag(om * (-n + 1j * damping)).astype(complex)
    mat += np.diag(np.full(2 * n_trunc, upper), 1)
    mat += np.diag(np.full(2 * n_trunc, lower), -1)
    mat.setflags(write=False)
    return SambeMatrix(n_trunc, mat, om)


def default_truncation(params):
    """Smallest N that holds both solitons with negligible tails.

    ``N >= ceil(n0 + 6 sigma_r)`` inside the topological window and never
    below ``2 ceil(2 eta_omega) + 10``; capped at ``MAX_AUTO_TRUNC``.
    """
    floor = 2 * math.ceil(2 * params.eta_omega) + 10
    n_req = floor
    if params.eta_kappa > 0:
        try:
            pred = jackiw.soliton_prediction(params)
        except NoTopologyError:
            pred = None
        if pred is not None:
            n_req = max(floor, math.ceil(pred.n0 + 6 * pred.sigma_r))
    return int(min(max(n_req, 1), MAX_AUTO_TRUNC))


def bloch_symbol(params, n, omega_bar, k):
    """Frozen-n Bloch symbol ``h(k) = omega_bar - H_k(n)``.

    Vectorised over ``k``; a zero of ``h`` marks a gap closing of the
    doubled Hamiltonian.
    """
    k = np.asarray(k, dtype=float)
    om = params.omega_mod
    inner = (
        2 * params.eta_omega * np.cos(k + params.phi)
        - 0.5j * params.eta_kappa * np.cos(k)
        + 0.5j * (params.eta_p - params.eta_gamma - params.eta_kappa)
        - n
    )
    return omega_bar - om * inner


def time_signals(params, t):
    """Instantaneous ``(omega0(t), kappa(t))``; vectorised over ``t``."""
    t = np.asarray(t, dtype=float)
    om = params.omega_mod
    omega0 = 2 * params.eta_omega * om * np.cos(om * t + params.phi)
    kappa = 2 * params.eta_kappa * om * np.cos(0.5 * om * t) ** 2
    return omega0, kappa
