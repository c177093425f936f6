"""Input-output scattering matrices at the static (gamma) port."""
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .green import green_function


@dataclass(frozen=True)
class ScatteringMatrices:
    """``R = I - i Omega eta_gamma G`` and ``P = i Omega sqrt(eta_p eta_gamma) G``.

    ``r`` maps port-gamma input harmonics to output harmonics; ``p`` maps the
    conjugated pump-bath input. The modulated-decay port is in vacuum and
    has no matrix here.
    """

    omega_bar: float
    r: np.ndarray
    p: np.ndarray
    n_trunc: int

    @property
    def harmonics(self):
        return np.arange(-self.n_trunc, self.n_trunc + 1)

    def column(self, n_d):
        return self.r[:, n_d + self.n_trunc]


def scattering_matrices(sambe, params, omega_bar, green=None, backend=None):
    if green is None:
        green = green_function(sambe, omega_bar, backend=backend)
    g = green.entries
    om = params.omega_mod
    r = np.eye(sambe.dim) - 1j * om * params.eta_gamma * g
    p = 1j * om * np.sqrt(params.eta_p * params.eta_gamma) * g
    return ScatteringMatrices(float(omega_bar), r, p, sambe.n_trunc)


def mean_output(scat, drive):
    """Output amplitudes ``alpha_d R[:, n_d]`` for a tone at ``(omega_bar_d, n_d)``.

    The ``sqrt(2 pi) delta(omega_bar - omega_bar_d)`` factor common to input
    and output is left implicit; ``scat`` must be evaluated at
    ``omega_bar_d``.
    """
    if abs(drive.n_d) > scat.n_trunc:
        raise ParameterError(f"drive harmonic n_d={drive.n_d} outside |n| <= {scat.n_trunc}")
    return drive.amplitude * scat.column(drive.n_d)
