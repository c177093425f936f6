"""Local winding number of the frozen-n Bloch symbol.

In the doubled representation the Bloch Hamiltonian is ``r_x sigma_x +
r_y sigma_y`` with ``r_x + i r_y = conj(h(k))``, where ``h`` is
:func:`floqamp.sambe.bloch_symbol`. The local invariant is the winding of
``r_x + i r_y`` around the origin as ``k`` runs over the Brillouin zone.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import GapClosingError, ParameterError, UnsupportedPhaseError
from .model import validate
from .sambe import default_truncation

DEFAULT_K_POINTS = 2048
MIN_K_POINTS = 64
# |h| below GAP_TOL * Omega counts as a gap closing
GAP_TOL = 1e-12
BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class WindingMap:
    """Winding numbers on the harmonics ``n`` at one ``omega_bar``.

    ``values`` is 0 wherever ``boundary`` is set.
    """

    omega_bar: float
    harmonics: np.ndarray
    values: np.ndarray
    boundary: np.ndarray

    def nontrivial(self):
        return self.harmonics[(self.values != 0) & ~self.boundary]


def _k_grid(k_points):
    if k_points < MIN_K_POINTS:
        raise ParameterError(f"k_points must be >= {MIN_K_POINTS}, got {k_points}")
    return -math.pi + 2 * math.pi * np.arange(k_points) / k_points


def _doubled_curve(params, k):
    # r(k) - x with x = omega_bar + n Omega carried as a real offset
    om = params.omega_mod
    f = -om * (
        2 * params.eta_omega * np.cos(k + params.phi)
        - 0.5j * params.eta_kappa * np.cos(k)
        + 0.5j * (params.eta_p - params.eta_gamma - params.eta_kappa)
    )
    return np.conj(f)


def _numeric(params, offsets, k_points, backend=None):
    k = _k_grid(k_points)
    counts, min_abs = kernels.winding_numbers(offsets, _doubled_curve(params, k), backend=backend)
    return counts, min_abs < GAP_TOL * params.omega_mod


def winding_numeric(params, n, omega_bar, k_points=DEFAULT_K_POINTS, backend=None):
    """Winding of the doubled Bloch vector from accumulated phase increments."""
    validate(params)
    offset = omega_bar + n * params.omega_mod
    counts, closed = _numeric(params, np.array([offset]), k_points, backend)
    if closed[0]:
        raise GapClosingError(f"gap closes at n={n}, omega_bar={omega_bar}")
    return int(counts[0])


def _is_max_nonreciprocal(phi):
    s = math.sin(phi)
    return abs(abs(s) - 1.0) <= 1e-12


def winding_analytic(params, n, omega_bar):
    """Closed-form winding at ``phi = +-pi/2``.

    Returns ``sgn(sin phi)`` inside the ellipse
    ``(omega_bar/Omega + n)^2 < (2 eta_omega)^2 beta (2 - beta)``, 0 outside,
    and ``None`` on its boundary.
    """
    validate(params)
    if not _is_max_nonreciprocal(params.phi):
        raise UnsupportedPhaseError(
            f"closed form only holds at phi = +-pi/2 (got {params.phi}); use winding_numeric"
        )
    sign = 1 if math.sin(params.phi) > 0 else -1
    x = omega_bar / params.omega_mod + n
    if params.eta_kappa == 0 or params.eta_omega == 0:
        # the loop degenerates to a segment: never encloses the origin
        return 0
    b = params.beta
    rhs = (2 * params.eta_omega) ** 2 * b * (2 - b)
    lhs = x * x
    if abs(lhs - rhs) <= BOUNDARY_TOL * max(1.0, abs(rhs)):
        return None
    return sign if lhs < rhs else 0


def ellipse_distance(params, n, omega_bar):
    """Signed distance in harmonic units from the window edge (>0 outside)."""
    win = topo_window(params, omega_bar)
    x = n
    if win is None:
        return math.inf
    lo, hi = win
    if x < lo:
        return lo - x
    if x > hi:
        return x - hi
    return -min(x - lo, hi - x)


def topo_window(params, omega_bar):
    """Real endpoints ``(n_minus, n_plus)`` of the nontrivial window, or ``None``."""
    if params.eta_kappa == 0:
        return None
    b = params.beta
    if not 0 < b < 2:
        return None
    half = 2 * params.eta_omega * math.sqrt(b * (2 - b))
    center = -omega_bar / params.omega_mod
    return center - half, center + half


def winding_map(
    params, omega_bar, n_trunc=None, k_points=DEFAULT_K_POINTS, method="auto", backend=None
):
    """Winding numbers for every harmonic ``|n| <= n_trunc`` at ``omega_bar``.

    ``method="auto"`` uses the closed form at ``phi = +-pi/2`` and the
    numeric winding otherwise. Gap closings are flagged in ``boundary``.
    """
    validate(params)
    if n_trunc is None:
        n_trunc = default_truncation(params)
    harm = np.arange(-n_trunc, n_trunc + 1)
    if method == "auto":
        method = "analytic" if _is_max_nonreciprocal(params.phi) else "numeric"
    if method == "analytic":
        values = np.zeros(harm.shape, dtype=np.int64)
        boundary = np.zeros(harm.shape, dtype=bool)
        for i, n in enumerate(harm):
            nu = winding_analytic(params, int(n), omega_bar)
            if nu is None:
                boundary[i] = True
            else:
                values[i] = nu
    elif method == "numeric":
        values, boundary = _numeric(params, omega_bar + harm * params.omega_mod, k_points, backend)
        values = np.where(boundary, 0, values)
    else:
        raise ParameterError(f"unknown method {method!r}")
    return WindingMap(float(omega_bar), harm, values, boundary)


def winding_grid(
    params, omega_bars, n_trunc=None, k_points=DEFAULT_K_POINTS, method="auto", threads=1
):
    """:func:`winding_map` over several reduced frequencies."""
    if n_trunc is None:
        n_trunc = default_truncation(params)

    def one(w):
        return winding_map(params, float(w), n_trunc, k_points, method)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, omega_bars))
    return [one(w) for w in omega_bars]


def numeric_window(params, omega_bar, n_trunc=None, k_points=DEFAULT_K_POINTS):
    """Outermost harmonics with nonzero numeric winding, or ``None``."""
    wm = winding_map(params, omega_bar, n_trunc, k_points, method="numeric")
    idx = wm.nontrivial()
    if idx.size == 0:
        return None
    return int(idx.min()), int(idx.max())
