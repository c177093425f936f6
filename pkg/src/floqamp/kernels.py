"""Hot numeric kernels, each with a numba route and a numpy/scipy route.

The public entry points dispatch on ``backend`` (``"numba"``, ``"numpy"`` or
``None`` for the process default, see :mod:`floqamp._accel`):

* :func:`tridiag_inverse` -- full inverse of a complex tridiagonal matrix.
* :func:`winding_numbers` -- phase-increment winding of ``x + g(k)`` around
  the origin for many real offsets ``x`` at once.
* :func:`integrate_meanfield` -- adaptive integration of the linear
  mean-field equations (one-mode or three-mode).

The two routes are independent implementations (banded LU with partial
pivoting vs. LAPACK dense solve; scalar loops vs. broadcast arrays; a
Dormand-Prince 5(4) stepper vs. scipy's DOP853) so each can check the other.
"""
import math

import numpy as np
from scipy.integrate import solve_ivp

from . import _accel
from ._accel import njit

# ---------------------------------------------------------------------------
# Tridiagonal inverse
# ---------------------------------------------------------------------------


def _gttrf_py(dl, d, du, du2, ipiv):
    # LU with partial pivoting, same layout as LAPACK ?gttrf. Returns the
    # index of the first exactly-zero pivot, or -1.
    n = d.shape[0]
    for i in range(n - 1):
        ipiv[i] = i
    if n > 0:
        ipiv[n - 1] = n - 1
    for i in range(n - 2):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] != 0:
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] = d[i + 1] - fact * du[i]
            du2[i] = 0.0
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            du2[i] = du[i + 1]
            du[i + 1] = -fact * du[i + 1]
            ipiv[i] = i + 1
    if n > 1:
        i = n - 2
        if abs(d[i]) >= abs(dl[i]):
            if d[i] != 0:
                fact = dl[i] / d[i]
                dl[i] = fact
                d[i + 1] = d[i + 1] - fact * du[i]
        else:
            fact = d[i] / dl[i]
            d[i] = dl[i]
            dl[i] = fact
            temp = du[i]
            du[i] = d[i + 1]
            d[i + 1] = temp - fact * d[i + 1]
            ipiv[i] = i + 1
    for i in range(n):
        if d[i] == 0:
            return i
    return -1


def _gttrs_py(dl, d, du, du2, ipiv, b):
    n = d.shape[0]
    for i in range(n - 1):
        if ipiv[i] == i:
            b[i + 1] = b[i + 1] - dl[i] * b[i]
        else:
            temp = b[i]
            b[i] = b[i + 1]
            b[i + 1] = temp - dl[i] * b[i]
    b[n - 1] = b[n - 1] / d[n - 1]
    if n > 1:
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i]


_gttrf = njit(_gttrf_py)
_gttrs = njit(_gttrs_py)


def _tridiag_inverse_py(lower, diag, upper, out):
    n = diag.shape[0]
    dl = lower.copy()
    d = diag.copy()
    du = upper.copy()
    du2 = np.zeros(max(n - 2, 0), dtype=np.complex128)
    ipiv = np.zeros(n, dtype=np.int64)
    info = _gttrf(dl, d, du, du2, ipiv)
    if info >= 0:
        return info
    col = np.zeros(n, dtype=np.complex128)
    for j in range(n):
        for i in range(n):
            col[i] = 0.0
        col[j] = 1.0
        _gttrs(dl, d, du, du2, ipiv, col)
        for i in range(n):
            out[i, j] = col[i]
    return -1


_tridiag_inverse_nb = njit(_tridiag_inverse_py)


def tridiag_inverse(lower, diag, upper, backend=None):
    """Inverse of the tridiagonal matrix with the given bands.

    Returns ``None`` when an exact zero pivot makes the matrix singular; the
    caller judges near-singularity from the condition number.
    """
    diag = np.ascontiguousarray(diag, dtype=np.complex128)
    lower = np.ascontiguousarray(lower, dtype=np.complex128)
    upper = np.ascontiguousarray(upper, dtype=np.complex128)
    n = diag.shape[0]
    if _accel.resolve(backend) == "numba":
        out = np.empty((n, n), dtype=np.complex128)
        info = _tridiag_inverse_nb(lower, diag, upper, out)
        return None if info >= 0 else out
    mat = np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)
    try:
        return np.linalg.solve(mat, np.eye(n, dtype=np.complex128))
    except np.linalg.LinAlgError:
        return None


# ---------------------------------------------------------------------------
# Winding numbers
# ---------------------------------------------------------------------------


def _winding_py(offsets, curve, counts, min_abs):
    ncell = offsets.shape[0]
    nk = curve.shape[0]
    for c in range(ncell):
        x = offsets[c]
        total = 0.0
        zmin = np.inf
        prev = x + curve[nk - 1]
        for j in range(nk):
            cur = x + curve[j]
            a = abs(cur)
            if a < zmin:
                zmin = a
            # arg(cur / prev) in (-pi, pi]
            re = cur.real * prev.real + cur.imag * prev.imag
            im = cur.imag * prev.real - cur.real * prev.imag
            total += math.atan2(im, re)
            prev = cur
        counts[c] = int(round(total / (2.0 * math.pi)))
        min_abs[c] = zmin


_winding_nb = njit(_winding_py)


def _winding_numpy(offsets, curve, chunk=256):
    counts = np.empty(offsets.shape[0], dtype=np.int64)
    min_abs = np.empty(offsets.shape[0])
    for start in range(0, offsets.shape[0], chunk):
        sl = slice(start, start + chunk)
        r = offsets[sl, None] + curve[None, :]
        steps = np.angle(r * np.conj(np.roll(r, 1, axis=1)))
        counts[sl] = np.rint(steps.sum(axis=1) / (2 * np.pi)).astype(np.int64)
        min_abs[sl] = np.abs(r).min(axis=1)
    return counts, min_abs


def winding_numbers(offsets, curve, backend=None):
    """Winding of the closed curves ``offsets[c] + curve`` around 0.

    ``curve`` samples one period of a closed loop (the last sample connects
    back to the first). Returns ``(counts, min_abs)`` where ``min_abs`` is the
    smallest distance to the origin seen along each curve.
    """
    offsets = np.ascontiguousarray(np.atleast_1d(offsets), dtype=np.float64)
    curve = np.ascontiguousarray(curve, dtype=np.complex128)
    if _accel.resolve(backend) == "numba":
        counts = np.empty(offsets.shape[0], dtype=np.int64)
        min_abs = np.empty(offsets.shape[0])
        _winding_nb(offsets, curve, counts, min_abs)
        return counts, min_abs
    return _winding_numpy(offsets, curve)


# ---------------------------------------------------------------------------
# Mean-field ODE
# ---------------------------------------------------------------------------

# Layout of the packed parameter vector consumed by the right-hand side.
P_OMEGA, P_W0, P_PHI, P_GAMMA, P_PUMP, P_KAPPA = 0, 1, 2, 3, 4, 5
P_DRIVE_RE, P_DRIVE_IM, P_OMEGA_D = 6, 7, 8
P_GB0, P_GC, P_KAPPA_B, P_KAPPA_C = 9, 10, 11, 12
N_PARAMS = 13


def _meanfield_rhs_py(t, y, p, out):
    omega = p[P_OMEGA]
    w0 = p[P_W0] * math.cos(omega * t + p[P_PHI])
    drive = complex(p[P_DRIVE_RE], p[P_DRIVE_IM]) * complex(
        math.cos(p[P_OMEGA_D] * t), -math.sin(p[P_OMEGA_D] * t)
    )
    a = y[0]
    if y.shape[0] == 1:
        c = math.cos(0.5 * omega * t)
        kappa = p[P_KAPPA] * c * c
        out[0] = complex(0.5 * (p[P_PUMP] - p[P_GAMMA] - kappa), -w0) * a - drive
    else:
        gb = p[P_GB0] * math.cos(0.5 * omega * t)
        gc = p[P_GC]
        b = y[1]
        cstar = y[2]
        out[0] = complex(-0.5 * p[P_GAMMA], -w0) * a - gb * b - 1j * gc * cstar - drive
        out[1] = gb * a - 0.5 * p[P_KAPPA_B] * b
        out[2] = 1j * gc * a - 0.5 * p[P_KAPPA_C] * cstar


_meanfield_rhs = njit(_meanfield_rhs_py)

# Dormand-Prince 5(4) tableau.
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71 / 57600,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)

STATUS_OK, STATUS_UNDERFLOW, STATUS_BLOWUP, STATUS_MAXSTEPS = 0, 1, 2, 3


def _dopri5_py(p, y0, t_eval, rtol, atol, max_steps, blowup, out):
    # Adaptive DOPRI5 that lands exactly on each output time. Returns
    # (status, number of filled output rows, steps taken).
    m = y0.shape[0]
    nout = t_eval.shape[0]
    y = y0.copy()
    t = t_eval[0]
    for i in range(m):
        out[0, i] = y[i]
    k1 = np.empty(m, dtype=np.complex128)
    k2 = np.empty(m, dtype=np.complex128)
    k3 = np.empty(m, dtype=np.complex128)
    k4 = np.empty(m, dtype=np.complex128)
    k5 = np.empty(m, dtype=np.complex128)
    k6 = np.empty(m, dtype=np.complex128)
    k7 = np.empty(m, dtype=np.complex128)
    tmp = np.empty(m, dtype=np.complex128)
    ynew = np.empty(m, dtype=np.complex128)
    _meanfield_rhs(t, y, p, k1)
    span = t_eval[nout - 1] - t_eval[0]
    scale = 0.0
    fnorm = 0.0
    for i in range(m):
        scale = max(scale, atol + rtol * abs(y[i]))
        fnorm = max(fnorm, abs(k1[i]))
    h = 1e-3 * span
    if fnorm > 0:
        h = min(h, 0.01 * scale / fnorm)
    h = max(h, 1e-12 * max(span, 1.0))
    steps = 0
    filled = 1
    while filled < nout:
        target = t_eval[filled]
        if steps >= max_steps:
            return STATUS_MAXSTEPS, filled, steps
        landing = False
        if t + h >= target:
            h_try = target - t
            landing = True
        else:
            h_try = h
        for i in range(m):
            tmp[i] = y[i] + h_try * _A21 * k1[i]
        _meanfield_rhs(t + _C2 * h_try, tmp, p, k2)
        for i in range(m):
            tmp[i] = y[i] + h_try * (_A31 * k1[i] + _A32 * k2[i])
        _meanfield_rhs(t + _C3 * h_try, tmp, p, k3)
        for i in range(m):
            tmp[i] = y[i] + h_try * (_A41 * k1[i] + _A42 * k2[i] + _A43 * k3[i])
        _meanfield_rhs(t + _C4 * h_try, tmp, p, k4)
        for i in range(m):
            tmp[i] = y[i] + h_try * (_A51 * k1[i] + _A52 * k2[i] + _A53 * k3[i] + _A54 * k4[i])
        _meanfield_rhs(t + _C5 * h_try, tmp, p, k5)
        for i in range(m):
            tmp[i] = y[i] + h_try * (
                _A61 * k1[i] + _A62 * k2[i] + _A63 * k3[i] + _A64 * k4[i] + _A65 * k5[i]
            )
        _meanfield_rhs(t + h_try, tmp, p, k6)
        for i in range(m):
            ynew[i] = y[i] + h_try * (
                _B1 * k1[i] + _B3 * k3[i] + _B4 * k4[i] + _B5 * k5[i] + _B6 * k6[i]
            )
        _meanfield_rhs(t + h_try, ynew, p, k7)
        err = 0.0
        for i in range(m):
            e = h_try * (
                _E1 * k1[i] + _E3 * k3[i] + _E4 * k4[i] + _E5 * k5[i] + _E6 * k6[i] + _E7 * k7[i]
            )
            sc = atol + rtol * max(abs(y[i]), abs(ynew[i]))
            r = abs(e) / sc
            err += r * r
        err = math.sqrt(err / m)
        steps += 1
        if not math.isfinite(err):
            return STATUS_BLOWUP, filled, steps
        if err <= 1.0:
            t = target if landing else t + h_try
            big = 0.0
            for i in range(m):
                y[i] = ynew[i]
                k1[i] = k7[i]
                big = max(big, abs(y[i]))
            if big > blowup:
                return STATUS_BLOWUP, filled, steps
            if landing:
                for i in range(m):
                    out[filled, i] = y[i]
                filled += 1
            fac = 0.9 * err ** -0.2 if err > 0 else 10.0
            fac = min(10.0, max(0.2, fac))
            h_new = h_try * fac
            # a short landing step should not shrink the cruising step
            h = max(h, h_new) if landing else h_new
        else:
            fac = max(0.2, 0.9 * err ** -0.2)
            h = h_try * fac
            if h < 1e-14 * max(abs(t), 1.0):
                return STATUS_UNDERFLOW, filled, steps
    return STATUS_OK, filled, steps


_dopri5_nb = njit(_dopri5_py)


def _integrate_scipy(p, y0, t_eval, rtol, atol, blowup):
    m = y0.shape[0]

    def rhs(t, y):
        out = np.empty(m, dtype=np.complex128)
        _meanfield_rhs_py(t, y, p, out)
        return out

    def too_big(t, y):
        return blowup - np.max(np.abs(y))

    too_big.terminal = True
    sol = solve_ivp(
        rhs,
        (t_eval[0], t_eval[-1]),
        y0,
        method="DOP853",
        t_eval=t_eval,
        rtol=rtol,
        atol=atol,
        events=too_big,
    )
    out = np.zeros((t_eval.shape[0], m), dtype=np.complex128)
    filled = sol.y.shape[1]
    out[:filled] = sol.y.T
    if sol.status == 1:
        status = STATUS_BLOWUP
    elif sol.status < 0:
        status = STATUS_UNDERFLOW
    else:
        status = STATUS_OK
    return status, filled, int(sol.nfev), out


def integrate_meanfield(
    params, y0, t_eval, rtol=1e-9, atol=1e-12, max_steps=50_000_000, blowup=1e150, backend=None
):
    """Integrate the packed mean-field system and sample it at ``t_eval``.

    ``params`` is the packed vector described by the ``P_*`` indices; the
    state length (1 or 3) selects the one-mode or three-mode equations.
    Returns ``(status, filled, work, samples)``; rows past ``filled`` are
    zero when the integration stopped early.
    """
    p = np.ascontiguousarray(params, dtype=np.float64)
    y0 = np.ascontiguousarray(y0, dtype=np.complex128)
    t_eval = np.ascontiguousarray(t_eval, dtype=np.float64)
    if p.shape[0] != N_PARAMS:
        raise ValueError(f"expected {N_PARAMS} packed parameters, got {p.shape[0]}")
    if y0.shape[0] not in (1, 3):
        raise ValueError("state must have 1 (one-mode) or 3 (three-mode) components")
    if _accel.resolve(backend) == "numba":
        out = np.zeros((t_eval.shape[0], y0.shape[0]), dtype=np.complex128)
        status, filled, steps = _dopri5_nb(p, y0, t_eval, rtol, atol, max_steps, blowup, out)
        return status, filled, steps, out
    return _integrate_scipy(p, y0, t_eval, rtol, atol, blowup)
