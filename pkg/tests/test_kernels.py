import math
import subprocess
import sys

import numpy as np
import pytest
from scipy.linalg import solve_banded

from floqamp import _accel, kernels
from floqamp.dynamics import MicroParams, _pack
from floqamp.model import DriveSpec, ModelParams

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


def _random_bands(rng, n):
    lower = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
    upper = rng.normal(size=n - 1) + 1j * rng.normal(size=n - 1)
    diag = rng.normal(size=n) * 3 + 1j * rng.normal(size=n)
    return lower, diag, upper


@pytest.mark.parametrize("n", [1, 2, 5, 41])
def test_tridiag_inverse_matches_banded_solver(backend, rng, n):
    lower, diag, upper = _random_bands(rng, n)
    inv = kernels.tridiag_inverse(lower, diag, upper)
    ab = np.zeros((3, n), dtype=complex)
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    ref = solve_banded((1, 1), ab, np.eye(n, dtype=complex))
    assert np.allclose(inv, ref, rtol=1e-12, atol=1e-12)


def test_tridiag_inverse_needs_pivoting(backend):
    # zero leading diagonal entry: only partial pivoting gets through
    inv = kernels.tridiag_inverse(np.array([1.0, 1.0]), np.array([0.0, 2.0, 3.0]), np.array([1.0, 1.0]))
    mat = np.diag([0.0, 2.0, 3.0]) + np.diag([1.0, 1.0], 1) + np.diag([1.0, 1.0], -1)
    assert np.allclose(inv @ mat, np.eye(3), atol=1e-14)


def test_tridiag_inverse_singular(backend):
    assert kernels.tridiag_inverse(np.zeros(2), np.array([1.0, 0.0, 1.0]), np.zeros(2)) is None


@needs_numba
def test_tridiag_backends_agree(rng):
    lower, diag, upper = _random_bands(rng, 60)
    a = kernels.tridiag_inverse(lower, diag, upper, backend="numba")
    b = kernels.tridiag_inverse(lower, diag, upper, backend="numpy")
    assert np.allclose(a, b, rtol=1e-11, atol=1e-13)


def test_winding_circle(backend):
    k = np.linspace(0, 2 * np.pi, 512, endpoint=False)
    circle = np.exp(1j * k)
    counts, min_abs = kernels.winding_numbers(np.array([0.0, 0.5, 2.0, -3.0]), circle)
    assert counts.tolist() == [1, 1, 0, 0]
    assert np.allclose(min_abs, [1.0, 0.5, 1.0, 2.0], atol=1e-4)
    counts, _ = kernels.winding_numbers(np.array([0.0]), np.exp(-2j * k))
    assert counts.tolist() == [-2]


@needs_numba
def test_winding_backends_agree(rng):
    k = np.linspace(-np.pi, np.pi, 300, endpoint=False)
    curve = 3 * np.cos(k) + 1j * np.sin(k) + 0.3 * np.exp(3j * k)
    offsets = rng.uniform(-5, 5, size=200)
    a = kernels.winding_numbers(offsets, curve, backend="numba")
    b = kernels.winding_numbers(offsets, curve, backend="numpy")
    assert np.array_equal(a[0], b[0])
    assert np.allclose(a[1], b[1], rtol=1e-14)


def _decay_params(rate, omega_d=0.0, drive=0.0):
    p = np.zeros(kernels.N_PARAMS)
    p[kernels.P_OMEGA] = 2 * math.pi
    p[kernels.P_GAMMA] = rate
    p[kernels.P_DRIVE_RE] = drive
    p[kernels.P_OMEGA_D] = omega_d
    return p


def test_meanfield_exponential_decay(backend):
    t = np.linspace(0, 2, 41)
    status, filled, _, out = kernels.integrate_meanfield(_decay_params(1.3), np.array([1.0 + 0j]), t)
    assert status == kernels.STATUS_OK and filled == t.size
    assert np.allclose(out[:, 0], np.exp(-0.65 * t), rtol=1e-8, atol=1e-12)


def test_meanfield_driven_steady_state(backend):
    # d a/dt = -gamma/2 a - d e^{-i w t}: a -> -d e^{-i w t} / (gamma/2 - i w)
    gamma, w, d = 2.0, 3.0, 0.7
    t = np.linspace(0, 30, 301)
    _, _, _, out = kernels.integrate_meanfield(_decay_params(gamma, w, d), np.zeros(1, complex), t)
    exact = -d / (gamma / 2 - 1j * w) * (np.exp(-1j * w * t) - np.exp(-gamma / 2 * t))
    assert np.allclose(out[:, 0], exact, rtol=1e-7, atol=1e-9)


def test_meanfield_blowup_status(backend):
    p = _decay_params(-40.0)
    t = np.linspace(0, 100, 11)
    status, filled, _, _ = kernels.integrate_meanfield(p, np.array([1.0 + 0j]), t, blowup=1e100)
    assert status == kernels.STATUS_BLOWUP
    assert 1 <= filled < t.size


def test_meanfield_rejects_bad_shapes():
    with pytest.raises(ValueError):
        kernels.integrate_meanfield(np.zeros(3), np.zeros(1, complex), np.linspace(0, 1, 3))
    with pytest.raises(ValueError):
        kernels.integrate_meanfield(np.zeros(kernels.N_PARAMS), np.zeros(2, complex), np.linspace(0, 1, 3))


@needs_numba
@pytest.mark.parametrize("three_mode", [False, True])
def test_meanfield_backends_agree(three_mode):
    params = ModelParams(3.0, 2.0, 2.0, 2.5)
    drive = DriveSpec(1.0, -3, 0.4)
    t = np.linspace(0, 3, 97)
    if three_mode:
        micro = MicroParams.from_effective(params, 40 * params.omega_mod, 60 * params.omega_mod)
        p, y0 = _pack(params, drive, micro), np.zeros(3, complex)
    else:
        p, y0 = _pack(params, drive), np.zeros(1, complex)
    a = kernels.integrate_meanfield(p, y0, t, backend="numba")[3]
    b = kernels.integrate_meanfield(p, y0, t, backend="numpy")[3]
    scale = np.abs(b).max()
    assert np.abs(a - b).max() < 1e-6 * scale


def test_env_flag_selects_numpy():
    code = "from floqamp import _accel; print(_accel.get_backend())"
    env = {"FLOQAMP_BACKEND": "numpy", "PATH": ""}
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_set_backend_validates():
    with pytest.raises(ValueError):
        _accel.set_backend("fortran")
    with pytest.raises(ValueError):
        _accel.resolve("gpu")
