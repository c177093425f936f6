import numpy as np
import pytest

from floqamp.errors import ParameterError, SingularSystemError
from floqamp.green import (
    chiral_operator,
    doubled_matrix,
    green_function,
    resolvent_matrix,
    singular_triples,
    zero_channel,
)
from floqamp.model import ModelParams, scaled_params, scaled_params_at_beta, transient_params
from floqamp.sambe import build_sambe, default_truncation

from conftest import random_params


def test_inverse_and_residual(backend, rng):
    for _ in range(5):
        p = random_params(rng)
        s = build_sambe(p, 15)
        wbar = float(rng.uniform(0, p.omega_mod))
        g = green_function(s, wbar)
        m = resolvent_matrix(s, wbar)
        assert np.abs(m @ g.entries - np.eye(s.dim)).max() <= 1e-8 * g.condition * 1e-4
        assert np.allclose(g.entries, np.linalg.inv(m), rtol=1e-9, atol=1e-12 * np.abs(g.entries).max())
        cond = np.linalg.cond(m, 1)
        assert g.condition == pytest.approx(cond, rel=1e-6)


def test_element_accessor(near_critical_params):
    s = build_sambe(near_critical_params, 30)
    g = green_function(s, 0.0)
    assert g.element(19, -19) == g.entries[19 + 30, -19 + 30]
    assert g.harmonics[0] == -30
    assert not g.entries.flags.writeable


def test_decoupled_lattice_is_diagonal():
    p = ModelParams(0, 0, 0, 0)
    s = build_sambe(p, 5)
    g = green_function(s, 0.5)
    assert np.count_nonzero(g.entries - np.diag(np.diag(g.entries))) == 0
    assert np.allclose(np.diag(g.entries), 1 / (0.5 + p.omega_mod * s.harmonics))


def test_exact_eigenvalue_is_singular():
    s = build_sambe(ModelParams(0, 0, 0, 0), 5)
    with pytest.raises(SingularSystemError):
        green_function(s, 0.0)


def test_topological_critical_point_is_singular():
    # beta = 1, s = 3: the zero singular value sits at machine precision
    p = scaled_params_at_beta(1.0, 3.0)
    with pytest.raises(SingularSystemError) as info:
        green_function(build_sambe(p, default_truncation(p)), 0.0)
    assert info.value.condition > 1e15


def test_off_diagonal_lobe(near_critical_params):
    # output harmonic +n0, input harmonic -n0
    s = build_sambe(near_critical_params, default_truncation(near_critical_params))
    mag = np.abs(green_function(s, 0.0).entries)
    i, j = np.unravel_index(np.argmax(mag), mag.shape)
    assert (s.harmonics[i], s.harmonics[j]) == (19, -19)


def test_doubled_matrix_is_hermitian_and_chiral():
    s = build_sambe(transient_params(), 8)
    d = doubled_matrix(s, 0.3)
    gamma = chiral_operator(s.dim)
    assert np.allclose(d, d.conj().T)
    assert np.allclose(gamma @ d @ gamma, -d)
    ev = np.linalg.eigvalsh(d)
    assert np.allclose(ev, -ev[::-1], atol=1e-12 * np.abs(ev).max())


@pytest.mark.parametrize("params", [transient_params(), scaled_params(19.5), ModelParams(3, 2, 1, 0.5, phi=0.4)])
def test_triples_satisfy_definition(params):
    s = build_sambe(params, 25)
    m = resolvent_matrix(s, 0.0)
    triples = singular_triples(s, 0.0, 6)
    ref = np.linalg.svd(m, compute_uv=False)[::-1]
    scale = ref[-1]
    for l, t in enumerate(triples):
        assert t.value == pytest.approx(ref[l], abs=1e-10 * scale)
        assert np.linalg.norm(m @ t.v - t.value * t.u) < 1e-9 * scale
        assert np.linalg.norm(m.conj().T @ t.u - t.value * t.v) < 1e-9 * scale
        assert np.linalg.norm(t.u) == pytest.approx(1.0)
        k = np.argmax(np.abs(t.u))
        assert abs(t.u[k].imag) < 1e-12 and t.u[k].real > 0


def test_doubled_and_svd_methods_agree():
    s = build_sambe(scaled_params(19.5), 30)
    a = singular_triples(s, 0.0, 3, method="doubled")
    b = singular_triples(s, 0.0, 3, method="svd")
    for x, y in zip(a, b):
        assert x.value == pytest.approx(y.value, rel=1e-6, abs=1e-12)
    # the zero channel is isolated; E1 and E2 form a near-degenerate pair
    assert abs(np.vdot(a[0].u, b[0].u)) == pytest.approx(1.0, abs=1e-8)
    assert abs(np.vdot(a[0].v, b[0].v)) == pytest.approx(1.0, abs=1e-8)
    for attr in ("u", "v"):
        pa = sum(np.outer(getattr(t, attr), getattr(t, attr).conj()) for t in a[1:])
        pb = sum(np.outer(getattr(t, attr), getattr(t, attr).conj()) for t in b[1:])
        assert np.abs(pa - pb).max() < 1e-6


def test_degenerate_kernel_is_handled():
    # decoupled lattice at omega_bar = 0: an exact zero singular value
    s = build_sambe(ModelParams(0, 0, 0, 0), 3)
    t0 = singular_triples(s, 0.0, 1)[0]
    assert t0.value < 1e-12
    assert np.abs(t0.u).argmax() == s.index(0)
    assert abs(abs(np.vdot(t0.u, t0.v)) - 1) < 1e-12


def test_triple_count_validation():
    s = build_sambe(transient_params(), 4)
    with pytest.raises(ParameterError):
        singular_triples(s, 0.0, 0)
    with pytest.raises(ParameterError):
        singular_triples(s, 0.0, s.dim + 1)
    with pytest.raises(ParameterError):
        singular_triples(s, 0.0, 1, method="qr")


def test_zero_channel_dominates_green(near_critical_params):
    s = build_sambe(near_critical_params, default_truncation(near_critical_params))
    g = green_function(s, 0.0).entries
    approx = zero_channel(s, 0.0)
    assert np.abs(g - approx).max() < 1e-3 * np.abs(g).max()


def test_phase_reversal_transposes_green(rng):
    p = random_params(rng, phi=0.9)
    a = green_function(build_sambe(p, 12), 0.7).entries
    b = green_function(build_sambe(p.replace(phi=-0.9), 12), 0.7).entries
    assert np.allclose(np.abs(a), np.abs(b.T), rtol=0, atol=1e-12 * np.abs(a).max())
