"""Floquet-Green's function and its singular value structure.

``G(w) = (w - H)^{-1}`` is obtained from a banded solve of the tridiagonal
Sambe matrix. Its singular triples come from the doubled Hermitian matrix

    D(w) = [[0, w - H], [(w - H)^dagger, 0]]

whose eigenvectors ``(u, +-v)`` with eigenvalues ``+-E`` satisfy
``(w - H) v = E u`` and ``(w - H)^dagger u = E v``, so that
``G = sum_l v_l u_l^dagger / E_l``: ``u`` is the input profile and ``v`` the
output profile of channel ``l``.
"""
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError, SingularSystemError

# cond_1 above this is treated as singular (cond * eps ~ 0.1)
MAX_CONDITION = 1e15


@dataclass(frozen=True)
class GreenFunction:
    omega_bar: float
    entries: np.ndarray
    n_trunc: int
    condition: float

    @property
    def harmonics(self):
        return np.arange(-self.n_trunc, self.n_trunc + 1)

    def element(self, n, m):
        return self.entries[n + self.n_trunc, m + self.n_trunc]


@dataclass(frozen=True)
class SingularTriple:
    value: float
    u: np.ndarray
    v: np.ndarray


def resolvent_matrix(sambe, omega_bar):
    """Dense ``omega_bar * I - H``."""
    return omega_bar * np.eye(sambe.dim) - sambe.entries


def green_function(sambe, omega_bar, max_condition=MAX_CONDITION, backend=None):
    """Solve ``(omega_bar - H) G = I`` with the banded kernel.

    Raises :class:`SingularSystemError` when the 1-norm condition number
    of ``omega_bar - H`` exceeds ``max_condition``.
    """
    lower, diag, upper = sambe.bands()
    diag = omega_bar - diag
    lower = -lower
    upper = -upper
    inv = kernels.tridiag_inverse(lower, diag, upper, backend=backend)
    if inv is None or not np.all(np.isfinite(inv)):
        raise SingularSystemError(f"omega_bar={omega_bar} hits an eigenvalue exactly")
    norm_m = np.linalg.norm(resolvent_matrix(sambe, omega_bar), 1)
    cond = float(norm_m * np.linalg.norm(inv, 1))
    if cond > max_condition:
        raise SingularSystemError(
            f"omega_bar={omega_bar} is numerically on an eigenvalue (cond_1 ~ {cond:.3e})",
            condition=cond,
        )
    inv.setflags(write=False)
    return GreenFunction(float(omega_bar), inv, sambe.n_trunc, cond)


def doubled_matrix(sambe, omega_bar):
    """Hermitian block matrix ``[[0, M], [M^dagger, 0]]`` with ``M = omega_bar - H``."""
    m = resolvent_matrix(sambe, omega_bar)
    dim = sambe.dim
    out = np.zeros((2 * dim, 2 * dim), dtype=complex)
    out[:dim, dim:] = m
    out[dim:, :dim] = m.conj().T
    return out


def chiral_operator(dim):
    return np.diag(np.concatenate([np.ones(dim), -np.ones(dim)]))


def _fix_phase(u):
    k = np.argmax(np.abs(u))
    return u * (abs(u[k]) / u[k])


def _leading_basis(vectors, rank):
    q, _, _ = np.linalg.svd(vectors, full_matrices=False)
    return q[:, :rank]


def _clusters(values, tol):
    groups, current = [], [0]
    for i in range(1, len(values)):
        if values[i] - values[current[0]] <= tol:
            current.append(i)
        else:
            groups.append(current)
            current = [i]
    groups.append(current)
    return groups


def singular_triples(sambe, omega_bar, count=None, method="doubled"):
    """The ``count`` smallest singular triples of ``omega_bar - H``, ascending.

    ``method="doubled"`` diagonalises the doubled Hermitian matrix;
    ``method="svd"`` calls LAPACK's SVD directly (used as a cross-check).
    Phases: the largest component of ``u`` is real positive and ``v`` is
    aligned with ``M^dagger u``.
    """
    dim = sambe.dim
    if count is None:
        count = dim
    if not 1 <= count <= dim:
        raise ParameterError(f"count must lie in [1, {dim}], got {count}")
    m = resolvent_matrix(sambe, omega_bar)
    if method == "svd":
        left, s, right_h = np.linalg.svd(m)
        order = np.argsort(s)[:count]
        out = []
        for l in order:
            k = np.argmax(np.abs(left[:, l]))
            phase = abs(left[k, l]) / left[k, l]
            out.append(SingularTriple(float(s[l]), left[:, l] * phase, right_h[l].conj() * phase))
        return out
    if method != "doubled":
        raise ParameterError(f"unknown method {method!r}")

    evals, evecs = np.linalg.eigh(doubled_matrix(sambe, omega_bar))
    pos = evals[dim:]
    scale = max(abs(evals[-1]), 1e-300)
    # E_l pairs +evals[dim + l] with -evals[dim - 1 - l]
    energies = 0.5 * (pos - evals[dim - 1 :: -1])
    energies = np.maximum(energies, 0.0)
    tiny = 1e-8 * scale
    triples = []
    for group in _clusters(energies, 1e-9 * scale):
        if len(triples) >= count:
            break
        cols = [dim + l for l in group] + [dim - 1 - l for l in group]
        u_basis = _leading_basis(evecs[:dim, cols], len(group))
        if energies[group[0]] <= tiny:
            v_basis = _leading_basis(evecs[dim:, cols], len(group))
        else:
            v_basis = None
        for j, l in enumerate(group):
            e = float(energies[l])
            u = _fix_phase(u_basis[:, j])
            mu = m.conj().T @ u
            if e > tiny:
                v = mu / np.linalg.norm(mu)
            else:
                v = v_basis[:, j]
                overlap = np.vdot(v, mu)
                if overlap != 0:
                    v = v * (abs(overlap) / overlap).conjugate()
                v = v / np.linalg.norm(v)
            triples.append(SingularTriple(e, u, v))
    return triples[:count]


def zero_channel(sambe, omega_bar):
    """Rank-one approximation ``v0 u0^dagger / E0`` of the Green's function."""
    t0 = singular_triples(sambe, omega_bar, 1)[0]
    return np.outer(t0.v, t0.u.conj()) / t0.value
